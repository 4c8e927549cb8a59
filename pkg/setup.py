from setuptools import find_packages, setup

__version__ = None
exec(open("pauliflow/version.py", "r").read())

setup(
    name="pauliflow",
    version=__version__,
    description="Truncated Pauli-path simulation of noisy quantum circuits",
    author="The pauliflow authors",
    keywords=["quantum", "pauli-path", "noise", "simulation", "qaoa"],
    python_requires=">=3.8",
    install_requires=[
        "rich>=12",
        "torch",
        "networkx>=2.6",
    ],
    extras_require={
        # dev dependencies. Install them by `pip install pauliflow[dev]`
        "dev": [
            "black[jupyter]==22.3.0",
            "isort==5.10.1",
            "pylint==2.13.4",
            "pytest==7.1.2",
            "pytest-xdist==2.5.0",
            "build",
            "twine",
        ],
    },
    entry_points={"console_scripts": ["pauliflow=pauliflow.cli:main"]},
    packages=find_packages(include=["pauliflow", "pauliflow.*"]),
)
