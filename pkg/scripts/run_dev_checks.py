#!/usr/bin/env python
"""Run the local code checks"""
import subprocess

from rich.console import Console
from rich.style import Style

console = Console(width=120)

LOCAL_CHECKS = [
    ("Run isort", "isort pauliflow/ tests/ scripts/ --profile black"),
    ("Run Black", "black pauliflow/ tests/ scripts/"),
    ("Python Pylint", "pylint pauliflow --disable=all --enable=unused-import"),
    ("Test with pytest", "pytest -n auto tests/"),
]


def run_command(command: str) -> bool:
    """Run a command and report if it fails

    Args:
        command: command to run
    """
    ret_code = subprocess.call(command, shell=True)
    if ret_code != 0:
        console.print(f"[bold red]Error: `{command}` failed.")
    return ret_code == 0


def run_checks() -> bool:
    success = True
    for name, command in LOCAL_CHECKS:
        console.line()
        console.rule(f"[bold green]{name}: {command}")
        success = run_command(command) and success

    console.line()
    if success:
        console.rule(characters="=")
        console.print(
            "[bold green]:TADA: :TADA: :TADA: ALL CHECKS PASSED :TADA: :TADA: :TADA:",
            justify="center",
        )
        console.rule(characters="=")
    else:
        console.rule(characters="=", style=Style(color="red"))
        console.print(
            "[bold red]:skull: :skull: :skull: ERRORS FOUND :skull: :skull: :skull:",
            justify="center",
        )
        console.rule(characters="=", style=Style(color="red"))
    return success


if __name__ == "__main__":
    raise SystemExit(0 if run_checks() else 1)
