import time
from typing import Callable

import pauliflow
from pauliflow.pauli import ProductState


class Profiler:
    def __init__(self, warmup=1, repeat=5):
        self.warmup = warmup
        self.repeat = repeat

    def __call__(self, func: Callable):
        # warmup
        for _ in range(self.warmup):
            func()

        # profile
        tic = time.perf_counter()
        for _ in range(self.repeat):
            func()
        return (time.perf_counter() - tic) / self.repeat  # in s


def main():
    profiler = Profiler(warmup=1, repeat=5)
    circuit = pauliflow.random_clifford_t_circuit(4, 4, 8, 0.3, seed=42)
    obs = pauliflow.Observable.parse("Z5Z6 + 0.5*X9", circuit.n)
    state = ProductState.plus(circuit.n)

    for threads in (1, 4):
        for ell in (8, 12, 16):
            print(f"* paths ell={ell} threads={threads}")
            fn = lambda: pauliflow.expectation_truncated(
                circuit, obs, state, 0.1, ell, threads=threads
            )
            stats = pauliflow.count_paths(circuit, obs.terms[0][1], ell)
            secs = profiler(fn)
            print(f"{secs * 1e3:.2f} ms, {stats.total} paths, {stats.pruned} pruned")

    print("* dense oracle, 3x3")
    small = pauliflow.random_clifford_t_circuit(3, 3, 8, 0.3, seed=42)
    obs = pauliflow.Observable.parse("Z4 + 0.5*X1X2", small.n)
    state = ProductState.plus(small.n)
    fn = lambda: pauliflow.exact_noisy_expectation(small, state, obs, 0.1)
    print(f"{profiler(fn) * 1e3:.2f} ms")


if __name__ == "__main__":
    main()
