"""Compare the compiled round kernel against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernel.py [--rounds N] [--repeat K]

Runs identical workloads through both backends, checks that the outputs
are bit-identical, and reports the best wall time for each.
"""

import argparse
import time

import numpy as np

from ksqkd import kernel
from ksqkd.adversary import AdversarySpec
from ksqkd.channels import NoiseSpec
from ksqkd.ksset import builtin_ks18, min_symbol_mismatch
from ksqkd.protocol import SessionConfig, run_rounds


def time_backend(backend, config, repeat):
    best = float("inf")
    log = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        log = run_rounds(config, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, log


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rounds", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    ks = builtin_ks18()
    witness = min_symbol_mismatch(ks).witness
    scenarios = [
        ("ideal", SessionConfig(rounds=args.rounds, seed=7)),
        ("depolarizing p=0.2", SessionConfig(
            rounds=args.rounds, seed=7, noise=NoiseSpec("depolarizing", 0.2))),
        ("ball attack", SessionConfig(
            rounds=args.rounds, seed=7, adversary=AdversarySpec("ball", witness))),
        ("intercept-resend", SessionConfig(
            rounds=args.rounds, seed=7, adversary=AdversarySpec("intercept_resend"))),
    ]

    backends = ["python"]
    if kernel.BACKEND == "cython":
        backends.insert(0, "cython")
    else:
        print("compiled kernel unavailable; timing the fallback only")

    print(f"{args.rounds} rounds per scenario, best of {args.repeat}\n")
    header = f"{'scenario':<22}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for name, config in scenarios:
        times, logs = [], []
        for b in backends:
            dt, log = time_backend(b, config, args.repeat)
            times.append(dt)
            logs.append(log)
        if len(logs) == 2:
            for field in ("alice_basis", "alice_state", "bob_basis",
                          "bob_outcome", "alice_symbol", "sifted"):
                assert np.array_equal(getattr(logs[0], field),
                                      getattr(logs[1], field)), (name, field)
        row = f"{name:<22}" + "".join(f"{t * 1000:>10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)
    if len(backends) == 2:
        print("\nbackend outputs verified bit-identical")


if __name__ == "__main__":
    main()
