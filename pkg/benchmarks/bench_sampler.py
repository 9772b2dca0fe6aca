"""Time the compiled record sampler against the NumPy fallback.

Both backends must produce byte-identical output, so this doubles as an
equality check on a larger draw than the unit tests use.

Usage: python3 benchmarks/bench_sampler.py [--n 2000000] [--reps 5]
"""

import argparse
import time

import numpy as np

from ivdeck import sampling


def build_params(pop_size: int, seed: int):
    rng = np.random.default_rng(seed)
    return [np.ascontiguousarray(rng.random(pop_size)) for _ in range(4)]


def time_backend(impl, params, n: int, seed: int, reps: int) -> float:
    best = float("inf")
    for _ in range(reps):
        started = time.perf_counter()
        impl(*params, 0.5, n, seed, 0)
        best = min(best, time.perf_counter() - started)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=2_000_000, help="records per draw")
    parser.add_argument("--reps", type=int, default=5, help="repetitions, best taken")
    parser.add_argument("--pop-size", type=int, default=64)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    impls = sampling.available_backends()
    params = build_params(args.pop_size, args.seed)

    outputs = {
        name: impl(*params, 0.5, args.n, args.seed, 0) for name, impl in impls.items()
    }
    names = sorted(outputs)
    for other in names[1:]:
        for a, b in zip(outputs[names[0]], outputs[other]):
            if not np.array_equal(np.asarray(a), np.asarray(b)):
                raise SystemExit(
                    "backend outputs differ between %s and %s" % (names[0], other)
                )
    print(
        "backends available: %s (outputs byte-identical on %d records)"
        % (", ".join(names), args.n)
    )

    timings = {
        name: time_backend(impl, params, args.n, args.seed, args.reps)
        for name, impl in impls.items()
    }
    for name in names:
        seconds = timings[name]
        print(
            "%-9s %8.1f ms  %6.1f ns/record  %7.1f M records/s"
            % (name, seconds * 1e3, seconds / args.n * 1e9, args.n / seconds / 1e6)
        )
    if len(timings) == 2:
        print("speedup: %.1fx" % (timings["numpy"] / timings["compiled"]))


if __name__ == "__main__":
    main()
