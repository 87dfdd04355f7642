"""Numba vs numpy timings of the two hot kernels.

    python3 benchmarks/bench_kernels.py [--batches 1 64 4096] [--repeat 5]

The polynomial tables are those of the packaged figure-eight deck (surface
equation, parameters and form), evaluated at random points near the origin.
"""

import argparse
import os
import sys
import timeit

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from parshin.deck import load_deck  # noqa: E402
from parshin.numeric import NumericSystem, kernels  # noqa: E402

DECK = os.path.join(os.path.dirname(__file__), "..", "decks", "fig8.deck")


def best_of(fn, repeat):
    number, _ = timeit.Timer(fn).autorange()
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batches", type=int, nargs="+", default=[1, 64, 4096])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    try:
        nb_eval, nb_solve = kernels._make_numba()
    except ImportError:
        print("numba is not available; nothing to compare")
        return 1
    packed = NumericSystem(load_deck(DECK).problem).packed
    tables = (packed.exps, packed.coeffs, packed.owner, packed.npoly)
    rng = np.random.default_rng(0)
    d = packed.exps.shape[1]

    print(f"{'kernel':<12}{'batch':>7}{'numpy (us)':>14}{'numba (us)':>14}{'speedup':>10}")
    for B in args.batches:
        X = 0.3 * (rng.normal(size=(B, d)) + 1j * rng.normal(size=(B, d)))
        A = rng.normal(size=(B, d, d)) + 1j * rng.normal(size=(B, d, d)) + 4 * np.eye(d)
        b = rng.normal(size=(B, d)) + 1j * rng.normal(size=(B, d))
        # compile and check agreement before timing
        ref, fast = kernels.numpy_eval_system(*tables, X), nb_eval(*tables, X)
        assert all(np.allclose(r, f) for r, f in zip(ref, fast))
        assert np.allclose(kernels.numpy_solve_batch(A, b), nb_solve(A, b))
        rows = [
            ("eval_system", lambda: kernels.numpy_eval_system(*tables, X), lambda: nb_eval(*tables, X)),
            ("solve_batch", lambda: kernels.numpy_solve_batch(A, b), lambda: nb_solve(A, b)),
        ]
        for name, f_np, f_nb in rows:
            t_np, t_nb = best_of(f_np, args.repeat), best_of(f_nb, args.repeat)
            print(f"{name:<12}{B:>7}{t_np * 1e6:>14.1f}{t_nb * 1e6:>14.1f}{t_np / t_nb:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
