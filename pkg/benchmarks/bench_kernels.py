"""Compiled vs pure-Python kernels.

Times the harmonic series evaluation on a grid (as in nodal counting) and
the union-find labelling of a sign field, and checks the two backends agree.

    python benchmarks/bench_kernels.py [--points 1000000] [--grid 1024] [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from steklov_neumann import _kernels_py as pure

try:
    from steklov_neumann import _kernels as compiled
except ImportError:  # extension not built
    compiled = None


def series_case(points: int, N: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.6, 1.9, points)
    t = rng.uniform(0, 2 * np.pi, points)
    alpha = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    beta = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    return (r * np.cos(t), r * np.sin(t), 0.3, -0.2, alpha, beta, 2.0, 0.5)


def sign_case(n: int):
    # sign pattern of a mode with many nodal lines, plus a zero band
    y, x = np.mgrid[-1:1:n * 1j, -1:1:n * 1j]
    u = np.sin(7 * x + 2 * y) * np.cos(5 * y - x)
    s = np.sign(u).astype(np.int8)
    s[np.abs(u) < 1e-2] = 0
    return s


def best_of(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, default=1_000_000)
    p.add_argument("--terms", type=int, default=24)
    p.add_argument("--grid", type=int, default=1024)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if compiled is None:
        raise SystemExit("compiled extension not available; build with pip install -e . --no-build-isolation")

    case = series_case(args.points, args.terms)
    sign = sign_case(args.grid)
    rows = []
    for label, fn_pure, fn_comp in (
        (f"harmonic_series values ({args.points} pts, N={args.terms})",
         lambda: pure.harmonic_series(*case), lambda: compiled.harmonic_series(*case)),
        (f"harmonic_series + gradient ({args.points} pts, N={args.terms})",
         lambda: pure.harmonic_series(*case, gradient=True), lambda: compiled.harmonic_series(*case, gradient=True)),
        (f"label_components ({args.grid}x{args.grid})",
         lambda: pure.label_components(sign), lambda: compiled.label_components(sign)),
    ):
        a, b = fn_pure(), fn_comp()
        if isinstance(a[0], np.ndarray) and a[0].ndim == 2:  # labelling
            assert a[1] == b[1] and np.array_equal(a[0], b[0]), "backends disagree"
        else:
            for u, v in zip(np.atleast_2d(a), np.atleast_2d(b)):
                assert np.max(np.abs(u - v)) <= 1e-12 * np.max(np.abs(u)), "backends disagree"
        tp, tc = best_of(fn_pure, args.repeat), best_of(fn_comp, args.repeat)
        rows.append((label, tp, tc))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'python [s]':>10}  {'compiled [s]':>12}  {'speedup':>7}")
    for label, tp, tc in rows:
        print(f"{label:<{width}}  {tp:10.4f}  {tc:12.4f}  {tp / tc:7.1f}")


if __name__ == "__main__":
    main()
