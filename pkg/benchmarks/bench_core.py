"""Timing comparison of the compiled and pure-numpy hot kernels.

Run as a script:

    python benchmarks/bench_core.py

Both backends are imported side by side (the fallback module directly,
the selected backend via synlik._core, which honours
SYNLIK_FORCE_FALLBACK) and timed on the two hot paths: the per-column
KDE evaluation that dominates the semiparametric estimator, and the
boom-bust integer path recurrence.
"""

import time

import numpy as np

from synlik._core import BACKEND, boombust_path, kde_eval
from synlik._core import fallback


def _time(fn, repeats):
    # one warm-up call, then best-of-repeats wall time
    fn()
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_kde(n=300, d=50, repeats=50):
    rng = np.random.default_rng(0)
    batch = rng.standard_normal((n, d))
    h = np.full(d, 0.3)
    obs = rng.standard_normal(d)

    selected = _time(lambda: kde_eval(batch, h, obs), repeats)
    pure = _time(lambda: fallback.kde_eval(batch, h, obs), repeats)
    return selected, pure


def bench_boombust(steps=300, repeats=200):
    rng = np.random.default_rng(1)
    uniforms = rng.random((steps, 2))
    args = (uniforms, 50, 0.4, 50.0, 0.09, 0.05)

    selected = _time(lambda: boombust_path(*args), repeats)
    pure = _time(lambda: fallback.boombust_path(*args), repeats)
    if not np.array_equal(boombust_path(*args), fallback.boombust_path(*args)):
        raise AssertionError("backends disagree on the boom-bust path")
    return selected, pure


def main():
    print(f"selected backend: {BACKEND}")
    rows = [
        ("kde_eval (n=300, d=50)",) + bench_kde(),
        ("boombust_path (300 steps)",) + bench_boombust(),
    ]
    print(f"{'kernel':<28}{'selected':>12}{'fallback':>12}{'speedup':>9}")
    for name, selected, pure in rows:
        print(f"{name:<28}{selected * 1e6:>10.1f}us{pure * 1e6:>10.1f}us"
              f"{pure / selected:>8.1f}x")


if __name__ == "__main__":
    main()
