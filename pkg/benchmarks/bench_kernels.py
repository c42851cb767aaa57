"""Time the compiled kernels against the numpy fallback on full-size trace inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from wgdoublet import kernels
from wgdoublet.config import paper_config
from wgdoublet.estimation import fit_lorentzian_pair
from wgdoublet.response import trace_row


def cases():
    f = np.linspace(-4e4, 4e4, 2001)
    c = np.array([-3230.0, 3230.0])
    w = np.array([1206.8, 1206.8])
    a = np.array([1.0, 1.0], dtype=complex)
    rng = np.random.default_rng(0)
    noisy = rng.normal(size=2001).cumsum()
    yield "pole_sum (2001 pts)", lambda b: kernels.pole_sum(f, c, w, a, backend=b)
    yield "pole_sum_abs (2001 pts)", lambda b: kernels.pole_sum_abs(f, c, w, a, backend=b)
    yield "peak_scan (2001 pts, random walk)", lambda b: kernels.peak_scan(noisy, 1.0, backend=b)


def bench_fit(repeat):
    cfg = paper_config()
    f = cfg.sweep.f_axis()
    db = trace_row(cfg.medium, cfg.cavity, -0.5e-3, f, 20.0, 1, 0)
    opts = cfg.fit.options()
    orig = kernels._impl
    out = {}
    for backend in kernels.available_backends():
        kernels._impl = kernels._select(backend)
        out[backend] = min(timeit.repeat(lambda: fit_lorentzian_pair(f, db, options=opts), number=1, repeat=repeat))
    kernels._impl = orig
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"active backend: {kernels.BACKEND}; available: {', '.join(backends)}")
    print(f"{'kernel':40s}" + "".join(f"{b:>14s}" for b in backends) + "   speedup")
    for name, fn in cases():
        times = []
        for b in backends:
            n = 200
            times.append(min(timeit.repeat(lambda: fn(b), number=n, repeat=args.repeat)) / n)
        speed = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else ""
        print(f"{name:40s}" + "".join(f"{t * 1e6:11.1f} us" for t in times) + "  " + speed)
    fit = bench_fit(args.repeat)
    line = "".join(f"{fit[b] * 1e3:11.1f} ms" for b in backends)
    speed = f"{fit['python'] / fit['cython']:8.1f}x" if len(fit) > 1 else ""
    print(f"{'noisy two-pole fit (one row)':40s}" + line + "  " + speed)


if __name__ == "__main__":
    main()
