"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from geodesic_coder import boundary, build, kernels


def cases():
    s = build(2)
    part = boundary.parse_partition(s, "midpoints")
    attr = boundary.attractor(s, part)
    ta, tb = boundary.generator_arrays(s)
    rng = np.random.default_rng(0)
    u = rng.uniform(0, 2 * np.pi, 200_000)
    w = rng.uniform(0, 2 * np.pi, 200_000)
    tol = 1e-9
    return {
        "strip_index": lambda f: f(w, part.base, part.offsets, tol),
        "extension_orbit": lambda f: f(u[:50_000], w[:50_000], ta, tb, part.base, part.offsets,
                                       tol, 16),
        "extension_occupancy": lambda f: f(u[:50_000], w[:50_000], ta, tb, part.base,
                                           part.offsets, tol, 16, 8, 256),
        "step_member": lambda f: f(u, w, attr.base, attr.breaks, attr.lo, attr.span, tol),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if kernels.BACKEND != "cython":
        print("compiled kernels not available; build with python3 setup.py build_ext --inplace")
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    print(f"{'kernel':<22}" + "".join(f"{b:>12}" for b in backends) + "     speedup")
    for name, call in cases().items():
        best = {}
        for b in backends:
            f = kernels.get(name, b)
            best[b] = min(timeit.repeat(lambda: call(f), number=1, repeat=args.repeat))
        row = f"{name:<22}" + "".join(f"{best[b] * 1e3:>10.1f}ms" for b in backends)
        if "cython" in best:
            row += f"{best['python'] / best['cython']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
