"""Compiled vs numpy kernels on the two hot loops.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from skewjensen import _backend


def cases(rng):
    X = rng.dirichlet(np.ones(64), size=2000)
    C = rng.dirichlet(np.ones(64), size=8)
    P = rng.dirichlet(np.ones(256), size=500)
    w = np.full(len(P), 1.0 / len(P))
    return {
        "sym_jensen_matrix 2000x8 d=64": lambda k: k.sym_jensen_matrix(X, C, 0.25, 0),
        "cccp_solve n=500 d=256 a=0.25": lambda k: k.cccp_solve(P, w, 0.25, 0, P.mean(axis=0), 1e-10, 10000),
        "cccp_solve n=500 d=256 a=0.01": lambda k: k.cccp_solve(P, w, 0.01, 0, P.mean(axis=0), 1e-10, 10000),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    impls = {"python": _backend.python_kernels}
    if _backend.BACKEND == "compiled":
        impls["compiled"] = _backend.kernels
    else:
        print("compiled extension not built; timing the numpy fallback only")
    print(f"{'case':34s}" + "".join(f"{name:>12s}" for name in impls) + "    speedup")
    for label, fn in cases(np.random.default_rng(0)).items():
        times = {name: min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
                 for name, k in impls.items()}
        speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{label:34s}" + "".join(f"{t * 1e3:10.1f}ms" for t in times.values()) + f"{speed:10.1f}x")


if __name__ == "__main__":
    main()
