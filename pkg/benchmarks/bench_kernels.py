"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import math
import timeit

import numpy as np

from accmat import kernels
from accmat.accuracy import accuracy_matrix
from accmat.estimation import mle_bloch
from accmat.povm import random_povm, sample_outcomes
from accmat.tradeoff import equality_povm


def cases():
    p = random_povm(6, seed=1)
    chi = accuracy_matrix(p).chi
    fig2 = equality_povm([0, 0, 1], [0.5, 0, math.sqrt(3) / 2], 0.1, 36 / 37)
    counts = [sample_outcomes(fig2, [1, 0, 0], 10_000, seed=t) for t in range(50)]
    return {
        "accuracy_matrix (m=6)": (lambda impl: impl.accuracy_matrix(p.r, p.v), 2000),
        "eigh3": (lambda impl: impl.eigh3(chi), 2000),
        "fisher_matrix (m=6)": (lambda impl: impl.fisher_matrix(p.r, p.v, np.zeros(3)), 2000),
        "mle_bloch x50 (fig2, N=1e4)": (lambda impl: [mle_bloch(fig2, c, backend=impl) for c in counts], 1),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = kernels.backends()
    names = sorted(backends)
    print(f"{'kernel':32s}" + "".join(f"{n:>14s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, (fn, number) in cases().items():
        times = {}
        for name in names:
            impl = backends[name]
            best = min(timeit.repeat(lambda: fn(impl), number=number, repeat=args.repeat))
            times[name] = best / number
        row = f"{label:32s}" + "".join(f"{times[n] * 1e6:12.1f}us" for n in names)
        if len(names) > 1:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
