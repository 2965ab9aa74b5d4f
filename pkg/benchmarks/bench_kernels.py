"""Time the hot kernels on both backends.

    python3 benchmarks/bench_kernels.py [--repeat 20]

The numba functions are called directly when numba is importable, so both
columns come from one process regardless of SCHMIDTNUM_DISABLE_NUMBA.
"""

import argparse
import timeit

import numpy as np

from schmidtnum import _accel


def cases(rng):
    def stack(n, r, c):
        return np.ascontiguousarray(rng.normal(size=(n, r, c)) + 1j * rng.normal(size=(n, r, c)))

    def herm(d):
        x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        return np.ascontiguousarray(x + x.conj().T)

    return [
        ("truncate 200 x 3x3, k=1", "truncate", (stack(200, 3, 3), 1)),
        ("truncate 200 x 9x9, k=2", "truncate", (stack(200, 9, 9), 2)),
        ("truncate 64 x 6x6, k=2", "truncate", (stack(64, 6, 6), 2)),
        ("partial transpose 9x9", "pt", (herm(9), 3, 3)),
        ("partial transpose 81x81", "pt", (herm(81), 9, 9)),
        ("partial transpose 256x256", "pt", (herm(256), 16, 16)),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    impls = {"truncate": {"numpy": _accel.truncate_batch_numpy},
             "pt": {"numpy": _accel.partial_transpose_numpy}}
    if _accel.HAVE_NUMBA:
        impls["truncate"]["numba"] = _accel.truncate_batch_numba
        impls["pt"]["numba"] = _accel.partial_transpose_numba
        _accel.warmup()

    print(f"backend in use: {_accel.BACKEND}")
    print(f"{'case':32s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for name, kind, call_args in cases(np.random.default_rng(args.seed)):
        row = {}
        for backend, fn in impls[kind].items():
            fn(*call_args)
            t = min(timeit.repeat(lambda: fn(*call_args), number=1, repeat=args.repeat))
            row[backend] = 1e3 * t
        nb = row.get("numba")
        speed = f"{row['numpy'] / nb:8.2f}" if nb else "     n/a"
        nb_txt = f"{nb:10.3f}" if nb else "       n/a"
        print(f"{name:32s} {row['numpy']:10.3f} {nb_txt} {speed}")


if __name__ == "__main__":
    main()
