"""Times the numpy kernels against their numba twins.

Run as a script: python benchmarks/bench_kernels.py
The first numba call per kernel includes compilation (cached on disk),
so every kernel is warmed before timing.
"""

import time

import numpy as np

from coopadv import _kernels


def time_call(fn, *args, repeats=30):
    fn(*args)  # warmup / jit
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def bench(dims, batch):
    dims_arr = np.asarray(dims, dtype=np.int64)
    rng = np.random.default_rng(0)
    params = rng.normal(0, 0.3, size=_kernels.param_count(dims_arr))
    x = rng.uniform(0, 1, size=(batch, dims[0]))
    lg = rng.normal(size=batch)

    np_k = _kernels.numpy_kernels()
    nb_k = _kernels.numba_kernels()
    names = ("value_batch", "input_grad_batch", "backward_single", "backward_batch")
    argsets = (
        (params, dims_arr, x),
        (params, dims_arr, x),
        (params, dims_arr, x[0], lg[0]),
        (params, dims_arr, x, lg),
    )
    print(f"dims={dims} batch={batch}")
    for name, npf, nbf, args in zip(names, np_k, nb_k, argsets):
        t_np = time_call(npf, *args)
        t_nb = time_call(nbf, *args)
        ratio = t_np / t_nb if t_nb > 0 else float("inf")
        print(f"  {name:18s} numpy {t_np * 1e6:9.1f}us  numba {t_nb * 1e6:9.1f}us  x{ratio:.2f}")


def main():
    try:
        _kernels.numba_kernels()
    except ImportError:
        print("numba unavailable; nothing to compare")
        return
    for dims, batch in (((16, 64, 64, 1), 64), ((16, 64, 64, 1), 512), ((48, 128, 128, 1), 256)):
        bench(dims, batch)


if __name__ == "__main__":
    main()
