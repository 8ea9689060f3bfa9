"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--states N] [--repeat R]

Both backends are imported directly, so no environment flag is needed. The
numba kernels are called once before timing to exclude JIT compilation.
"""

import argparse
import time

import numpy as np

from geomeas._kernels import numba_backend, numpy_backend
from geomeas.oracle import sphere_grid
from geomeas.stationarity import FD_STEP, _seeds
from geomeas.states import pair_reduction, random_state


def _unit_rows(rng, n):
    z = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _cases(n_states, seed):
    rng = np.random.default_rng(seed)
    grid = sphere_grid(24)
    out = []
    for _ in range(n_states):
        s = random_state(rng)
        red = pair_reduction(s)
        T = np.ascontiguousarray(s.tensor)
        Q = [_unit_rows(rng, 36) for _ in range(3)]
        out.append((T, grid, Q, red, _seeds(red, 8)))
    return out


def _jobs(backend):
    return {
        "grid_values (576 x 576)": lambda T, grid, Q, red, seeds: backend.grid_values(T, grid, grid),
        "als_sweeps (36 starts)": lambda T, grid, Q, red, seeds: backend.als_sweeps(T, *Q, 200, 1e-12),
        "newton_multistart": lambda T, grid, Q, red, seeds: backend.newton_multistart(
            red.r1, red.r2, np.ascontiguousarray(red.g), seeds, 100, FD_STEP, 1e-15
        ),
    }


def _time(fn, cases, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for c in cases:
            fn(*c)
        best = min(best, time.perf_counter() - t0)
    return best / len(cases)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--states", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    cases = _cases(args.states, args.seed)
    backends = {"numpy": numpy_backend}
    if numba_backend is not None:
        backends["numba"] = numba_backend
        for fn in _jobs(numba_backend).values():
            fn(*cases[0])

    timings = {name: {k: _time(fn, cases, args.repeat) for k, fn in _jobs(b).items()} for name, b in backends.items()}
    print(f"{'kernel':26s}" + "".join(f"{n:>14s}" for n in backends) + ("      speedup" if len(backends) == 2 else ""))
    for kernel in timings["numpy"]:
        row = f"{kernel:26s}" + "".join(f"{timings[n][kernel] * 1e3:11.3f} ms" for n in backends)
        if "numba" in timings:
            row += f"  {timings['numpy'][kernel] / timings['numba'][kernel]:10.1f}x"
        print(row)


if __name__ == "__main__":
    main()
