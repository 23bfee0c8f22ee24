"""Compare the numba and numpy variants of the radial transfer kernels.

Usage: ``python3 benchmarks/bench_kernels.py [--cells N] [--repeat K]``.
Prints the best wall time of each variant and the largest difference
between their outputs.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from laplab import RadialGrid, soft_power
from laplab._accel import USE_NUMBA
from laplab.radial.farfield import reduced_potential
from laplab.radial import kernels
from laplab.radial.modes import stage_radii


def problem(cells: int):
    spec = soft_power()
    grid = RadialGrid.for_wavenumber(2.0, 0.04 * cells, dim=3, ratio=1.005, kh=0.08)
    Q = 2.0 * (reduced_potential(spec, 1, stage_radii(grid)) - (1.0 + 0.01j))
    return grid.steps, Q


def best(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    h, Q = problem(args.cells)
    y0 = np.array([0.0, 1.0], dtype=complex)
    print(f"cells={len(h)} numba_enabled={USE_NUMBA}")
    T_np = kernels.transfer_numpy(h, Q)
    rows = [("transfer", lambda: kernels.transfer_numpy(h, Q), lambda: kernels.transfer_numba(h, Q)),
            ("propagate", lambda: kernels.propagate_numpy(T_np[0], y0),
             lambda: kernels.propagate_numba(T_np[0], y0))]
    for name, f_np, f_nb in rows:
        t_np = best(f_np, args.repeat)
        line = f"{name:10s} numpy {t_np * 1e3:9.2f} ms"
        if USE_NUMBA:
            out_nb = f_nb()  # compile outside the timing
            t_nb = best(f_nb, args.repeat)
            a, b = f_np(), out_nb
            a, b = (a[0], b[0]) if isinstance(a, tuple) else (a, b)
            diff = float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300))
            line += f"   numba {t_nb * 1e3:9.2f} ms   speedup {t_np / t_nb:6.1f}x   rel.diff {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
