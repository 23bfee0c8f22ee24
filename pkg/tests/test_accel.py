import json
import os
import subprocess
import sys

import numpy as np

from laplab import RadialGrid, SpectralParam, soft_power
from laplab._accel import USE_NUMBA
from laplab.radial import kernels
from laplab.radial.farfield import reduced_potential
from laplab.radial.modes import stage_radii

SCRIPT = """
import json, numpy as np
from laplab import RadialGrid, SpectralParam, soft_power
from laplab._accel import USE_NUMBA
from laplab.experiments.sources import bump_field
from laplab.radial import apply_resolvent
grid = RadialGrid.for_wavenumber(2.0, 40.0)
phi = apply_resolvent(soft_power(), SpectralParam(1.0, 0.1), bump_field(grid, 1, (2.0, 8.0)))
print(json.dumps({"numba": USE_NUMBA, "re": phi.u[0, ::97].real.tolist(), "im": phi.u[0, ::97].imag.tolist()}))
"""


def run(disable):
    env = dict(os.environ)
    env.pop("LAPLAB_DISABLE_NUMBA", None)
    if disable:
        env["LAPLAB_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True,
                         check=True)
    return json.loads(out.stdout)


def test_env_var_selects_numpy_path_with_same_results():
    a, b = run(False), run(True)
    assert b["numba"] is False
    np.testing.assert_allclose(np.array(a["re"]) + 1j * np.array(a["im"]),
                               np.array(b["re"]) + 1j * np.array(b["im"]), rtol=1e-10, atol=1e-14)


def test_kernel_variants_agree():
    grid = RadialGrid.for_wavenumber(2.0, 30.0)
    Q = 2.0 * (reduced_potential(soft_power(), 2, stage_radii(grid)) - SpectralParam(0.5, 0.01).z)
    T1, P1 = kernels.transfer_numpy(grid.steps, Q)
    y0 = np.array([1.0, 0.3j])
    if USE_NUMBA:
        T2, P2 = kernels.transfer_numba(grid.steps, Q)
        np.testing.assert_allclose(T2, T1, rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(P2, P1, rtol=1e-12, atol=1e-14)
        for fwd in (True, False):
            np.testing.assert_allclose(kernels.propagate_numba(T1, y0, fwd),
                                       kernels.propagate_numpy(T1, y0, fwd), rtol=1e-12)
    det = T1[:, 0, 0] * T1[:, 1, 1] - T1[:, 0, 1] * T1[:, 1, 0]
    np.testing.assert_allclose(det, 1.0, atol=1e-12)  # trace-free system: transfer preserves area
