import json
import os
import subprocess
import sys

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from joyce_hkt import _kernels as K
from joyce_hkt.connections import bismut_lambda
from joyce_hkt.forms import layer_metric

from conftest import su5, table_for


def test_jacobi_agree_on_real_algebra():
    c = np.ascontiguousarray(table_for((("A", 3),), 0).bracket_tensor.real)
    assert K.jacobi_max_np(c) < 1e-10
    assert abs(K.jacobi_max_np(c) - K.jacobi_max_nb(c)) < 1e-12


def test_derivation_kernels_agree():
    c, hc = su5()
    conn = bismut_lambda(layer_metric(c, [2.0, 1.0]), hc)
    a3 = K.derivation3_max_np(conn.lam, conn.torsion)
    b3 = K.derivation3_max_nb(conn.lam, conn.torsion)
    assert abs(a3 - b3) <= 1e-12 * max(1.0, a3)
    a4 = K.derivation4_max_np(conn.lam, conn.curvature)
    b4 = K.derivation4_max_nb(conn.lam, conn.curvature)
    assert abs(a4 - b4) <= 1e-12 * max(1.0, a4)


@given(st.integers(0, 2**31 - 1))
def test_kernels_agree_random(seed):
    rng = np.random.default_rng(seed)
    n = 5
    c = rng.normal(size=(n, n, n))
    c = c - c.transpose(1, 0, 2)  # the Jacobi kernels assume an antisymmetric bracket
    lam = rng.normal(size=(n, n, n))
    t = rng.normal(size=(n, n, n))
    r = rng.normal(size=(n, n, n, n))
    assert np.isclose(K.jacobi_max_np(c), K.jacobi_max_nb(c), rtol=1e-12)
    assert np.isclose(K.derivation3_max_np(lam, t), K.derivation3_max_nb(lam, t), rtol=1e-12)
    assert np.isclose(K.derivation4_max_np(lam, r), K.derivation4_max_nb(lam, r), rtol=1e-12)


def test_numba_flag_selects_numpy_backend():
    env = dict(os.environ, JOYCE_HKT_NUMBA="0")
    code = (
        "import json; from joyce_hkt._backend import backend_name;"
        "from joyce_hkt.cli import main; print(json.dumps(backend_name()))"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert json.loads(out.stdout) == "numpy"
    cmd = [sys.executable, "-m", "joyce_hkt.cli", "verify", "--preset", "su3-group", "--json-only"]
    rep = subprocess.run(cmd, env=env, capture_output=True, text=True, check=False)
    assert rep.returncode == 0
    assert json.loads(rep.stdout)["tool"]["backend"] == "numpy"
