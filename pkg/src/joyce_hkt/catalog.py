"""Named example configurations and the frame builders they use."""
from __future__ import annotations

import copy
import math
from typing import Dict, List

import numpy as np

from .joyce import (
    DecompositionError,
    IsotropySpec,
    JoyceDecomposition,
    _intersect,
    _q_matrix,
    _q_orthonormalize,
    default_isotropy,
)

ALL_CHECKS = (
    "hypercomplex",
    "hkt",
    "einstein",
    "btp",
    "bas",
    "strong",
    "naturally-reductive",
    "flag-obstruction",
)


def _alpha_len(decomp: JoyceDecomposition, j: int) -> float:
    a = decomp.layers[j].alpha
    return math.sqrt(float(decomp.model.pair(a, a)))


def _semisimple_center_split(decomp: JoyceDecomposition):
    model = decomp.model
    r = model.rank
    semi = np.array([row for row in decomp.b_d if np.abs(row[r:]).max() < 1e-12])
    return semi, model.cartan_dim - r


def u2n_remark_frame(decomp: JoyceDecomposition) -> IsotropySpec:
    """Group frame on ``u(2n)``: ``X_1^j = (2/|a|) Y^j`` for ``j < n`` and
    ``X_1^n = (2/|a|)(Y^1 + ... + Y^n)`` with ``Y^n`` the center generator.

    The last vector includes ``Y^n``; without it the frame would be dependent.
    """
    model = decomp.model
    if len(model.factors) != 1 or model.factors[0][0] != "A" or model.center_dim != 1:
        raise DecompositionError("the u(2n) frame needs one type A factor and a 1-dim center")
    semi, _ = _semisimple_center_split(decomp)
    n = decomp.d
    if len(semi) != n - 1:
        raise DecompositionError("unexpected b_d dimension for u(2n)")
    zc = np.zeros(model.cartan_dim)
    zc[-1] = 1.0
    ys = list(semi) + [zc]
    frame = []
    for j in range(n - 1):
        frame.append(2.0 / _alpha_len(decomp, j) * ys[j])
    frame.append(2.0 / _alpha_len(decomp, n - 1) * sum(ys))
    return IsotropySpec(
        m=n,
        v_subspace=np.zeros((0, model.cartan_dim)),
        u_frame=np.array(frame),
        interpretive=True,
        note="last frame vector includes the center generator so the frame is independent",
    )


def product_diagonal_frame(decomp: JoyceDecomposition) -> IsotropySpec:
    """For one-layer factors each paired with a center direction ``z_k``:
    ``v = span{a_k - z_k}`` and ``X_1^k`` proportional to ``a_k + z_k``, where ``a_k`` is the
    unit direction of ``b_d`` inside factor ``k``."""
    model = decomp.model
    nf = len(model.factors)
    if model.center_dim != nf or decomp.d != nf:
        raise DecompositionError("product frame needs one layer and one center direction per factor")
    g = _q_matrix(model)
    n = model.cartan_dim
    r = model.rank
    v_rows, frame = [], []
    for j, L in enumerate(decomp.layers):
        k = L.factor
        lo, hi = model.factor_slices[k]
        coords = np.eye(n)[lo:hi]
        a = _intersect(coords, decomp.b_d, g)
        if len(a) != 1:
            raise DecompositionError("each factor must meet b_d in one direction")
        a = a[0]
        z = np.zeros(n)
        z[r + k] = 1.0
        v_rows.append(a - z)
        w = a + z
        frame.append(w * (2.0 / _alpha_len(decomp, j)) / math.sqrt(w @ g @ w))
    v = _q_orthonormalize(np.array(v_rows), g)
    return IsotropySpec(m=decomp.d, v_subspace=v, u_frame=np.array(frame))


FRAMES = {
    "u2n-remark": u2n_remark_frame,
    "product-diagonal": product_diagonal_frame,
}


def named_isotropy(decomp: JoyceDecomposition, frame: str, m=None) -> IsotropySpec:
    if frame == "default":
        return default_isotropy(decomp, m)
    try:
        return FRAMES[frame](decomp)
    except KeyError:
        raise DecompositionError(f"unknown frame {frame!r}") from None


_PRESETS: List[Dict] = [
    {
        "name": "su3-group",
        "description": "SU(3) as a group, bi-invariant reference metric",
        "algebra": {"factors": [["A", 2]], "center_dim": 0},
        "isotropy": {"frame": "default"},
        "metric": {"kind": "reference"},
        "checks": list(ALL_CHECKS),
        "expected": {},
    },
    {
        "name": "su5-group",
        "description": "SU(5) as a group, bi-invariant reference metric (1, 1)",
        "algebra": {"factors": [["A", 4]], "center_dim": 0},
        "isotropy": {"frame": "default"},
        "metric": {"kind": "reference"},
        "checks": list(ALL_CHECKS),
        "expected": {"einstein": "fail"},
    },
    {
        "name": "su5-einstein",
        "description": "SU(5) as a group with the HKT-Einstein metric (2/5, 1/5)",
        "algebra": {"factors": [["A", 4]], "center_dim": 0},
        "isotropy": {"frame": "default"},
        "metric": {"kind": "einstein"},
        "checks": list(ALL_CHECKS),
        "expected": {"btp": "fail", "bas": "fail", "strong": "fail", "naturally-reductive": "fail"},
    },
    {
        "name": "su4-mod-su2",
        "description": "SU(4)/SU(2), one retained layer, HKT-Einstein metric",
        "algebra": {"factors": [["A", 3]], "center_dim": 0},
        "isotropy": {"m": 1, "frame": "default"},
        "metric": {"kind": "einstein"},
        "checks": list(ALL_CHECKS),
        "expected": {"strong": "fail"},
    },
    {
        "name": "su3xsu3-product",
        "description": "SU(3) x SU(3) x T^2 / T^2 with different per-factor coefficients (5, 2)",
        "algebra": {"factors": [["A", 2], ["A", 2]], "center_dim": 2},
        "isotropy": {"frame": "product-diagonal"},
        "metric": {"kind": "layer", "coeffs": [5, 2]},
        "checks": list(ALL_CHECKS),
        "expected": {"einstein": "fail", "strong": "fail"},
    },
    {
        "name": "u4-remark-frame",
        "description": "U(4) as a group with a frame mixing center and semisimple part; "
        "strong but not bi-invariant",
        "algebra": {"factors": [["A", 3]], "center_dim": 1},
        "isotropy": {"frame": "u2n-remark"},
        "metric": {"kind": "reference"},
        "checks": list(ALL_CHECKS),
        "expected": {"einstein": "fail", "naturally-reductive": "fail"},
        "interpretive": True,
        "note": "the last frame vector is read as (2/|a|)(Y^1 + Y^2) including the center "
        "generator Y^2; the literal reading gives a dependent frame",
    },
]


def catalog() -> List[Dict]:
    """Deep copies of the shipped presets."""
    return copy.deepcopy(_PRESETS)


def preset(name: str) -> Dict:
    for p in _PRESETS:
        if p["name"] == name:
            return copy.deepcopy(p)
    raise KeyError(name)
