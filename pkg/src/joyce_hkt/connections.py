"""Chern-Ricci, HKT-Einstein metrics and the Bismut connection of invariant HKT metrics.

An invariant connection is stored through its operator ``Lambda: m -> End(m)``
as a real array ``lam[v, out, in]`` over the real basis of ``m``.  Torsion and
curvature follow from

    T(X, Y) = Lambda(X) Y - Lambda(Y) X - [X, Y]_m
    R(X, Y) = [Lambda(X), Lambda(Y)] - Lambda([X, Y]_m) - ad([X, Y]_l)

and are stored as ``T[x, y, out]`` and ``R[w, x, y, out] = (R(w, x) y)_out``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ._kernels import derivation3_max, derivation4_max
from .forms import (
    InvariantForm,
    InvariantMetric,
    Residual,
    evaluate_d_at,
    flag_witness_values,
    exterior_derivative,
    hkt_residual,
    is_layer_metric,
)
from .joyce import CosetSpace, HypercomplexStructure
from .lie_core import Root, add, neg, sub


class MetricClassError(ValueError):
    """Input metric outside the class a construction applies to."""


# ---------------------------------------------------------------------------
# connection model


@dataclass(frozen=True, eq=False)
class ConnectionModel:
    coset: CosetSpace
    lam: np.ndarray
    kind: str
    metric: Optional[InvariantMetric] = None

    @cached_property
    def torsion(self) -> np.ndarray:
        lam = self.lam
        # Lambda(X) Y: t[x, y, o] = lam[x, o, y]
        t = np.transpose(lam, (0, 2, 1))
        return t - np.transpose(t, (1, 0, 2)) - self.coset.c_mm

    @cached_property
    def curvature(self) -> np.ndarray:
        lam = self.lam
        coset = self.coset
        ll = np.einsum("xop,ypq->xyoq", lam, lam, optimize=True)
        r = ll - np.transpose(ll, (1, 0, 2, 3))
        r -= np.einsum("xyc,coq->xyoq", coset.c_mm, lam, optimize=True)
        r -= np.einsum("xyl,loq->xyoq", coset.c_ml, coset.ad_l, optimize=True)
        # R[w, x, y, o] = (R(w, x))[o, y]
        return np.ascontiguousarray(np.transpose(r, (0, 1, 3, 2)))

    def torsion_form(self, g: Optional[InvariantMetric] = None) -> InvariantForm:
        g = g or self.metric
        return InvariantForm(self.coset, 3, np.einsum("xyo,oz->xyz", self.torsion, g.gram))

    def skew_residual(self, g: Optional[InvariantMetric] = None) -> float:
        g = g or self.metric
        G = g.gram
        return float(
            max(np.abs(np.transpose(a) @ G + G @ a).max() for a in self.lam) / max(g.norm, 1e-300)
        )

    def commutator_residual(self, P: np.ndarray) -> float:
        return float(max(np.abs(a @ P - P @ a).max() for a in self.lam))


# ---------------------------------------------------------------------------
# Chern-Ricci


def delta_hat(coset: CosetSpace) -> Tuple[Fraction, ...]:
    """Coordinates of ``H_delta = 1/2 sum_{a in R^+ hat} t_a``."""
    n = coset.model.cartan_dim
    acc = [Fraction(0)] * n
    for a in coset.hat_roots_plus:
        for i in range(n):
            acc[i] += Fraction(a[i], 2)
    return tuple(acc)


@dataclass(frozen=True, eq=False)
class ChernRicci:
    """``Ric(V_a, conj V_b)`` on the holomorphic basis of the coset."""

    coset: CosetSpace
    matrix: np.ndarray

    def by_root(self) -> Dict[Root, complex]:
        m = self.coset.m
        return {g: complex(self.matrix[m + i, m + i]) for i, g in enumerate(self.coset.hat_roots_plus)}


def chern_ricci_closed_form(coset: CosetSpace) -> ChernRicci:
    """Diagonal ``2 i g(H_delta)`` on root vectors, zero elsewhere."""
    model = coset.model
    dh = delta_hat(coset)
    h = coset.hol_basis.shape[1]
    k = np.zeros((h, h), dtype=complex)
    for i, g in enumerate(coset.hat_roots_plus):
        k[coset.m + i, coset.m + i] = 2j * float(model.pair(g, dh))
    return ChernRicci(coset, k)


def chern_lambda(g: InvariantMetric, hc: HypercomplexStructure) -> np.ndarray:
    """Complex ``Lambda^Ch`` (shape ``n, n, n``) of the Chern connection of ``(g, I)``.

    On mixed types it is the projected bracket; on equal types it is fixed by
    skew-adjointness for the C-bilinear ``g``, which pairs ``m^{10}`` with ``m^{01}``.
    """
    coset = g.coset
    n = coset.n_m
    G = g.gram
    Ginv = np.linalg.inv(G)
    eye = np.eye(n)
    p10 = 0.5 * (eye - 1j * hc.I)
    p01 = 0.5 * (eye + 1j * hc.I)
    ad = np.transpose(coset.c_mm, (0, 2, 1))  # ad[x, out, in] of [X, .]_m
    out = np.zeros((n, n, n), dtype=complex)
    for x in range(n):
        e = eye[x]
        z10, z01 = p10 @ e, p01 @ e
        a01 = np.einsum("x,xoi->oi", z01, ad)
        k01 = p10 @ a01 @ p10
        lam01 = k01 - Ginv @ k01.T @ G @ p01
        a10 = np.einsum("x,xoi->oi", z10, ad)
        k10 = p01 @ a10 @ p01
        lam10 = k10 - Ginv @ k10.T @ G @ p10
        out[x] = lam01 + lam10
    return out


def _l_trace(coset: CosetSpace, u: np.ndarray, p10: np.ndarray) -> complex:
    adu = np.einsum("l,loi->oi", u, coset.ad_l)
    return complex(np.trace(adu @ p10))


def chern_ricci_trace(g: InvariantMetric, hc: HypercomplexStructure, tolerance: float = 1e-9) -> ChernRicci:
    """``Ric(V, conj W) = -i tr Lambda([V, conj W]_m) - i tr ad([V, conj W]_l)`` on ``m^{10}``."""
    coset = g.coset
    if is_layer_metric(g, tolerance) is None:
        raise MetricClassError("the trace computation needs a layer metric")
    lam = chern_lambda(g, hc)
    n = coset.n_m
    p10 = 0.5 * (np.eye(n) - 1j * hc.I)
    hol = coset.hol_basis
    h = hol.shape[1]
    k = np.zeros((h, h), dtype=complex)
    for a in range(h):
        for b in range(h):
            v, w = hol[:, a], hol[:, b].conj()
            bm = np.einsum("x,y,xyc->c", v, w, coset.c_mm)
            bl = np.einsum("x,y,xyc->c", v, w, coset.c_ml)
            tm = np.trace(np.einsum("c,coi->oi", bm, lam) @ p10)
            k[a, b] = -1j * tm - 1j * _l_trace(coset, bl, p10)
    return ChernRicci(coset, k)


def ricci_real_form(ric: ChernRicci) -> np.ndarray:
    """The real 2-form on ``m`` with the given (1,1) components."""
    coset = ric.coset
    hol = coset.hol_basis
    h = hol.shape[1]
    p = np.hstack([hol, hol.conj()])
    m = np.zeros((2 * h, 2 * h), dtype=complex)
    m[:h, h:] = ric.matrix
    m[h:, :h] = -ric.matrix.T
    pinv = np.linalg.inv(p)
    r = pinv.T @ m @ pinv
    if np.abs(r.imag).max() > 1e-9 * max(1.0, np.abs(r).max()):
        raise MetricClassError("Ricci form is not real")
    return r.real


# ---------------------------------------------------------------------------
# HKT-Einstein


@dataclass(frozen=True)
class EinsteinSolution:
    coeffs: Tuple[Fraction, ...]
    lambda_constant: Fraction
    delta_hat: Tuple[Fraction, ...]
    residual: float
    closed_form: Tuple[Fraction, ...]


def einstein_coefficients(coset: CosetSpace) -> EinsteinSolution:
    """``g_j = alpha_j(H_delta)``, checked against ``(alpha_j, alpha_j)/4 (2 + dim_C f_j)``."""
    model = coset.model
    dh = delta_hat(coset)
    coeffs = tuple(model.pair(L.alpha, dh) for L in coset.layers)
    closed = tuple(model.pair(L.alpha, L.alpha) / 4 * (2 + len(L.f_roots)) for L in coset.layers)
    if any(c <= 0 for c in coeffs):
        raise ArithmeticError(f"non-positive Einstein coefficient {coeffs}")
    res = max(abs(float(a - b)) for a, b in zip(coeffs, closed))
    return EinsteinSolution(coeffs, Fraction(1), dh, res, closed)


@dataclass(frozen=True)
class EinsteinResidual:
    lambda_constant: float
    residual: float
    raw: float


def hkt_einstein_residual(
    g: InvariantMetric, hc: HypercomplexStructure, tolerance: float = 1e-9
) -> EinsteinResidual:
    """``(Ric - J Ric)/2 = lambda omega_I``: median-ratio ``lambda`` and max deviation."""
    hres = hkt_residual(g, hc)
    if hres.value > tolerance:
        raise MetricClassError(f"metric is not HKT (residual {hres.value:.3e})")
    ric = ricci_real_form(chern_ricci_trace(g, hc, tolerance))
    a = 0.5 * (ric - hc.J.T @ ric @ hc.J)
    w = hc.I.T @ g.gram
    mask = np.abs(w) > tolerance * np.abs(w).max()
    lam = float(np.median(a[mask] / w[mask]))
    dev = float(np.abs(a - lam * w).max())
    scale = float(np.abs(a).max())
    return EinsteinResidual(lam, dev / scale if scale else dev, dev)


# ---------------------------------------------------------------------------
# Bismut connection


def _require_layer(g: InvariantMetric, tolerance: float):
    coeffs = is_layer_metric(g, tolerance)
    if coeffs is None:
        raise MetricClassError("expected a layer metric sum g_j h|m_j")
    return coeffs


def _complex_frame(coset: CosetSpace):
    """Torus vectors ``X_1^j, X_2^j`` followed by ``E_g``, g in R hat; with ``P^{-1}``."""
    n = coset.n_m
    cols = []
    torus = []
    for j in range(coset.m):
        for s in (1, 2):
            e = np.zeros(n, dtype=complex)
            e[coset.index_of(f"X{s}^{j + 1}")] = 1.0
            cols.append(e)
            torus.append(coset.index_of(f"X{s}^{j + 1}"))
    roots = list(coset.hat_roots)
    for a in roots:
        cols.append(coset.m_root(a))
    p = np.array(cols).T
    return p, np.linalg.inv(p), torus, roots


def bismut_lambda(
    g: InvariantMetric, hc: HypercomplexStructure, tolerance: float = 1e-9
) -> ConnectionModel:
    """Bismut ``Lambda`` from the closed formulas on root vectors and the torus.

    ``Lambda(E_a) E_b`` is ``1/2 N_{a,b} (1 + e_a e_b + (1 - e_a e_{a+b}) g_b/g_{a+b}
    - (1 + e_b e_{a+b}) g_a/g_{a+b}) E_{a+b}`` for ``a, b, a+b`` in R hat and
    ``Lambda(H) E_a = (g(H, (H_a)_m)/g_a + a(H)) E_a``; everything else is zero.
    ``(H_a)_m`` is the Q-orthogonal projection; ``g_a = g(E_a, conj E_a)``.
    """
    _require_layer(g, tolerance)
    coset = g.coset
    model, table = coset.model, coset.table
    n = coset.n_m
    p, pinv, torus, roots = _complex_frame(coset)
    nt = len(torus)
    pos = set(coset.hat_roots_plus)
    eps = {a: (1 if a in pos else -1) for a in roots}
    gval = {a: g.root_value(a) for a in roots}
    rindex = {a: nt + i for i, a in enumerate(roots)}
    gram_c = model.gram_array
    nc = model.cartan_dim
    lam_c = np.zeros((n, n, n), dtype=complex)  # lam_c[z] in complex-frame coordinates
    for t, x in enumerate(torus):
        h_cw = coset.basis[:nc, x]
        for a in roots:
            ha_m = coset.to_real(coset.cw_cartan(a))[:n]
            val = (g.gram[x] @ ha_m) / gval[a] + np.asarray(a, dtype=float) @ gram_c @ h_cw
            lam_c[t, rindex[a], rindex[a]] = val
    for a in roots:
        for b in roots:
            s = add(a, b)
            if s not in rindex:
                continue
            coef = 0.5 * table.n(a, b) * (
                1
                + eps[a] * eps[b]
                + (1 - eps[a] * eps[s]) * gval[b] / gval[s]
                - (1 + eps[b] * eps[s]) * gval[a] / gval[s]
            )
            lam_c[rindex[a], rindex[s], rindex[b]] = coef
    # back to the real basis: Lambda(e_x) = sum_z pinv[z, x] P lam_c[z] P^{-1}
    mats = np.einsum("zx,zoi->xoi", pinv, lam_c)
    lam = np.einsum("ao,xoi,ib->xab", p, mats, pinv, optimize=True)
    if np.abs(lam.imag).max() > 1e-8:
        raise MetricClassError("Bismut Lambda is not real on the real basis")
    return ConnectionModel(coset, np.ascontiguousarray(lam.real), "bismut", g)


def levi_civita_lambda(g: InvariantMetric) -> np.ndarray:
    """``Lambda(X) Y = 1/2 [X, Y]_m + U(X, Y)`` with ``g(U(X,Y), Z) = 1/2(g([Z,X]_m, Y) + g(X, [Z,Y]_m))``."""
    coset = g.coset
    cm = coset.c_mm
    G = g.gram
    t1 = np.einsum("zxa,ay->xyz", cm, G)
    t2 = np.einsum("xa,zya->xyz", G, cm)
    u = 0.5 * (t1 + t2) @ np.linalg.inv(G)  # u[x, y, out]
    lxy = 0.5 * cm + u  # Lambda(X) Y as [x, y, out]
    return np.ascontiguousarray(np.transpose(lxy, (0, 2, 1)))


def bismut_lambda_lc(g: InvariantMetric, hc: HypercomplexStructure) -> Tuple[ConnectionModel, Dict]:
    """Bismut ``Lambda`` as Levi-Civita plus half the torsion ``c = s * d omega_I(I., I., I.)``.

    The sign ``s`` is the one making ``Lambda`` commute with ``I``; both
    candidates' residuals are returned in the info dict.
    """
    coset = g.coset
    lc = levi_civita_lambda(g)
    w = InvariantForm(coset, 2, hc.I.T @ g.gram)
    dw = exterior_derivative(w).tensor
    I = hc.I
    base = np.einsum("abc,ax,by,cz->xyz", dw, I, I, I, optimize=True)
    Ginv = np.linalg.inv(g.gram)
    best = None
    info = {}
    for s in (1.0, -1.0):
        t = s * base @ Ginv  # T[x, y, out]
        lam = lc + 0.5 * np.transpose(t, (0, 2, 1))
        model = ConnectionModel(coset, lam, "bismut", g)
        r = model.commutator_residual(I)
        info[f"sign{'+' if s > 0 else '-'}"] = r
        if best is None or r < best[0]:
            best = (r, model, s)
    info["sign"] = best[2]
    return best[1], info


def canonical_connection(coset: CosetSpace, g: Optional[InvariantMetric] = None) -> ConnectionModel:
    n = coset.n_m
    return ConnectionModel(coset, np.zeros((n, n, n)), "canonical", g)


def nabla_torsion_residual(model: ConnectionModel) -> Residual:
    raw = derivation3_max(model.lam, model.torsion)
    return Residual(raw, max(float(np.abs(model.torsion).max()), 1e-300))


def nabla_curvature_residual(model: ConnectionModel) -> Residual:
    raw = derivation4_max(model.lam, model.curvature)
    return Residual(raw, max(float(np.abs(model.curvature).max()), 1e-300))


def btp_predicate(coset: CosetSpace, coeffs: Sequence[float], rel_tol: float = 1e-9) -> bool:
    """True iff the coefficients are constant on each irreducible component."""
    by_factor: Dict[int, List[float]] = {}
    for L, c in zip(coset.layers, coeffs):
        by_factor.setdefault(L.factor, []).append(float(c))
    return all(max(v) - min(v) <= rel_tol * max(v) for v in by_factor.values())


@dataclass(frozen=True)
class StrongResult:
    residual: Residual
    skew: float
    sampled: bool


def strong_residual(
    g: InvariantMetric,
    hc: HypercomplexStructure,
    tolerance: float = 1e-9,
    full_limit: int = 64,
    samples: int = 1_000_000,
    seed: int = 0,
) -> StrongResult:
    """``max |d c|`` for the Bismut torsion 3-form ``c(X,Y,Z) = g(T(X,Y), Z)``."""
    hres = hkt_residual(g, hc)
    if hres.value > tolerance:
        raise MetricClassError(f"metric is not HKT (residual {hres.value:.3e})")
    conn = bismut_lambda(g, hc, tolerance)
    c = conn.torsion_form(g)
    skew = c.antisymmetry_residual() / max(g.norm, 1e-300)
    if skew > tolerance:
        raise MetricClassError(f"torsion 3-form is not skew (residual {skew:.3e})")
    n = g.coset.n_m
    if n <= full_limit:
        dc = exterior_derivative(c).tensor
        return StrongResult(Residual(float(np.abs(dc).max()), g.norm), skew, False)
    worst = 0.0
    for quad in _stratified_quadruples(g.coset, samples, seed):
        worst = max(worst, abs(evaluate_d_at(c, quad)))
    return StrongResult(Residual(worst, g.norm), skew, True)


def _stratified_quadruples(coset: CosetSpace, samples: int, seed: int):
    """Quadruples with two root vectors from distinct layers, then random ones."""
    n = coset.n_m
    rootish = [i for i in range(n) if coset.kinds[i] in ("A", "B", "X3", "X4")]
    for a, b in itertools.combinations(rootish, 2):
        if coset.layer_of[a] == coset.layer_of[b]:
            continue
        for c in range(n):
            for d in range(c + 1, n):
                if len({a, b, c, d}) == 4:
                    yield (a, b, c, d)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        q = rng.choice(n, size=4, replace=False)
        yield tuple(int(x) for x in q)


def strong_quadruple_values(
    g: InvariantMetric, hc: HypercomplexStructure, tolerance: float = 1e-9
) -> List[dict]:
    """``d c`` on the quadruples linking two layers of one component, next to its expansion.

    For layers ``j < k`` of one simple factor with ``alpha_j`` maximal, pick
    ``theta, beta`` in ``R_j^+`` with ``theta - beta = alpha_k`` and
    ``alpha_j - theta - beta`` not a root; the quadruple is
    ``(alpha_j - beta, beta, -theta, theta - alpha_j)``.  The expansion is

    ``N_ab N_cv (g_a + g_b + g_c + g_v - 2 g_{a+b})
      + e_{a+v} N_av N_bc (-g_a + g_b - g_c + g_v + 2 e_{a+v} g_{a+v})``

    where ``e_{a+v}`` is +1 on ``R hat^+``, -1 on ``R hat^-`` and 0 on roots of ``l``.
    """
    coset = g.coset
    table = coset.table
    model = coset.model
    c = bismut_lambda(g, hc, tolerance).torsion_form(g)
    dc = exterior_derivative(c)
    pos = set(coset.hat_roots_plus)
    hat = set(coset.hat_roots)

    def eps(a):
        if a in pos:
            return 1
        return -1 if a in hat else 0

    def gv(a):
        return g.root_value(a) if a in hat else 0.0

    layers = coset.decomposition.layers
    out = []
    for k, Lk in enumerate(layers):
        for j, Lj in enumerate(layers[:k]):
            if Lj.factor != Lk.factor or j >= coset.m:
                continue
            for theta in Lj.roots_plus:
                beta = sub(theta, Lk.alpha)
                if beta not in Lj.roots_plus or model.is_root(sub(sub(Lj.alpha, theta), beta)):
                    continue
                a, b, gm, v = sub(Lj.alpha, beta), beta, neg(theta), sub(theta, Lj.alpha)
                if not all(x in hat for x in (a, b, gm, v)):
                    continue
                ab, av = add(a, b), add(a, v)
                expansion = table.n(a, b) * table.n(gm, v) * (
                    gv(a) + gv(b) + gv(gm) + gv(v) - 2 * gv(ab)
                ) + eps(av) * table.n(a, v) * table.n(b, gm) * (
                    -gv(a) + gv(b) - gv(gm) + gv(v) + 2 * eps(av) * gv(av)
                )
                vecs = [coset.m_root(x) for x in (a, b, gm, v)]
                out.append(
                    {"layers": (j + 1, k + 1), "roots": (a, b, gm, v), "dc": complex(dc(*vecs)), "expansion": float(expansion)}
                )
    return out


def fit_quadruple_constant(values: Sequence[dict], floor: float = 1e-9) -> Tuple[Optional[float], float]:
    """Least-squares ``k`` with ``d c = k * expansion`` and the max deviation from it."""
    dc = np.array([v["dc"].real for v in values])
    ex = np.array([v["expansion"] for v in values])
    if ex.size == 0 or np.abs(ex).max() <= floor:
        return None, float(np.abs(dc).max()) if dc.size else 0.0
    k = float(dc @ ex / (ex @ ex))
    return k, float(np.abs(dc - k * ex).max())


def flag_kahler_obstruction(g: InvariantMetric, tolerance: float = 1e-9):
    """A triple ``(g, a_j - g, a_j)`` in one layer with three equal metric values, or None."""
    coset = g.coset
    for j in range(coset.m):
        for triple, vals in flag_witness_values(g, j):
            if max(vals) - min(vals) <= tolerance * max(vals):
                return {"layer": j + 1, "roots": triple, "values": vals}
    return None
