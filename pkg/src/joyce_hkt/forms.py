"""Invariant metrics and forms on ``m``: hyperhermitian checks, ``d`` and the HKT residual.

Metrics and forms are arrays over the real basis of ``m`` held by a
:class:`~joyce_hkt.joyce.CosetSpace`.  Evaluation on complex vectors is
C-bilinear.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .joyce import CosetSpace, HypercomplexStructure
from .lie_core import neg, sub


class FormError(ValueError):
    pass


@dataclass(frozen=True)
class Residual:
    """A residual together with its value relative to a scale (the metric norm)."""

    raw: float
    scale: float = 1.0

    @property
    def value(self) -> float:
        return self.raw / self.scale if self.scale else self.raw

    def __float__(self) -> float:
        return self.value

    def as_dict(self) -> Dict[str, float]:
        return {"raw": self.raw, "relative": self.value}


@dataclass(frozen=True, eq=False)
class InvariantMetric:
    coset: CosetSpace
    gram: np.ndarray
    layer_coeffs: Optional[Tuple[float, ...]] = None

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.gram, 2))

    def __call__(self, x: np.ndarray, y: np.ndarray) -> complex:
        return complex(np.asarray(x) @ self.gram @ np.asarray(y))

    def root_value(self, a) -> float:
        """``g_a = g(E_a, conj E_a)``."""
        e = self.coset.m_root(a)
        return float(np.real(e @ self.gram @ e.conj()))

    def scaled(self, c: float) -> "InvariantMetric":
        coeffs = tuple(c * x for x in self.layer_coeffs) if self.layer_coeffs else None
        return InvariantMetric(self.coset, c * self.gram, coeffs)

    def is_positive_definite(self) -> bool:
        return bool(np.linalg.eigvalsh(0.5 * (self.gram + self.gram.T)).min() > 0)


@dataclass(frozen=True, eq=False)
class InvariantForm:
    coset: CosetSpace
    degree: int
    tensor: np.ndarray

    def __call__(self, *vectors) -> complex:
        t = self.tensor
        for v in vectors:
            t = np.tensordot(np.asarray(v), t, axes=(0, 0))
        return complex(t)

    def antisymmetry_residual(self) -> float:
        import itertools

        worst = 0.0
        axes = list(range(self.degree))
        for i, j in itertools.combinations(axes, 2):
            perm = axes.copy()
            perm[i], perm[j] = perm[j], perm[i]
            worst = max(worst, float(np.abs(self.tensor + np.transpose(self.tensor, perm)).max(initial=0.0)))
        return worst


# ---------------------------------------------------------------------------
# metrics


def reference_metric(coset: CosetSpace) -> InvariantMetric:
    """``h``: ``-B`` on ``d_j + f_j``, ``h(X_1^j, X_1^j) = 4/|alpha_j|^2``, layers orthogonal."""
    return layer_metric(coset, [1.0] * coset.m)


def layer_metric(coset: CosetSpace, coeffs: Sequence[float]) -> InvariantMetric:
    coeffs = tuple(float(c) for c in coeffs)
    if len(coeffs) != coset.m:
        raise FormError(f"expected {coset.m} layer coefficients, got {len(coeffs)}")
    if any(not c > 0 for c in coeffs):
        raise FormError(f"layer coefficients must be positive, got {list(coeffs)}")
    n = coset.n_m
    q = coset.q_form[:n, :n]
    gram = np.zeros((n, n))
    for j, L in enumerate(coset.layers):
        idx = coset.layer_slice(j)
        block = q[np.ix_(idx, idx)].copy()
        x1 = list(idx).index(coset.index_of(f"X1^{j + 1}"))
        block[x1, :] = 0.0
        block[:, x1] = 0.0
        block[x1, x1] = 4.0 / float(coset.model.pair(L.alpha, L.alpha))
        gram[np.ix_(idx, idx)] = coeffs[j] * block
    return InvariantMetric(coset, gram, coeffs)


def bi_invariant_metric(coset: CosetSpace) -> InvariantMetric:
    """``Q = -B`` restricted to ``m``."""
    n = coset.n_m
    return InvariantMetric(coset, coset.q_form[:n, :n].copy())


def invariance_residual(g: InvariantMetric) -> float:
    """Max of ``ad(U)^T g + g ad(U)`` over the basis of ``l``."""
    return max(
        (float(np.abs(a.T @ g.gram + g.gram @ a).max()) for a in g.coset.ad_l), default=0.0
    )


def is_hyperhermitian(g: InvariantMetric, hc: HypercomplexStructure) -> Residual:
    G = g.gram
    r = max(
        float(np.abs(hc.I.T @ G @ hc.I - G).max()),
        float(np.abs(hc.J.T @ G @ hc.J - G).max()),
    )
    return Residual(r, g.norm)


# ---------------------------------------------------------------------------
# forms


def omega_forms(g: InvariantMetric, hc: HypercomplexStructure, tolerance: float = 1e-9):
    """``(omega_I, omega_J, omega_K, Omega)`` with ``omega_P = g(P., .)``."""
    res = is_hyperhermitian(g, hc)
    if res.value > tolerance:
        raise FormError(f"metric is not hyperhermitian (residual {res.value:.3e})")
    c = g.coset
    wi = InvariantForm(c, 2, hc.I.T @ g.gram)
    wj = InvariantForm(c, 2, hc.J.T @ g.gram)
    wk = InvariantForm(c, 2, hc.K.T @ g.gram)
    big = InvariantForm(c, 2, 0.5 * (wj.tensor + 1j * wk.tensor))
    return wi, wj, wk, big


def exterior_derivative(phi: InvariantForm) -> InvariantForm:
    """``(d phi)(X_0..X_p) = sum_{i<j} (-1)^{i+j} phi([X_i, X_j]_m, X_0, .^i.^j., X_p)``."""
    p = phi.degree
    cm = phi.coset.c_mm
    t = phi.tensor
    out = None
    # contract the bracket into the first slot once; rest axes follow in order
    base = np.tensordot(cm, t, axes=(2, 0))  # axes: x_i, x_j, rest...
    for i in range(p + 1):
        for j in range(i + 1, p + 1):
            term = np.moveaxis(base, [0, 1], [i, j])
            term = term if (i + j) % 2 == 0 else -term
            out = term if out is None else out + term
    return InvariantForm(phi.coset, p + 1, out)


def evaluate_d_at(phi: InvariantForm, idx: Sequence[int]) -> complex:
    """``d phi`` on one tuple of basis vectors without building the full tensor."""
    cm = phi.coset.c_mm
    p = phi.degree
    total = 0.0
    for i in range(p + 1):
        for j in range(i + 1, p + 1):
            rest = [idx[k] for k in range(p + 1) if k not in (i, j)]
            v = cm[idx[i], idx[j]]
            t = phi.tensor[(slice(None),) + tuple(rest)]
            total += (-1) ** (i + j) * (v @ t)
    return total


def hkt_terms(g: InvariantMetric, hc: HypercomplexStructure) -> np.ndarray:
    """``g([X,Y]_{m10}, JZ) + g([Z,X]_{m10}, JY) + g([Y,Z]_{m10}, JX)`` on hol triples."""
    coset = g.coset
    n = coset.n_m
    hol = coset.hol_basis
    p10 = 0.5 * (np.eye(n) - 1j * hc.I)
    br = np.einsum("ax,by,abc->xyc", hol, hol, coset.c_mm, optimize=True) @ p10.T
    jz = hc.J @ hol
    t = np.einsum("xyc,cd,dz->xyz", br, g.gram, jz, optimize=True)
    return t + np.transpose(t, (1, 2, 0)) + np.transpose(t, (2, 0, 1))


def hkt_residual(g: InvariantMetric, hc: HypercomplexStructure) -> Residual:
    return Residual(float(np.abs(hkt_terms(g, hc)).max(initial=0.0)), g.norm)


def naturally_reductive_residual(g: InvariantMetric) -> Residual:
    """Max of ``g([X,Y]_m, Z) + g(Y, [X,Z]_m)`` over basis triples."""
    cm = g.coset.c_mm
    t = np.einsum("xyc,cz->xyz", cm, g.gram)
    r = t + np.transpose(t, (0, 2, 1))
    return Residual(float(np.abs(r).max(initial=0.0)), g.norm)


# ---------------------------------------------------------------------------
# invariant hyperhermitian perturbations


def invariant_hyperhermitian_space(coset: CosetSpace, hc: HypercomplexStructure) -> np.ndarray:
    """Basis (Frobenius-orthonormal) of symmetric matrices invariant under I, J and ad(l)."""
    n = coset.n_m
    iu = np.triu_indices(n)
    nsym = len(iu[0])
    basis = np.zeros((nsym, n, n))
    for k, (a, b) in enumerate(zip(*iu)):
        basis[k, a, b] = basis[k, b, a] = 1.0 if a != b else 1.0
    rows = []
    for P in (hc.I, hc.J):
        rows.append(np.einsum("ax,kab,by->kxy", P, basis, P) - basis)
    for A in coset.ad_l:
        rows.append(np.einsum("ax,kay->kxy", A, basis) + np.einsum("kxb,by->kxy", basis, A))
    m = np.concatenate([r.reshape(nsym, -1) for r in rows], axis=1).T
    _, s, vt = np.linalg.svd(m)
    rank = int((s > 1e-10 * max(1.0, s[0])).sum())
    null = vt[rank:]
    mats = np.einsum("rk,kxy->rxy", null, basis)
    flat = mats.reshape(len(mats), -1)
    q, _ = np.linalg.qr(flat.T)
    return q.T.reshape(-1, n, n)


def layer_span(coset: CosetSpace) -> np.ndarray:
    """Frobenius-orthonormal basis of the layer metrics ``h|_{m_j}``."""
    mats = []
    for j in range(coset.m):
        c = [0.0] * coset.m
        c[j] = 1.0
        h = reference_metric(coset).gram
        idx = coset.layer_slice(j)
        blk = np.zeros_like(h)
        blk[np.ix_(idx, idx)] = h[np.ix_(idx, idx)]
        mats.append(blk)
    flat = np.array(mats).reshape(len(mats), -1)
    q, _ = np.linalg.qr(flat.T)
    return q.T.reshape(-1, *mats[0].shape)


def random_perturbation(
    coset: CosetSpace,
    hc: HypercomplexStructure,
    rng: np.random.Generator,
    space: Optional[np.ndarray] = None,
    max_tries: int = 100,
) -> np.ndarray:
    """A unit (Frobenius) invariant hyperhermitian matrix with no layer-diagonal part.

    A random rank-2 coupling ``u v^T + v u^T`` between h-normalized vectors
    supported on two (possibly equal) groups of basis vectors, a group being
    ``d_j + R X_1^j`` or the root pair of one ``g`` in ``f_j``, is
    projected onto the invariant hyperhermitian space; the component along the
    layer metrics is removed.  Degenerate projections are resampled.
    """
    space = invariant_hyperhermitian_space(coset, hc) if space is None else space
    layers = layer_span(coset)
    n = coset.n_m
    h = reference_metric(coset).gram
    w, vec = np.linalg.eigh(h)
    root_of = coset.root_of
    groups: List[List[int]] = []
    for j in range(coset.m):
        by_root: Dict = {}
        for i in coset.layer_slice(j):
            key = (j, root_of[i] if coset.kinds[i] in ("A", "B") else "d")
            by_root.setdefault(key, []).append(i)
        groups.extend(by_root.values())
    for _ in range(max_tries):
        # same-group pairs reach the relative scalings inside one layer
        g1, g2 = rng.choice(len(groups), size=2, replace=True)
        u = np.zeros(n)
        v = np.zeros(n)
        u[groups[g1]] = rng.standard_normal(len(groups[g1]))
        v[groups[g2]] = rng.standard_normal(len(groups[g2]))
        # h-normalize
        u /= np.sqrt(u @ h @ u)
        v /= np.sqrt(v @ h @ v)
        s = np.outer(u, v) + np.outer(v, u)
        coeffs = np.einsum("kxy,xy->k", space, s)
        p = np.einsum("k,kxy->xy", coeffs, space)
        p -= np.einsum("k,kxy->xy", np.einsum("kxy,xy->k", layers, p), layers)
        nrm = np.linalg.norm(p)
        if nrm > 1e-6:
            return p / nrm
    raise FormError("could not sample a non-degenerate perturbation")


def perturbed_metric(
    base: InvariantMetric, hc: HypercomplexStructure, size: float, seed: int
) -> InvariantMetric:
    """``base + size * |base| * P`` with ``P`` from :func:`random_perturbation`."""
    rng = np.random.default_rng(seed)
    p = random_perturbation(base.coset, hc, rng)
    return InvariantMetric(base.coset, base.gram + size * base.norm * p, None)


# ---------------------------------------------------------------------------
# checks used by several modules


def is_layer_metric(g: InvariantMetric, tolerance: float = 1e-9) -> Optional[Tuple[float, ...]]:
    """The layer coefficients if ``g`` is ``sum g_j h|_{m_j}``, else ``None``."""
    coset = g.coset
    h = reference_metric(coset).gram
    coeffs = []
    for j, L in enumerate(coset.layers):
        x1 = coset.index_of(f"X1^{j + 1}")
        coeffs.append(g.gram[x1, x1] / h[x1, x1])
    expect = layer_metric(coset, [max(c, 1e-300) for c in coeffs]).gram if all(c > 0 for c in coeffs) else None
    if expect is None or np.abs(expect - g.gram).max() > tolerance * max(1.0, g.norm):
        return None
    return tuple(coeffs)


def flag_witness_values(g: InvariantMetric, layer: int) -> List[Tuple]:
    """``(g, alpha_j - g, alpha_j)`` triples of a layer with their metric values."""
    coset = g.coset
    L = coset.layers[layer]
    out = []
    for gam in L.f_roots:
        beta = sub(L.alpha, gam)
        vals = tuple(g.root_value(x) for x in (gam, beta, L.alpha))
        out.append(((gam, beta, L.alpha), vals))
    return out
