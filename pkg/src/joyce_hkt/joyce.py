"""Joyce decompositions, coset spaces G/L and invariant hypercomplex structures.

Real elements of the compact algebra are stored as complex coordinate vectors
over the Cartan-Weyl basis of :mod:`joyce_hkt.lie_core`.  A real Cartan
coordinate vector ``x`` (length ``rank + center_dim``) stands for the compact
torus element ``i * x``.

The coset space carries a real basis of the whole algebra, ordered as the
basis of ``m`` (grouped by layer) followed by the basis of ``l``, and the
real structure constants in that basis.  Projections to ``m`` and ``l`` are
coordinate truncations because the two blocks are orthogonal for the fixed
invariant product ``Q = -B``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .lie_core import (
    AlgebraModel,
    LieAlgebraError,
    Root,
    StructureConstantTable,
    add,
    neg,
    structure_constants,
    sub,
)


class DecompositionError(ValueError):
    """Isotropy data incompatible with the Joyce decomposition."""


# ---------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True)
class JoyceLayer:
    index: int
    alpha: Root
    roots_plus: Tuple[Root, ...]
    factor: int

    @property
    def f_roots(self) -> Tuple[Root, ...]:
        """Roots of ``R_j^+`` other than ``alpha_j`` (they span ``f_j``)."""
        return tuple(g for g in self.roots_plus if g != self.alpha)


@dataclass(frozen=True, eq=False)
class JoyceDecomposition:
    model: AlgebraModel
    layers: Tuple[JoyceLayer, ...]
    theta_final: Tuple[Root, ...]
    b_d: np.ndarray  # rows: Q-orthonormal real Cartan coordinates spanning b_d

    @property
    def d(self) -> int:
        return len(self.layers)

    def summary(self) -> List[dict]:
        model = self.model
        return [
            {
                "layer": L.index,
                "alpha": model.label(L.alpha),
                "alpha_norm_sq": str(model.pair(L.alpha, L.alpha)),
                "size": len(L.roots_plus),
                "roots_plus": [model.label(g) for g in L.roots_plus],
            }
            for L in self.layers
        ]

    def check_invariants(self) -> Dict[str, bool]:
        model = self.model
        alphas = [L.alpha for L in self.layers]
        strong = all(
            not model.is_root(add(a, b)) and not model.is_root(sub(a, b)) and a != b
            for i, a in enumerate(alphas)
            for b in alphas[i + 1:]
        )
        cartan = all(
            model.cartan_integer(g, L.alpha) == 1 for L in self.layers for g in L.f_roots
        )
        strings = all(
            not model.is_root(add(g, L.alpha)) and model.is_root(sub(g, L.alpha))
            for L in self.layers
            for g in L.f_roots
        )
        covered = [g for L in self.layers for g in L.roots_plus]
        partition = len(covered) == len(set(covered)) and set(covered) | {
            g for g in self.theta_final if model.is_positive(g)
        } == set(model.positive_roots)
        components = all(model.component_of[g] == L.factor for L in self.layers for g in L.roots_plus)
        return {
            "strongly_orthogonal": strong,
            "cartan_numbers": cartan,
            "root_strings": strings,
            "partition": partition,
            "components": components,
        }


def _default_choice(model: AlgebraModel, candidates: List[Root]) -> Root:
    return min(candidates, key=lambda a: (-sum(a), tuple(-c for c in a), model.component_of[a]))


def joyce_decompose(
    model: AlgebraModel, choose: Optional[Callable[[AlgebraModel, List[Root]], Root]] = None
) -> JoyceDecomposition:
    """Recursive maximal-root decomposition.

    ``choose`` picks ``alpha_j`` among the maximal roots of ``Theta_{j-1}``;
    the default takes the highest, then lexicographically largest root.
    """
    if not model.roots:
        raise DecompositionError("the algebra has no roots")
    choose = choose or _default_choice
    theta = list(model.roots)
    layers = []
    while True:
        theta_set = set(theta)
        pos = [g for g in theta if model.is_positive(g)]
        if not pos:
            break
        maximal = [g for g in pos if not any(add(g, d) in theta_set for d in pos)]
        alpha = choose(model, maximal)
        rplus = [alpha] + [
            g for g in pos if g != alpha and model.pair(alpha, g) > 0
        ]
        layers.append(
            JoyceLayer(len(layers) + 1, alpha, tuple(rplus), model.component_of[alpha])
        )
        theta = [g for g in theta if model.pair(alpha, g) == 0]
    b_d = _orthonormal_complement(model, [L.alpha for L in layers])
    return JoyceDecomposition(model, tuple(layers), tuple(theta), b_d)


def _q_matrix(model: AlgebraModel) -> np.ndarray:
    return model.gram_array


def _orthonormal_complement(model: AlgebraModel, roots: Sequence[Root]) -> np.ndarray:
    """Q-orthonormal basis (rows) of the Cartan directions killed by ``roots``."""
    g = _q_matrix(model)
    n = model.cartan_dim
    if roots:
        a = np.array(roots, dtype=float) @ g
        _, s, vt = np.linalg.svd(a)
        rank = int((s > 1e-12).sum())
        null = vt[rank:]
    else:
        null = np.eye(n)
    return _q_orthonormalize(null, g)


def _q_orthonormalize(rows: np.ndarray, g: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    out: List[np.ndarray] = []
    for v in np.atleast_2d(rows):
        w = v.astype(float).copy()
        for u in out:
            w -= (u @ g @ w) * u
        nrm = math.sqrt(max(w @ g @ w, 0.0))
        if nrm > tol:
            out.append(w / nrm)
    return np.array(out).reshape(len(out), g.shape[0])


def _torus_span(model: AlgebraModel, roots: Sequence[Root]) -> np.ndarray:
    """Q-orthonormal basis of span{t_g : g in roots}."""
    if not roots:
        return np.zeros((0, model.cartan_dim))
    return _q_orthonormalize(np.array(roots, dtype=float), _q_matrix(model))


def _intersect(a: np.ndarray, b: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Q-orthonormal basis of span(a) ∩ span(b); ``b`` must be Q-orthonormal."""
    n = g.shape[0]
    if len(a) == 0 or len(b) == 0:
        return np.zeros((0, n))
    outside = np.array([_project_out(x, b, g) for x in a])
    _, s, vt = np.linalg.svd(outside.T)
    rank = int((s > 1e-10).sum())
    coeffs = vt[rank:]
    return _q_orthonormalize(coeffs @ a, g) if len(coeffs) else np.zeros((0, n))


def _project_out(v: np.ndarray, basis: np.ndarray, g: np.ndarray) -> np.ndarray:
    w = v.astype(float).copy()
    for u in basis:
        w -= (u @ g @ w) * u
    return w


# ---------------------------------------------------------------------------
# isotropy data


@dataclass(frozen=True, eq=False)
class IsotropySpec:
    """Choice of ``L`` (through ``v``) and of the frame ``X_1^1, ..., X_1^m``.

    ``v_subspace`` and ``u_frame`` hold real Cartan coordinates; the compact
    elements are ``i * row``.  ``isotropy_layers`` lists the layers whose
    ``d_j + f_j`` lie in ``l``; it must be ``m+1, ..., d`` and defaults to it.
    """

    m: int
    v_subspace: np.ndarray
    u_frame: np.ndarray
    isotropy_layers: Optional[Tuple[int, ...]] = None
    interpretive: bool = False
    note: str = ""


def default_isotropy(decomp: JoyceDecomposition, m: Optional[int] = None) -> IsotropySpec:
    """``v = b_d ∩ span{t_g : g in Theta_m}`` and the default frame."""
    model = decomp.model
    m = decomp.d if m is None else m
    if not 1 <= m <= decomp.d:
        raise DecompositionError(f"m must lie in 1..{decomp.d}")
    theta_m = [g for L in decomp.layers[m:] for g in L.roots_plus]
    g = _q_matrix(model)
    span = _torus_span(model, theta_m)
    v = _intersect(span, decomp.b_d, g)
    u_frame = default_u_frame(decomp, m, v)
    return IsotropySpec(m=m, v_subspace=v, u_frame=u_frame)


def default_u_frame(decomp: JoyceDecomposition, m: int, v: np.ndarray) -> np.ndarray:
    """Q-orthogonal frame of ``u = b_d ⊖ v`` scaled to ``Q(X_1^j, X_1^j) = 4/|alpha_j|^2``.

    Candidates for layer ``j`` are the directions of ``span{t_g : g in
    Theta_{j-1}}`` orthogonal to ``span{t_g : g in Theta_j}`` and to
    ``alpha_j`` (for ``su(n)`` these are the matrices ``diag(0, .., 1, 1, -c,
    .., -c)``); center directions are appended after them.
    """
    model = decomp.model
    g = _q_matrix(model)
    n = model.cartan_dim
    layers = decomp.layers
    cands = []
    for j, L in enumerate(layers):
        prev = [r for K in layers[j:] for r in K.roots_plus]
        nxt = [r for K in layers[j + 1:] for r in K.roots_plus]
        big = _torus_span(model, prev)
        small = _torus_span(model, nxt + [L.alpha])
        for u in big:
            w = _project_out(u, small, g)
            if np.linalg.norm(w) > 1e-10:
                f = L.f_roots
                if f:
                    val = np.array(f[0], dtype=float) @ g @ w
                    if val < 0:
                        w = -w
                cands.append(w)
                small = np.vstack([small, w / math.sqrt(w @ g @ w)])
    for k in range(model.rank, n):
        e = np.zeros(n)
        e[k] = 1.0
        cands.append(e)
    # restrict to u = b_d minus v
    inside = []
    for w in cands:
        w = w - _project_out(w, decomp.b_d, g)
        w = _project_out(w, v, g)
        inside.append(w)
    frame = _q_orthonormalize(np.array(inside).reshape(len(inside), n), g)
    if len(frame) < m:
        raise DecompositionError("could not build a default frame of u; supply u_frame")
    frame = frame[:m]
    out = []
    for j in range(m):
        a2 = float(model.pair(layers[j].alpha, layers[j].alpha))
        out.append(frame[j] * (2.0 / math.sqrt(a2)))
    return np.array(out)


# ---------------------------------------------------------------------------
# coset space


@dataclass(frozen=True, eq=False)
class CosetSpace:
    """``G/L`` with its layer-adapted real basis of ``g = m + l``."""

    model: AlgebraModel
    table: StructureConstantTable
    decomposition: JoyceDecomposition
    isotropy: IsotropySpec
    k_params: Tuple[complex, ...]
    basis: np.ndarray  # (dim, dim) complex, columns = real basis vectors in CW coords
    n_m: int
    labels: Tuple[str, ...]
    layer_of: np.ndarray  # layer index (0-based) of each m basis vector
    kinds: Tuple[str, ...]
    root_of: Tuple[Optional[Root], ...]

    @property
    def m(self) -> int:
        return self.isotropy.m

    @property
    def dim(self) -> int:
        return self.model.dim

    @property
    def n_l(self) -> int:
        return self.dim - self.n_m

    @property
    def layers(self) -> Tuple[JoyceLayer, ...]:
        return self.decomposition.layers[: self.m]

    @cached_property
    def basis_inv(self) -> np.ndarray:
        return np.linalg.inv(self.basis)

    @cached_property
    def structure(self) -> np.ndarray:
        """Real ``C[a, b, c]`` with ``[F_a, F_b] = sum_c C[a, b, c] F_c``."""
        f = self.basis
        c = np.einsum("ia,jb,ijk->abk", f, f, self.table.bracket_tensor, optimize=True)
        c = np.einsum("abk,ck->abc", c, self.basis_inv, optimize=True)
        if np.abs(c.imag).max(initial=0.0) > 1e-9:
            raise LieAlgebraError("real basis is not closed under the bracket")
        return np.ascontiguousarray(c.real)

    @cached_property
    def c_mm(self) -> np.ndarray:
        """``[X, Y]_m`` coefficients for ``X, Y`` in ``m``."""
        n = self.n_m
        return np.ascontiguousarray(self.structure[:n, :n, :n])

    @cached_property
    def c_ml(self) -> np.ndarray:
        """``[X, Y]_l`` coefficients for ``X, Y`` in ``m`` (shape ``n_m, n_m, n_l``)."""
        n = self.n_m
        return np.ascontiguousarray(self.structure[:n, :n, n:])

    @cached_property
    def ad_l(self) -> np.ndarray:
        """``ad(U)|_m`` as (out, in) matrices for the ``l`` basis vectors ``U``."""
        n = self.n_m
        return np.ascontiguousarray(np.transpose(self.structure[n:, :n, :n], (0, 2, 1)))

    @cached_property
    def q_form(self) -> np.ndarray:
        """``Q = -B`` on the real basis."""
        q = -self.basis.T @ self.table.killing_matrix @ self.basis
        return q.real

    def to_real(self, cw: np.ndarray) -> np.ndarray:
        """Coordinates over the real basis of a Cartan-Weyl coordinate vector."""
        return self.basis_inv @ np.asarray(cw, dtype=complex)

    def cw_root(self, a: Root) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.model.cartan_dim + self.model.root_index[tuple(a)]] = 1.0
        return v

    def cw_cartan(self, x: Sequence) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[: self.model.cartan_dim] = np.asarray([float(c) for c in x])
        return v

    def m_root(self, a: Root) -> np.ndarray:
        """``E_a`` as complex coordinates over the real basis of ``m``."""
        v = self.to_real(self.cw_root(a))
        return v[: self.n_m]

    def index_of(self, label: str) -> int:
        return self.labels.index(label)

    def layer_slice(self, j: int) -> np.ndarray:
        return np.nonzero(self.layer_of == j)[0]

    @cached_property
    def hat_roots_plus(self) -> Tuple[Root, ...]:
        return tuple(g for L in self.layers for g in L.roots_plus)

    @cached_property
    def hat_roots(self) -> Tuple[Root, ...]:
        return self.hat_roots_plus + tuple(neg(g) for g in self.hat_roots_plus)

    @cached_property
    def hol_basis(self) -> np.ndarray:
        """Columns: ``H_j = t_{alpha_j} + (|alpha_j|^2/2) X_1^j`` then ``E_g`` (g in R^+ hat)."""
        cols = []
        for j, L in enumerate(self.layers):
            a2 = float(self.model.pair(L.alpha, L.alpha))
            v = np.zeros(self.n_m, dtype=complex)
            v[self.index_of(f"X1^{j + 1}")] = a2 / 2
            v[self.index_of(f"X2^{j + 1}")] = -1j * a2 / 2
            cols.append(v)
        for g in self.hat_roots_plus:
            cols.append(self.m_root(g))
        return np.array(cols).T

    @cached_property
    def hol_labels(self) -> Tuple[str, ...]:
        return tuple(f"H_{j + 1}" for j in range(self.m)) + tuple(
            f"E[{self.model.label(g)}]" for g in self.hat_roots_plus
        )

    def with_k(self, k_params: Sequence[complex]) -> "CosetSpace":
        return coset_space(self.model, self.decomposition, self.isotropy, k_params, table=self.table)


def k_default(model: AlgebraModel, decomp: JoyceDecomposition, m: int, phases=None) -> Tuple[complex, ...]:
    """``k_j = exp(i phi_j) / (sqrt(2) |alpha_j|)``."""
    phases = list(phases) if phases is not None else [0.0] * m
    if len(phases) != m:
        raise DecompositionError(f"expected {m} phases, got {len(phases)}")
    out = []
    for j in range(m):
        a = math.sqrt(float(model.pair(decomp.layers[j].alpha, decomp.layers[j].alpha)))
        out.append(cmath.exp(1j * float(phases[j])) / (math.sqrt(2.0) * a))
    return tuple(out)


def coset_space(
    model: AlgebraModel,
    decomp: JoyceDecomposition,
    isotropy: Optional[IsotropySpec] = None,
    k_params: Optional[Sequence[complex]] = None,
    table: Optional[StructureConstantTable] = None,
    tolerance: float = 1e-9,
) -> CosetSpace:
    isotropy = isotropy or default_isotropy(decomp)
    m = isotropy.m
    d = decomp.d
    if not 1 <= m <= d:
        raise DecompositionError(f"m must lie in 1..{d}, got {m}")
    expected_layers = tuple(range(m + 1, d + 1))
    if isotropy.isotropy_layers is not None and tuple(sorted(isotropy.isotropy_layers)) != expected_layers:
        raise DecompositionError(
            f"l must contain exactly the layers {list(expected_layers)} for m={m}; "
            f"got {sorted(isotropy.isotropy_layers)}"
        )
    table = table or structure_constants(model)
    g = _q_matrix(model)
    nc = model.cartan_dim
    v = np.asarray(isotropy.v_subspace, dtype=float).reshape(-1, nc)
    u = np.asarray(isotropy.u_frame, dtype=float).reshape(-1, nc)
    if len(u) != m:
        raise DecompositionError(f"dim u = {len(u)} but m = {m}")
    bd = decomp.b_d
    for name, rows in (("v_subspace", v), ("u_frame", u)):
        for row in rows:
            if np.linalg.norm(_project_out(row, bd, g)) > tolerance * max(1.0, np.linalg.norm(row)):
                raise DecompositionError(f"{name} vector {np.round(row, 6).tolist()} is not in b_d")
    if len(v) and len(u) and np.abs(v @ g @ u.T).max() > tolerance:
        raise DecompositionError("u_frame is not Q-orthogonal to v_subspace")
    if np.linalg.matrix_rank(np.vstack([v, u]) if len(v) else u, tol=1e-9) != len(v) + len(u):
        raise DecompositionError("u_frame together with v_subspace is linearly dependent")
    if len(v) + len(u) != len(bd):
        raise DecompositionError(
            f"dim b_d = {len(bd)} but dim v + dim u = {len(v)} + {len(u)}; "
            "the isotropy does not have the required shape (dim u must equal m)"
        )
    if k_params is None:
        k_params = k_default(model, decomp, m)
    k_params = tuple(complex(k) for k in k_params)
    if len(k_params) != m:
        raise DecompositionError(f"expected {m} k parameters")

    idx = model.root_index
    cols: List[np.ndarray] = []
    labels: List[str] = []
    kinds: List[str] = []
    root_of: List[Optional[Root]] = []
    layer_of: List[int] = []

    def root_vec(a, c=1.0):
        w = np.zeros(model.dim, dtype=complex)
        w[nc + idx[a]] = c
        return w

    def cartan_vec(x, c=1.0):
        w = np.zeros(model.dim, dtype=complex)
        w[:nc] = c * np.asarray(x, dtype=float)
        return w

    def push(vec, label, kind, root, layer):
        cols.append(vec)
        labels.append(label)
        kinds.append(kind)
        root_of.append(root)
        layer_of.append(layer)

    def push_pair(gam, layer, tag=""):
        lab = model.label(gam)
        push(root_vec(gam) - root_vec(neg(gam)), f"A[{lab}]{tag}", "A", gam, layer)
        push(1j * (root_vec(gam) + root_vec(neg(gam))), f"B[{lab}]{tag}", "B", gam, layer)

    for j in range(m):
        L = decomp.layers[j]
        a = L.alpha
        a2 = float(model.pair(a, a))
        k = k_params[j]
        push(cartan_vec(u[j], 1j), f"X1^{j + 1}", "X1", None, j)
        push(cartan_vec(a, 2j / a2), f"X2^{j + 1}", "X2", a, j)
        push(2 * (k.conjugate() * root_vec(a) - k * root_vec(neg(a))), f"X3^{j + 1}", "X3", a, j)
        push(2j * (k.conjugate() * root_vec(a) + k * root_vec(neg(a))), f"X4^{j + 1}", "X4", a, j)
        for gam in L.f_roots:
            push_pair(gam, j)
    n_m = len(cols)
    for r, row in enumerate(v):
        push(cartan_vec(row, 1j), f"V{r + 1}", "V", None, -1)
    for j in range(m, d):
        L = decomp.layers[j]
        push(cartan_vec(L.alpha, 1j), f"T^{j + 1}", "T", L.alpha, -1)
        push_pair(L.alpha, -1)
        for gam in L.f_roots:
            push_pair(gam, -1)
    basis = np.array(cols).T
    if basis.shape != (model.dim, model.dim):
        raise DecompositionError("internal: basis of g has the wrong size")
    return CosetSpace(
        model=model,
        table=table,
        decomposition=decomp,
        isotropy=isotropy,
        k_params=k_params,
        basis=basis,
        n_m=n_m,
        labels=tuple(labels),
        layer_of=np.array(layer_of[:n_m]),
        kinds=tuple(kinds),
        root_of=tuple(root_of),
    )


# ---------------------------------------------------------------------------
# hypercomplex structure


@dataclass(frozen=True, eq=False)
class HypercomplexStructure:
    coset: CosetSpace
    I: np.ndarray
    J: np.ndarray
    K: np.ndarray
    k_params: Tuple[complex, ...]

    @property
    def layer_of(self) -> np.ndarray:
        return self.coset.layer_of


def _ad_block(coset: CosetSpace, x: int, idx: np.ndarray) -> Tuple[np.ndarray, float]:
    """Matrix (out, in) of ``ad(F_x)`` on the span of ``idx`` and its leakage."""
    c = coset.structure
    full = c[x][idx].T  # rows: all outputs, cols: inputs in idx
    block = full[idx]
    leak = np.delete(full, idx, axis=0)
    return block, float(np.abs(leak).max(initial=0.0))


def hypercomplex_structure(
    coset: CosetSpace,
    k_params: Optional[Sequence[complex]] = None,
    validate: bool = True,
    tolerance: float = 1e-9,
) -> HypercomplexStructure:
    """``I`` and ``J`` on ``m`` from the Joyce rules.

    With ``k_params`` different from the coset's, the ``d_j`` basis is rebuilt.
    ``validate=False`` skips the normalization and bracket checks (used to
    probe deliberately broken parameters).
    """
    if k_params is not None and tuple(complex(k) for k in k_params) != coset.k_params:
        coset = coset.with_k(k_params)
    model = coset.model
    if validate:
        for j, L in enumerate(coset.layers):
            want = 1.0 / (2.0 * float(model.pair(L.alpha, L.alpha)))
            if abs(abs(coset.k_params[j]) ** 2 - want) > tolerance * want:
                raise DecompositionError(
                    f"|k_{j + 1}|^2 = {abs(coset.k_params[j]) ** 2:.6g}, expected {want:.6g}"
                )
        res = su2_bracket_residual(coset)
        if res > tolerance:
            raise DecompositionError(f"X_2, X_3, X_4 bracket relations fail (residual {res:.3e})")
    n = coset.n_m
    I = np.zeros((n, n))
    J = np.zeros((n, n))
    for j in range(coset.m):
        x1, x2, x3, x4 = (coset.index_of(f"X{s}^{j + 1}") for s in range(1, 5))
        # I X1 = X2, I X2 = -X1, I X3 = X4, I X4 = -X3
        I[x2, x1], I[x1, x2], I[x4, x3], I[x3, x4] = 1, -1, 1, -1
        # J X1 = X3, J X3 = -X1, J X2 = -X4, J X4 = X2
        J[x3, x1], J[x1, x3], J[x4, x2], J[x2, x4] = 1, -1, -1, 1
        f = np.array([i for i in coset.layer_slice(j) if coset.kinds[i] in ("A", "B")], dtype=int)
        if len(f):
            bi, leak_i = _ad_block(coset, x2, f)
            bj, leak_j = _ad_block(coset, x3, f)
            if validate and max(leak_i, leak_j) > tolerance:
                raise DecompositionError(f"ad(X_2), ad(X_3) do not preserve f_{j + 1}")
            I[np.ix_(f, f)] = bi
            J[np.ix_(f, f)] = bj
    return HypercomplexStructure(coset=coset, I=I, J=J, K=I @ J, k_params=coset.k_params)


def su2_bracket_residual(coset: CosetSpace) -> float:
    """Max residual of ``[X2,X3]=2X4, [X3,X4]=2X2, [X4,X2]=2X3`` over layers."""
    c = coset.structure
    worst = 0.0
    for j in range(coset.m):
        x2, x3, x4 = (coset.index_of(f"X{s}^{j + 1}") for s in (2, 3, 4))
        for a, b, out in ((x2, x3, x4), (x3, x4, x2), (x4, x2, x3)):
            target = np.zeros(coset.dim)
            target[out] = 2.0
            worst = max(worst, float(np.abs(c[a, b] - target).max()))
    return worst


def _closure_residual(coset: CosetSpace, P: np.ndarray) -> float:
    """Max ``(0,1)``-part of ``[Z, W]_m`` for ``Z, W`` of type (1,0) w.r.t. ``P``."""
    n = coset.n_m
    p10 = 0.5 * (np.eye(n) - 1j * P)
    u, s, _ = np.linalg.svd(p10)
    hol = u[:, : int((s > 0.5).sum())]
    br = np.einsum("ax,by,abc->xyc", hol, hol, coset.c_mm, optimize=True)
    p01 = 0.5 * (np.eye(n) + 1j * P)
    return float(np.abs(br @ p01.T).max(initial=0.0))


def main_equation_residual(hc: HypercomplexStructure) -> float:
    """Check ``I E_b = i E_b`` and the stated formulas for ``J E_alpha``, ``J E_g``."""
    coset = hc.coset
    model, table = coset.model, coset.table
    worst = 0.0
    for j, L in enumerate(coset.layers):
        k = coset.k_params[j]
        for b in L.roots_plus:
            e = coset.m_root(b)
            worst = max(worst, float(np.abs(hc.I @ e - 1j * e).max()))
        a = L.alpha
        h = coset.to_real(coset.cw_cartan(a))[: coset.n_m]
        lhs = hc.J @ coset.m_root(a)
        rhs = k * (h + 1j * (hc.I @ h))
        worst = max(worst, float(np.abs(lhs - rhs).max()))
        for gam in L.f_roots:
            lhs = hc.J @ coset.m_root(gam)
            rhs = 2 * k * table.n(gam, neg(a)) * coset.m_root(sub(gam, a))
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def verify_hypercomplex(hc: HypercomplexStructure) -> Dict[str, float]:
    """Residuals of the hypercomplex identities, invariance and integrability."""
    coset = hc.coset
    n = coset.n_m
    eye = np.eye(n)
    I, J, K = hc.I, hc.J, hc.K
    ad_l = coset.ad_l
    adl_i = max((float(np.abs(a @ I - I @ a).max()) for a in ad_l), default=0.0)
    adl_j = max((float(np.abs(a @ J - J @ a).max()) for a in ad_l), default=0.0)
    k_norm = 0.0
    for j, L in enumerate(coset.layers):
        want = 1.0 / (2.0 * float(coset.model.pair(L.alpha, L.alpha)))
        k_norm = max(k_norm, abs(abs(hc.k_params[j]) ** 2 - want) / want)
    return {
        "I_squared": float(np.abs(I @ I + eye).max()),
        "J_squared": float(np.abs(J @ J + eye).max()),
        "anticommute": float(np.abs(I @ J + J @ I).max()),
        "K_equals_IJ": float(np.abs(K - I @ J).max()),
        "ad_l_I": adl_i,
        "ad_l_J": adl_j,
        "closure_I": _closure_residual(coset, I),
        "closure_J": _closure_residual(coset, J),
        "su2_brackets": su2_bracket_residual(coset),
        "main_equation": main_equation_residual(hc),
        "k_normalization": k_norm,
    }
