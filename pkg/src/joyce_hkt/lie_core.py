"""Root systems and a Cartan-Weyl basis of a compact reductive Lie algebra.

Roots, pairings and root strings are exact (``fractions.Fraction``).  The
structure constants ``N[a, b]`` involve square roots of rationals and are
stored as floats.

Normalization of the Cartan-Weyl basis ``{t_i, c_k, E_a}``:

* ``(l, m)`` is the Killing form transported to the dual of the Cartan
  subalgebra, one simple factor at a time; on the center an identity pairing is
  used (this fixes the Ad-invariant product on the center).
* ``B(E_a, E_-a) = 1`` so that ``[E_a, E_-a] = t_a``.
* ``conj(E_a) = -E_-a`` and ``conj(t) = -t`` for real ``t``; the compact real
  form is spanned by ``i t``, ``E_a - E_-a`` and ``i (E_a + E_-a)``.

Cartan elements are written in the basis ``t_{a_1}, ..., t_{a_r}, c_1, ...,
c_l`` (simple-root coroots-up-to-scale followed by the center), so the
coordinate vector of ``t_a`` is the simple-root coordinate vector of ``a``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

Root = Tuple[int, ...]
Q = Fraction

EXCEPTIONAL_RANKS = {"E6": 6, "E7": 7, "E8": 8, "F4": 4, "G2": 2}
CLASSICAL_MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 4}
DEFAULT_RANK_CAP = 8


class LieAlgebraError(ValueError):
    """Invalid root-system input or an internal consistency failure."""


# ---------------------------------------------------------------------------
# simple roots in Euclidean realizations


def _unit(n: int, i: int, s: Fraction = Q(1)) -> List[Fraction]:
    v = [Q(0)] * n
    v[i] = s
    return v


def _diff(n: int, i: int, j: int) -> List[Fraction]:
    v = [Q(0)] * n
    v[i] += 1
    v[j] -= 1
    return v


def _euclidean_simple_roots(label: str, rank: int) -> List[List[Fraction]]:
    if label == "A":
        return [_diff(rank + 1, i, i + 1) for i in range(rank)]
    if label == "B":
        return [_diff(rank, i, i + 1) for i in range(rank - 1)] + [_unit(rank, rank - 1)]
    if label == "C":
        return [_diff(rank, i, i + 1) for i in range(rank - 1)] + [_unit(rank, rank - 1, Q(2))]
    if label == "D":
        last = [Q(0)] * rank
        last[rank - 2] = last[rank - 1] = Q(1)
        return [_diff(rank, i, i + 1) for i in range(rank - 1)] + [last]
    if label == "G2":
        return [[Q(1), Q(-1), Q(0)], [Q(-2), Q(1), Q(1)]]
    if label == "F4":
        h = Q(1, 2)
        return [_diff(4, 1, 2), _diff(4, 2, 3), _unit(4, 3), [h, -h, -h, -h]]
    if label in ("E6", "E7", "E8"):
        h = Q(1, 2)
        a1 = [h, -h, -h, -h, -h, -h, -h, h]
        a2 = [Q(0)] * 8
        a2[0] = a2[1] = Q(1)
        rest = [_diff(8, k, k - 1) for k in range(1, 7)]
        return ([a1, a2] + rest)[:rank]
    raise LieAlgebraError(f"unknown type label {label!r}")


def _dot(x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(x, y)), Q(0))


def _positive_roots(gram: List[List[Fraction]]) -> List[Root]:
    """Positive roots in simple-root coordinates, built height by height."""
    r = len(gram)
    simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    known = set(simple)
    level = list(simple)
    out = list(simple)
    while level:
        nxt = []
        for beta in level:
            for i in range(r):
                p = 0
                while True:
                    cand = tuple(c - (p + 1) * (k == i) for k, c in enumerate(beta))
                    if cand in known:
                        p += 1
                    else:
                        break
                pair = sum((beta[k] * gram[k][i] for k in range(r)), Q(0))
                cartan = 2 * pair / gram[i][i]
                if p - cartan > 0:
                    up = tuple(c + (k == i) for k, c in enumerate(beta))
                    if up not in known:
                        known.add(up)
                        nxt.append(up)
        out.extend(nxt)
        level = nxt
    return out


def simple_factor(label: str, rank: int, rank_cap: int = DEFAULT_RANK_CAP):
    """Killing-normalized Gram matrix of simple roots and the positive roots.

    Returns ``(gram, positive_roots)`` with exact rational entries.
    """
    if label in EXCEPTIONAL_RANKS:
        if rank != EXCEPTIONAL_RANKS[label]:
            raise LieAlgebraError(f"{label} has rank {EXCEPTIONAL_RANKS[label]}, got {rank}")
    elif label in CLASSICAL_MIN_RANK:
        if not CLASSICAL_MIN_RANK[label] <= rank <= rank_cap:
            raise LieAlgebraError(
                f"rank {rank} out of range for type {label} "
                f"({CLASSICAL_MIN_RANK[label]}..{rank_cap})"
            )
    else:
        raise LieAlgebraError(f"unknown type label {label!r}")
    simple = _euclidean_simple_roots(label, rank)
    gram0 = [[_dot(a, b) for b in simple] for a in simple]
    pos = _positive_roots(gram0)
    # The Killing form on the dual is (.,.)_0 / k with k = sum_a (a, l)_0^2 / (l, l)_0.
    lam = [Q(int(i == 0)) for i in range(rank)]
    norm_l = gram0[0][0]
    total = Q(0)
    for root in pos:
        v = sum((root[k] * gram0[k][0] for k in range(rank)), Q(0))
        total += 2 * v * v
    k = total / norm_l
    gram = [[x / k for x in row] for row in gram0]
    return gram, pos


def _joyce_epsilon_order(n: int) -> List[int]:
    """Index order 1, 3, 5, ..., 6, 4, 2 used to label type A roots by eps_i."""
    odds = list(range(1, n + 1, 2))
    evens = list(range(2, n + 1, 2))
    return odds + evens[::-1]


# ---------------------------------------------------------------------------
# the algebra model


@dataclass(frozen=True)
class AlgebraModel:
    """A compact reductive Lie algebra given by simple factors and a center.

    ``roots`` holds all roots as integer vectors of length ``rank + center_dim``
    in simple-root coordinates (center slots are zero).  Positive roots come
    first, sorted by height and then reverse-lexicographically; the negative
    roots follow in the same order.
    """

    factors: Tuple[Tuple[str, int], ...]
    center_dim: int
    gram: Tuple[Tuple[Fraction, ...], ...]
    positive_roots: Tuple[Root, ...]
    component_of: Dict[Root, int]
    factor_slices: Tuple[Tuple[int, int], ...]

    @property
    def rank(self) -> int:
        return sum(r for _, r in self.factors)

    @property
    def cartan_dim(self) -> int:
        return self.rank + self.center_dim

    @cached_property
    def roots(self) -> Tuple[Root, ...]:
        return self.positive_roots + tuple(neg(a) for a in self.positive_roots)

    @cached_property
    def root_index(self) -> Dict[Root, int]:
        return {a: i for i, a in enumerate(self.roots)}

    @cached_property
    def root_set(self) -> frozenset:
        return frozenset(self.roots)

    @property
    def dim(self) -> int:
        return self.cartan_dim + len(self.roots)

    def is_root(self, a: Root) -> bool:
        return a in self.root_set

    def is_positive(self, a: Root) -> bool:
        return any(c > 0 for c in a)

    def height(self, a: Root) -> int:
        return sum(a)

    def pair(self, a: Sequence, b: Sequence) -> Fraction:
        """Exact pairing ``(a, b)`` of two weight (or Cartan) coordinate vectors."""
        g = self.gram
        n = self.cartan_dim
        return sum(
            (Q(a[i]) * g[i][j] * Q(b[j]) for i in range(n) if a[i] for j in range(n) if b[j] and g[i][j]),
            Q(0),
        )

    def cartan_integer(self, b: Root, a: Root) -> int:
        """``2 (b, a) / (a, a)``."""
        v = 2 * self.pair(b, a) / self.pair(a, a)
        if v.denominator != 1:
            raise LieAlgebraError(f"non-integral Cartan number for {b}, {a}")
        return int(v)

    @cached_property
    def gram_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.gram])

    @cached_property
    def root_array(self) -> np.ndarray:
        return np.array(self.roots, dtype=float).reshape(len(self.roots), self.cartan_dim)

    def label(self, a: Root) -> str:
        """Readable name; type A factors use eps-labels (order 1, 3, 5, ..., 4, 2)."""
        comp = self.component_of.get(tuple(a))
        if comp is None:
            raise LieAlgebraError(f"{a} is not a root")
        typ, rank = self.factors[comp]
        lo, hi = self.factor_slices[comp]
        coords = a[lo:hi]
        prefix = f"[{comp}]" if len(self.factors) > 1 else ""
        if typ == "A":
            eps = self.epsilon_vector(a)
            i = next(k for k, c in enumerate(eps) if c == 1)
            j = next(k for k, c in enumerate(eps) if c == -1)
            return f"{prefix}e{i + 1}-e{j + 1}"
        terms = []
        for k, c in enumerate(coords):
            if c:
                terms.append(f"{'' if abs(c) == 1 else abs(c)}a{k + 1}")
                terms[-1] = ("-" if c < 0 else "+") + terms[-1]
        s = "".join(terms)
        return prefix + (s[1:] if s.startswith("+") else s)

    def epsilon_vector(self, a: Root) -> List[int]:
        """eps-coordinates (length ``n``) of a root of a type ``A_{n-1}`` factor."""
        comp = self.component_of[tuple(a)]
        typ, rank = self.factors[comp]
        if typ != "A":
            raise LieAlgebraError("eps-coordinates only for type A factors")
        lo, _ = self.factor_slices[comp]
        n = rank + 1
        order = _joyce_epsilon_order(n)
        eps = [0] * n
        for i in range(rank):
            c = a[lo + i]
            eps[order[i] - 1] += c
            eps[order[i + 1] - 1] -= c
        return eps

    def root_from_epsilon(self, factor: int, i: int, j: int) -> Root:
        """The root ``eps_i - eps_j`` (1-based) of a type A factor."""
        typ, rank = self.factors[factor]
        if typ != "A":
            raise LieAlgebraError("eps-coordinates only for type A factors")
        for a in self.roots:
            if self.component_of[a] != factor:
                continue
            eps = self.epsilon_vector(a)
            if eps[i - 1] == 1 and eps[j - 1] == -1:
                return a
        raise LieAlgebraError(f"no root e{i}-e{j} in factor {factor}")

    def cartan_from_diagonal(self, factor: int, diag: Sequence) -> Tuple[Fraction, ...]:
        """Cartan coordinates of the real traceless matrix ``diag(d)`` in ``su(n)``.

        ``t_{eps_p - eps_q} = (e_pp - e_qq) / (2n)``, so the compact element is
        ``i * diag(d)``.
        """
        typ, rank = self.factors[factor]
        if typ != "A":
            raise LieAlgebraError("matrix realization only for type A factors")
        n = rank + 1
        d = [Q(x) for x in diag]
        if len(d) != n or sum(d) != 0:
            raise LieAlgebraError("expected a traceless diagonal of length n")
        order = _joyce_epsilon_order(n)
        coords = [Q(0)] * self.cartan_dim
        lo, _ = self.factor_slices[factor]
        acc = Q(0)
        for i in range(rank):
            acc += d[order[i] - 1]
            coords[lo + i] = 2 * n * acc
        return tuple(coords)


def neg(a: Root) -> Root:
    return tuple(-c for c in a)


def add(a: Root, b: Root) -> Root:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Root, b: Root) -> Root:
    return tuple(x - y for x, y in zip(a, b))


def _order_key(a: Root):
    return (sum(a), tuple(-c for c in a))


def build_algebra(
    factors: Sequence[Tuple[str, int]], center_dim: int = 0, rank_cap: int = DEFAULT_RANK_CAP
) -> AlgebraModel:
    """Assemble the reductive algebra ``center + sum of simple factors``."""
    if center_dim < 0:
        raise LieAlgebraError("center_dim must be non-negative")
    factors = tuple((str(t).upper(), int(r)) for t, r in factors)
    data = [simple_factor(t, r, rank_cap) for t, r in factors]
    rank = sum(r for _, r in factors)
    n = rank + center_dim
    gram = [[Q(0)] * n for _ in range(n)]
    slices = []
    pos: List[Root] = []
    component_of: Dict[Root, int] = {}
    lo = 0
    for comp, ((typ, r), (g, roots)) in enumerate(zip(factors, data)):
        for i in range(r):
            for j in range(r):
                gram[lo + i][lo + j] = g[i][j]
        for a in roots:
            full = [0] * n
            full[lo:lo + r] = a
            full = tuple(full)
            pos.append(full)
            component_of[full] = comp
            component_of[neg(full)] = comp
        slices.append((lo, lo + r))
        lo += r
    for k in range(rank, n):
        gram[k][k] = Q(1)
    pos.sort(key=_order_key)
    return AlgebraModel(
        factors=factors,
        center_dim=center_dim,
        gram=tuple(tuple(row) for row in gram),
        positive_roots=tuple(pos),
        component_of=component_of,
        factor_slices=tuple(slices),
    )


def killing_form(model: AlgebraModel, lam: Sequence, mu: Sequence) -> Fraction:
    """``(lam, mu) = B(t_lam, t_mu)``, exact."""
    return model.pair(lam, mu)


def root_string(model: AlgebraModel, a: Root, b: Root) -> Tuple[int, int]:
    """``(p, q)`` with ``b - p a, ..., b + q a`` the ``a``-string through ``b``."""
    a, b = tuple(a), tuple(b)
    if not (model.is_root(a) and model.is_root(b)):
        raise LieAlgebraError("root_string expects two roots")
    if b == a or b == neg(a):
        raise LieAlgebraError("b is proportional to a")
    p = 0
    while model.is_root(tuple(x - (p + 1) * y for x, y in zip(b, a))):
        p += 1
    q = 0
    while model.is_root(tuple(x + (q + 1) * y for x, y in zip(b, a))):
        q += 1
    return p, q


# ---------------------------------------------------------------------------
# structure constants


def _chevalley_constants(model: AlgebraModel) -> Dict[Tuple[Root, Root], int]:
    """Integral Chevalley constants ``[e_a, e_b] = n_ab e_{a+b}``.

    Signs are fixed by declaring ``n = +(p + 1)`` on every extraspecial pair
    for the height-then-lexicographic order of positive roots; everything
    else follows from the standard relations for a Chevalley basis with
    ``n_{-a,-b} = -n_{a,b}``.
    """
    order = {a: i for i, a in enumerate(model.positive_roots)}
    extraspecial: Dict[Root, Tuple[Root, Root]] = {}
    for xi in model.positive_roots:
        for a in model.positive_roots:
            if order[a] >= order[xi]:
                break
            b = sub(xi, a)
            if b in order:
                extraspecial[xi] = (a, b)
                break

    memo: Dict[Tuple[Root, Root], int] = {}
    pair = model.pair

    def sq(a: Root) -> Fraction:
        return pair(a, a)

    def n_of(r: Root, s: Root) -> int:
        key = (r, s)
        if key in memo:
            return memo[key]
        u = add(r, s)
        if not model.is_root(u):
            val = 0
        else:
            rp, sp = r in order, s in order
            if rp and sp:
                z, e = extraspecial[u]
                if (r, s) == (z, e):
                    val = root_string(model, z, e)[0] + 1
                elif (s, r) == (z, e):
                    val = -(root_string(model, z, e)[0] + 1)
                else:
                    acc = Q(0)
                    for (x1, y1, x2, y2) in ((s, neg(z), r, neg(e)), (neg(z), r, s, neg(e))):
                        w = add(x1, y1)
                        if model.is_root(w) and model.is_root(add(x2, y2)):
                            acc += Q(n_of(x1, y1) * n_of(x2, y2)) / sq(w)
                    exact = sq(u) / n_of(z, e) * acc
                    if exact.denominator != 1:
                        raise LieAlgebraError(f"non-integral structure constant at {r}, {s}")
                    val = int(exact)
            elif rp and not sp:
                if u in order:
                    exact = -sq(u) / sq(r) * n_of(neg(s), u)
                else:
                    exact = sq(u) / sq(s) * n_of(neg(u), r)
                if exact.denominator != 1:
                    raise LieAlgebraError(f"non-integral structure constant at {r}, {s}")
                val = int(exact)
            elif sp and not rp:
                val = -n_of(s, r)
            else:
                val = -n_of(neg(r), neg(s))
        memo[key] = val
        return val

    out = {}
    for r in model.roots:
        for s in model.roots:
            if model.is_root(add(r, s)):
                out[(r, s)] = n_of(r, s)
    return out


@dataclass(frozen=True)
class StructureConstantTable:
    """Cartan-Weyl data: ``N[a, b]``, ``H[a]`` (coordinates of ``t_a``) and strings."""

    model: AlgebraModel
    N: Dict[Tuple[Root, Root], float]
    H: Dict[Root, Tuple[Fraction, ...]]
    string: Dict[Tuple[Root, Root], Tuple[int, int]]
    chevalley: Dict[Tuple[Root, Root], int] = field(repr=False)

    def n(self, a: Root, b: Root) -> float:
        """``N_{a,b}``, zero when ``a + b`` is not a root."""
        return self.N.get((tuple(a), tuple(b)), 0.0)

    @cached_property
    def bracket_tensor(self) -> np.ndarray:
        """Real array ``C[i, j, k]`` with ``[b_i, b_j] = sum_k C[i, j, k] b_k``.

        Basis order: Cartan coordinates (``t_{a_i}`` then center), then roots
        in ``model.roots`` order.
        """
        model = self.model
        nc = model.cartan_dim
        dim = model.dim
        idx = model.root_index
        c = np.zeros((dim, dim, dim))
        gram = model.gram_array
        for a in model.roots:
            ia = nc + idx[a]
            weights = np.asarray(a, dtype=float) @ gram
            for i in range(nc):
                c[i, ia, ia] = weights[i]
                c[ia, i, ia] = -weights[i]
            c[ia, nc + idx[neg(a)], :nc] = np.asarray(a, dtype=float)
        for (a, b), v in self.N.items():
            c[nc + idx[a], nc + idx[b], nc + idx[add(a, b)]] = v
        return c

    @cached_property
    def killing_matrix(self) -> np.ndarray:
        """``B`` on the Cartan-Weyl basis (center block: identity)."""
        model = self.model
        nc = model.cartan_dim
        b = np.zeros((model.dim, model.dim))
        b[:nc, :nc] = model.gram_array
        idx = model.root_index
        for a in model.roots:
            b[nc + idx[a], nc + idx[neg(a)]] = 1.0
        return b

    @cached_property
    def conjugation_matrix(self) -> np.ndarray:
        """``P`` with ``conj(x) = P @ x.conj()`` on coordinate vectors."""
        model = self.model
        nc = model.cartan_dim
        p = np.zeros((model.dim, model.dim))
        p[:nc, :nc] = -np.eye(nc)
        idx = model.root_index
        for a in model.roots:
            p[nc + idx[neg(a)], nc + idx[a]] = -1.0
        return p


def structure_constants(model: AlgebraModel, tolerance: float = 1e-9) -> StructureConstantTable:
    """Cartan-Weyl structure constants in the ``B(E_a, E_-a) = 1`` normalization.

    Chevalley constants ``n_ab`` are rescaled by ``E_a = s_a e_a`` with
    ``s_a = s_-a = sqrt((a, a) / 2)``.  The Jacobi identity is checked on the
    full bracket and a violation raises ``LieAlgebraError``.
    """
    chev = _chevalley_constants(model)
    scale = {a: float(model.pair(a, a) / 2) ** 0.5 for a in model.roots}
    N = {
        (a, b): scale[a] * scale[b] / scale[add(a, b)] * v
        for (a, b), v in chev.items()
    }
    H = {a: tuple(Q(c) for c in a) for a in model.roots}
    strings = {}
    for a in model.roots:
        for b in model.roots:
            if b != a and b != neg(a):
                strings[(a, b)] = root_string(model, a, b)
    table = StructureConstantTable(model=model, N=N, H=H, string=strings, chevalley=chev)
    from ._kernels import jacobi_max

    c = table.bracket_tensor
    scale_c = max(1.0, float(np.abs(c).max()))
    res = jacobi_max(c) / scale_c**2
    if res > tolerance:
        raise LieAlgebraError(f"Jacobi residual {res:.3e} exceeds tolerance")
    return table


# ---------------------------------------------------------------------------
# elements of the complexified algebra


@dataclass(frozen=True, eq=False)
class CartanWeylElement:
    """Element of ``g^C`` as complex coordinates over the Cartan-Weyl basis."""

    table: StructureConstantTable
    coeffs: np.ndarray

    @classmethod
    def root_vector(cls, table: StructureConstantTable, a: Root, c: complex = 1.0):
        v = np.zeros(table.model.dim, dtype=complex)
        v[table.model.cartan_dim + table.model.root_index[tuple(a)]] = c
        return cls(table, v)

    @classmethod
    def cartan(cls, table: StructureConstantTable, coords: Sequence, c: complex = 1.0):
        v = np.zeros(table.model.dim, dtype=complex)
        v[: table.model.cartan_dim] = c * np.asarray([float(x) for x in coords])
        return cls(table, v)

    @property
    def model(self) -> AlgebraModel:
        return self.table.model

    @property
    def t_part(self) -> np.ndarray:
        return self.coeffs[: self.model.cartan_dim]

    @property
    def root_part(self) -> Dict[Root, complex]:
        nc = self.model.cartan_dim
        return {a: complex(self.coeffs[nc + i]) for i, a in enumerate(self.model.roots) if self.coeffs[nc + i] != 0}

    def _check(self, other: "CartanWeylElement") -> None:
        if other.table is not self.table:
            raise LieAlgebraError("elements belong to different models")

    def __add__(self, other):
        self._check(other)
        return CartanWeylElement(self.table, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return CartanWeylElement(self.table, self.coeffs - other.coeffs)

    def __neg__(self):
        return CartanWeylElement(self.table, -self.coeffs)

    def __mul__(self, c: complex):
        return CartanWeylElement(self.table, c * self.coeffs)

    __rmul__ = __mul__

    def allclose(self, other: "CartanWeylElement", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coeffs, other.coeffs, atol=atol, rtol=0))

    def norm(self) -> float:
        return float(np.abs(self.coeffs).max(initial=0.0))


def bracket(x: CartanWeylElement, y: CartanWeylElement) -> CartanWeylElement:
    x._check(y)
    c = x.table.bracket_tensor
    return CartanWeylElement(x.table, np.einsum("i,j,ijk->k", x.coeffs, y.coeffs, c))


def conjugate(x: CartanWeylElement) -> CartanWeylElement:
    """Conjugation with respect to the compact real form."""
    return CartanWeylElement(x.table, x.table.conjugation_matrix @ x.coeffs.conj())


def killing(x: CartanWeylElement, y: CartanWeylElement) -> complex:
    x._check(y)
    return complex(x.coeffs @ x.table.killing_matrix @ y.coeffs)


def quadratic_identity_residuals(table: StructureConstantTable) -> Dict[str, float]:
    """Max residual of ``N_{a,-b}^2 -/+ N_{a,b}^2 - (a, b)`` over root pairs.

    The ``minus`` form is the classical string identity; the ``plus`` form is
    reported for comparison only.
    """
    model = table.model
    minus = plus = 0.0
    for a in model.roots:
        for b in model.roots:
            if b == a or b == neg(a):
                continue
            lhs1 = table.n(a, neg(b)) ** 2
            lhs2 = table.n(a, b) ** 2
            rhs = float(model.pair(a, b))
            minus = max(minus, abs(lhs1 - lhs2 - rhs))
            plus = max(plus, abs(lhs1 + lhs2 - rhs))
    return {"minus": minus, "plus": plus}


def relation_residuals(table: StructureConstantTable) -> Dict[str, float]:
    """Residuals of the symmetry relations, the cocycle identity and the string formula."""
    model = table.model
    n = table.n
    first = 0.0
    for (a, b), v in table.N.items():
        c = neg(add(a, b))
        for w in (n(b, c), n(c, a), -n(b, a), -n(neg(a), neg(b))):
            first = max(first, abs(v - w) / max(1.0, abs(v)))
    cocycle = 0.0
    roots = model.roots
    for a in roots:
        for b in roots:
            ab = add(a, b)
            for c in roots:
                # N := 0 off the root set; the identity holds whenever a+b+c is a
                # root and no pairwise sum vanishes (that would add a Cartan term).
                ac, bc = add(a, c), add(b, c)
                if not model.is_root(add(ab, c)) or not (any(ab) and any(ac) and any(bc)):
                    continue
                lhs = n(ab, c) * n(a, b)
                rhs = n(ac, b) * n(a, c) + n(b, c) * n(a, bc)
                cocycle = max(cocycle, abs(lhs - rhs))
    string = 0.0
    for (a, b), (p, q) in table.string.items():
        expect = q * (p + 1) * float(model.pair(a, a)) / 2
        string = max(string, abs(n(a, b) ** 2 - expect))
    return {"first_line": first, "cocycle": cocycle, "string": string}
