from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from joyce_hkt.lie_core import (
    CartanWeylElement,
    LieAlgebraError,
    add,
    bracket,
    build_algebra,
    conjugate,
    killing,
    killing_form,
    neg,
    quadratic_identity_residuals,
    relation_residuals,
    root_string,
)

from conftest import table_for


def sl_killing_oracle(n, x, y):
    """tr(ad x ad y) on sl(n), computed from matrix commutators."""
    basis = [np.eye(n)[:, [i]] @ np.eye(n)[[j], :] for i in range(n) for j in range(n)]
    flat = np.array([b.ravel() for b in basis]).T

    def ad(z):
        return np.linalg.lstsq(flat, np.array([(z @ b - b @ z).ravel() for b in basis]).T, rcond=None)[0]

    return float(np.trace(ad(x) @ ad(y)))


def t_of(model, root):
    """Matrix t_a for a root of sl(n): B(t_a, H) = a(H), solved through the oracle."""
    n = model.factors[0][1] + 1
    eps = model.epsilon_vector(root)
    diag_basis = [np.diag(np.eye(n)[i] - np.eye(n)[i + 1]) for i in range(n - 1)]
    gram = np.array([[sl_killing_oracle(n, a, b) for b in diag_basis] for a in diag_basis])
    rhs = np.array([eps[i] - eps[i + 1] for i in range(n - 1)], dtype=float)
    coef = np.linalg.solve(gram, rhs)
    return sum(c * d for c, d in zip(coef, diag_basis)), np.array(eps, dtype=float)


def test_a2_roots_and_norms():
    model = build_algebra([("A", 2)])
    assert len(model.roots) == 6
    assert all(model.pair(a, a) == Fraction(1, 3) for a in model.roots)
    # oracle: alpha(t_alpha) from the matrix trace form
    a = model.root_from_epsilon(0, 1, 2)
    t, eps = t_of(model, a)
    assert np.isclose(eps @ np.diag(t), 1 / 3)


def test_a4_root_count():
    model = build_algebra([("A", 4)])
    assert len(model.roots) == 20
    assert len(model.positive_roots) == 10


def test_product_components_orthogonal():
    model = build_algebra([("A", 2), ("A", 2)], 2)
    assert len(model.roots) == 12
    assert {model.component_of[a] for a in model.roots} == {0, 1}
    for a in model.roots:
        for b in model.roots:
            if model.component_of[a] != model.component_of[b]:
                assert model.pair(a, b) == 0


def test_killing_form_values():
    model = build_algebra([("A", 2)])
    e12, e13, e23 = (model.root_from_epsilon(0, i, j) for i, j in ((1, 2), (1, 3), (2, 3)))
    assert killing_form(model, e12, e13) == Fraction(1, 6)
    assert killing_form(model, e12, e23) == Fraction(-1, 6)
    for a in model.roots:
        assert killing_form(model, a, neg(a)) == -model.pair(a, a)
    # oracle for the frozen values
    t13, _ = t_of(model, e13)
    _, eps12 = t_of(model, e12)
    assert np.isclose(eps12 @ np.diag(t13), 1 / 6)


def test_killing_normalization_a_series():
    for n in range(2, 7):
        model = build_algebra([("A", n - 1)])
        assert all(model.pair(a, a) == Fraction(1, n) for a in model.roots)


def test_root_strings():
    model = build_algebra([("A", 2)])
    e12, e13, e23 = (model.root_from_epsilon(0, i, j) for i, j in ((1, 2), (1, 3), (2, 3)))
    assert root_string(model, e12, e23) == (0, 1)
    assert root_string(model, e12, e13) == (1, 0)
    g2 = build_algebra([("G2", 2)])
    simple = [a for a in g2.positive_roots if g2.height(a) == 1]
    short = min(simple, key=lambda a: g2.pair(a, a))
    long_ = max(simple, key=lambda a: g2.pair(a, a))
    assert root_string(g2, short, long_) == (0, 3)
    with pytest.raises(LieAlgebraError):
        root_string(model, e12, neg(e12))


def test_structure_constant_magnitude_a2():
    table = table_for((("A", 2),))
    model = table.model
    e12, e23 = model.root_from_epsilon(0, 1, 2), model.root_from_epsilon(0, 2, 3)
    assert abs(table.n(e12, e23)) == pytest.approx(np.sqrt(1 / 6), abs=1e-12)
    assert table.n(e12, neg(e23)) == 0.0
    assert table.n(e12, e23) * table.n(e23, e12) == pytest.approx(-table.n(e12, e23) ** 2)


@pytest.mark.parametrize(
    "factors", [[("A", r)] for r in range(1, 6)] + [[("B", 2)], [("B", 3)], [("C", 3)], [("D", 4)], [("G2", 2)], [("F4", 4)]]
)
def test_relations(factors):
    table = table_for(tuple(factors))
    rel = relation_residuals(table)
    assert rel["first_line"] < 1e-12
    assert rel["cocycle"] < 1e-10
    assert rel["string"] < 1e-10
    assert quadratic_identity_residuals(table)["minus"] < 1e-10


def test_printed_plus_form_fails_on_a2():
    q = quadratic_identity_residuals(table_for((("A", 2),)))
    assert q["plus"] > 0.1


def test_brackets_and_conjugation():
    table = table_for((("A", 3),))
    model = table.model
    for a in model.roots:
        ea = CartanWeylElement.root_vector(table, a)
        ema = CartanWeylElement.root_vector(table, neg(a))
        ta = CartanWeylElement.cartan(table, a)
        assert bracket(ta, ea).allclose(ea * float(model.pair(a, a)))
        assert bracket(ea, ema).allclose(ta)
        assert killing(ea, ema) == pytest.approx(1.0)
        assert conjugate(ea).allclose(-ema)
        assert conjugate(ta * 1j).allclose(ta * 1j)
        assert bracket(ea, ea).norm() == 0.0


def test_input_errors():
    with pytest.raises(LieAlgebraError):
        build_algebra([("Q", 2)])
    with pytest.raises(LieAlgebraError):
        build_algebra([("A", 9)])
    with pytest.raises(LieAlgebraError):
        build_algebra([("D", 3)])
    with pytest.raises(LieAlgebraError):
        build_algebra([("E6", 5)])
    assert len(build_algebra([("A", 9)], rank_cap=9).roots) == 90


def test_model_mismatch_rejected():
    t1, t2 = table_for((("A", 1),)), table_for((("A", 2),))
    x = CartanWeylElement.root_vector(t1, t1.model.roots[0])
    y = CartanWeylElement.root_vector(t2, t2.model.roots[0])
    with pytest.raises(LieAlgebraError):
        bracket(x, y)


def _element(table, data):
    dim = table.model.dim
    re = data.draw(st.lists(st.floats(-2, 2), min_size=dim, max_size=dim))
    im = data.draw(st.lists(st.floats(-2, 2), min_size=dim, max_size=dim))
    return CartanWeylElement(table, np.array(re) + 1j * np.array(im))


TYPES = [(("A", 2),), (("B", 2),), (("G2", 2),), (("A", 1), ("A", 1))]


@given(st.sampled_from(TYPES), st.data())
def test_jacobi_and_antisymmetry_property(factors, data):
    table = table_for(factors)
    x, y, z = (_element(table, data) for _ in range(3))
    jac = bracket(bracket(x, y), z) + bracket(bracket(y, z), x) + bracket(bracket(z, x), y)
    assert jac.norm() < 1e-10
    assert (bracket(x, y) + bracket(y, x)).norm() < 1e-12


@given(st.sampled_from(TYPES), st.data())
def test_conjugation_property(factors, data):
    table = table_for(factors)
    x, y = _element(table, data), _element(table, data)
    assert conjugate(conjugate(x)).allclose(x)
    assert conjugate(bracket(x, y)).allclose(bracket(conjugate(x), conjugate(y)), atol=1e-10)


@given(st.sampled_from(["A", "B", "C", "D"]), st.integers(1, 6), st.data())
def test_cartan_integrality_property(label, rank, data):
    rank = max(rank, {"A": 1, "B": 2, "C": 2, "D": 4}[label])
    model = build_algebra([(label, rank)])
    a = data.draw(st.sampled_from(model.roots))
    b = data.draw(st.sampled_from(model.roots))
    v = 2 * model.pair(b, a) / model.pair(a, a)
    assert v.denominator == 1
    assert model.pair(a, b) == model.pair(b, a)
    assert model.pair(a, a) > 0
    assert neg(a) in model.root_set
    assert model.is_positive(a) != model.is_positive(neg(a))


@given(st.sampled_from(TYPES), st.data())
def test_string_bounds_property(factors, data):
    model = table_for(factors).model
    a = data.draw(st.sampled_from(model.roots))
    b = data.draw(st.sampled_from([r for r in model.roots if r not in (a, neg(a))] or [None]))
    if b is None:
        return
    p, q = root_string(model, a, b)
    assert p - q == model.cartan_integer(b, a)
    for k in range(-p, q + 1):
        assert model.is_root(tuple(x + k * y for x, y in zip(b, a)))
    assert not model.is_root(tuple(x - (p + 1) * y for x, y in zip(b, a)))
    assert not model.is_root(add(tuple(x + q * y for x, y in zip(b, a)), a))
