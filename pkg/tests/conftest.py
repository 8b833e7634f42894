import functools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from joyce_hkt.catalog import named_isotropy
from joyce_hkt.joyce import coset_space, hypercomplex_structure, joyce_decompose
from joyce_hkt.lie_core import build_algebra, structure_constants

settings.register_profile(
    "default", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def table_for(factors, center_dim=0):
    return structure_constants(build_algebra(list(factors), center_dim))


@functools.lru_cache(maxsize=None)
def space(factors, center_dim=0, m=None, frame="default"):
    """(coset, hypercomplex structure) for a factor tuple such as (("A", 4),)."""
    model = build_algebra(list(factors), center_dim)
    decomp = joyce_decompose(model)
    iso = named_isotropy(decomp, frame, m)
    coset = coset_space(model, decomp, iso)
    return coset, hypercomplex_structure(coset)


SU3 = (("A", 2),)
SU5 = (("A", 4),)
SU4 = (("A", 3),)


def su3():
    return space(SU3)


def su5():
    return space(SU5)


def su4_mod_su2():
    return space(SU4, 0, 1)


def su3xsu3():
    return space((("A", 2), ("A", 2)), 2, None, "product-diagonal")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
