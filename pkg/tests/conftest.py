"""Shared hypothesis strategies and fixtures."""
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from lie3cert.exactfield import FieldElement
from lie3cert.linalg3 import Mat3
from lie3cert.registry import load_registry

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

small_fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)

# general elements of Q(sqrt2, sqrt3, i)
field_elements = st.lists(small_fractions, min_size=8, max_size=8).map(FieldElement.from_coords)
nonzero_elements = field_elements.filter(lambda x: not x.is_zero())
real_elements = st.lists(small_fractions, min_size=4, max_size=4).map(
    lambda cs: FieldElement.from_coords(list(cs) + [0, 0, 0, 0]))
rational_elements = small_fractions.map(FieldElement.rational)


def _mat(entries):
    return Mat3([entries[0:3], entries[3:6], entries[6:9]])


# Gaussian-rational matrices keep products cheap
gaussian = st.tuples(small_fractions, small_fractions).map(
    lambda t: FieldElement.from_coords([t[0], 0, 0, 0, t[1], 0, 0, 0]))
matrices = st.lists(gaussian, min_size=9, max_size=9).map(_mat)
rational_matrices = st.lists(rational_elements, min_size=9, max_size=9).map(_mat)
traceless = matrices.map(lambda m: m - Mat3.identity().scale(m.trace() / 3))


@pytest.fixture(scope="session")
def reg():
    return load_registry()


@pytest.fixture(scope="session")
def full_report(reg):
    from lie3cert.verifier import verify

    return verify("all", samples=5, seed=0, reg=reg)


@pytest.fixture(scope="session")
def claim_forms(reg):
    from lie3cert.verifier import build_claims

    return {c.id: c.form for c in build_claims("all", reg)}
