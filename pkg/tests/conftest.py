"""Shared fixtures and hypothesis strategies."""

from __future__ import annotations

from hypothesis import HealthCheck, settings, strategies as st

from qfsplit import PolynomialRing, PrimeField

settings.register_profile(
    "qfsplit",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("qfsplit")


def ring_over(p: int, variables=("x", "y", "z")) -> PolynomialRing:
    return PolynomialRing(PrimeField(p), variables)


def poly_strategy(ring: PolynomialRing, max_exp: int = 4, max_terms: int = 6):
    """Random polynomials as exponent-dict draws reduced through from_terms."""
    n = len(ring.variables)
    exps = st.tuples(*([st.integers(0, max_exp)] * n))
    coeffs = st.integers(0, ring.field.p - 1)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(ring.from_terms)


def nonzero_poly_strategy(ring: PolynomialRing, max_exp: int = 4, max_terms: int = 6):
    return poly_strategy(ring, max_exp, max_terms).filter(lambda f: not f.is_zero())
