#!/usr/bin/env python3
# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.

from fractions import Fraction
from pathlib import Path

from hypothesis import strategies as st
from triangle_jacobi.v0.exact import ParamPoly

ROOT = Path(__file__).resolve().parents[2]
CATALOGUE_PATH = ROOT / "src" / "catalogue" / "rank_two_jacobi.txt"

RELATION_COUNT = 44
STRUCTURE_COUNT = 5

SMALL_NAMES = ("x", "y", "a", "b")


def small_scalars() -> st.SearchStrategy:
    """Integers and fractions with small numerators and denominators."""
    return st.one_of(
        st.integers(min_value=-5, max_value=5),
        st.fractions(min_value=-5, max_value=5, max_denominator=4),
    )


@st.composite
def small_polys(draw, names=SMALL_NAMES, max_terms: int = 4, max_power: int = 2) -> ParamPoly:
    """Sparse polynomials of low degree in a few indeterminates."""
    poly = ParamPoly()
    for _ in range(draw(st.integers(min_value=0, max_value=max_terms))):
        powers = {
            name: draw(st.integers(min_value=0, max_value=max_power)) for name in names
        }
        coefficient = draw(small_scalars())
        poly = poly + ParamPoly.monomial(powers, Fraction(coefficient))
    return poly
