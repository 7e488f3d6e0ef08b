"""Hypothesis strategies; random structures come from a Random seeded by a drawn integer."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from ncquiver import sampling
from ncquiver.ncalg import GaussRat

fractions = st.builds(Fraction, st.integers(-50, 50), st.integers(1, 12))
gauss = st.builds(GaussRat, fractions, fractions)
nonzero_gauss = gauss.filter(bool)
rngs = st.integers(0, 2**32 - 1).map(random.Random)


@st.composite
def quivers(draw, max_vertices=3, max_arrows=5):
    return sampling.random_quiver(draw(rngs), max_vertices, max_arrows)


@st.composite
def polys(draw, quiver, max_terms=4, max_len=4):
    return sampling.random_poly(quiver, draw(rngs), max_terms, max_len)


@st.composite
def necklaces(draw, quiver, max_terms=3, max_len=5):
    return sampling.random_necklace(quiver, draw(rngs),
                                    max_terms=max_terms, max_len=max_len)
