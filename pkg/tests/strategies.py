"""Shared hypothesis strategies and small builders for the test suite."""

from fractions import Fraction

from hypothesis import strategies as st

from gaudin_duality.superpoly import Generator, SuperPolyAlgebra
from gaudin_duality.weylalg import WeylElement, WeylProfile

small_rationals = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 3))
nonzero_ints = st.integers(-4, 4).filter(bool)


def mixed_algebra():
    gens = [Generator("a", 0, i, 0) for i in (1, 2)] + [Generator("t", 0, i, 1) for i in (1, 2, 3)]
    return SuperPolyAlgebra(gens)


@st.composite
def superpolys(draw, alg, max_terms=3):
    out = alg.zero()
    for _ in range(draw(st.integers(0, max_terms))):
        powers = {}
        for g in alg.generators:
            e = draw(st.integers(0, 1 if g.parity else 2))
            if e:
                powers[g.label] = e
        out = out + alg.monomial(powers) * draw(nonzero_ints)
    return out


@st.composite
def homogeneous_superpolys(draw, alg, parity, max_terms=3):
    f = draw(superpolys(alg, max_terms))
    return alg.parity_parts(f).get(parity, alg.zero())


PROFILES = [WeylProfile(2, 1, 1, 1, 1), WeylProfile(1, 0, 0, 2, 2), WeylProfile(2, 0, 0, 0, 2)]


@st.composite
def weyl_keys(draw, prof):
    W = prof.weyl
    nv = len(prof.variables)

    def block():
        e = {}
        for _ in range(draw(st.integers(0, 3))):
            v = draw(st.integers(0, nv - 1))
            e[v] = 1 if prof.parities[v] else e.get(v, 0) + 1
        return sorted(e.items())

    return W.make_key(block(), block())


@st.composite
def weyl_elements(draw, prof, max_terms=3):
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        terms[draw(weyl_keys(prof))] = draw(nonzero_ints)
    return WeylElement(prof.weyl, terms)
