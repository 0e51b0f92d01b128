"""Tests for rationals, sparse polynomials and exact linear algebra.

Expected values here are either asserted directly, computed by an
independent oracle (term-by-term multiplication, determinant-minor rank),
or checked as algebraic identities on randomized inputs.
"""

from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoflags.errors import ChartMismatch, DegeneratePivot
from twoflags.exactalg import (
    Poly,
    RationalMatrix,
    format_rational,
    parse_rational,
    poly_content,
    poly_det,
    poly_divexact,
    polynomial_nullspace,
    primitive_tuple,
    rank_and_nullspace,
    span_includes,
)

F = Fraction


# ---------------------------------------------------------------------------
# Independent oracles (deliberately not sharing code with the library)
# ---------------------------------------------------------------------------


def oracle_mul(a: Poly, b: Poly) -> dict:
    """Term-by-term product collected in a plain dict keyed by dense exponents."""
    out: dict[tuple, Fraction] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            dense = [0] * a.arity
            for var, exp in ma:
                dense[var] += exp
            for var, exp in mb:
                dense[var] += exp
            key = tuple(dense)
            out[key] = out.get(key, F(0)) + ca * cb
    return {k: v for k, v in out.items() if v != 0}


def dense_terms(p: Poly) -> dict:
    out = {}
    for mono, coeff in p.terms.items():
        dense = [0] * p.arity
        for var, exp in mono:
            dense[var] = exp
        out[tuple(dense)] = coeff
    return out


def oracle_det(rows) -> Fraction:
    """Laplace expansion along the first row."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = F(0)
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1 :] for row in rows[1:]]
        total += (-1) ** j * rows[0][j] * oracle_det(minor)
    return total


def minor_rank(matrix: RationalMatrix) -> int:
    """Largest k with a nonzero k x k minor."""
    for k in range(min(matrix.rows, matrix.cols), 0, -1):
        for rows in combinations(range(matrix.rows), k):
            for cols in combinations(range(matrix.cols), k):
                sub = [[matrix.at(i, j) for j in cols] for i in rows]
                if oracle_det(sub) != 0:
                    return k
    return 0


# ---------------------------------------------------------------------------
# Rational text format
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "text,value",
    [("-3/7", F(-3, 7)), ("2", F(2)), ("+4/6", F(2, 3)), ("0", F(0))],
)
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["", "1.5", "3e2", "2/0", "1/-2", "--3", "a/b"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_format_roundtrip():
    for q in [F(-3, 7), F(2), F(0), F(10, 4)]:
        assert parse_rational(format_rational(q)) == q


# ---------------------------------------------------------------------------
# Polynomial arithmetic
# ---------------------------------------------------------------------------


def test_additive_inverse():
    x1 = Poly.variable(4, 1)
    assert (x1 + (-x1)).is_zero()


def test_distributivity_example():
    x1 = Poly.variable(4, 1)
    x2 = Poly.variable(4, 2)
    product = x2 * (Poly.const(4, 1) + x1)
    assert product == x2 + x1 * x2


def test_shifted_product_against_term_oracle():
    # (1/2 + x) * (2 + y) on a two-variable chart
    x = Poly.variable(2, 0)
    y = Poly.variable(2, 1)
    a = Poly.const(2, F(1, 2)) + x
    b = Poly.const(2, 2) + y
    product = a * b
    expected = {
        (0, 0): F(1),
        (0, 1): F(1, 2),
        (1, 0): F(2),
        (1, 1): F(1),
    }
    assert dense_terms(product) == expected
    assert dense_terms(product) == oracle_mul(a, b)


def test_arity_mismatch():
    with pytest.raises(ChartMismatch):
        Poly.variable(2, 0) + Poly.variable(3, 0)
    with pytest.raises(ChartMismatch):
        Poly.variable(2, 0) * Poly.variable(3, 0)


def test_partial_power_rule():
    xs = Poly.variable(3, 2)
    cube = xs * xs * xs
    assert cube.partial(2) == Poly.const(3, 3) * xs * xs


def test_partial_independent_variable():
    p = Poly.variable(7, 3) + Poly.variable(7, 6)
    assert p.partial(0).is_zero()


def test_partial_shifted_factor():
    # d/dy4 of x4*(c4 + y4), on the length-4 chart (y4 has index 10, x4 index 9)
    arity = 11
    x4 = Poly.variable(arity, 9)
    y4 = Poly.variable(arity, 10)
    c4 = Poly.const(arity, F(3, 7))
    assert (x4 * (c4 + y4)).partial(10) == x4


def test_partial_out_of_range():
    with pytest.raises(ChartMismatch):
        Poly.variable(3, 0).partial(3)


def test_eval_direct_substitution():
    # x2*(1 + x1) at x1=1, x2=2, other coordinates 0
    arity = 7
    p = Poly.variable(arity, 4) * (Poly.const(arity, 1) + Poly.variable(arity, 3))
    point = [F(0)] * arity
    point[3], point[4] = F(1), F(2)
    assert p.eval_at(point) == 4


def test_eval_at_origin_is_constant_term():
    p = Poly.const(5, F(5, 3)) + Poly.variable(5, 2) * Poly.variable(5, 4)
    assert p.eval_at([F(0)] * 5) == F(5, 3)


def test_eval_constant_shift():
    p = Poly.const(3, F(3, 7)) + Poly.variable(3, 1)
    assert p.eval_at([F(0)] * 3) == F(3, 7)


def test_eval_length_mismatch():
    with pytest.raises(ChartMismatch):
        Poly.variable(3, 0).eval_at([F(0)] * 4)


# -- randomized identities ---------------------------------------------------

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def polys(draw, arity=3, max_terms=4, max_exp=3):
    n = draw(st.integers(min_value=0, max_value=max_terms))
    terms = {}
    for _ in range(n):
        exps = draw(
            st.lists(st.integers(min_value=0, max_value=max_exp), min_size=arity, max_size=arity)
        )
        mono = tuple((v, e) for v, e in enumerate(exps) if e > 0)
        terms[mono] = draw(coeffs)
    return Poly(arity, terms)


@settings(max_examples=200, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=100, deadline=None)
@given(polys(), polys())
def test_leibniz_rule(a, b):
    for var in range(a.arity):
        assert (a * b).partial(var) == a * b.partial(var) + b * a.partial(var)


@settings(max_examples=100, deadline=None)
@given(
    polys(),
    polys(),
    st.lists(coeffs, min_size=3, max_size=3),
)
def test_eval_is_ring_homomorphism(a, b, point):
    assert (a * b).eval_at(point) == a.eval_at(point) * b.eval_at(point)
    assert (a + b).eval_at(point) == a.eval_at(point) + b.eval_at(point)


@settings(max_examples=100, deadline=None)
@given(polys(), polys())
def test_mul_matches_term_oracle(a, b):
    assert dense_terms(a * b) == oracle_mul(a, b)


def test_divexact_roundtrip():
    x = Poly.variable(3, 0)
    y = Poly.variable(3, 1)
    d = x * y + Poly.const(3, 2)
    a = d * (x * x - y + Poly.const(3, F(1, 3)))
    assert poly_divexact(a, d) * d == a
    with pytest.raises(ArithmeticError):
        poly_divexact(x, y)


# ---------------------------------------------------------------------------
# Rank / nullspace / span over the rationals
# ---------------------------------------------------------------------------


def test_rank_identity():
    rank, basis = rank_and_nullspace(RationalMatrix.identity(3))
    assert rank == 3 and basis == []


def test_rank_with_kernel():
    m = RationalMatrix.from_rows([[1, 0], [0, 0]])
    rank, basis = rank_and_nullspace(m)
    assert rank == 1
    assert basis == [(F(0), F(1))]


def test_rank_matches_minor_oracle_random():
    import random

    rng = random.Random(20090416)
    for _ in range(12):
        rows = rng.choice([3, 4, 5])
        cols = rng.choice([3, 4, 5, 7])
        entries = [
            [F(rng.randint(-3, 3), rng.randint(1, 3)) if rng.random() < 0.7 else F(0) for _ in range(cols)]
            for _ in range(rows)
        ]
        m = RationalMatrix.from_rows(entries)
        rank, basis = rank_and_nullspace(m)
        assert rank == minor_rank(m)
        assert rank + len(basis) == cols
        for vec in basis:
            assert all(v == 0 for v in m.mat_vec(vec))


def test_span_includes_basic():
    e1 = (F(1), F(0), F(0))
    e2 = (F(0), F(1), F(0))
    e3 = (F(0), F(0), F(1))
    e1e2 = RationalMatrix.from_columns([e1, e2])
    assert span_includes(RationalMatrix.from_columns([e1]), e1e2)
    mixed = tuple(a + b for a, b in zip(e1, e3))
    assert not span_includes(RationalMatrix.from_columns([mixed]), e1e2)


def test_span_includes_ambient_mismatch():
    a = RationalMatrix.from_columns([(F(1), F(0))])
    b = RationalMatrix.from_columns([(F(1), F(0), F(0))])
    with pytest.raises(ChartMismatch):
        span_includes(a, b)


# ---------------------------------------------------------------------------
# Polynomial determinants and nullspaces
# ---------------------------------------------------------------------------


def test_poly_det_against_laplace():
    import random

    rng = random.Random(7)
    for _ in range(8):
        n = rng.choice([2, 3, 4])
        consts = [[F(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        rows = [[Poly.const(2, v) for v in row] for row in consts]
        assert poly_det(rows).constant_term() == oracle_det(consts)


def test_poly_det_symbolic():
    x = Poly.variable(2, 0)
    y = Poly.variable(2, 1)
    one = Poly.const(2, 1)
    # det [[x, 1], [1, y]] = xy - 1
    assert poly_det([[x, one], [one, y]]) == x * y - one


def test_nullspace_full_tangent_bundle_is_empty():
    versors = [[Poly.const(3, 1 if i == j else 0) for j in range(3)] for i in range(3)]
    assert polynomial_nullspace(versors, [F(0)] * 3) == []


def test_nullspace_annihilates_generators_identically():
    # generators (d/du0 + u1 d/du2, d/du1) on a 4-dimensional chart
    arity = 4
    zero = Poly.zero(arity)
    one = Poly.const(arity, 1)
    u1 = Poly.variable(arity, 1)
    g1 = [one, zero, u1, zero]
    g2 = [zero, one, zero, zero]
    matrix = [[g1[i], g2[i]] for i in range(arity)]
    covectors = polynomial_nullspace(matrix, [F(0)] * arity)
    assert len(covectors) == 2
    for cov in covectors:
        for gen in (g1, g2):
            pairing = Poly.zero(arity)
            for c, g in zip(cov, gen):
                pairing = pairing + c * g
            assert pairing.is_zero()


def test_nullspace_degenerate_pivot():
    # single generator u0 d/du0 vanishes at the origin but not generically
    arity = 2
    matrix = [[Poly.variable(arity, 0)], [Poly.zero(arity)]]
    with pytest.raises(DegeneratePivot):
        polynomial_nullspace(matrix, [F(0), F(0)])
    # at a regular point the corank is 1
    covs = polynomial_nullspace(matrix, [F(1), F(0)])
    assert len(covs) == 1


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_nullspace_annihilates_identically_randomized(data):
    ambient = data.draw(st.integers(min_value=2, max_value=4))
    ngens = data.draw(st.integers(min_value=1, max_value=ambient))
    matrix = [
        [data.draw(polys(arity=ambient, max_terms=2, max_exp=1)) for _ in range(ngens)]
        for _ in range(ambient)
    ]
    point = tuple(data.draw(coeffs) for _ in range(ambient))
    try:
        covectors = polynomial_nullspace(matrix, point)
    except DegeneratePivot:
        return
    # the rank at the point plus the corank accounts for all of the ambient space
    values = [[matrix[i][g].eval_at(point) for g in range(ngens)] for i in range(ambient)]
    rank, _ = rank_and_nullspace(RationalMatrix.from_rows(values))
    assert len(covectors) == ambient - rank
    for cov in covectors:
        for g in range(ngens):
            pairing = Poly.zero(ambient)
            for i in range(ambient):
                pairing = pairing + cov[i] * matrix[i][g]
            assert pairing.is_zero()


def test_primitive_normalization():
    p = Poly.const(2, F(-2, 3)) + Poly.variable(2, 0).scaled(F(-4, 3))
    (normalized,) = primitive_tuple([p])
    assert poly_content([normalized]) == 1
    assert normalized.leading()[1] > 0
    # proportional to the input
    assert normalized == p.scaled(F(-3, 2))
