from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from conftest import nonzero_exponent, pd_matrices, random_pd
from gwords.constructions import hijo_example
from gwords.errors import DimensionMismatch, ExactModeUnsupported, WordSyntaxError, ZeroExponent
from gwords.linalg_core import RationalMatrix, Spectrum, eigenvalues_general
from gwords.words import (
    Verdict,
    WordExpr,
    canonicalize,
    evaluate,
    evaluate_factors,
    factor_power,
    format_word,
    parse_word,
    sequence,
    two_sided_spectrum,
    verdict_from_spectrum,
)
from gwords.linalg_core import pd_power, spectral_factor


def test_parse_examples():
    assert parse_word("A B A^2 B^2").factors == (("A", 1), ("B", 1), ("A", 2), ("B", 2))
    assert parse_word("A^-1").factors == (("A", -1),)
    w = parse_word("A^1/2 B^-3/4")
    assert w.factors == (("A", Fraction(1, 2)), ("B", Fraction(-3, 4)))
    assert w.exact
    assert parse_word("A*B^2 * A").factors == (("A", 1), ("B", 2), ("A", 1))


def test_decimal_exponent_is_inexact():
    w = parse_word("A^0.5 B")
    assert w.factors[0] == ("A", 0.5)
    assert not w.exact


@pytest.mark.parametrize("text, offset", [
    ("A B C", 4), ("A^", 2), ("A^x", 2), ("AB", 1), ("", 0), ("A^1/0", 4), ("A^2.", 3),
])
def test_syntax_errors_report_offset(text, offset):
    with pytest.raises(WordSyntaxError) as exc:
        parse_word(text)
    assert exc.value.offset == offset


def test_zero_exponent():
    with pytest.raises(ZeroExponent):
        parse_word("A^0 B")
    with pytest.raises(ZeroExponent):
        sequence([(1, 0)])


def test_canonicalize_examples():
    assert canonicalize(WordExpr((("A", 1), ("A", 1), ("B", 3)))).pairs == ((2, 3),)
    assert canonicalize(WordExpr((("B", 2), ("A", 1)))).pairs == ((1, 2),)
    assert canonicalize("A B A^-1 B^-1").pairs == ((1, 1), (-1, -1))


def test_canonicalize_drops_zero_sums_and_residuals():
    s = canonicalize("A B B^-1 A^2")
    assert s.N == 0 and s.residual == ("A", 3)
    s = canonicalize("A B A^-1")
    assert s.N == 0 and s.residual == ("B", 1)
    s = canonicalize("B A^2 B^-1 A^-2")
    assert s.pairs == ((2, -1), (-2, 1))


def test_canonical_rotation_is_lexicographically_largest():
    s = canonicalize("A^-1 B^2 A B^-1")
    rotations = [((1, -1), (-1, 2)), ((-1, 2), (1, -1))]
    assert s.pairs == max(rotations)


@given(st.lists(st.tuples(st.integers(-4, 4).filter(bool), st.integers(-4, 4).filter(bool)),
                min_size=1, max_size=5))
def test_format_parse_roundtrip(pairs):
    s = canonicalize(format_word(sequence(pairs)))
    assert canonicalize(format_word(s)) == s


def test_verdict_examples():
    assert verdict_from_spectrum(Spectrum.of([2, 1])).kind is Verdict.ALL_POSITIVE
    assert verdict_from_spectrum(Spectrum.of([-1, 3])).kind is Verdict.NOT_ALL_POSITIVE
    assert verdict_from_spectrum(Spectrum.of([1e-12, 1]), tol_real=1e-9).kind is Verdict.INCONCLUSIVE
    assert verdict_from_spectrum(Spectrum.of([1 + 1e-3j, 1 - 1e-3j])).kind is Verdict.NOT_ALL_POSITIVE
    assert verdict_from_spectrum(Spectrum.of([1 + 5e-9j, 1 - 5e-9j])).kind is Verdict.INCONCLUSIVE


def test_evaluate_examples():
    r = evaluate(sequence([(2, 1)]), np.array([[2.0]]), np.array([[3.0]]))
    np.testing.assert_allclose(r.matrix, [[12.0]])
    assert r.verdict == Verdict.ALL_POSITIVE
    M = random_pd(3, np.random.default_rng(1))
    r = evaluate(sequence([(1, 1), (-1, -1)]), M, M)
    np.testing.assert_allclose(r.matrix, np.eye(3), atol=1e-12)
    assert r.verdict == Verdict.ALL_POSITIVE


def test_eq2_numeric_verdict_and_spectrum():
    A, B = hijo_example()
    r = evaluate("A B A^2 B^2", A.to_float(), B.to_float())
    assert r.verdict == Verdict.NOT_ALL_POSITIVE
    # exact roots of the characteristic polynomial as the oracle
    x = sp.Symbol("x")
    W = sp.Matrix(3, 3, [sp.Rational(str(v)) for v in
                         evaluate("A B A^2 B^2", A, B, mode="exact").matrix.entries()])
    roots = sorted(float(z) for z in sp.Poly(W.charpoly(x).as_expr(), x).real_roots())
    got = sorted(r.spectrum.as_array().real)
    # both matrices have condition numbers near 1e9; the small root keeps its sign and two digits
    np.testing.assert_allclose(got, roots, rtol=1e-2)


def test_small_eigenvalue_recovered_from_inverse_word():
    # diag(1, d)^k rotated: W = A B with tiny eigenvalue that direct eig smears
    rng = np.random.default_rng(3)
    A = random_pd(2, rng, 1e-3, 1e3)
    B = random_pd(2, rng, 1e-3, 1e3)
    seq = sequence([(3, 3), (2, 3)])
    W = evaluate_factors(seq.factors(), A, B)
    Wi = evaluate_factors([(l, -e) for l, e in reversed(seq.factors())], A, B)
    s = two_sided_spectrum(W, Wi).as_array()
    # det oracle: the product of the eigenvalues is known from the factors
    det = np.linalg.det(A) ** 5 * np.linalg.det(B) ** 6
    assert np.prod(s).real == pytest.approx(det, rel=1e-6)
    assert np.all(s.real > 0)


def test_residual_word_is_positive():
    r = evaluate(canonicalize("A^3"), random_pd(2, np.random.default_rng(0)), np.eye(2))
    assert r.verdict == Verdict.ALL_POSITIVE


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        evaluate(sequence([(1, 1)]), np.eye(2), np.eye(3))


def test_exact_mode():
    A, B = RationalMatrix(((2, 1), (1, 1))), RationalMatrix(((1, 0), (0, 3)))
    r = evaluate(sequence([(1, -1)]), A, B, mode="exact")
    assert r.matrix == RationalMatrix(((2, Fraction(1, 3)), (1, Fraction(1, 3))))
    with pytest.raises(ExactModeUnsupported):
        evaluate(sequence([(Fraction(1, 2), 1)]), A, B, mode="exact")
    with pytest.raises(ExactModeUnsupported):
        evaluate(sequence([(1, 1)]), np.eye(2), np.eye(2), mode="exact")


def test_integer_factor_power_matches_eigen_power(rng):
    for _ in range(20):
        F = spectral_factor(random_pd(4, rng))
        for k in (-3, -1, 1, 2, 5):
            np.testing.assert_allclose(factor_power(F, Fraction(k)), pd_power(F, k), rtol=1e-9, atol=1e-10)


@given(pd_matrices(n=3), pd_matrices(n=3),
       st.lists(st.tuples(nonzero_exponent, nonzero_exponent), min_size=1, max_size=3),
       st.integers(0, 5))
def test_cyclic_rotation_preserves_spectrum(A, B, pairs, shift):
    seq = sequence(pairs)
    factors = seq.factors()
    k = shift % len(factors)
    rotated = factors[k:] + factors[:k]
    s1 = np.sort_complex(evaluate(seq, A, B).spectrum.as_array())
    s2 = np.sort_complex(eigenvalues_general(evaluate_factors(rotated, A, B)).as_array())
    assert np.max(np.abs(s1 - s2) / (1 + np.abs(s1))) <= 1e-8


@given(pd_matrices(), pd_matrices(),
       st.lists(st.tuples(nonzero_exponent, nonzero_exponent), min_size=1, max_size=3))
def test_determinant_identity(A, B, pairs):
    if A.shape != B.shape:
        B = np.eye(len(A)) * 1.5
    seq = sequence(pairs)
    r = evaluate(seq, A, B)
    expect = np.linalg.det(A) ** float(sum(seq.alphas)) * np.linalg.det(B) ** float(sum(seq.betas))
    assert np.prod(r.spectrum.as_array()).real == pytest.approx(expect, rel=1e-6)


def test_class1_positive(rng):
    for _ in range(300):
        n = int(rng.integers(2, 6))
        A, B = random_pd(n, rng, 0.1, 10), random_pd(n, rng, 0.1, 10)
        a, b = (float(rng.choice([-1, 1]) * rng.uniform(0.1, 3)) for _ in range(2))
        assert evaluate(sequence([(a, b)]), A, B).verdict == Verdict.ALL_POSITIVE
