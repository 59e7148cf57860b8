import itertools
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_pd
from gwords.certify import sturm_decide
from gwords.constructions import (
    I2,
    P,
    Q,
    epsilon_family,
    epsilon_family_exact,
    epsilon_matrices_exact,
    expected_limit_trace,
    floor_half_odd,
    hijo_example,
    normalize_signs,
    projection_identities_check,
    projection_limit,
    pq_power,
    pq_power_direct,
    reduced_limit_form,
    scale_factor,
    thfour_limit,
    thfour_word,
)
from gwords.errors import NotNormalized, NotTwoEigenvalues
from gwords.linalg_core import RationalMatrix, rat_det, rat_mul, rat_trace
from gwords.reduction import reduced_class
from gwords.suites import normalized_patterns, two_eigenvalue_pd
from gwords.words import Verdict, canonicalize, evaluate, evaluate_exact, sequence


def test_hijo_matrices():
    A, B = hijo_example()
    assert A[2, 2] == 44903 and B[0, 0] == 36501
    assert A.is_symmetric() and B.is_symmetric()
    assert evaluate("A B A^2 B^2", A.to_float(), B.to_float()).verdict == Verdict.NOT_ALL_POSITIVE
    assert sturm_decide(canonicalize("A B A^2 B^2"), A, B).refutes


# ---------------------------------------------------------------------------
# A^m B A^-m B^-1
# ---------------------------------------------------------------------------

def test_thfour_commuting_is_identity(rng):
    A = np.diag([3.0, 3.0, 1.0])
    B = np.zeros((3, 3))
    B[:2, :2] = random_pd(2, rng)
    B[2, 2] = 2.0
    for m in (1, 5, 30, 64):
        r = thfour_word(A, B, m)
        np.testing.assert_allclose(r.matrix, np.eye(3), atol=1e-9)
        assert r.verdict == Verdict.ALL_POSITIVE


def test_thfour_noncommuting_fails_for_some_m(rng):
    A = np.diag([2.0, 2.0, 1.0])
    for _ in range(10):
        B = random_pd(3, rng)
        assert any(thfour_word(A, B, m).verdict == Verdict.NOT_ALL_POSITIVE for m in range(1, 65))


def test_thfour_determinant_is_one(rng):
    for _ in range(10):
        A = two_eigenvalue_pd(3, rng, lam_range=(0.5, 2.0))
        B = random_pd(3, rng)
        for m in (1, 2, 3):
            assert np.linalg.det(thfour_word(A, B, m).matrix) == pytest.approx(1.0, rel=1e-6)
    A = RationalMatrix(((2, 0, 0), (0, 2, 0), (0, 0, 1)))
    B = RationalMatrix(((2, 1, 0), (1, 2, 1), (0, 1, 2)))
    for m in range(1, 11):
        assert rat_det(evaluate_exact(sequence([(m, 1), (-m, -1)]), A, B)) == 1


def test_thfour_requires_two_eigenvalues(rng):
    with pytest.raises(NotTwoEigenvalues):
        thfour_word(np.diag([1.0, 2.0, 3.0]), np.eye(3), 1)
    with pytest.raises(NotTwoEigenvalues):
        thfour_limit(np.eye(3), np.eye(3))


def test_thfour_limit_matches_scaled_word(rng):
    for _ in range(20):
        A = two_eigenvalue_pd(3, rng, min_ratio=2.0)
        B = random_pd(3, rng)
        lim = thfour_limit(A, B)
        scaled = lim.gamma ** 40 * thfour_word(A, B, 40).matrix
        assert np.max(np.abs(scaled - lim.limit_original)) <= 1e-6


def test_thfour_limit_direct_product_oracle():
    # diagonal A: the product is formed naively with numpy as the oracle
    A = np.diag([4.0, 4.0, 1.0])
    B = np.array([[3.0, 0.5, 1.0], [0.5, 2.0, 0.3], [1.0, 0.3, 1.5]])
    m = 12
    direct = np.linalg.matrix_power(A, m) @ B @ np.linalg.matrix_power(np.linalg.inv(A), m) @ np.linalg.inv(B)
    np.testing.assert_allclose(thfour_word(A, B, m).matrix, direct, rtol=1e-9)
    lim = thfour_limit(A, B)
    np.testing.assert_allclose((0.25 ** 30) * thfour_word(A, B, 30).matrix, lim.limit_original, atol=1e-8)


def test_thfour_limit_block_diagonal_is_zero():
    A = np.diag([3.0, 3.0, 1.0])
    B = np.diag([2.0, 5.0, 1.0])
    np.testing.assert_allclose(thfour_limit(A, B).limit, 0.0, atol=1e-14)


def test_thfour_limit_upper_block_has_negative_trace(rng):
    for _ in range(30):
        A = two_eigenvalue_pd(int(rng.integers(3, 6)), rng)
        B = random_pd(A.n, rng)
        lim = thfour_limit(A, B)
        k = lim.basis.n1
        assert np.trace(lim.limit[:k, :k]) < 0


# ---------------------------------------------------------------------------
# epsilon family
# ---------------------------------------------------------------------------

def test_epsilon_matrices():
    A, B = epsilon_matrices_exact(Fraction(1))
    assert A == RationalMatrix.identity(2)
    for eps in (Fraction(1, 2), Fraction(1, 1024), Fraction(3)):
        A, B = epsilon_matrices_exact(eps)
        assert rat_det(B) == eps / 2
    Af, Bf = epsilon_family(sequence([(1, 1), (-1, -1)]), 1e-3)
    assert np.all(Af.eigvals > 0) and np.all(Bf.eigvals > 0)


def test_epsilon_family_needs_normalized_signs():
    with pytest.raises(NotNormalized):
        epsilon_family(sequence([(-1, 1), (1, -1)]), 0.5)
    with pytest.raises(NotNormalized):
        projection_limit(sequence([(1, -1), (-1, 1)]))


def test_normalize_signs():
    s, fa, fb = normalize_signs(sequence([(-1, 2), (3, -4)]))
    assert s.pairs == ((1, 2), (-3, -4)) and fa and not fb


def test_scale_factor_examples():
    assert scale_factor(sequence([(1, 2), (3, 4)]), 0.1) == 1.0
    assert scale_factor(sequence([(1, 1), (-1, -1)]), 0.01) == pytest.approx(0.01**2 / 2)
    assert scale_factor(sequence([(2, 1), (-3, -2)]), 0.1) == pytest.approx(2.0**-2 * 0.1**5)


def test_scaled_word_converges_to_projection_limit():
    seq = sequence([(1, 1), (-1, -1)])
    L = projection_limit(seq).to_float()
    errs = []
    for eps in (1e-2, 1e-4, 1e-6):
        A, B = epsilon_family(seq, eps)
        W = evaluate(seq, A, B).matrix
        errs.append(np.max(np.abs(scale_factor(seq, eps) * W - L)))
    assert errs[2] <= 1e-4
    assert errs[0] > errs[1] > errs[2]


def test_scaled_word_converges_exactly():
    # exact arithmetic: the error at eps = 2^-k is O(eps)
    seq = sequence([(2, 3), (-1, -2)])
    L = projection_limit(seq)
    for k in (10, 20, 30):
        eps = Fraction(1, 2**k)
        A, B = epsilon_family_exact(seq, eps)
        W = evaluate_exact(seq, A, B)
        s = Fraction(2) ** sum(b for b in seq.betas if b < 0) / eps ** sum(
            e for e in seq.alphas + seq.betas if e < 0)
        diff = (W.scale(s) - L).entries()
        assert max(abs(x) for x in diff) <= 64 * eps


# ---------------------------------------------------------------------------
# projection limit
# ---------------------------------------------------------------------------

def test_projection_limit_examples():
    assert projection_limit(sequence([(1, 1)])) == RationalMatrix(((Fraction(1, 2), Fraction(1, 2)), (0, 0)))
    L = projection_limit(sequence([(1, 1), (-1, -1)]))
    assert L == RationalMatrix(((Fraction(-1, 4), Fraction(1, 4)), (0, 0)))
    assert rat_trace(L) == Fraction(-1, 4)


def test_projection_limit_is_direct_product():
    seq = sequence([(1, 1), (-2, 3), (1, -1)])
    direct = rat_mul(rat_mul(rat_mul(P, Q), rat_mul(I2 - P, Q)), rat_mul(P, I2 - Q))
    assert projection_limit(seq) == direct


def test_reduced_form_matches_for_irreducible():
    for m in (2, 4, 6):
        seq = sequence([((-1) ** j, (-1) ** j) for j in range(m)])
        assert projection_limit(seq) == reduced_limit_form(m) == pq_power(m // 2)


def test_limit_trace_formula_all_patterns():
    # each cancellation halves the trace: tr = 2^(m-N) tr(reduced form)
    for N in range(1, 7):
        for seq in normalized_patterns(N):
            m = reduced_class(seq).m
            assert rat_trace(projection_limit(seq)) == expected_limit_trace(N, m)


def test_trace_negative_and_dyadic_eps_exists():
    for N in range(1, 8):
        for seq in normalized_patterns(N):
            m = reduced_class(seq).m
            if m % 4 not in (2, 3) or m > 7:
                continue
            assert rat_trace(projection_limit(seq)) < 0
            if N <= 4:
                found = False
                for k in range(1, 21):
                    A, B = epsilon_family_exact(seq, Fraction(1, 2**k))
                    if rat_trace(evaluate_exact(seq, A, B)) < 0:
                        found = True
                        break
                assert found, seq


def test_pq_power():
    assert pq_power(1) == RationalMatrix(((Fraction(-1, 4), Fraction(1, 4)), (0, 0)))
    assert pq_power(2) == RationalMatrix(((Fraction(1, 16), Fraction(-1, 16)), (0, 0)))
    cycle = rat_mul(rat_mul(P, Q), rat_mul(I2 - P, I2 - Q))
    assert pq_power(3) == rat_mul(rat_mul(cycle, cycle), cycle)
    for k in range(1, 11):
        assert pq_power(k) == pq_power_direct(k)


def test_projection_identities():
    checks = projection_identities_check()
    assert len(checks) == 10 and all(checks.values())
    PQP = rat_mul(rat_mul(P, Q), P)
    assert PQP == RationalMatrix(((Fraction(1, 2), 0), (0, 0)))
    QPQ = rat_mul(rat_mul(Q, P), Q)
    assert QPQ == Q.scale(Fraction(1, 2))
    IQ = I2 - Q
    assert rat_mul(rat_mul(IQ, P), IQ) == IQ.scale(Fraction(1, 2))


def test_floor_half_odd():
    for m in range(1001):
        assert floor_half_odd(m) == (m % 4 in (2, 3))
