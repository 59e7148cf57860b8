"""Explicit matrices and families that settle positivity questions.

* ``hijo_example``: a 3x3 pair on which ``A B A^2 B^2`` has a negative
  eigenvalue even though every exponent is positive.
* ``thfour_word`` / ``thfour_limit``: ``A^m B A^-m B^-1`` for ``A`` with two
  distinct eigenvalues, and the limit of its rescaling as ``m -> oo``.
* ``epsilon_family`` and friends: the 2x2 pair ``diag(1, eps)`` and
  ``[[1/2+eps, 1/2], [1/2, 1/2]]`` whose rescaled words tend to products of
  the projections ``P`` and ``Q`` below.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NotNormalized, NotTwoEigenvalues
from .linalg_core import (
    PDMatrix,
    RationalMatrix,
    cluster_eigenvalues,
    eigenvalues_general,
    rat_int_power,
    rat_mul,
    rat_trace,
    schur_complement,
    spectral_factor,
)
from .words import EvalResult, ExponentSequence, as_sequence, verdict_from_spectrum

HIJO_A = ((1, 20, 210), (20, 402, 4240), (210, 4240, 44903))
HIJO_B = ((36501, -3820, 190), (-3820, 401, -20), (190, -20, 1))
HIJO_WORD = "A B A^2 B^2"


def hijo_example() -> tuple:
    return RationalMatrix(HIJO_A), RationalMatrix(HIJO_B)


# ---------------------------------------------------------------------------
# A^m B A^-m B^-1
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TwoBlockBasis:
    """Eigenbasis of ``A`` ordered so that ``V^T A V = diag(l1 I_n1, l2 I_n2)``, l1 > l2."""

    V: np.ndarray
    lam1: float
    lam2: float
    n1: int

    @property
    def gamma(self) -> float:
        return self.lam2 / self.lam1

    def diagonal(self) -> np.ndarray:
        n = self.V.shape[0]
        return np.array([self.lam1] * self.n1 + [self.lam2] * (n - self.n1))


def two_block_basis(A, rel_tol: float = 1e-6) -> TwoBlockBasis:
    F = spectral_factor(A)
    clusters = cluster_eigenvalues(F.eigvals, rel_tol)
    if len(clusters) != 2:
        raise NotTwoEigenvalues(f"A has {len(clusters)} distinct eigenvalues, expected exactly 2")
    c1, c2 = clusters
    return TwoBlockBasis(V=np.array(F.eigvecs), lam1=float(np.mean(F.eigvals[c1])),
                         lam2=float(np.mean(F.eigvals[c2])), n1=len(c1))


def thfour_word(A, B, m: int, rel_tol: float = 1e-6) -> EvalResult:
    """Evaluate ``A^m B A^-m B^-1``.

    The product is formed in the eigenbasis of ``A``, where conjugation by
    ``A^m`` only rescales the entries of ``B``; this keeps the computation
    accurate at large ``m``. The returned matrix is in the original basis.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    basis = two_block_basis(A, rel_tol)
    Bf = spectral_factor(B)
    V = basis.V
    Bp = V.T @ Bf.base @ V
    d = basis.diagonal()
    conj = Bp * (d[:, None] / d[None, :]) ** m
    Wp = np.linalg.solve(Bp.T, conj.T).T  # conj @ inv(Bp)
    spec = eigenvalues_general(Wp)
    verdict = verdict_from_spectrum(spec)
    return EvalResult(V @ Wp @ V.T, spec, verdict, (spec.min_real, spec.max_abs_imag))


@dataclass(frozen=True, eq=False)
class ThFourLimit:
    limit: np.ndarray          # in the two-block eigenbasis of A
    limit_original: np.ndarray  # same matrix in the caller's basis
    gamma: float
    basis: TwoBlockBasis
    schur: np.ndarray


def thfour_limit(A, B, rel_tol: float = 1e-6) -> ThFourLimit:
    """``lim gamma^m A^m B A^-m B^-1`` with ``gamma = l2 / l1``.

    In the eigenbasis of ``A`` this is
    ``[[-B12 C^-1 B21 B11^-1, B12 C^-1], [0, 0]]`` where
    ``C = B22 - B21 B11^-1 B12``.
    """
    basis = two_block_basis(A, rel_tol)
    Bf = spectral_factor(B)
    V = basis.V
    Bp = V.T @ Bf.base @ V
    Bp = 0.5 * (Bp + Bp.T)
    k = basis.n1
    B11, B12, B21 = Bp[:k, :k], Bp[:k, k:], Bp[k:, :k]
    C = schur_complement(Bp, k)
    B12Cinv = np.linalg.solve(C.T, B12.T).T
    n = Bp.shape[0]
    L = np.zeros((n, n))
    L[:k, :k] = -B12Cinv @ B21 @ np.linalg.inv(B11)
    L[:k, k:] = B12Cinv
    return ThFourLimit(limit=L, limit_original=V @ L @ V.T, gamma=basis.gamma, basis=basis, schur=C)


# ---------------------------------------------------------------------------
# epsilon family and projection limits
# ---------------------------------------------------------------------------

P = RationalMatrix(((1, 0), (0, 0)))
Q = RationalMatrix(((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 2))))
I2 = RationalMatrix.identity(2)


def _check_normalized(seq: ExponentSequence):
    if seq.N == 0:
        raise NotNormalized("empty sequence")
    a, b = seq.pairs[0]
    if not (a > 0 and b > 0):
        raise NotNormalized(
            "first alpha and beta must be positive; replace A by A^-1 and/or B by B^-1 first")


def normalize_signs(seq) -> tuple:
    """Return ``(normalized, flip_alpha, flip_beta)``.

    Negating every alpha is the same word in ``A^-1`` (likewise for beta), so a
    witness for the normalized sequence at ``(A, B)`` is a witness for the
    original at ``(A^-1, B)`` etc.
    """
    seq = as_sequence(seq)
    if seq.N == 0:
        raise NotNormalized("empty sequence")
    a, b = seq.pairs[0]
    fa, fb = a < 0, b < 0
    return seq.negate(alpha=fa, beta=fb), fa, fb


def epsilon_matrices_exact(eps) -> tuple:
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    A = RationalMatrix(((1, 0), (0, eps)))
    B = RationalMatrix(((Fraction(1, 2) + eps, Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 2))))
    return A, B


def epsilon_family(seq, eps) -> tuple:
    seq = as_sequence(seq)
    _check_normalized(seq)
    A, B = epsilon_matrices_exact(eps)
    return spectral_factor(A.to_float()), spectral_factor(B.to_float())


def epsilon_family_exact(seq, eps) -> tuple:
    seq = as_sequence(seq)
    _check_normalized(seq)
    return epsilon_matrices_exact(eps)


def scale_factor(seq, eps: float) -> float:
    """``2^(sum of negative betas) * eps^-(sum of negative alphas + sum of negative betas)``."""
    seq = as_sequence(seq)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    na = sum(float(a) for a in seq.alphas if a < 0)
    nb = sum(float(b) for b in seq.betas if b < 0)
    return 2.0**nb * float(eps) ** (-(na + nb))


def projection_factors(seq) -> list:
    seq = as_sequence(seq)
    out = []
    for a, b in seq.pairs:
        out.append(P if a > 0 else I2 - P)
        out.append(Q if b > 0 else I2 - Q)
    return out


def projection_limit(seq) -> RationalMatrix:
    """Exact ``P_1 Q_1 ... P_N Q_N``; ``P_j = P`` if alpha_j > 0 else ``I - P``, same for Q."""
    seq = as_sequence(seq)
    _check_normalized(seq)
    W = I2
    for F in projection_factors(seq):
        W = rat_mul(W, F)
    return W


_PQ_CYCLE = rat_mul(rat_mul(P, Q), rat_mul(I2 - P, I2 - Q))


def pq_power(k: int) -> RationalMatrix:
    """Closed form of ``(P Q (I-P) (I-Q))^k``: ``4^-k [[(-1)^k, (-1)^(k-1)], [0, 0]]``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    s = Fraction((-1) ** k, 4**k)
    return RationalMatrix(((s, -s), (0, 0)))


def pq_power_direct(k: int) -> RationalMatrix:
    return rat_int_power(_PQ_CYCLE, k)


def reduced_limit_form(m: int) -> RationalMatrix:
    """The irreducible projection product of length ``m`` with leading P and Q.

    ``(PQ(I-P)(I-Q))^(m/2)`` for even ``m``, ``(PQ(I-P)(I-Q))^((m-1)/2) PQ`` for odd.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    half = m // 2
    base = pq_power(half) if half else I2
    return rat_mul(base, rat_mul(P, Q)) if m % 2 else base


def expected_limit_trace(N: int, m: int) -> Fraction:
    """Trace of the projection limit for a class-N sequence of reduced class m.

    Each cancellation down to a nonempty sequence halves the trace, so it is
    ``2^(m-N) * tr(reduced_limit_form(m))`` for ``m >= 1``. Every class-1
    product has trace 1/2, hence ``2^-N`` when everything cancels.
    """
    if m == 0:
        return Fraction(1, 2**N) if N else Fraction(2)
    return Fraction(2) ** (m - N) * rat_trace(reduced_limit_form(m))


def floor_half_odd(m: int) -> bool:
    return (m // 2) % 2 == 1


def projection_identities_check() -> dict:
    """Verify the eight projection identities exactly; raises AssertionError on failure."""
    half = Fraction(1, 2)
    IP, IQ = I2 - P, I2 - Q

    def prod(*ms):
        out = I2
        for M in ms:
            out = rat_mul(out, M)
        return out

    checks = {
        "PQP = P/2": prod(P, Q, P) == P.scale(half),
        "P(I-Q)P = P/2": prod(P, IQ, P) == P.scale(half),
        "(I-P)Q(I-P) = (I-P)/2": prod(IP, Q, IP) == IP.scale(half),
        "(I-P)(I-Q)(I-P) = (I-P)/2": prod(IP, IQ, IP) == IP.scale(half),
        "QPQ = Q/2": prod(Q, P, Q) == Q.scale(half),
        "Q(I-P)Q = Q/2": prod(Q, IP, Q) == Q.scale(half),
        "(I-Q)P(I-Q) = (I-Q)/2": prod(IQ, P, IQ) == IQ.scale(half),
        "(I-Q)(I-P)(I-Q) = (I-Q)/2": prod(IQ, IP, IQ) == IQ.scale(half),
        "P^2 = P": prod(P, P) == P,
        "Q^2 = Q": prod(Q, Q) == Q,
    }
    failed = [k for k, ok in checks.items() if not ok]
    assert not failed, f"projection identities failed: {failed}"
    return checks
