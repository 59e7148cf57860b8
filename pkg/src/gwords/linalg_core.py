"""Dense linear algebra for words in positive definite matrices.

Two arithmetic paths live here: a float path built on symmetric
eigendecompositions (fractional powers, spectra, Schur complements) and an
exact path over ``fractions.Fraction`` (products, integer powers, inverses,
characteristic polynomials) that the certification code relies on.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AsymmetricInput,
    ConvergenceFailure,
    DimensionMismatch,
    NotPositiveDefinite,
    SingularMatrix,
    SplitOutOfRange,
)

ASYMMETRY_TOL = 1e-12
POSITIVITY_FLOOR = 1e-12
PAIRING_TOL = 1e-8


# ---------------------------------------------------------------------------
# float path
# ---------------------------------------------------------------------------

def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def sym_matrix(entries) -> np.ndarray:
    """Validate a real symmetric matrix and return an exactly symmetric copy.

    Asymmetry larger than ``1e-12 * max|entry|`` raises AsymmetricInput;
    anything below that is treated as roundoff and averaged away.
    """
    if isinstance(entries, RationalMatrix):
        entries = entries.to_float()
    M = np.asarray(entries, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    scale = np.max(np.abs(M))
    asym = np.max(np.abs(M - M.T))
    if asym > ASYMMETRY_TOL * scale:
        raise AsymmetricInput(f"matrix is not symmetric (max |M - M^T| = {asym:.3e})")
    return _frozen(0.5 * (M + M.T))


@dataclass(frozen=True, eq=False)
class PDMatrix:
    """A symmetric positive definite matrix with its spectral factorization.

    ``eigvals`` are sorted in descending order and ``eigvecs`` holds the
    matching orthonormal eigenvectors as columns.
    """

    base: np.ndarray
    eigvals: np.ndarray
    eigvecs: np.ndarray

    @property
    def n(self) -> int:
        return self.base.shape[0]

    def power(self, t) -> np.ndarray:
        return pd_power(self, t)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.base, dtype=dtype)


def spectral_factor(M, floor: float = POSITIVITY_FLOOR) -> PDMatrix:
    if isinstance(M, PDMatrix):
        return M
    S = sym_matrix(M)
    try:
        w, V = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc
    w, V = w[::-1], V[:, ::-1]
    threshold = floor * max(1.0, float(w[0]))
    if w[-1] <= threshold:
        raise NotPositiveDefinite(
            f"matrix is not positive definite: eigenvalue {w[-1]:.6e} <= {threshold:.1e}",
            eigenvalue=float(w[-1]),
        )
    return PDMatrix(base=S, eigvals=_frozen(w), eigvecs=_frozen(V))


def pd_power(M, t) -> np.ndarray:
    """``M**t`` for positive definite ``M`` and any real ``t``."""
    F = spectral_factor(M)
    t = float(t)
    if t == 0.0:
        return np.eye(F.n)
    if t == 1.0:
        return np.array(F.base)
    V = F.eigvecs
    R = (V * F.eigvals**t) @ V.T
    return 0.5 * (R + R.T)


def schur_complement(B, k: int) -> np.ndarray:
    """``B22 - B21 B11^{-1} B12`` for the split after the first ``k`` rows."""
    S = sym_matrix(B)
    n = S.shape[0]
    if not 1 <= k < n:
        raise SplitOutOfRange(f"split index {k} outside 1..{n - 1}")
    B11, B12 = S[:k, :k], S[:k, k:]
    B21, B22 = S[k:, :k], S[k:, k:]
    C = B22 - B21 @ np.linalg.solve(B11, B12)
    return 0.5 * (C + C.T)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted by descending real part, ties by descending imaginary part."""

    values: tuple

    @classmethod
    def of(cls, values: Iterable[complex], tol: float = PAIRING_TOL) -> "Spectrum":
        vals = [complex(v) for v in values]
        vals = _pair_conjugates(vals, tol)
        vals.sort(key=lambda z: (-z.real, -z.imag))
        return cls(tuple(vals))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @property
    def min_real(self) -> float:
        return min(z.real for z in self.values)

    @property
    def max_abs_imag(self) -> float:
        return max(abs(z.imag) for z in self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=complex)


def _pair_conjugates(vals: list, tol: float) -> list:
    out = list(vals)
    unmatched = [i for i, z in enumerate(out) if z.imag > 0]
    lower = {i for i, z in enumerate(out) if z.imag < 0}
    for i in unmatched:
        z = out[i]
        best, best_d = None, None
        for j in lower:
            d = abs(out[j] - z.conjugate())
            if best_d is None or d < best_d:
                best, best_d = j, d
        if best is None or best_d > tol * (1 + abs(z)):
            raise ValueError(f"eigenvalue {z} has no conjugate partner")
        lower.discard(best)
        out[best] = z.conjugate()
    if lower:
        raise ValueError("unpaired eigenvalues with negative imaginary part")
    return out


def eigenvalues_general(M) -> Spectrum:
    if isinstance(M, RationalMatrix):
        M = M.to_float()
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    try:
        w = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigenvalue iteration did not converge: {exc}") from exc
    return Spectrum.of(w)


# ---------------------------------------------------------------------------
# exact path
# ---------------------------------------------------------------------------

def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x))
    if isinstance(x, np.integer):
        return Fraction(int(x))
    raise TypeError(f"cannot convert {x!r} to an exact rational")


@dataclass(frozen=True)
class RationalMatrix:
    """Square matrix of exact rationals, stored as a tuple of row tuples."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(to_fraction(x) for x in r) for r in self.rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DimensionMismatch("RationalMatrix must be square and non-empty")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @classmethod
    def from_float(cls, M) -> "RationalMatrix":
        return cls(tuple(tuple(Fraction(float(x)) for x in r) for r in np.asarray(M, float)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        return rat_mul(self, other)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        _same_dim(self, other)
        return RationalMatrix(tuple(tuple(a + b for a, b in zip(r, s))
                                    for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        _same_dim(self, other)
        return RationalMatrix(tuple(tuple(a - b for a, b in zip(r, s))
                                    for r, s in zip(self.rows, other.rows)))

    def scale(self, c) -> "RationalMatrix":
        c = to_fraction(c)
        return RationalMatrix(tuple(tuple(c * a for a in r) for r in self.rows))

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(tuple(zip(*self.rows)))

    def is_symmetric(self) -> bool:
        return self.rows == self.T.rows

    def trace(self) -> Fraction:
        return rat_trace(self)

    def inverse(self) -> "RationalMatrix":
        return rat_inverse(self)

    def det(self) -> Fraction:
        return rat_det(self)

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.rows])

    def entries(self) -> list:
        return [x for r in self.rows for x in r]


def _same_dim(a: RationalMatrix, b: RationalMatrix):
    if a.n != b.n:
        raise DimensionMismatch(f"dimension mismatch: {a.n} vs {b.n}")


def rat_mul(A: RationalMatrix, B: RationalMatrix) -> RationalMatrix:
    _same_dim(A, B)
    cols = list(zip(*B.rows))
    return RationalMatrix(tuple(tuple(sum((a * b for a, b in zip(r, c)), Fraction(0))
                                      for c in cols) for r in A.rows))


def rat_trace(A: RationalMatrix) -> Fraction:
    return sum((A.rows[i][i] for i in range(A.n)), Fraction(0))


def _common_denominator(A: RationalMatrix) -> int:
    return lcm(*(x.denominator for x in A.entries()))


def _bareiss_jordan(N: list) -> tuple:
    """Fraction-free Gauss-Jordan on ``[N | I]`` for an integer matrix ``N``.

    Every division is exact. Returns ``(d, R)`` with ``R = d * N^{-1}``, where
    ``|d| = |det N|``.
    """
    n = len(N)
    M = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(N)]
    prev = 1
    for k in range(n):
        p = next((i for i in range(k, n) if M[i][k] != 0), None)
        if p is None:
            raise SingularMatrix("matrix is singular")
        if p != k:
            M[k], M[p] = M[p], M[k]
        piv = M[k][k]
        rk = M[k]
        for i in range(n):
            if i == k:
                continue
            ri = M[i]
            a = ri[k]
            for j in range(2 * n):
                q, r = divmod(piv * ri[j] - a * rk[j], prev)
                assert r == 0, "non-exact division in fraction-free elimination"
                ri[j] = q
        prev = piv
    d = M[0][0]
    return d, [row[n:] for row in M]


def rat_inverse(A: RationalMatrix) -> RationalMatrix:
    D = _common_denominator(A)
    N = [[int(x * D) for x in r] for r in A.rows]
    d, R = _bareiss_jordan(N)
    # A = N / D  =>  A^{-1} = D * N^{-1} = D * R / d
    scale = Fraction(D, d)
    return RationalMatrix(tuple(tuple(scale * x for x in r) for r in R))


def rat_det(A: RationalMatrix) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    D = _common_denominator(A)
    M = [[int(x * D) for x in r] for r in A.rows]
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        p = next((i for i in range(k, n) if M[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            M[k], M[p] = M[p], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[k][k] * M[i][j] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return Fraction(sign * M[n - 1][n - 1], D**n)


def leading_minors(A: RationalMatrix) -> list:
    return [rat_det(RationalMatrix(tuple(r[:k] for r in A.rows[:k]))) for k in range(1, A.n + 1)]


def is_positive_definite_exact(A: RationalMatrix) -> bool:
    """Sylvester's criterion on an exactly symmetric rational matrix."""
    return A.is_symmetric() and all(m > 0 for m in leading_minors(A))


def rat_int_power(A: RationalMatrix, k: int) -> RationalMatrix:
    k = int(k)
    if k < 0:
        return rat_int_power(rat_inverse(A), -k)
    result = RationalMatrix.identity(A.n)
    base = A
    while k:
        if k & 1:
            result = rat_mul(result, base)
        k >>= 1
        if k:
            base = rat_mul(base, base)
    return result


def rat_charpoly(A: RationalMatrix) -> list:
    """Monic characteristic polynomial, coefficients highest degree first.

    Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k.
    """
    n = A.n
    coeffs = [Fraction(1)]
    M = RationalMatrix(tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n)))
    I = RationalMatrix.identity(n)
    for k in range(1, n + 1):
        M = rat_mul(A, M) + I.scale(coeffs[-1])
        coeffs.append(-rat_trace(rat_mul(A, M)) / k)
    return coeffs


def as_rational(M) -> RationalMatrix:
    if isinstance(M, RationalMatrix):
        return M
    if isinstance(M, PDMatrix):
        M = M.base
    if isinstance(M, np.ndarray):
        return RationalMatrix.from_float(M)
    return RationalMatrix(tuple(tuple(r) for r in M))


def rational_rows(rows: Sequence[Sequence]) -> RationalMatrix:
    return RationalMatrix(tuple(tuple(r) for r in rows))


def cluster_eigenvalues(eigvals, rel_tol: float = 1e-6) -> list:
    """Group descending eigenvalues into clusters of numerically equal values.

    A new cluster starts wherever consecutive eigenvalues differ by more than
    ``rel_tol`` times the largest magnitude. Returns lists of indices.
    """
    w = np.asarray(eigvals, dtype=float)
    scale = max(np.max(np.abs(w)), np.finfo(float).tiny)
    clusters = [[0]]
    for i in range(1, len(w)):
        if abs(w[i - 1] - w[i]) > rel_tol * scale:
            clusters.append([i])
        else:
            clusters[-1].append(i)
    return clusters
