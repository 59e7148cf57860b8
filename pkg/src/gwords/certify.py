"""Exact certificates for (non-)positivity of word spectra, and the Perron route.

``sturm_decide`` is a decision procedure for integer-exponent words in
rational positive definite matrices. It tries, in order:

1. ``NegativeTrace``: the trace of the exact product is <= 0;
2. ``CoefficientSignViolation``: the monic characteristic polynomial does
   not have strictly alternating coefficients, which every polynomial with
   only positive real roots must have;
3. ``SturmCount``: Sturm sequences on the squarefree factors count the
   positive real roots with multiplicity; fewer than ``n`` refutes.

If all ``n`` roots are shown to be positive reals the certificate kind is
``"None"``, meaning there is nothing to refute.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
import sympy as sp

from . import polynomials as poly
from .errors import (
    MultiplicityTooLow,
    NegativeEntry,
    NonIntegerExponent,
    NotPositiveDefinite,
    ConvergenceFailure,
)
from .linalg_core import (
    PDMatrix,
    RationalMatrix,
    cluster_eigenvalues,
    is_positive_definite_exact,
    rat_charpoly,
    rat_trace,
    spectral_factor,
)
from .words import ExponentSequence, as_sequence, evaluate_exact

REFUTING = ("NegativeTrace", "CoefficientSignViolation", "SturmCount")


@dataclass(frozen=True, eq=False)
class Certificate:
    kind: str
    value: Optional[Fraction] = None
    index: Optional[int] = None
    positive_roots: Optional[int] = None
    n: Optional[int] = None
    counts: tuple = ()
    charpoly: tuple = ()
    product: Optional[RationalMatrix] = None
    note: str = ""

    @property
    def refutes(self) -> bool:
        """True when the certificate proves the spectrum is not all positive."""
        return self.kind in REFUTING

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.value is not None:
            d["value"] = str(self.value)
        if self.index is not None:
            d["index"] = self.index
        if self.positive_roots is not None:
            d["positive_roots"] = self.positive_roots
        if self.n is not None:
            d["n"] = self.n
        if self.counts:
            d["counts"] = [list(c) for c in self.counts]
        if self.charpoly:
            d["charpoly"] = [str(c) for c in self.charpoly]
        if self.product is not None:
            d["word_product"] = {"n": self.product.n, "mode": "rational",
                                 "entries": [str(x) for x in self.product.entries()]}
        if self.note:
            d["note"] = self.note
        return d


# ---------------------------------------------------------------------------
# exact decision
# ---------------------------------------------------------------------------

def alternation_violation(coeffs) -> Optional[tuple]:
    """First index whose coefficient breaks strict sign alternation, else None.

    For a monic ``x^n + c_1 x^(n-1) + ... + c_n`` with all roots positive,
    ``sign(c_k) = (-1)^k``.
    """
    for k, c in enumerate(coeffs):
        expected = 1 if k % 2 == 0 else -1
        if c == 0 or (c > 0) != (expected > 0):
            return k, c
    return None


def positive_root_count(coeffs) -> tuple:
    """Positive real roots counted with multiplicity, plus per-factor counts."""
    total, counts = 0, []
    for f, mult in poly.squarefree_decomposition(coeffs):
        k = poly.count_positive_roots(f)
        counts.append((mult, poly.degree(f), k))
        total += mult * k
    return total, tuple(counts)


def decide_product(W: RationalMatrix) -> Certificate:
    """Run the certificate cascade on an exact matrix whose determinant is nonzero."""
    tr = rat_trace(W)
    if tr <= 0:
        return Certificate("NegativeTrace", value=tr, n=W.n, product=W)
    cp = tuple(rat_charpoly(W))
    bad = alternation_violation(cp)
    if bad is not None:
        k, c = bad
        return Certificate("CoefficientSignViolation", value=c, index=k, n=W.n, charpoly=cp, product=W)
    total, counts = positive_root_count(cp)
    if total < W.n:
        return Certificate("SturmCount", positive_roots=total, n=W.n, counts=counts, charpoly=cp, product=W)
    return Certificate("None", positive_roots=total, n=W.n, counts=counts, charpoly=cp, product=W)


def sturm_decide(seq, A: RationalMatrix, B: RationalMatrix) -> Certificate:
    seq = as_sequence(seq)
    if not seq.integer:
        raise NonIntegerExponent("exact certification needs integer exponents")
    for name, M in (("A", A), ("B", B)):
        if not is_positive_definite_exact(M):
            raise NotPositiveDefinite(f"{name} is not positive definite (exact leading minors)")
    return decide_product(evaluate_exact(seq, A, B))


def check_certificate(doc: dict) -> bool:
    """Re-verify a serialized certificate from its word product alone.

    Uses sympy's exact characteristic polynomial and real-root counting, so it
    shares no arithmetic with ``decide_product``.
    """
    prod = doc["word_product"]
    n = int(prod["n"])
    vals = [sp.Rational(x) for x in prod["entries"]]
    W = sp.Matrix(n, n, vals)
    kind = doc["kind"]
    if kind == "NegativeTrace":
        return bool(W.trace() == sp.Rational(doc["value"]) and W.trace() <= 0)
    x = sp.Symbol("x")
    p = sp.Poly(W.charpoly(x).as_expr(), x)
    if kind == "CoefficientSignViolation":
        k = int(doc["index"])
        c = p.all_coeffs()[k]
        return bool(c == sp.Rational(doc["value"]) and (c == 0 or (c > 0) != (k % 2 == 0)))
    positive = _sympy_positive_count(p)
    if kind == "SturmCount":
        return bool(positive == int(doc["positive_roots"]) and positive < n)
    if kind == "None":
        return bool(positive == n)
    raise ValueError(f"unknown certificate kind {kind!r}")


def _sympy_positive_count(p) -> int:
    total = 0
    for f, mult in sp.sqf_list(p)[1]:
        total += mult * f.count_roots(0, sp.oo) - (mult if f.eval(0) == 0 else 0)
    return total


def rationalize(M, max_denominator: int = 10**6, symmetric: bool = True) -> RationalMatrix:
    """Entrywise best rational approximation with bounded denominator."""
    A = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    R = RationalMatrix(tuple(tuple(Fraction(float(x)).limit_denominator(max_denominator)
                                   for x in row) for row in A))
    if symmetric:
        R = (R + R.T).scale(Fraction(1, 2))
    return R


# ---------------------------------------------------------------------------
# canonical nonnegative pair and the Perron root
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CanonicalPair:
    """``U^T A U = A0`` diagonal, ``U^T B U = B0`` an arrowhead with nonnegative last row."""

    A0: np.ndarray
    B0: np.ndarray
    U: np.ndarray
    lam1: float
    lam2: float

    def residuals(self, A, B) -> dict:
        A = np.asarray(A.base if isinstance(A, PDMatrix) else A, dtype=float)
        B = np.asarray(B.base if isinstance(B, PDMatrix) else B, dtype=float)
        U = self.U
        n = U.shape[0]
        return {
            "orthogonality": float(np.max(np.abs(U.T @ U - np.eye(n)))),
            "A": float(np.max(np.abs(U.T @ A @ U - self.A0))),
            "B": float(np.max(np.abs(U.T @ B @ U - self.B0))),
        }


def multeig_canonical(A, B, rel_tol: float = 1e-6) -> CanonicalPair:
    """Orthogonal ``U`` bringing ``A`` to ``diag(l1,...,l1,l2)`` and ``B`` to arrowhead form.

    ``A`` must have an eigenvalue of multiplicity at least ``n - 1``.
    """
    FA, FB = spectral_factor(A), spectral_factor(B)
    n = FA.n
    clusters = cluster_eigenvalues(FA.eigvals, rel_tol)
    big = max(clusters, key=len)
    if len(big) < n - 1:
        raise MultiplicityTooLow(f"largest eigenvalue multiplicity of A is {len(big)} < n-1 = {n - 1}")
    rest = [i for i in range(n) if i not in big[: n - 1]]
    keep = big[: n - 1]
    lam1 = float(np.mean(FA.eigvals[big]))
    lam2 = float(FA.eigvals[rest[0]]) if len(big) < n else lam1
    U0 = np.column_stack([FA.eigvecs[:, keep], FA.eigvecs[:, rest]])
    Bp = U0.T @ FB.base @ U0
    if n > 1:
        _, Wb = np.linalg.eigh(0.5 * (Bp[:-1, :-1] + Bp[:-1, :-1].T))
        U = U0.copy()
        U[:, :-1] = U0[:, :-1] @ Wb
        last = (U.T @ FB.base @ U)[:-1, -1]
        U[:, :-1] *= np.where(last < 0, -1.0, 1.0)
    else:
        U = U0
    B0 = U.T @ FB.base @ U
    B0 = 0.5 * (B0 + B0.T)
    # exact arrowhead pattern; the dropped entries are roundoff
    mask = np.eye(n, dtype=bool)
    mask[-1, :] = mask[:, -1] = True
    B0 = np.where(mask, B0, 0.0)
    B0[-1, :-1] = B0[:-1, -1] = np.maximum(B0[:-1, -1], 0.0)
    A0 = np.diag([lam1] * (n - 1) + [lam2])
    return CanonicalPair(A0=A0, B0=B0, U=U, lam1=lam1, lam2=lam2)


@dataclass(frozen=True, eq=False)
class PerronResult:
    rho: float
    lower_bound: float
    residual: float
    dominant: bool
    vector: np.ndarray

    def certificate(self) -> Certificate:
        return Certificate("PerronPositive", value=Fraction(self.lower_bound), note=f"rho={self.rho!r}")


def perron_positive(W, residual_tol: float = 1e-9) -> PerronResult:
    """Spectral radius of an entrywise nonnegative matrix, checked as an eigenvalue.

    ``lower_bound`` is the Collatz-Wielandt bound ``min (Wx)_i / x_i`` over the
    support of the computed Perron vector ``x``.
    """
    W = np.asarray(W, dtype=float)
    if np.any(W < 0):
        raise NegativeEntry(f"entry {W.min():.3e} is negative")
    w, V = np.linalg.eig(W)
    rho = float(np.max(np.abs(w)))
    if rho <= 0:
        raise ConvergenceFailure("spectral radius is zero; matrix is nilpotent")
    near = np.abs(np.abs(w) - rho) <= 1e-9 * rho
    idx = int(np.argmin(np.where(near, np.abs(w - rho), np.inf)))
    x = np.real(V[:, idx])
    x = x if x.sum() >= 0 else -x
    x = np.maximum(x, 0.0)
    residual = float(np.linalg.norm(W @ x - rho * x) / (rho * np.linalg.norm(x)))
    if residual > residual_tol:
        raise ConvergenceFailure(f"Perron vector residual {residual:.3e} exceeds {residual_tol:.1e}")
    support = x > 1e-14 * x.max()
    lower = float(np.min((W @ x)[support] / x[support]))
    others = np.delete(np.abs(w), idx)
    dominant = bool(np.all(others < rho * (1 - 1e-9)))
    return PerronResult(rho=rho, lower_bound=lower, residual=residual, dominant=dominant, vector=x)


def swap_letters(seq):
    """Exponents of the same word read with the letters exchanged, up to rotation.

    ``A^a1 B^b1 ... A^aN B^bN`` is cyclically similar to
    ``B^b1 A^a2 ... B^bN A^a1``, a word in (B, A).
    """
    seq = as_sequence(seq)
    a, b = seq.alphas, seq.betas
    N = seq.N
    return ExponentSequence(tuple((b[j], a[(j + 1) % N]) for j in range(N)))


@dataclass(frozen=True, eq=False)
class PerronRouteCheck:
    pair: CanonicalPair
    word_matrix: np.ndarray
    perron: PerronResult
    swapped: bool
    inverted: bool


def perron_route_check(seq, A, B, rel_tol: float = 1e-6) -> PerronRouteCheck:
    """Perron route to one positive eigenvalue.

    One matrix has an eigenvalue of multiplicity >= n-1 and the other appears
    with positive integer powers only (negative ones are handled by inverting
    it). In the canonical basis every factor is entrywise nonnegative, so the
    word is too and its Perron root is a positive eigenvalue.
    """
    seq = as_sequence(seq)
    FA, FB = spectral_factor(A), spectral_factor(B)
    swapped = False
    n = FA.n
    if len(max(cluster_eigenvalues(FA.eigvals, rel_tol), key=len)) < n - 1:
        seq, FA, FB = swap_letters(seq), FB, FA
        swapped = True
    betas = seq.betas
    if not all(b == int(b) for b in betas):
        raise NonIntegerExponent("the Perron route needs integer powers of the second matrix")
    inverted = False
    if all(b < 0 for b in betas):
        seq = seq.negate(beta=True)
        FB = spectral_factor(np.linalg.inv(FB.base))
        inverted = True
    elif not all(b > 0 for b in seq.betas):
        raise ValueError("powers of the second matrix must share a sign")
    pair = multeig_canonical(FA, FB, rel_tol)
    d = np.diag(pair.A0)
    W = np.eye(n)
    for a, b in seq.pairs:
        W = W * (d ** float(a))[None, :]
        W = W @ np.linalg.matrix_power(pair.B0, int(b))
    return PerronRouteCheck(pair=pair, word_matrix=W, perron=perron_positive(W), swapped=swapped, inverted=inverted)
