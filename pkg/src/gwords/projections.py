"""Simultaneous block-diagonalization of two orthoprojections.

Any two orthoprojections ``P`` and ``Q`` are orthogonally similar to direct
sums of 1x1 and 2x2 blocks. The 1x1 blocks come from the four intersections
``ran P & ran Q``, ``ran P & ker Q``, ``ker P & ran Q`` and ``ker P & ker Q``;
each 2x2 block is ``P_j = [[1, 0], [0, 0]]``, ``Q_j = [[c^2, cs], [cs, s^2]]``
for a principal angle ``theta`` strictly between 0 and pi/2.

A matrix with two eigenvalues is ``(l1 - l2) P + l2 I`` for an orthoprojection
``P``, so a word in two such matrices splits into words in blocks of size at
most two.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, MoreThanTwoEigenvalues
from .linalg_core import Spectrum, cluster_eigenvalues, spectral_factor, sym_matrix
from .words import (
    EvalResult,
    as_sequence,
    evaluate,
    verdict_from_spectrum,
)

ANGLE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OrthoProjection:
    matrix: np.ndarray
    rank: int

    @classmethod
    def of(cls, M, tol: float = 1e-10) -> "OrthoProjection":
        S = sym_matrix(M)
        n = S.shape[0]
        err = np.max(np.abs(S @ S - S))
        if err > tol * n:
            raise ValueError(f"not idempotent: max |P^2 - P| = {err:.3e}")
        w = np.linalg.eigvalsh(S)
        return cls(S, int(np.sum(w > 0.5)))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def range_basis(self) -> np.ndarray:
        w, V = np.linalg.eigh(self.matrix)
        return V[:, w > 0.5]


@dataclass(frozen=True, eq=False)
class Block:
    size: int
    P: np.ndarray
    Q: np.ndarray
    angle: float | None  # principal angle for 2x2 blocks
    kind: str


@dataclass(frozen=True, eq=False)
class TwoProjectionForm:
    U: np.ndarray
    blocks: tuple

    def block_diagonal(self, which: str) -> np.ndarray:
        n = self.U.shape[0]
        out = np.zeros((n, n))
        i = 0
        for b in self.blocks:
            out[i:i + b.size, i:i + b.size] = b.P if which == "P" else b.Q
            i += b.size
        return out

    def residuals(self, P, Q) -> dict:
        P = np.asarray(getattr(P, "matrix", P))
        Q = np.asarray(getattr(Q, "matrix", Q))
        U = self.U
        n = U.shape[0]
        return {
            "orthogonality": float(np.max(np.abs(U.T @ U - np.eye(n)))),
            "P": float(np.max(np.abs(U.T @ P @ U - self.block_diagonal("P")))),
            "Q": float(np.max(np.abs(U.T @ Q @ U - self.block_diagonal("Q")))),
        }

    @property
    def angles(self) -> list:
        return [b.angle for b in self.blocks if b.size == 2]

    def report(self, P=None, Q=None) -> dict:
        out = {
            "n": int(self.U.shape[0]),
            "block_sizes": [b.size for b in self.blocks],
            "block_kinds": [b.kind for b in self.blocks],
            "principal_angles": [float(a) for a in self.angles],
        }
        if P is not None and Q is not None:
            out["residuals"] = self.residuals(P, Q)
        return out


def _full_svd(M: np.ndarray, p: int, q: int):
    if p == 0 or q == 0:
        return np.eye(p), np.zeros(0), np.eye(q)
    Y, s, Zt = np.linalg.svd(M, full_matrices=True)
    return Y, s, Zt.T


def halmos_form(P, Q, angle_tol: float = ANGLE_TOL) -> TwoProjectionForm:
    P = P if isinstance(P, OrthoProjection) else OrthoProjection.of(P)
    Q = Q if isinstance(Q, OrthoProjection) else OrthoProjection.of(Q)
    if P.n != Q.n:
        raise DimensionMismatch(f"P is {P.n}x{P.n} but Q is {Q.n}x{Q.n}")
    n = P.n
    Up, Uq = P.range_basis(), Q.range_basis()
    p, q = Up.shape[1], Uq.shape[1]
    Y, s, Z = _full_svd(Up.T @ Uq, p, q)
    X = Up @ Y          # ran P, paired with ran Q directions
    R = Uq @ Z          # ran Q
    k = len(s)

    # angles from both cosines and sines so that 0 and pi/2 are resolved accurately
    sines = np.array([np.linalg.norm(X[:, i] - Uq @ (Uq.T @ X[:, i])) for i in range(k)])
    angles = np.arctan2(sines, s)

    cols, blocks = [], []
    one, zero = np.ones((1, 1)), np.zeros((1, 1))
    for i in range(k):
        if angles[i] <= angle_tol:
            cols.append(X[:, i])
            blocks.append(Block(1, one, one, None, "ranP&ranQ"))
    for i in list(range(k)) + list(range(k, p)):
        if i >= k or angles[i] >= np.pi / 2 - angle_tol:
            cols.append(X[:, i])
            blocks.append(Block(1, one, zero, None, "ranP&kerQ"))
    for i in list(range(k)) + list(range(k, q)):
        if i >= k or angles[i] >= np.pi / 2 - angle_tol:
            cols.append(R[:, i])
            blocks.append(Block(1, zero, one, None, "kerP&ranQ"))
    generic = [i for i in range(k) if angle_tol < angles[i] < np.pi / 2 - angle_tol]

    Pb = np.array([[1.0, 0.0], [0.0, 0.0]])
    gen_cols, gen_blocks = [], []
    for i in generic:
        th = angles[i]
        c, sn = np.cos(th), np.sin(th)
        e1 = X[:, i]
        e2 = R[:, i] - s[i] * e1
        e2 = e2 / np.linalg.norm(e2)
        gen_cols += [e1, e2]
        gen_blocks.append(Block(2, Pb, np.array([[c * c, c * sn], [c * sn, sn * sn]]), float(th), "generic"))

    used = np.array(cols + gen_cols).reshape(-1, n).T
    if used.shape[1] < n:
        # ker P & ker Q is the orthogonal complement of ran P + ran Q
        Uc, _, _ = np.linalg.svd(used, full_matrices=True)
        for v in Uc[:, used.shape[1]:].T:
            cols.append(v)
            blocks.append(Block(1, zero, zero, None, "kerP&kerQ"))
    cols += gen_cols
    blocks += gen_blocks

    U = np.array(cols).T if cols else np.zeros((n, 0))
    return TwoProjectionForm(U=U, blocks=tuple(blocks))


@dataclass(frozen=True, eq=False)
class TwoEigenvalueSplit:
    lam1: float
    lam2: float
    projection: OrthoProjection

    def reconstruct(self) -> np.ndarray:
        n = self.projection.n
        return (self.lam1 - self.lam2) * self.projection.matrix + self.lam2 * np.eye(n)


def two_eigenvalue_split(A, rel_tol: float = 1e-6) -> TwoEigenvalueSplit:
    """Write ``A = (l1 - l2) P + l2 I``. A scalar matrix gives ``l1 == l2`` and ``P = I``."""
    F = spectral_factor(A)
    clusters = cluster_eigenvalues(F.eigvals, rel_tol)
    if len(clusters) > 2:
        diam = [float(F.eigvals[c[0]] - F.eigvals[c[-1]]) for c in clusters]
        raise MoreThanTwoEigenvalues(
            f"{len(clusters)} eigenvalue clusters found (diameters {diam})", diam)
    n = F.n
    if len(clusters) == 1:
        lam = float(np.mean(F.eigvals))
        return TwoEigenvalueSplit(lam, lam, OrthoProjection(np.eye(n), n))
    c1, c2 = clusters
    V1 = F.eigvecs[:, c1]
    Pm = V1 @ V1.T
    return TwoEigenvalueSplit(float(np.mean(F.eigvals[c1])), float(np.mean(F.eigvals[c2])),
                              OrthoProjection(0.5 * (Pm + Pm.T), len(c1)))


@dataclass(frozen=True, eq=False)
class BlockwiseResult:
    form: TwoProjectionForm
    block_results: tuple
    spectrum: Spectrum
    verdict: object


def blockwise_evaluate(seq, A, B, rel_tol: float = 1e-6) -> BlockwiseResult:
    """Evaluate a word block by block in the joint canonical form of ``A`` and ``B``."""
    seq = as_sequence(seq)
    sa, sb = two_eigenvalue_split(A, rel_tol), two_eigenvalue_split(B, rel_tol)
    form = halmos_form(sa.projection, sb.projection)
    results, values = [], []
    for b in form.blocks:
        I = np.eye(b.size)
        Aj = (sa.lam1 - sa.lam2) * b.P + sa.lam2 * I
        Bj = (sb.lam1 - sb.lam2) * b.Q + sb.lam2 * I
        r = evaluate(seq, Aj, Bj)
        results.append(r)
        values.extend(r.spectrum.values)
    spec = Spectrum.of(values)
    return BlockwiseResult(form, tuple(results), spec, verdict_from_spectrum(spec))


def max_sorted_deviation(s1: Spectrum, s2: Spectrum, relative: bool = True) -> float:
    """Largest gap between two spectra after sorting; scaled by ``1 + |lambda|`` if relative."""
    a, b = s1.as_array(), s2.as_array()
    if len(a) != len(b):
        raise DimensionMismatch("spectra of different sizes")
    d = np.abs(a - b)
    if relative:
        d = d / (1 + np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(d)) if len(d) else 0.0
