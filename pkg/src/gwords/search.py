"""Randomized counterexample search and constructive epsilon witnesses.

Every trial draws its matrices from its own generator, seeded by
``SeedSequence(seed, spawn_key=(trial,))``, so results depend only on the
master seed and the trial index, never on how trials are spread over threads.
The reported witness is always the one with the smallest trial index.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .certify import Certificate, decide_product, rationalize, sturm_decide
from .constructions import HIJO_WORD, epsilon_family_exact, hijo_example, normalize_signs, thfour_word
from .errors import NotPositiveDefinite, PreconditionViolation, SweepExhausted
from .linalg_core import (
    PDMatrix,
    RationalMatrix,
    Spectrum,
    eigenvalues_general,
    is_positive_definite_exact,
    rat_trace,
    spectral_factor,
)
from .matfile import matrix_to_dict
from .reduction import Status, classify
from .words import (
    TOL_IMAG,
    TOL_REAL,
    Verdict,
    as_sequence,
    canonicalize,
    evaluate,
    evaluate_exact,
    evaluate_factors,
    format_word,
    sequence,
    verdict_from_spectrum,
)

IMAG_WEIGHT = 1e-3


@dataclass(frozen=True)
class SearchConfig:
    n: int = 2
    trials: int = 1000
    seed: int = 0
    lam_min: float = 1e-2
    lam_max: float = 1e2
    tol_real: float = TOL_REAL
    tol_imag: float = TOL_IMAG
    refine: bool = False
    max_denominator: int = 10**6
    workers: int = 1

    def __post_init__(self):
        if not self.lam_min > 0:
            raise ValueError("lam_min must be positive")
        if self.lam_max < self.lam_min:
            raise ValueError("lam_max < lam_min")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("workers")  # must not influence the payload
        return d


@dataclass(frozen=True, eq=False)
class Witness:
    seq: object
    A: object
    B: object
    spectrum: Optional[Spectrum]
    certificate: Optional[Certificate]
    provenance: str
    note: str = ""

    @property
    def certified(self) -> bool:
        return self.certificate is not None and self.certificate.refutes

    def to_dict(self) -> dict:
        return {
            "sequence": format_word(self.seq),
            "A": matrix_to_dict(self.A),
            "B": matrix_to_dict(self.B),
            "spectrum": None if self.spectrum is None else [[z.real, z.imag] for z in self.spectrum],
            "certified": self.certified,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "provenance": self.provenance,
            "note": self.note,
        }


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def sample_pd(n: int, lam_range: tuple, rng: np.random.Generator) -> PDMatrix:
    """``Q diag(lam) Q^T`` with Haar-distributed ``Q`` and log-uniform ``lam``."""
    lo, hi = lam_range
    G = rng.standard_normal((n, n))
    Qm, R = np.linalg.qr(G)
    Qm = Qm * np.where(np.diag(R) < 0, -1.0, 1.0)
    lam = np.exp(rng.uniform(np.log(lo), np.log(hi), size=n))
    return spectral_factor((Qm * lam) @ Qm.T)


def objective(spec: Spectrum) -> float:
    """Smallest real part relative to the spectral radius, minus a small reward for non-realness."""
    vals = spec.as_array()
    rho = float(np.max(np.abs(vals)))
    return float((np.min(vals.real) - IMAG_WEIGHT * np.max(np.abs(vals.imag))) / rho)


@dataclass(frozen=True, eq=False)
class TrialResult:
    index: int
    A: PDMatrix
    B: PDMatrix
    spectrum: Spectrum
    verdict: object
    objective: float


def run_trial(seq, config: SearchConfig, index: int) -> TrialResult:
    rng = trial_rng(config.seed, index)
    rng_range = (config.lam_min, config.lam_max)
    A = sample_pd(config.n, rng_range, rng)
    B = sample_pd(config.n, rng_range, rng)
    r = evaluate(seq, A, B, tol_real=config.tol_real, tol_imag=config.tol_imag)
    return TrialResult(index, A, B, r.spectrum, r.verdict, objective(r.spectrum))


def _clear_failure(spec: Spectrum, config: SearchConfig) -> bool:
    """Beyond ten times the verdict tolerances, where roundoff cannot explain it."""
    return any(z.real <= -10 * config.tol_real or abs(z.imag) >= 100 * config.tol_imag * (1 + abs(z))
               for z in spec)


def escalate(seq, A, B, spec: Spectrum, config: SearchConfig, provenance: str) -> Optional[Witness]:
    """Turn a numeric failure into a Witness, or None if it does not survive scrutiny.

    Integer exponents: the pair is rationalized and decided exactly; only a
    refuting certificate yields a witness. Other exponents: the failure must be
    clear of the verdict tolerances, and the witness is labeled uncertified.
    """
    seq = as_sequence(seq)
    Af = np.asarray(A.base if isinstance(A, PDMatrix) else A)
    Bf = np.asarray(B.base if isinstance(B, PDMatrix) else B)
    if seq.integer:
        Ar = rationalize(Af, config.max_denominator)
        Br = rationalize(Bf, config.max_denominator)
        if is_positive_definite_exact(Ar) and is_positive_definite_exact(Br):
            cert = sturm_decide(seq, Ar, Br)
            if cert.refutes:
                return Witness(seq, Ar, Br, spec, cert, provenance)
        return None
    if _clear_failure(spec, config):
        return Witness(seq, Af, Bf, spec, None, provenance,
                       note="uncertified: non-integer exponents, exact certification unavailable")
    return None


@dataclass(frozen=True, eq=False)
class SearchResult:
    config: SearchConfig
    seq: object
    witness: Optional[Witness]
    trials_run: int
    best_margin: float
    best_trial: int
    wall_time: float
    refined: Optional[dict] = None
    rejected_hits: int = 0

    def payload(self) -> dict:
        return {
            "config": self.config.echo(),
            "sequence": format_word(self.seq),
            "trials_run": self.trials_run,
            "best_margin": self.best_margin,
            "best_trial": self.best_trial,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "refined": self.refined,
            "rejected_hits": self.rejected_hits,
            "claim": ("counterexample found" if self.witness is not None else
                      f"no counterexample in {self.trials_run} trials (not a proof of positivity)"),
        }


def random_search(seq, config: SearchConfig, batch_size: int = 256) -> SearchResult:
    seq = as_sequence(seq)
    good_2x2 = config.n == 2 and classify(seq).verdict is Status.PROVABLY_GOOD
    t0 = time.perf_counter()
    best = (np.inf, -1)
    witness = None
    trials_run = 0
    best_trial_result = None
    rejected = 0
    executor = ThreadPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for lo in range(0, config.trials, batch_size):
            idx = range(lo, min(lo + batch_size, config.trials))
            if executor is None:
                batch = [run_trial(seq, config, i) for i in idx]
            else:
                batch = list(executor.map(lambda i: run_trial(seq, config, i), idx))
            for tr in batch:
                trials_run = tr.index + 1
                if tr.objective < best[0]:
                    best = (tr.objective, tr.index)
                    best_trial_result = tr
                if tr.verdict.kind is Verdict.NOT_ALL_POSITIVE:
                    witness = escalate(seq, tr.A, tr.B, tr.spectrum, config,
                                       f"random_search seed={config.seed} trial={tr.index}")
                    if witness is not None:
                        break
                    rejected += 1
            if witness is not None:
                break
    finally:
        if executor is not None:
            executor.shutdown()

    if good_2x2 and witness is not None and witness.certified:
        raise AssertionError("certified 2x2 counterexample for a pattern proven 2-good")

    refined = None
    if config.refine and witness is None and best_trial_result is not None:
        rr = refine(best_trial_result.A, best_trial_result.B, seq, config)
        refined = {"start_objective": best_trial_result.objective, "objective": rr.objective,
                   "iterations": len(rr.history)}
        if rr.objective < 0 or rr.verdict.kind is Verdict.NOT_ALL_POSITIVE:
            witness = escalate(seq, rr.A, rr.B, rr.spectrum, config,
                               f"refine from seed={config.seed} trial={best[1]}")
        if good_2x2 and witness is not None and witness.certified:
            raise AssertionError("certified 2x2 counterexample for a pattern proven 2-good")

    return SearchResult(config, seq, witness, trials_run, float(best[0]), int(best[1]),
                        time.perf_counter() - t0, refined, rejected)


# ---------------------------------------------------------------------------
# local refinement
# ---------------------------------------------------------------------------

def _to_params(M: np.ndarray) -> np.ndarray:
    L = np.linalg.cholesky(M)
    n = L.shape[0]
    rows, cols = np.tril_indices(n)
    p = L[rows, cols].copy()
    diag = rows == cols
    p[diag] = np.log(p[diag])
    return p


def _from_params(p: np.ndarray, n: int) -> np.ndarray:
    rows, cols = np.tril_indices(n)
    vals = p.copy()
    diag = rows == cols
    vals[diag] = np.exp(vals[diag])
    L = np.zeros((n, n))
    L[rows, cols] = vals
    return L @ L.T


@dataclass(frozen=True, eq=False)
class RefineResult:
    A: np.ndarray
    B: np.ndarray
    objective: float
    spectrum: Spectrum
    verdict: object
    history: tuple


def refine(A, B, seq, config: SearchConfig = SearchConfig(), max_iter: int = 2000) -> RefineResult:
    """Nelder-Mead over the Cholesky factors of ``A`` and ``B``.

    Minimizes ``objective`` of the word's spectrum. The returned candidate is
    never worse than the input; ``history`` is the best-so-far objective per
    iteration and is non-increasing.
    """
    seq = as_sequence(seq)
    A0 = np.asarray(A.base if isinstance(A, PDMatrix) else A, dtype=float)
    B0 = np.asarray(B.base if isinstance(B, PDMatrix) else B, dtype=float)
    n = A0.shape[0]
    k = n * (n + 1) // 2
    factors = seq.factors()

    def f(p):
        try:
            W = evaluate_factors(factors, _from_params(p[:k], n), _from_params(p[k:], n))
            return objective(eigenvalues_general(W))
        except (NotPositiveDefinite, ValueError, np.linalg.LinAlgError):
            return np.inf

    x0 = np.concatenate([_to_params(A0), _to_params(B0)])
    f0 = f(x0)
    history = [f0]
    best = [f0, x0]

    def track(xk):
        val = f(xk)
        if val < best[0]:
            best[0], best[1] = val, np.array(xk)
        history.append(best[0])

    minimize(f, x0, method="Nelder-Mead", callback=track,
             options={"maxiter": max_iter, "xatol": 1e-10, "fatol": 1e-14, "adaptive": True})
    if best[0] < f0:
        An, Bn = _from_params(best[1][:k], n), _from_params(best[1][k:], n)
    else:
        An, Bn = A0, B0
    r = evaluate(seq, An, Bn, tol_real=config.tol_real, tol_imag=config.tol_imag)
    return RefineResult(An, Bn, objective(r.spectrum), r.spectrum, r.verdict, tuple(history))


# ---------------------------------------------------------------------------
# epsilon witnesses
# ---------------------------------------------------------------------------

def epsilon_sweep(seq, k_max: int = 20) -> Witness:
    """Smallest dyadic ``eps = 2^-k`` at which the epsilon family has negative trace.

    Integer exponents give an exact NegativeTrace certificate. The witness
    matrices are for the sequence as given: when its leading alpha (beta) is
    negative, the family is built for the sign-flipped sequence and ``A``
    (``B``) is inverted back.
    """
    seq = as_sequence(seq)
    cls = classify(seq)
    if cls.verdict is not Status.PROVABLY_BAD:
        raise PreconditionViolation(
            f"epsilon_sweep needs a ProvablyBad sequence; {format_word(seq)} is {cls.verdict}")
    normalized, fa, fb = normalize_signs(seq)
    for k in range(1, k_max + 1):
        eps = Fraction(1, 2**k)
        A, B = epsilon_family_exact(normalized, eps)
        Aw = A.inverse() if fa else A
        Bw = B.inverse() if fb else B
        prov = f"epsilon({format_word(seq)}, 2^-{k})"
        if seq.integer:
            W = evaluate_exact(seq, Aw, Bw)
            if rat_trace(W) < 0:
                cert = decide_product(W)
                return Witness(seq, Aw, Bw, eigenvalues_general(W.to_float()), cert, prov)
        else:
            r = evaluate(seq, Aw.to_float(), Bw.to_float())
            if np.trace(r.matrix) < 0:
                return Witness(seq, Aw, Bw, r.spectrum, None, prov,
                               note="uncertified: non-integer exponents")
    raise SweepExhausted(f"no eps = 2^-k, k <= {k_max}, gives a negative trace for {format_word(seq)}")


# ---------------------------------------------------------------------------
# fixed recipes
# ---------------------------------------------------------------------------

THFOUR_A = ((2, 0, 0), (0, 2, 0), (0, 0, 1))
THFOUR_B = ((2, 1, 0), (1, 2, 1), (0, 1, 2))


def hijo_witness() -> Witness:
    A, B = hijo_example()
    seq = canonicalize(HIJO_WORD)
    cert = sturm_decide(seq, A, B)
    spec = evaluate(seq, A.to_float(), B.to_float()).spectrum
    return Witness(seq, A, B, spec, cert, "hijo-eq2")


def thfour_witness(A=THFOUR_A, B=THFOUR_B, m_max: int = 64) -> Witness:
    """Smallest ``m <= m_max`` at which ``A^m B A^-m B^-1`` provably has a non-positive eigenvalue.

    The scan is numeric; each numeric hit is confirmed exactly before it is
    accepted.
    """
    Ar, Br = RationalMatrix(A), RationalMatrix(B)
    Af, Bf = Ar.to_float(), Br.to_float()
    for m in range(1, m_max + 1):
        r = thfour_word(Af, Bf, m)
        if r.verdict.kind is not Verdict.NOT_ALL_POSITIVE:
            continue
        seq = sequence([(m, 1), (-m, -1)])
        cert = sturm_decide(seq, Ar, Br)
        if cert.refutes:
            return Witness(seq, Ar, Br, r.spectrum, cert, f"thfour({m})")
    raise SweepExhausted(f"no m <= {m_max} refutes positivity; the pair may commute")
