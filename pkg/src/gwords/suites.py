"""Property suites, one per established result, runnable from the command line.

Each suite returns a ``SuiteResult``; ``passed`` is False as soon as a single
trial contradicts the property. Sampling ranges are chosen so that every true
eigenvalue stays well above the verdict tolerances: positivity is invariant
under positive rescaling of ``A`` and ``B``, so a moderate dynamic range loses
nothing but float headroom.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .certify import check_certificate, perron_route_check, sturm_decide
from .constructions import (
    HIJO_A,
    HIJO_B,
    HIJO_WORD,
    expected_limit_trace,
    floor_half_odd,
    hijo_example,
    normalize_signs,
    projection_identities_check,
    projection_limit,
    pq_power,
    pq_power_direct,
    thfour_limit,
    thfour_word,
)
from .linalg_core import (
    PDMatrix,
    RationalMatrix,
    is_positive_definite_exact,
    leading_minors,
    rat_trace,
    spectral_factor,
)
from .projections import blockwise_evaluate, max_sorted_deviation
from .reduction import reduced_class
from .search import epsilon_sweep, sample_pd
from .words import Verdict, canonicalize, evaluate, format_word, sequence

MAX_REPORTED_FAILURES = 5


@dataclass
class SuiteResult:
    name: str
    passed: bool = True
    trials: int = 0
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    wall_time: float = 0.0

    def fail(self, **info):
        self.passed = False
        if len(self.failures) < MAX_REPORTED_FAILURES:
            self.failures.append(info)

    def to_dict(self) -> dict:
        return {"suite": self.name, "passed": self.passed, "trials": self.trials,
                "checks": self.checks, "failures": self.failures}


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def _exponent(rng, lo, hi, sign=None) -> float:
    s = sign if sign is not None else (1 if rng.random() < 0.5 else -1)
    return float(s * rng.uniform(lo, hi))


def _mixed_sequence(rng, N, lo, hi, beta_sign):
    return sequence([(_exponent(rng, lo, hi), _exponent(rng, lo, hi, beta_sign)) for _ in range(N)])


def two_eigenvalue_pd(n: int, rng, lam_range=(0.2, 5.0), mult=None, min_ratio=None) -> PDMatrix:
    """Random ``Q diag(l1 I_k, l2 I_(n-k)) Q^T`` with ``l1 > l2``."""
    lo, hi = np.log(lam_range[0]), np.log(lam_range[1])
    while True:
        l1, l2 = sorted(np.exp(rng.uniform(lo, hi, 2)), reverse=True)
        if l1 > l2 * (1 + 1e-3) and (min_ratio is None or l1 >= min_ratio * l2):
            break
    k = mult if mult is not None else int(rng.integers(1, n))
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.where(np.diag(R) < 0, -1.0, 1.0)
    d = np.array([l1] * k + [l2] * (n - k))
    return spectral_factor((Q * d) @ Q.T)


def random_rational_pd(n: int, rng, bound: int = 3) -> RationalMatrix:
    """``L L^T`` for an integer lower-triangular ``L`` with nonzero diagonal."""
    L = np.tril(rng.integers(-bound, bound + 1, size=(n, n)))
    for i in range(n):
        if L[i, i] == 0:
            L[i, i] = 1
    M = L @ L.T
    return RationalMatrix(tuple(tuple(int(x) for x in row) for row in M))


def _verdict_check(res: SuiteResult, i, seq, r, expected=Verdict.ALL_POSITIVE):
    if r.verdict.kind is not expected:
        res.fail(trial=i, sequence=format_word(seq), verdict=str(r.verdict.kind),
                 min_real=r.spectrum.min_real, max_abs_imag=r.spectrum.max_abs_imag)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_class1(trials: int = 1000, seed: int = 0) -> SuiteResult:
    """``A^a B^b`` is similar to ``B^(b/2) A^a B^(b/2)``, so its spectrum is positive."""
    res = SuiteResult("class1")
    rng = np.random.default_rng(seed)
    counts = {v.value: 0 for v in Verdict}
    for i in range(trials):
        n = int(rng.integers(1, 6))
        A, B = sample_pd(n, (0.1, 10.0), rng), sample_pd(n, (0.1, 10.0), rng)
        seq = sequence([(_exponent(rng, 0.1, 3.0), _exponent(rng, 0.1, 3.0))])
        r = evaluate(seq, A, B)
        counts[r.verdict.kind.value] += 1
        _verdict_check(res, i, seq, r)
    res.trials = trials
    res.checks = {"verdicts": counts}
    return res


def suite_thm_n2(trials: int = 1000, exact_trials: int = 100, seed: int = 0) -> SuiteResult:
    """2x2 pairs, all beta positive, alpha signs mixed: every eigenvalue positive."""
    res = SuiteResult("thm-n2")
    rng = np.random.default_rng(seed)
    for i in range(trials):
        N = int(rng.integers(1, 5))
        A, B = sample_pd(2, (0.1, 10.0), rng), sample_pd(2, (0.1, 10.0), rng)
        seq = _mixed_sequence(rng, N, 0.1, 2.0, 1)
        _verdict_check(res, i, seq, evaluate(seq, A, B))
    kinds = {}
    for i in range(exact_trials):
        N = int(rng.integers(1, 5))
        A, B = random_rational_pd(2, rng), random_rational_pd(2, rng)
        seq = sequence([(int(rng.choice([-3, -2, -1, 1, 2, 3])), int(rng.integers(1, 4)))
                        for _ in range(N)])
        cert = sturm_decide(seq, A, B)
        kinds[cert.kind] = kinds.get(cert.kind, 0) + 1
        if cert.kind != "None":
            res.fail(exact_trial=i, sequence=format_word(seq), certificate=cert.kind)
    res.trials = trials + exact_trials
    res.checks = {"numeric_trials": trials, "exact_trials": exact_trials, "exact_certificates": kinds}
    return res


def suite_thm_n3(trials: int = 300, seed: int = 0) -> SuiteResult:
    """3x3, ``A`` with a double eigenvalue, all beta of one sign: every eigenvalue positive."""
    res = SuiteResult("thm-n3")
    rng = np.random.default_rng(seed)
    for i in range(trials):
        N = int(rng.integers(1, 5))
        A = two_eigenvalue_pd(3, rng, mult=int(rng.integers(1, 3)))
        B = sample_pd(3, (0.2, 5.0), rng)
        seq = _mixed_sequence(rng, N, 0.1, 1.5, 1 if rng.random() < 0.5 else -1)
        _verdict_check(res, i, seq, evaluate(seq, A, B))
    res.trials = trials
    return res


def suite_thm_2eig(trials: int = 500, seed: int = 0, tol: float = 1e-7) -> SuiteResult:
    """Both matrices with two eigenvalues: blockwise evaluation is positive and matches the direct one."""
    res = SuiteResult("thm-2eig")
    rng = np.random.default_rng(seed)
    worst, sizes = 0.0, set()
    for i in range(trials):
        n = int(rng.integers(3, 9))
        N = int(rng.integers(1, 5))
        A, B = two_eigenvalue_pd(n, rng), two_eigenvalue_pd(n, rng)
        seq = _mixed_sequence(rng, N, 0.1, 1.5, 1 if rng.random() < 0.5 else -1)
        if rng.random() < 0.5:  # same-sign alphas instead, with arbitrary betas
            seq = sequence([(b, a) for a, b in seq.pairs])
        bw = blockwise_evaluate(seq, A, B)
        direct = evaluate(seq, A, B)
        dev = max_sorted_deviation(bw.spectrum, direct.spectrum)
        worst = max(worst, dev)
        sizes.update(b.size for b in bw.form.blocks)
        if bw.verdict.kind is not Verdict.ALL_POSITIVE or direct.verdict.kind is not Verdict.ALL_POSITIVE:
            res.fail(trial=i, sequence=format_word(seq), blockwise=str(bw.verdict.kind),
                     direct=str(direct.verdict.kind))
        elif dev > tol:
            res.fail(trial=i, sequence=format_word(seq), deviation=dev)
    res.trials = trials
    res.checks = {"max_relative_deviation": worst, "block_sizes_seen": sorted(sizes)}
    return res


def suite_thfour(trials: int = 50, seed: int = 0, m_max: int = 64, m_limit: int = 40,
                 limit_tol: float = 1e-6) -> SuiteResult:
    """``A^m B A^-m B^-1``: a failing ``m`` exists iff the pair does not commute; rescaled limit."""
    res = SuiteResult("thfour")
    rng = np.random.default_rng(seed)
    first_fail, worst_limit = [], 0.0
    for i in range(trials):
        A = two_eigenvalue_pd(3, rng, mult=int(rng.integers(1, 3)), min_ratio=2.0)
        B = sample_pd(3, (0.2, 5.0), rng)
        m_bad = next((m for m in range(1, m_max + 1)
                      if thfour_word(A, B, m).verdict.kind is Verdict.NOT_ALL_POSITIVE), None)
        first_fail.append(m_bad)
        if m_bad is None:
            res.fail(trial=i, kind="non-commuting pair positive for all m")
        lim = thfour_limit(A, B)
        scaled = lim.gamma ** m_limit * thfour_word(A, B, m_limit).matrix
        err = float(np.max(np.abs(scaled - lim.limit_original)))
        worst_limit = max(worst_limit, err)
        if err > limit_tol:
            res.fail(trial=i, kind="limit mismatch", error=err)
    commuting_ok = 0
    for i in range(trials):
        l1, l2 = sorted(np.exp(rng.uniform(np.log(0.2), np.log(5.0), 2)), reverse=True)
        k = int(rng.integers(1, 3))
        A = np.diag([l1] * k + [l2] * (3 - k))
        B = np.zeros((3, 3))
        B[:k, :k] = sample_pd(k, (0.2, 5.0), rng).base
        B[k:, k:] = sample_pd(3 - k, (0.2, 5.0), rng).base
        bad = [m for m in range(1, m_max + 1) if thfour_word(A, B, m).verdict.kind is not Verdict.ALL_POSITIVE]
        if bad:
            res.fail(trial=i, kind="commuting pair not positive", m=bad[0])
        else:
            commuting_ok += 1
    res.trials = 2 * trials
    res.checks = {"first_failing_m": first_fail, "max_limit_error": worst_limit,
                  "commuting_pairs_positive": commuting_ok}
    return res


def normalized_patterns(N: int):
    """Sign patterns of class N with leading alpha and beta positive, as +-1 sequences."""
    for rest in itertools.product((1, -1), repeat=2 * N - 2):
        signs = (1, 1) + rest
        yield sequence([(signs[2 * j], signs[2 * j + 1]) for j in range(N)])


def suite_not2good(seed: int = 0, max_class: int = 7, sweep_class: int = 4) -> SuiteResult:
    """Reduced class 2, 3 (mod 4): negative limit trace, and an exact epsilon witness."""
    res = SuiteResult("not2good")
    by_m, traces_checked, sweeps = {}, 0, 0
    for N in range(1, max_class + 1):
        for seq in normalized_patterns(N):
            red = reduced_class(seq)
            by_m[red.m] = by_m.get(red.m, 0) + 1
            if red.m % 4 not in (2, 3):
                continue
            tr = rat_trace(projection_limit(seq))
            traces_checked += 1
            if not tr < 0 or tr != expected_limit_trace(N, red.m):
                res.fail(sequence=format_word(seq), m=red.m, trace=str(tr))
            if N <= sweep_class:
                w = epsilon_sweep(seq)
                sweeps += 1
                if not (w.certified and w.certificate.kind == "NegativeTrace"):
                    res.fail(sequence=format_word(seq), kind="sweep not certified")
    # every class-2 pattern with alternating signs, magnitudes 1..3
    mags = (1, 2, 3)
    class2 = 0
    for sa, sb in itertools.product(((1, -1), (-1, 1)), repeat=2):
        for a1, b1, a2, b2 in itertools.product(mags, repeat=4):
            seq = sequence([(sa[0] * a1, sb[0] * b1), (sa[1] * a2, sb[1] * b2)])
            w = epsilon_sweep(seq)
            class2 += 1
            if not (w.certified and w.certificate.kind == "NegativeTrace"
                    and check_certificate(w.certificate.to_dict())):
                res.fail(sequence=format_word(seq), kind="class-2 sweep not certified")
    res.trials = traces_checked + sweeps + class2
    res.checks = {"patterns_by_reduced_class": {str(k): v for k, v in sorted(by_m.items())},
                  "limit_traces_checked": traces_checked, "pattern_sweeps": sweeps,
                  "class2_magnitude_sweeps": class2}
    return res


def suite_identities(k_max: int = 10, m_max: int = 1000) -> SuiteResult:
    res = SuiteResult("identities")
    try:
        ids = projection_identities_check()
    except AssertionError as exc:
        res.fail(kind="projection identity", error=str(exc))
        ids = {}
    for k in range(1, k_max + 1):
        if pq_power(k) != pq_power_direct(k):
            res.fail(kind="power formula", k=k)
    for m in range(m_max + 1):
        if floor_half_odd(m) != (m % 4 in (2, 3)):
            res.fail(kind="floor(m/2) parity", m=m)
    m2 = {}
    for word in ("A B A^-1 B^-1", "A B A^2 B A^-1 B^-1", "A^2 B^3 A^-1 B^-1 A^-2 B^-1"):
        seq = normalize_signs(canonicalize(word))[0]
        tr = rat_trace(projection_limit(seq))
        m2[word] = str(tr)
        if reduced_class(seq).m != 2 or tr != Fraction(-1, 4) * Fraction(2) ** (2 - seq.N):
            res.fail(kind="m=2 trace", word=word, trace=str(tr))
    res.trials = len(ids) + k_max + m_max + 1 + len(m2)
    res.checks = {"identities": sorted(ids), "m2_traces": m2}
    return res


def suite_perron(trials: int = 100, seed: int = 0) -> SuiteResult:
    """One matrix with an eigenvalue of multiplicity n-1, integer powers of the other of one sign."""
    res = SuiteResult("perron")
    rng = np.random.default_rng(seed)
    for i in range(trials):
        n = int(rng.integers(2, 7))
        A = two_eigenvalue_pd(n, rng, mult=n - 1)
        B = sample_pd(n, (0.2, 5.0), rng)
        N = int(rng.integers(1, 4))
        sb = 1 if rng.random() < 0.5 else -1
        seq = sequence([(_exponent(rng, 0.2, 1.5), sb * int(rng.integers(1, 4))) for _ in range(N)])
        chk = perron_route_check(seq, A, B)
        first, second = (B, A) if chk.swapped else (A, B)
        second = np.linalg.inv(second.base) if chk.inverted else second.base
        resid = chk.pair.residuals(first, second)
        spec = evaluate(seq, A, B).spectrum.as_array()
        rho = chk.perron.rho
        matched = np.min(np.abs(spec - rho)) <= 1e-6 * rho
        if (np.any(chk.word_matrix < 0) or chk.perron.lower_bound <= 0 or not matched
                or max(resid.values()) > 1e-9 * n * max(1.0, np.max(np.abs(second)))):
            res.fail(trial=i, sequence=format_word(seq), rho=rho, residuals=resid)
    res.trials = trials
    return res


def suite_hijo_eq2() -> SuiteResult:
    """The explicit 3x3 pair on which ``A B A^2 B^2`` has a negative eigenvalue."""
    res = SuiteResult("hijo-eq2")
    A, B = hijo_example()
    if A != RationalMatrix(HIJO_A) or B != RationalMatrix(HIJO_B):
        res.fail(kind="matrices differ from the published ones")
    for name, M in (("A", A), ("B", B)):
        if not is_positive_definite_exact(M):
            res.fail(kind=f"{name} not positive definite")
    cert = sturm_decide(canonicalize(HIJO_WORD), A, B)
    if not cert.refutes:
        res.fail(kind="no refuting certificate", certificate=cert.kind)
    if not check_certificate(cert.to_dict()):
        res.fail(kind="independent check rejected the certificate")
    res.trials = 1
    res.checks = {"minors_A": [str(x) for x in leading_minors(A)],
                  "minors_B": [str(x) for x in leading_minors(B)],
                  "certificate": cert.to_dict()}
    return res


@dataclass(frozen=True)
class Suite:
    name: str
    run: Callable[..., SuiteResult]
    statement: str


SUITES = {s.name: s for s in (
    Suite("class1", suite_class1, "one-letter-pair words A^a B^b have positive spectrum"),
    Suite("thm-n2", suite_thm_n2, "2x2: all beta (or all alpha) of one sign implies positive spectrum"),
    Suite("thm-n3", suite_thm_n3, "3x3, A with a double eigenvalue, betas of one sign: positive spectrum"),
    Suite("thm-2eig", suite_thm_2eig, "two-eigenvalue pairs reduce to 2x2 blocks; 2-good words stay positive"),
    Suite("thfour", suite_thfour, "A^m B A^-m B^-1 positive for all m iff A, B commute; rescaled limit"),
    Suite("not2good", suite_not2good, "reduced class 2, 3 mod 4 is not 2-good; epsilon witnesses"),
    Suite("identities", suite_identities, "projection identities and the closed-form power of PQ(I-P)(I-Q)"),
    Suite("perron", suite_perron, "multiplicity n-1: canonical nonnegative pair has a Perron eigenvalue"),
    Suite("hijo-eq2", suite_hijo_eq2, "explicit 3x3 pair refuting positivity of A B A^2 B^2"),
)}

# each established result and the suite that checks it
RESULTS = {
    "explicit 3x3 counterexample": "hijo-eq2",
    "class-1 words are positive": "class1",
    "commutator family and its limit": "thfour",
    "positive eigenvalue for multiplicity n-1": "perron",
    "2x2 pairs, one letter of constant sign": "thm-n2",
    "3x3 with a multiple eigenvalue": "thm-n3",
    "two-eigenvalue pairs and the two-projection form": "thm-2eig",
    "reduced class 2, 3 mod 4 is not 2-good": "not2good",
    "projection identities and power formula": "identities",
}


def run_suite(name: str, **kwargs) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    t0 = time.perf_counter()
    r = SUITES[name].run(**kwargs)
    r.wall_time = time.perf_counter() - t0
    return r
