"""Generalized words ``A^a1 B^b1 ... A^aN B^bN``: parsing, canonical form, evaluation."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, ExactModeUnsupported, WordSyntaxError, ZeroExponent
from .linalg_core import (
    PDMatrix,
    RationalMatrix,
    Spectrum,
    eigenvalues_general,
    pd_power,
    rat_int_power,
    rat_mul,
    spectral_factor,
)

Exponent = Union[Fraction, float]

TOL_REAL = 1e-9
TOL_IMAG = 1e-9


def as_exponent(x) -> Exponent:
    """Integers and rationals become Fractions; floats stay floats."""
    if isinstance(x, bool):
        raise TypeError("bool is not an exponent")
    if isinstance(x, Fraction):
        e = x
    elif isinstance(x, (int, np.integer)):
        e = Fraction(int(x))
    elif isinstance(x, (float, np.floating)):
        e = float(x)
    elif isinstance(x, str):
        e = _parse_exponent(x.strip(), 0)
    else:
        e = Fraction(x)
    if e == 0:
        raise ZeroExponent("exponents must be nonzero")
    return e


def _is_integer(e: Exponent) -> bool:
    return isinstance(e, Fraction) and e.denominator == 1


def format_exponent(e: Exponent) -> str:
    if isinstance(e, Fraction):
        return str(e)
    return np.format_float_positional(float(e), unique=True, trim="0")


@dataclass(frozen=True)
class WordExpr:
    factors: tuple

    def __post_init__(self):
        fs = []
        for letter, exp in self.factors:
            if letter not in ("A", "B"):
                raise ValueError(f"unknown letter {letter!r}")
            fs.append((letter, as_exponent(exp)))
        object.__setattr__(self, "factors", tuple(fs))

    @property
    def exact(self) -> bool:
        return all(isinstance(e, Fraction) for _, e in self.factors)


@dataclass(frozen=True)
class ExponentSequence:
    """The exponent vector (a1, b1, ..., aN, bN) of a word of class N.

    Pure powers of a single letter have ``N == 0`` and keep their power in
    ``residual`` as ``(letter, exponent)``.
    """

    pairs: tuple = ()
    residual: Optional[tuple] = None

    def __post_init__(self):
        pairs = tuple((as_exponent(a), as_exponent(b)) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if self.residual is not None:
            if pairs:
                raise ValueError("a residual power only makes sense for N = 0")
            letter, e = self.residual
            object.__setattr__(self, "residual", (letter, as_exponent(e)))

    @property
    def N(self) -> int:
        return len(self.pairs)

    @property
    def alphas(self) -> tuple:
        return tuple(a for a, _ in self.pairs)

    @property
    def betas(self) -> tuple:
        return tuple(b for _, b in self.pairs)

    def exponents(self) -> list:
        out = [e for p in self.pairs for e in p]
        if self.residual is not None:
            out.append(self.residual[1])
        return out

    @property
    def exact(self) -> bool:
        return all(isinstance(e, Fraction) for e in self.exponents())

    @property
    def integer(self) -> bool:
        return all(_is_integer(e) for e in self.exponents())

    def sign_pattern(self) -> str:
        return "".join("+" if e > 0 else "-" for p in self.pairs for e in p)

    def factors(self) -> list:
        if self.residual is not None:
            return [self.residual]
        out = []
        for a, b in self.pairs:
            out += [("A", a), ("B", b)]
        return out

    def negate(self, alpha: bool = False, beta: bool = False) -> "ExponentSequence":
        """Exponents of the same word in ``A^{-1}`` and/or ``B^{-1}``."""
        sa, sb = (-1 if alpha else 1), (-1 if beta else 1)
        return ExponentSequence(tuple((sa * a, sb * b) for a, b in self.pairs))

    def scale(self, alpha_factors, beta_factors) -> "ExponentSequence":
        return ExponentSequence(tuple((a * fa, b * fb) for (a, b), fa, fb
                                      in zip(self.pairs, alpha_factors, beta_factors)))

    def __str__(self):
        return format_word(self)


def sequence(pairs) -> ExponentSequence:
    """Shorthand: ``sequence([(1, 1), (-1, -1)])``."""
    return ExponentSequence(tuple(tuple(p) for p in pairs))


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_EXPONENT_RE = re.compile(r"-?\d+(?:\.\d+|/\d+)?")


def _parse_exponent(text: str, offset: int) -> Exponent:
    m = _EXPONENT_RE.fullmatch(text)
    if m is None:
        raise WordSyntaxError(f"malformed exponent {text!r}", offset)
    if "." in text:
        return float(text)
    if "/" in text:
        p, q = text.split("/")
        if int(q) == 0:
            raise WordSyntaxError("zero denominator in exponent", offset + text.index("/") + 1)
        return Fraction(int(p), int(q))
    return Fraction(int(text))


def parse_word(text: str) -> WordExpr:
    """Parse words like ``"A B A^2 B^-1/2"``; spaces and ``*`` separate factors."""
    factors = []
    i, n = 0, len(text)
    while True:
        while i < n and text[i] in " \t*":
            i += 1
        if i >= n:
            break
        ch = text[i]
        if ch not in "AB":
            raise WordSyntaxError(f"expected 'A' or 'B', found {ch!r}", i)
        i += 1
        exp: Exponent = Fraction(1)
        if i < n and text[i] == "^":
            i += 1
            m = _EXPONENT_RE.match(text, i)
            if m is None:
                raise WordSyntaxError("expected an exponent after '^'", i)
            exp = _parse_exponent(m.group(0), i)
            if exp == 0:
                raise ZeroExponent(f"zero exponent at offset {i}")
            i = m.end()
        if i < n and text[i] not in " \t*":
            raise WordSyntaxError(f"unexpected character {text[i]!r}", i)
        factors.append((ch, exp))
    if not factors:
        raise WordSyntaxError("empty word", 0)
    return WordExpr(tuple(factors))


def format_word(w) -> str:
    factors = w.factors() if isinstance(w, ExponentSequence) else w.factors
    parts = []
    for letter, e in factors:
        parts.append(letter if e == 1 and isinstance(e, Fraction) else f"{letter}^{format_exponent(e)}")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------

def _merge(factors: list) -> list:
    out: list = []
    for letter, e in factors:
        if out and out[-1][0] == letter:
            s = out[-1][1] + e
            out.pop()
            if s != 0:
                out.append((letter, s))
        else:
            out.append((letter, e))
    return out


def _merge_cyclic(factors: list) -> list:
    fs = _merge(factors)
    while len(fs) > 1 and fs[0][0] == fs[-1][0]:
        letter = fs[0][0]
        s = fs[-1][1] + fs[0][1]
        fs = fs[1:-1]
        fs = _merge(([(letter, s)] if s != 0 else []) + fs)
    return fs


def canonicalize(w: Union[WordExpr, str]) -> ExponentSequence:
    """Merge adjacent powers and rotate so the word reads ``A^a1 B^b1 ... B^bN``.

    Rotation is a similarity, so the spectrum is unchanged. Among the valid
    rotations the lexicographically largest exponent vector wins.
    """
    if isinstance(w, str):
        w = parse_word(w)
    fs = _merge_cyclic(list(w.factors))
    if not fs:
        return ExponentSequence()
    if len(fs) == 1:
        return ExponentSequence((), residual=fs[0])
    if fs[0][0] == "B":
        fs = fs[1:] + fs[:1]
    N = len(fs) // 2
    candidates = []
    for r in range(N):
        rot = fs[2 * r:] + fs[:2 * r]
        candidates.append(tuple(e for _, e in rot))
    best = max(candidates)
    return ExponentSequence(tuple((best[2 * j], best[2 * j + 1]) for j in range(N)))


def as_sequence(seq) -> ExponentSequence:
    if isinstance(seq, ExponentSequence):
        return seq
    if isinstance(seq, (str, WordExpr)):
        return canonicalize(seq)
    return sequence(seq)


# ---------------------------------------------------------------------------
# verdicts and evaluation
# ---------------------------------------------------------------------------

class Verdict(enum.Enum):
    ALL_POSITIVE = "AllPositive"
    NOT_ALL_POSITIVE = "NotAllPositive"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class PositivityVerdict:
    kind: Verdict
    reason: str = ""

    def __eq__(self, other):
        if isinstance(other, Verdict):
            return self.kind is other
        if isinstance(other, PositivityVerdict):
            return self.kind is other.kind
        return NotImplemented

    def __hash__(self):
        return hash(self.kind)

    def __str__(self):
        return self.kind.value


def verdict_from_spectrum(s: Spectrum, tol_real: float = TOL_REAL,
                          tol_imag: float = TOL_IMAG) -> PositivityVerdict:
    if tol_real <= 0 or tol_imag <= 0:
        raise ValueError("tolerances must be positive")
    vals = list(s)
    if all(abs(z.imag) <= tol_imag * (1 + abs(z)) and z.real >= tol_real for z in vals):
        return PositivityVerdict(Verdict.ALL_POSITIVE, f"min real part {min(z.real for z in vals):.6g}")
    for z in vals:
        if z.real <= -tol_real:
            return PositivityVerdict(Verdict.NOT_ALL_POSITIVE, f"eigenvalue {z:.6g} has negative real part")
        if abs(z.imag) >= 10 * tol_imag * (1 + abs(z)):
            return PositivityVerdict(Verdict.NOT_ALL_POSITIVE, f"eigenvalue {z:.6g} is not real")
    return PositivityVerdict(Verdict.INCONCLUSIVE, "an eigenvalue lies inside the tolerance band")


@dataclass(frozen=True, eq=False)
class EvalResult:
    """A word evaluated on concrete matrices.

    In exact mode ``matrix`` is a RationalMatrix and ``spectrum``/``verdict``
    are None; deciding positivity is left to ``certify.sturm_decide``.
    """

    matrix: object
    spectrum: Optional[Spectrum]
    verdict: Optional[PositivityVerdict]
    margins: Optional[tuple] = None
    exact: bool = False

    @property
    def min_real(self) -> float:
        return self.margins[0]


def _check_dims(A, B):
    na = A.n if hasattr(A, "n") else np.shape(A)[0]
    nb = B.n if hasattr(B, "n") else np.shape(B)[0]
    if na != nb:
        raise DimensionMismatch(f"A is {na}x{na} but B is {nb}x{nb}")


def factor_power(F: PDMatrix, e) -> np.ndarray:
    """``F**e``; integer powers multiply the stored matrix (or its inverse) directly.

    Going through the eigendecomposition loses the small eigen-directions of an
    ill-conditioned matrix, while repeated products of the input keep its
    entries, exactly so for integer entries of moderate size.
    """
    t = float(e)
    if t != int(t) or abs(t) > 64:
        return pd_power(F, t)
    k = int(t)
    M = np.array(F.base) if k > 0 else pd_power(F, -1)
    R = np.linalg.matrix_power(M, abs(k))
    return 0.5 * (R + R.T)


def evaluate_factors(factors: Sequence, A, B) -> np.ndarray:
    """Float product of literal factors ``[(letter, exponent), ...]`` in order."""
    A, B = spectral_factor(A), spectral_factor(B)
    _check_dims(A, B)
    mats = {"A": A, "B": B}
    W = np.eye(A.n)
    for letter, e in factors:
        W = W @ factor_power(mats[letter], e)
    return W


def evaluate_exact(seq: ExponentSequence, A: RationalMatrix, B: RationalMatrix) -> RationalMatrix:
    if not (isinstance(A, RationalMatrix) and isinstance(B, RationalMatrix)):
        raise ExactModeUnsupported("exact mode needs RationalMatrix inputs")
    _check_dims(A, B)
    if not seq.integer:
        raise ExactModeUnsupported(f"exact mode needs integer exponents, got {format_word(seq)!r}")
    mats = {"A": A, "B": B}
    W = RationalMatrix.identity(A.n)
    for letter, e in seq.factors():
        W = rat_mul(W, rat_int_power(mats[letter], int(e)))
    return W


def two_sided_spectrum(W: np.ndarray, W_inv: np.ndarray) -> Spectrum:
    """Spectrum of ``W`` combining eigenvalues of ``W`` and of an independently formed ``W^-1``.

    Eigenvalues of ``W`` carry absolute error about ``eps * |W|``, so the small
    ones are noise when ``W`` is badly scaled; reciprocals of the eigenvalues
    of ``W^-1`` are accurate there instead. Each eigenvalue is taken from the
    side with the smaller error estimate, never splitting a conjugate pair.
    """
    n = W.shape[0]
    big = sorted(np.linalg.eigvals(W), key=lambda z: -abs(z))
    with np.errstate(divide="ignore"):
        small = sorted(1.0 / np.linalg.eigvals(W_inv), key=abs)
    cut = np.sqrt(np.linalg.norm(W) / np.linalg.norm(W_inv))
    k0 = sum(1 for z in big if abs(z) >= cut)
    for k in sorted(range(n + 1), key=lambda k: abs(k - k0)):
        try:
            return Spectrum.of(big[:k] + small[:n - k])
        except ValueError:
            continue
    return Spectrum.of(big)  # pragma: no cover - the full set always pairs


def evaluate(seq, A, B, mode: str = "numeric", tol_real: float = TOL_REAL,
             tol_imag: float = TOL_IMAG) -> EvalResult:
    seq = as_sequence(seq)
    if mode == "exact":
        return EvalResult(evaluate_exact(seq, A, B), None, None, None, exact=True)
    if mode != "numeric":
        raise ValueError(f"unknown mode {mode!r}")
    factors = seq.factors()
    W = evaluate_factors(factors, A, B)
    W_inv = evaluate_factors([(l, -e) for l, e in reversed(factors)], A, B)
    spec = two_sided_spectrum(W, W_inv)
    verdict = verdict_from_spectrum(spec, tol_real, tol_imag)
    if seq.residual is not None and verdict.kind is not Verdict.ALL_POSITIVE:
        # a power of a positive definite matrix is positive definite
        verdict = PositivityVerdict(Verdict.ALL_POSITIVE, "pure power of one letter")
    return EvalResult(W, spec, verdict, (spec.min_real, spec.max_abs_imag))
