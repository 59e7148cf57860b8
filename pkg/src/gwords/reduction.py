"""Cancellation rule, reduced class and the 2-goodness classifier.

Positions ``j`` are 1-based throughout, matching how exponent sequences are
written. The alpha rule wraps around (``a_{m+1} = a_1``); the beta rule wraps
only when ``beta_cyclic`` is set.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .words import ExponentSequence, as_sequence, format_word


class Rule(enum.Enum):
    ALPHA = "AlphaRule"
    BETA = "BetaRule"

    def __str__(self):
        return self.value

    def __lt__(self, other):
        return _RULE_ORDER[self] < _RULE_ORDER[other]


_RULE_ORDER = {Rule.ALPHA: 0, Rule.BETA: 1}


def _signs(pairs) -> tuple:
    return tuple((a > 0, b > 0) for a, b in pairs)


def _moves(signs: tuple, beta_cyclic: bool) -> list:
    """(rule, j, index removed) for every applicable cancellation, 0-based removal index."""
    m = len(signs)
    moves = []
    for j in range(m):
        if signs[j][0] == signs[(j + 1) % m][0]:
            moves.append((Rule.ALPHA, j + 1, j))
    for j in range(m):
        if j == m - 1 and not beta_cyclic:
            break
        if signs[j][1] == signs[(j + 1) % m][1]:
            moves.append((Rule.BETA, j + 1, (j + 1) % m))
    return moves


def applicable_cancellations(seq, beta_cyclic: bool = False) -> list:
    seq = as_sequence(seq)
    return [(rule, j) for rule, j, _ in _moves(_signs(seq.pairs), beta_cyclic)]


def apply_cancellation(seq, rule: Rule, j: int, beta_cyclic: bool = False) -> ExponentSequence:
    seq = as_sequence(seq)
    for r, jj, idx in _moves(_signs(seq.pairs), beta_cyclic):
        if r is rule and jj == j:
            return ExponentSequence(seq.pairs[:idx] + seq.pairs[idx + 1:])
    raise ValueError(f"{rule} does not apply at j={j}")


def is_irreducible(seq, beta_cyclic: bool = False) -> bool:
    return not applicable_cancellations(seq, beta_cyclic)


@dataclass(frozen=True)
class ReductionStep:
    rule: Rule
    j: int
    before: ExponentSequence
    after: ExponentSequence


@dataclass(frozen=True)
class ReductionTrace:
    steps: tuple
    terminal: ExponentSequence


@dataclass(frozen=True)
class ReductionResult:
    m: int
    trace: ReductionTrace
    reachable: frozenset


def _explore(n: int, signs: tuple, beta_cyclic: bool):
    """All states reachable from the full index set, keyed by kept indices."""

    @lru_cache(maxsize=None)
    def children(state: tuple) -> tuple:
        s = tuple(signs[i] for i in state)
        out = []
        for rule, j, idx in _moves(s, beta_cyclic):
            out.append(((rule, j), state[:idx] + state[idx + 1:]))
        return tuple(out)

    @lru_cache(maxsize=None)
    def terminal_lengths(state: tuple) -> frozenset:
        ch = children(state)
        if not ch:
            return frozenset({len(state)})
        acc = set()
        for _, nxt in ch:
            acc |= terminal_lengths(nxt)
        return frozenset(acc)

    return children, terminal_lengths


def reduced_class(seq, beta_cyclic: bool = False) -> ReductionResult:
    """Explore every cancellation order; ``m`` is the least reachable irreducible length.

    The reported trace is the lexicographically smallest path (by ``(rule, j)``
    at each step) ending in an irreducible sequence of length ``m``.
    """
    seq = as_sequence(seq)
    signs = _signs(seq.pairs)
    start = tuple(range(seq.N))
    children, terminal_lengths = _explore(seq.N, signs, beta_cyclic)
    reachable = terminal_lengths(start)
    m = min(reachable)

    steps = []
    state = start
    while children(state):
        options = sorted((mv, nxt) for mv, nxt in children(state) if m in terminal_lengths(nxt))
        (rule, j), nxt = options[0]
        before = ExponentSequence(tuple(seq.pairs[i] for i in state))
        after = ExponentSequence(tuple(seq.pairs[i] for i in nxt))
        steps.append(ReductionStep(rule, j, before, after))
        state = nxt
    terminal = ExponentSequence(tuple(seq.pairs[i] for i in state))
    return ReductionResult(m, ReductionTrace(tuple(steps), terminal), reachable)


def irreducible_terminals(seq, beta_cyclic: bool = False) -> set:
    """Every irreducible sequence reachable by cancellation (as index tuples)."""
    seq = as_sequence(seq)
    children, _ = _explore(seq.N, _signs(seq.pairs), beta_cyclic)
    seen, stack, out = set(), [tuple(range(seq.N))], set()
    while stack:
        s = stack.pop()
        if s in seen:
            continue
        seen.add(s)
        ch = children(s)
        if not ch:
            out.add(s)
        stack.extend(nxt for _, nxt in ch)
    return out


class Status(enum.Enum):
    PROVABLY_GOOD = "ProvablyGood"
    PROVABLY_BAD = "ProvablyBad"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Classification:
    seq: ExponentSequence
    verdict: Status
    theorem: Optional[str]
    reduced_class_m: int
    reachable_m_set: frozenset
    witness_family: Optional[str] = None
    strict_cyclic_m_set: frozenset = frozenset()
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "sequence": format_word(self.seq),
            "sign_pattern": self.seq.sign_pattern(),
            "m": self.reduced_class_m,
            "reachable": sorted(self.reachable_m_set),
            "strict_cyclic_reachable": sorted(self.strict_cyclic_m_set),
            "verdict": str(self.verdict),
            "theorem": self.theorem,
            "witness_recipe": self.witness_family,
            "notes": list(self.notes),
        }


def same_sign(values) -> bool:
    values = list(values)
    return all(v > 0 for v in values) or all(v < 0 for v in values)


def classify(seq, beta_cyclic: bool = False) -> Classification:
    """Decide 2-goodness where the known results allow it.

    Good: all alpha (or all beta) exponents share a sign. Bad: reduced class
    ``m = 2, 3 (mod 4)``, witnessed by the diagonal/rank-one epsilon family.
    Anything else is Unknown.
    """
    seq = as_sequence(seq)
    red = reduced_class(seq, beta_cyclic)
    other = reduced_class(seq, not beta_cyclic).reachable
    notes = []
    if other != red.reachable:
        notes.append(f"reachable lengths differ between beta-rule modes: "
                     f"{sorted(red.reachable)} vs {sorted(other)}")
    if len(red.reachable) > 1:
        notes.append(f"several irreducible lengths reachable: {sorted(red.reachable)}")
    strict = other if beta_cyclic is False else red.reachable
    common = dict(seq=seq, reduced_class_m=red.m, reachable_m_set=red.reachable,
                  strict_cyclic_m_set=strict)

    if seq.N == 0 or same_sign(seq.alphas) or same_sign(seq.betas):
        tag = "trivial" if seq.N == 0 else "thm-2eig/thm-n2"
        return Classification(verdict=Status.PROVABLY_GOOD, theorem=tag, notes=tuple(notes), **common)
    if red.m % 4 in (2, 3):
        recipe = f"epsilon({format_word(seq)}, dyadic)"
        return Classification(verdict=Status.PROVABLY_BAD, theorem="not2good",
                              witness_family=recipe, notes=tuple(notes), **common)
    return Classification(verdict=Status.UNKNOWN, theorem=None, notes=tuple(notes), **common)
