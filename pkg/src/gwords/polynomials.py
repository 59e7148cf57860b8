"""Exact univariate polynomials over Q.

A polynomial is a list of Fractions, highest degree first; ``[]`` is zero.
"""
from __future__ import annotations

from fractions import Fraction


def trim(p) -> list:
    p = [Fraction(c) for c in p]
    i = 0
    while i < len(p) and p[i] == 0:
        i += 1
    return p[i:]


def degree(p) -> int:
    p = trim(p)
    return len(p) - 1


def peval(p, x) -> Fraction:
    acc = Fraction(0)
    for c in p:
        acc = acc * x + c
    return acc


def derivative(p) -> list:
    p = trim(p)
    d = len(p) - 1
    return trim([c * (d - i) for i, c in enumerate(p[:-1])])


def monic(p) -> list:
    p = trim(p)
    if not p:
        return p
    lead = p[0]
    return [c / lead for c in p]


def pdivmod(a, b) -> tuple:
    a, b = trim(a), trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    r = list(a)
    lead = b[0]
    for i in range(len(q)):
        c = r[i] / lead
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                r[i + j] -= c * bj
    return trim(q), trim(r[len(q):])


def pgcd(a, b) -> list:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return monic(a)


def pquo(a, b) -> list:
    q, r = pdivmod(a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return q


def squarefree_decomposition(p) -> list:
    """Yun's algorithm: ``[(f_i, i), ...]`` with ``p = c * prod f_i^i``, f_i squarefree and coprime."""
    p = monic(p)
    if degree(p) <= 0:
        return []
    dp = derivative(p)
    a = pgcd(p, dp)
    b = pquo(p, a)
    c = pquo(dp, a)
    d = [x - y for x, y in zip(_pad(c, b), _pad(derivative(b), b))]
    d = trim(d)
    out, i = [], 1
    while degree(b) > 0:
        a = pgcd(b, d)
        b = pquo(b, a)
        c = pquo(d, a)
        d = trim([x - y for x, y in zip(_pad(c, b), _pad(derivative(b), b))])
        if degree(a) > 0:
            out.append((a, i))
        i += 1
    return out


def _pad(p, ref) -> list:
    n = max(len(p), len(ref))
    return [Fraction(0)] * (n - len(p)) + list(p)


def sturm_sequence(p) -> list:
    p = trim(p)
    seq = [p, derivative(p)]
    while seq[-1]:
        r = pdivmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def sign_changes(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_positive_roots(p) -> int:
    """Distinct real roots of ``p`` in ``(0, oo)``; requires ``p(0) != 0``."""
    p = trim(p)
    if degree(p) <= 0:
        return 0
    if p[-1] == 0:
        raise ValueError("p(0) = 0; count is over the open half-line")
    seq = sturm_sequence(p)
    at_zero = [s[-1] for s in seq]
    at_inf = [s[0] for s in seq]
    return sign_changes(at_zero) - sign_changes(at_inf)


def count_real_roots(p, lo, hi) -> int:
    """Distinct real roots in ``(lo, hi]``; requires ``p(lo) != 0``."""
    seq = sturm_sequence(p)
    return sign_changes([peval(s, lo) for s in seq]) - sign_changes([peval(s, hi) for s in seq])
