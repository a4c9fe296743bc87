"""Symbolic derivation of the correction polynomial X_k(A, B).

``x_poly(k)`` and ``y_poly(k)`` split ``sum_{j<k} (A + B - AB)^j / j`` by word
length: words of length >= k go to ``x_k``, shorter ones to ``y_k``.  The
``z`` family refines ``y_k`` by letter content and is available in two
independent forms (partition enumeration and a binomial closed form) that are
cross-checked against each other.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import comb
from typing import Iterable

from .ncpoly import (
    A,
    B,
    CapError,
    NcPoly,
    ab_subword_count,
    format_poly,
    format_poly_latex,
    is_commutator_member,
    poly_sum,
    trace_normal_form,
    words_with_counts,
)

DEFAULT_K_CAP = 12
DEFAULT_Z_CAP = 20


def expansion_cap() -> int:
    """Cap on ``k`` for full expansion; ``DETK_CAP_K`` overrides the default."""
    env = os.environ.get("DETK_CAP_K")
    if env:
        try:
            return int(env)
        except ValueError:
            raise CapError(f"DETK_CAP_K must be an integer, got {env!r}") from None
    return DEFAULT_K_CAP


def _check_k(k: int, cap: int | None) -> None:
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    cap = expansion_cap() if cap is None else cap
    if k > cap:
        raise CapError(f"k={k} exceeds expansion cap {cap} (set DETK_CAP_K or pass cap=)")


def _check_z(k1: int, k2: int, cap: int | None) -> None:
    if k1 < 0 or k2 < 0:
        raise ValueError("k1, k2 must be nonnegative")
    cap = DEFAULT_Z_CAP if cap is None else cap
    if k1 + k2 > cap:
        raise CapError(f"k1 + k2 = {k1 + k2} exceeds cap {cap}")


@dataclass(frozen=True)
class PartitionTriple:
    """Ordered split of ``{1..j}`` into three (possibly empty) blocks."""

    j: int
    pi1: frozenset[int]
    pi2: frozenset[int]
    pi3: frozenset[int]

    def __post_init__(self):
        blocks = (self.pi1, self.pi2, self.pi3)
        if sum(map(len, blocks)) != self.j or frozenset().union(*blocks) != frozenset(range(1, self.j + 1)):
            raise ValueError(f"{blocks} is not a partition of 1..{self.j}")

    def word(self) -> str:
        """Positionwise substitution A / B / AB for blocks 1 / 2 / 3."""
        out = []
        for m in range(1, self.j + 1):
            if m in self.pi1:
                out.append("A")
            elif m in self.pi2:
                out.append("B")
            else:
                out.append("AB")
        return "".join(out)


def partition_triples(j: int, n1: int, n2: int, n3: int) -> Iterable[PartitionTriple]:
    """Triples with block sizes ``(n1, n2, n3)``; choose block 3, then block 1."""
    if min(n1, n2, n3) < 0 or n1 + n2 + n3 != j:
        return
    universe = range(1, j + 1)
    for p3 in combinations(universe, n3):
        rest = [m for m in universe if m not in p3]
        for p1 in combinations(rest, n1):
            p2 = frozenset(rest).difference(p1)
            yield PartitionTriple(j, frozenset(p1), p2, frozenset(p3))


def z_partition(k1: int, k2: int, cap: int | None = None) -> NcPoly:
    """``z_{k1,k2}`` by enumerating the partition triples of its definition."""
    _check_z(k1, k2, cap)
    if k1 == 0 and k2 == 0:
        return NcPoly.zero()
    if k2 == 0:
        return NcPoly({"A" * k1: Fraction(1, k1)})
    if k1 == 0:
        return NcPoly({"B" * k2: Fraction(1, k2)})
    acc: dict[str, Fraction] = {}
    for j in range(1, k1 + k2 + 1):
        t = k1 + k2 - j
        c = Fraction((-1) ** t, j)
        for pi in partition_triples(j, k1 - t, k2 - t, t):
            w = pi.word()
            acc[w] = acc.get(w, 0) + c
    return NcPoly(acc)


def z_closed_coefficient(n: int, total: int) -> Fraction:
    """``sum_{l=0}^{n} (-1)^l binom(n, l) / (total - l)``."""
    return sum((Fraction((-1) ** l * comb(n, l), total - l) for l in range(n + 1)), Fraction(0))


def z_closed(k1: int, k2: int, cap: int | None = None) -> NcPoly:
    """``z_{k1,k2}`` via the closed-form coefficient in ``n(w)``; needs ``k1, k2 >= 1``."""
    if k1 < 1 or k2 < 1:
        raise ValueError("z_closed requires k1 >= 1 and k2 >= 1; use z_partition otherwise")
    _check_z(k1, k2, cap)
    total = k1 + k2
    coeffs: dict[int, Fraction] = {}
    terms = {}
    for w in words_with_counts(k1, k2):
        n = ab_subword_count(w)
        if n not in coeffs:
            coeffs[n] = z_closed_coefficient(n, total)
        terms[w] = coeffs[n]
    return NcPoly(terms)


def _subset_words(j: int, subset: Iterable[int]) -> Iterable[str]:
    chosen = set(subset)
    factors = [("AB",) if m in chosen else ("A", "B") for m in range(1, j + 1)]
    return ("".join(t) for t in product(*factors))


def y_subset(j: int, subset: Iterable[int]) -> NcPoly:
    """Expanded product over ``m = 1..j`` of ``AB`` (m in subset) or ``A + B`` (otherwise)."""
    subset = set(subset)
    if j < 1 or not subset <= set(range(1, j + 1)):
        raise ValueError(f"subset {sorted(subset)} not contained in 1..{j}")
    return NcPoly(dict.fromkeys(_subset_words(j, subset), Fraction(1)))


def _subset_sum(k: int, keep) -> NcPoly:
    # every word of y_subset(j, S) is distinct and carries coefficient 1,
    # so accumulate words directly instead of building intermediate polynomials
    acc: dict[str, Fraction] = {}
    for j in range(1, k):
        for size in range(j + 1):
            if not keep(j + size):
                continue
            c = Fraction((-1) ** size, j)
            for subset in combinations(range(1, j + 1), size):
                for w in _subset_words(j, subset):
                    acc[w] = acc.get(w, 0) + c
    return NcPoly({w: c for w, c in acc.items() if c}, _trusted=True)


@lru_cache(maxsize=None)
def _x_poly(k: int) -> NcPoly:
    if k == 1:
        return NcPoly.zero()
    return _subset_sum(k, lambda length: length >= k)


@lru_cache(maxsize=None)
def _y_poly(k: int) -> NcPoly:
    if k == 1:
        return NcPoly.zero()
    return _subset_sum(k, lambda length: length <= k - 1)


def x_poly(k: int, cap: int | None = None) -> NcPoly:
    """The correction polynomial ``x_k = X_k(A, B)``; word lengths lie in ``[k, 2k-2]``."""
    _check_k(k, cap)
    return _x_poly(k)


def y_poly(k: int, cap: int | None = None) -> NcPoly:
    """The short-word part ``y_k``; word lengths lie in ``[1, k-1]``."""
    _check_k(k, cap)
    return _y_poly(k)


def log_series(k: int) -> NcPoly:
    """``sum_{j=1}^{k-1} (A + B - AB)^j / j`` expanded by repeated multiplication."""
    t = A + B - A * B
    power = NcPoly.one()
    terms = []
    coeffs = []
    for j in range(1, k):
        power = power * t
        terms.append(power)
        coeffs.append(Fraction(1, j))
    return poly_sum(terms, coeffs)


def power_sums(k: int) -> NcPoly:
    """``sum_{j=1}^{k-1} (A^j + B^j) / j``."""
    return NcPoly({w: Fraction(1, len(w)) for j in range(1, k) for w in ("A" * j, "B" * j)})


def verify_decomposition(k: int, cap: int | None = None) -> bool:
    _check_k(k, cap)
    return log_series(k) == x_poly(k, cap) + y_poly(k, cap)


@dataclass
class CheckResult:
    name: str
    passed: bool
    counterexample: NcPoly | None = None


@dataclass
class LemmaReport:
    k: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self) -> CheckResult | None:
        return next((c for c in self.checks if not c.passed), None)


def verify_lemma_membership(k: int, cap: int | None = None) -> LemmaReport:
    """Exact checks that each ``z_{k1,k2}`` (k1, k2 >= 1) is a sum of commutators,
    that ``y_k`` minus the pure power sums is too, and that ``y_k`` is the sum of
    the ``z_{k1,k2}`` with ``k1 + k2 <= k - 1``."""
    _check_k(k, cap)
    report = LemmaReport(k)
    zs = {}
    for k1 in range(0, k):
        for k2 in range(0, k - k1):
            zs[k1, k2] = z_partition(k1, k2)
    for (k1, k2), z in zs.items():
        if k1 >= 1 and k2 >= 1:
            ok = is_commutator_member(z)
            report.checks.append(CheckResult(f"z_{k1},{k2} in [Pol2,Pol2]", ok, None if ok else z))
    rest = y_poly(k, cap) - power_sums(k)
    ok = is_commutator_member(rest)
    report.checks.append(CheckResult(f"y_{k} - power sums in [Pol2,Pol2]", ok, None if ok else rest))
    diff = y_poly(k, cap) - poly_sum(zs.values())
    ok = diff.is_zero()
    report.checks.append(CheckResult(f"y_{k} = sum of z", ok, None if ok else diff))
    return report


def verify_z_oracle(max_total: int, cap: int | None = None) -> list[CheckResult]:
    """Compare both forms of ``z_{k1,k2}`` for all ``k1, k2 >= 1``, ``k1 + k2 <= max_total``."""
    out = []
    for total in range(2, max_total + 1):
        for k1 in range(1, total):
            k2 = total - k1
            diff = z_partition(k1, k2, cap) - z_closed(k1, k2, cap)
            out.append(CheckResult(f"z_{k1},{k2} partition = closed", diff.is_zero(),
                                   None if diff.is_zero() else diff))
    return out


def trace_correction(k: int, cap: int | None = None) -> NcPoly:
    """Cyclic normal form of ``x_k``; same trace as ``X_k`` under any substitution."""
    return trace_normal_form(x_poly(k, cap))


def coefficient_norm_bound(k: int, cap: int | None = None) -> Fraction:
    """Sum of absolute coefficients of ``x_k``.

    By Hoelder each word of length L satisfies ``||w||_1 <= ||A||_k^{k1} ||B||_k^{k2}``
    whenever ``L >= k``, so this sum is one admissible constant in the trace-norm
    bound on ``x_k``.  It is our choice, not a sharp value.
    """
    return sum((abs(c) for _, c in x_poly(k, cap).items()), Fraction(0))


@dataclass
class CorrectionSet:
    k: int
    x: NcPoly
    y: NcPoly
    trace_form: NcPoly
    stats: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "k": self.k,
            "word_count": len(self.x),
            "max_len": max(self.x.degree(), 0),
            "stats": self.stats,
            "x": self.x.to_json_obj(),
            "y": self.y.to_json_obj(),
            "trace_form": self.trace_form.to_json_obj(),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_obj(), **kw)

    def to_text(self) -> str:
        return "\n".join([
            f"X_{self.k} = {format_poly(self.x)}",
            f"y_{self.k} = {format_poly(self.y)}",
            f"tr X_{self.k} = tr({format_poly(self.trace_form)})",
        ])

    def to_latex(self) -> str:
        return "\n".join([
            rf"X_{{{self.k}}}(A,B) &= {format_poly_latex(self.x)} \\",
            rf"y_{{{self.k}}} &= {format_poly_latex(self.y)} \\",
            rf"\operatorname{{tr}} X_{{{self.k}}}(A,B) &= \operatorname{{tr}}\big({format_poly_latex(self.trace_form)}\big)",
        ])


def derive(k: int, cap: int | None = None) -> CorrectionSet:
    t0 = time.perf_counter()
    x = x_poly(k, cap)
    y = y_poly(k, cap)
    tf = trace_normal_form(x)
    elapsed = time.perf_counter() - t0
    stats = {
        "x_words": len(x),
        "y_words": len(y),
        "trace_words": len(tf),
        "max_len": max(x.degree(), 0),
        "seconds": round(elapsed, 6),
    }
    return CorrectionSet(k, x, y, tf, stats)
