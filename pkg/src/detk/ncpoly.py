"""Exact arithmetic in the free algebra on two noncommuting letters A, B.

Words are plain strings over ``"AB"`` (the empty string is the unit).
Coefficients are :class:`fractions.Fraction`.  Letter order is ``A < B``,
which is also Python's string order, so sorting and the least-rotation
normal form need no custom comparator.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Mapping, Union

ALPHABET = "AB"
MAX_WORD_LENGTH = 64

Scalar = Union[int, Fraction]


class CapError(ValueError):
    """Raised when a configured size cap would be exceeded."""


class WordLengthError(CapError):
    """A product word is longer than the configured word-length cap."""


def check_word(w: str, cap: int = MAX_WORD_LENGTH) -> str:
    if not isinstance(w, str):
        raise TypeError(f"word must be str, got {type(w).__name__}")
    if len(w) > cap:
        raise WordLengthError(f"word length {len(w)} exceeds cap {cap}")
    if w.strip(ALPHABET):
        raise ValueError(f"word {w!r} has letters outside {ALPHABET!r}")
    return w


def encode_word(w: str) -> tuple[int, int]:
    """Pack a word as ``(bits, length)`` with A=0, B=1, first letter most significant."""
    check_word(w)
    bits = 0
    for ch in w:
        bits = (bits << 1) | (ch == "B")
    return bits, len(w)


def decode_word(bits: int, length: int) -> str:
    if not 0 <= length <= MAX_WORD_LENGTH:
        raise WordLengthError(f"length {length} outside [0, {MAX_WORD_LENGTH}]")
    if bits < 0 or bits >> length:
        raise ValueError(f"bits {bits:#x} do not fit in {length} letters")
    return "".join("B" if (bits >> (length - 1 - i)) & 1 else "A" for i in range(length))


def shift_cyclic(w: str) -> str:
    """Rotate left by one letter: ``w1 w2 ... wL -> w2 ... wL w1``."""
    return w[1:] + w[:1]


def ab_subword_count(w: str) -> int:
    """Number of positions where ``A`` is immediately followed by ``B`` (not cyclic)."""
    return w.count("AB")


def words_with_counts(k1: int, k2: int) -> Iterator[str]:
    """All words with exactly ``k1`` letters A and ``k2`` letters B, in lexicographic order."""
    if k1 < 0 or k2 < 0:
        raise ValueError("letter counts must be nonnegative")
    n = k1 + k2

    def rec(prefix: str, a: int, b: int) -> Iterator[str]:
        if a == 0 and b == 0:
            yield prefix
            return
        if a:
            yield from rec(prefix + "A", a - 1, b)
        if b:
            yield from rec(prefix + "B", a, b - 1)

    if n > MAX_WORD_LENGTH:
        raise WordLengthError(f"word length {n} exceeds cap {MAX_WORD_LENGTH}")
    yield from rec("", k1, k2)


def canonical_rotation(w: str) -> str:
    """Lexicographically least rotation of ``w`` (Booth's algorithm)."""
    n = len(w)
    if n < 2:
        return w
    s = w + w
    fail = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        c = s[j]
        i = fail[j - k - 1]
        while i != -1 and c != s[k + i + 1]:
            if c < s[k + i + 1]:
                k = j - i - 1
            i = fail[i]
        if c != s[k + i + 1]:
            # here i == -1
            if c < s[k]:
                k = j
            fail[j - k] = -1
        else:
            fail[j - k] = i + 1
    return s[k:k + n]


def _as_fraction(c: Scalar) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"coefficient must be int, Fraction or 'p/q' string, got {type(c).__name__}")


def word_sort_key(w: str) -> tuple[int, str]:
    return len(w), w


class NcPoly:
    """Finitely supported map from words to rationals; zero terms are never stored.

    Treat instances as immutable.  ``p[w]`` returns the coefficient of ``w``
    (zero when absent).
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[str, Scalar] | Iterable[tuple[str, Scalar]] | None = None,
                 *, _trusted: bool = False):
        if _trusted:
            self._terms: dict[str, Fraction] = terms  # type: ignore[assignment]
        else:
            acc: dict[str, Fraction] = {}
            items = terms.items() if isinstance(terms, Mapping) else (terms or ())
            for w, c in items:
                check_word(w)
                acc[w] = acc.get(w, Fraction(0)) + _as_fraction(c)
            self._terms = {w: c for w, c in acc.items() if c}
        self._hash: int | None = None

    # constructors

    @classmethod
    def zero(cls) -> NcPoly:
        return cls({}, _trusted=True)

    @classmethod
    def one(cls) -> NcPoly:
        return cls({"": Fraction(1)}, _trusted=True)

    @classmethod
    def word(cls, w: str, coeff: Scalar = 1) -> NcPoly:
        return cls({w: coeff})

    @classmethod
    def parse(cls, text: str) -> NcPoly:
        """Parse a sum like ``"1/2*ABAB - ABA + 3 B"``; ``1`` stands for the unit."""
        text = text.replace(" ", "")
        if text in ("", "0"):
            return cls.zero()
        if text[0] not in "+-":
            text = "+" + text
        terms: dict[str, Fraction] = {}
        i = 0
        while i < len(text):
            sign = -1 if text[i] == "-" else 1
            i += 1
            j = i
            while j < len(text) and text[j] not in "+-":
                j += 1
            chunk = text[i:j]
            i = j
            if "*" in chunk:
                coeff_s, w = chunk.split("*", 1)
            else:
                n = 0
                while n < len(chunk) and chunk[n] not in ALPHABET:
                    n += 1
                coeff_s, w = chunk[:n], chunk[n:]
                if not w and coeff_s:
                    # bare number: scalar multiple of the unit
                    w = ""
            coeff = Fraction(coeff_s) if coeff_s else Fraction(1)
            check_word(w)
            terms[w] = terms.get(w, Fraction(0)) + sign * coeff
        return cls(terms)

    # mapping-like access

    def __getitem__(self, w: str) -> Fraction:
        return self._terms.get(w, Fraction(0))

    def coeff(self, w: str) -> Fraction:
        return self[w]

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[str]:
        return iter(self._terms)

    def __contains__(self, w: object) -> bool:
        return w in self._terms

    def items(self):
        return self._terms.items()

    def words(self):
        return self._terms.keys()

    def sorted_items(self) -> list[tuple[str, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: word_sort_key(t[0]))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Maximal word length; -1 for the zero polynomial."""
        return max(map(len, self._terms), default=-1)

    def min_degree(self) -> int:
        return min(map(len, self._terms), default=-1)

    # arithmetic

    def __eq__(self, other: object) -> bool:
        if isinstance(other, NcPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({"": Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __neg__(self) -> NcPoly:
        return NcPoly({w: -c for w, c in self._terms.items()}, _trusted=True)

    def __add__(self, other: NcPoly | Scalar) -> NcPoly:
        return poly_linear(1, self, 1, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other: NcPoly | Scalar) -> NcPoly:
        return poly_linear(1, self, -1, _coerce(other))

    def __rsub__(self, other: NcPoly | Scalar) -> NcPoly:
        return poly_linear(1, _coerce(other), -1, self)

    def __mul__(self, other: NcPoly | Scalar) -> NcPoly:
        if isinstance(other, NcPoly):
            return poly_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other: Scalar) -> NcPoly:
        # scalars commute with everything
        return self.scale(other)

    def __truediv__(self, other: Scalar) -> NcPoly:
        return self.scale(1 / _as_fraction(other))

    def __pow__(self, e: int) -> NcPoly:
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a nonnegative int")
        out = NcPoly.one()
        for _ in range(e):
            out = poly_mul(out, self)
        return out

    def scale(self, c: Scalar) -> NcPoly:
        c = _as_fraction(c)
        if not c:
            return NcPoly.zero()
        return NcPoly({w: c * v for w, v in self._terms.items()}, _trusted=True)

    def swap_letters(self) -> NcPoly:
        """Exchange A and B in every word."""
        table = str.maketrans("AB", "BA")
        return NcPoly({w.translate(table): c for w, c in self._terms.items()}, _trusted=True)

    def filter_length(self, lo: int = 0, hi: int | None = None) -> NcPoly:
        return NcPoly({w: c for w, c in self._terms.items()
                       if len(w) >= lo and (hi is None or len(w) <= hi)}, _trusted=True)

    # rendering

    def __repr__(self) -> str:
        return f"NcPoly({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)

    # serialization

    def to_json_obj(self) -> list[dict[str, str]]:
        return [{"word": w, "coeff": f"{c.numerator}/{c.denominator}"}
                for w, c in self.sorted_items()]

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_obj(), **kw)

    @classmethod
    def from_json_obj(cls, obj: list[dict[str, str]]) -> NcPoly:
        return cls((t["word"], Fraction(t["coeff"])) for t in obj)

    @classmethod
    def from_json(cls, text: str) -> NcPoly:
        return cls.from_json_obj(json.loads(text))


def _coerce(x: NcPoly | Scalar) -> NcPoly:
    if isinstance(x, NcPoly):
        return x
    c = _as_fraction(x)
    return NcPoly({"": c} if c else {}, _trusted=True)


def poly_linear(c1: Scalar, p: NcPoly, c2: Scalar, q: NcPoly) -> NcPoly:
    """Exact ``c1*p + c2*q``."""
    c1, c2 = _as_fraction(c1), _as_fraction(c2)
    out: dict[str, Fraction] = {}
    if c1:
        for w, c in p.items():
            out[w] = c1 * c
    if c2:
        for w, c in q.items():
            v = out.get(w, 0) + c2 * c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
    return NcPoly(out, _trusted=True)


def poly_sum(polys: Iterable[NcPoly], coeffs: Iterable[Scalar] | None = None) -> NcPoly:
    """Sum of many polynomials (optionally weighted) with a single accumulator."""
    acc: dict[str, Fraction] = {}
    if coeffs is None:
        pairs = ((Fraction(1), p) for p in polys)
    else:
        pairs = zip(map(_as_fraction, coeffs), polys)
    for c, p in pairs:
        for w, v in p.items():
            acc[w] = acc.get(w, 0) + c * v
    return NcPoly({w: v for w, v in acc.items() if v}, _trusted=True)


def poly_mul(p: NcPoly, q: NcPoly, cap: int = MAX_WORD_LENGTH) -> NcPoly:
    """Bilinear extension of word concatenation."""
    if not p or not q:
        return NcPoly.zero()
    if p.degree() + q.degree() > cap:
        raise WordLengthError(
            f"product word length {p.degree() + q.degree()} exceeds cap {cap}; raise the cap")
    out: dict[str, Fraction] = {}
    for u, a in p.items():
        for v, b in q.items():
            w = u + v
            out[w] = out.get(w, 0) + a * b
    return NcPoly({w: c for w, c in out.items() if c}, _trusted=True)


def trace_normal_form(p: NcPoly) -> NcPoly:
    """Replace each word by its least rotation and collect coefficients.

    ``p - trace_normal_form(p)`` is a sum of commutators, so both sides have
    the same trace under any matrix substitution.
    """
    out: dict[str, Fraction] = {}
    cache: dict[str, str] = {}
    for w, c in p.items():
        r = cache.get(w)
        if r is None:
            r = cache[w] = canonical_rotation(w)
        out[r] = out.get(r, 0) + c
    return NcPoly({w: c for w, c in out.items() if c}, _trusted=True)


def cyclic_sum(p: NcPoly, w: str) -> Fraction:
    """``sum_{m=1}^{L(w)} p[sigma^m(w)]``; for the empty word this is ``p[""]``."""
    if not w:
        return p[""]
    total = Fraction(0)
    u = w
    for _ in range(len(w)):
        u = shift_cyclic(u)
        total += p[u]
    return total


def is_commutator_member(p: NcPoly) -> bool:
    """Membership in the commutator subspace: every cyclic coefficient sum vanishes.

    Checked directly from the cyclic sums rather than through
    :func:`trace_normal_form`, so the two stay independent.
    """
    if p[""]:
        return False
    checked: set[str] = set()
    for w in p.words():
        if w in checked:
            continue
        if cyclic_sum(p, w):
            return False
        u = w
        for _ in range(len(w)):
            checked.add(u)
            u = shift_cyclic(u)
    return True


def commutator(p: NcPoly, q: NcPoly) -> NcPoly:
    return poly_mul(p, q) - poly_mul(q, p)


def all_words(max_len: int, min_len: int = 0) -> Iterator[str]:
    for n in range(min_len, max_len + 1):
        for t in product(ALPHABET, repeat=n):
            yield "".join(t)


A = NcPoly({"A": Fraction(1)}, _trusted=True)
B = NcPoly({"B": Fraction(1)}, _trusted=True)


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: NcPoly) -> str:
    """Plain text, e.g. ``1/2 ABAB - ABA - 1``; terms in (length, lex) order."""
    if not p:
        return "0"
    parts = []
    for i, (w, c) in enumerate(p.sorted_items()):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if not w:
            body = _format_coeff(mag)
        elif mag == 1:
            body = w
        else:
            body = f"{_format_coeff(mag)} {w}"
        if i == 0:
            parts.append(body if sign == "+" else f"- {body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def format_poly_latex(p: NcPoly) -> str:
    """LaTeX rendering with words written by plain juxtaposition."""
    if not p:
        return "0"
    parts = []
    for i, (w, c) in enumerate(p.sorted_items()):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if mag.denominator == 1:
            cs = "" if (mag == 1 and w) else str(mag.numerator)
        else:
            cs = rf"\frac{{{mag.numerator}}}{{{mag.denominator}}}"
        body = f"{cs}{w}" if w else cs
        if i == 0:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)
