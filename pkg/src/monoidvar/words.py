"""Combinatorics on words over an unbounded alphabet.

A word is a plain tuple of letter names, e.g. ``("x", "z1", "x")``; the empty
tuple is the identity of the free monoid.  Everything here is a pure function.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable, Iterator

Letter = str
Word = tuple[str, ...]

EMPTY: Word = ()
BOTTOM = "⊥"

_LETTER_RE = re.compile(r"[a-z][0-9]*\Z")
_TOKEN_RE = re.compile(r"([a-z][0-9]*)(?:\^([0-9]+))?\Z")


class WordSyntaxError(ValueError):
    """Raised for malformed word text; ``position`` is a 0-based column."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


def is_letter(name: str) -> bool:
    return bool(_LETTER_RE.match(name))


def _exponent(text: str, i: int) -> tuple[int, int]:
    # i points just past '^'
    j = i
    while j < len(text) and text[j].isdigit():
        j += 1
    if j == i:
        raise WordSyntaxError("missing exponent after '^'", text, i)
    k = int(text[i:j])
    if k == 0:
        raise WordSyntaxError("exponent must be at least 1", text, i)
    return k, j


def _parse_compact(text: str) -> Word:
    out: list[str] = []
    i = 0
    while i < len(text):
        c = text[i]
        if "a" <= c <= "z":
            out.append(c)
            i += 1
        elif c == "^":
            if not out or (i > 0 and text[i - 1] == "^"):
                raise WordSyntaxError("exponent without a letter", text, i)
            k, i = _exponent(text, i + 1)
            out.extend([out[-1]] * (k - 1))
            if i < len(text) and text[i] == "^":
                raise WordSyntaxError("exponent without a letter", text, i)
        else:
            raise WordSyntaxError(f"unexpected character {c!r}", text, i)
    return tuple(out)


def _parse_tokens(text: str) -> Word:
    out: list[str] = []
    pos = 0
    for tok in text.split():
        pos = text.index(tok, pos)
        m = _TOKEN_RE.match(tok)
        if m is None:
            raise WordSyntaxError(f"bad token {tok!r}", text, pos)
        k = 1
        if m.group(2) is not None:
            k = int(m.group(2))
            if k == 0:
                raise WordSyntaxError("exponent must be at least 1", text, pos + tok.index("^") + 1)
        out.extend([m.group(1)] * k)
        pos += len(tok)
    return tuple(out)


def parse_word(text: str, mode: str = "auto") -> Word:
    """Parse word text.

    ``compact``: every lowercase character is a letter and ``^k`` repeats the
    preceding letter (``"xyx^2"``).  ``tokens``: whitespace separated letter
    names with optional ``^k`` (``"z1 x z1^2"``).  ``auto`` picks ``tokens``
    when the text has whitespace or an indexed letter.  ``"1"`` is the empty
    word in every mode.
    """
    stripped = text.strip()
    if stripped == "1":
        return EMPTY
    if not stripped:
        raise WordSyntaxError("empty text (write '1' for the empty word)", text, 0)
    if mode == "auto":
        mode = "tokens" if re.search(r"\s|[a-z][0-9]", stripped) else "compact"
    if mode == "compact":
        return _parse_compact(stripped)
    if mode == "tokens":
        return _parse_tokens(stripped)
    raise ValueError(f"unknown parse mode {mode!r}")


def render(w: Word) -> str:
    """Inverse of :func:`parse_word`; runs of a letter are written ``a^k``."""
    if not w:
        return "1"
    compact = all(len(a) == 1 for a in w)
    parts = []
    for a, run in groupby(w):
        k = len(list(run))
        parts.append(a if k == 1 else f"{a}^{k}")
    return "".join(parts) if compact else " ".join(parts)


def word(text: str | Iterable[str]) -> Word:
    """Convenience coercion: parse strings, tuple-ify letter iterables."""
    if isinstance(text, str):
        return parse_word(text)
    return tuple(text)


# -- letter statistics -------------------------------------------------------


@dataclass(frozen=True)
class LetterStats:
    content: frozenset[str]
    occ: dict[str, int] = field(hash=False, compare=False)
    simple: frozenset[str]
    multiple: frozenset[str]


def occurrences(w: Word) -> Counter:
    return Counter(w)


def content(w: Word) -> frozenset[str]:
    return frozenset(w)


def simple_letters(w: Word) -> frozenset[str]:
    return frozenset(a for a, k in Counter(w).items() if k == 1)


def multiple_letters(w: Word) -> frozenset[str]:
    return frozenset(a for a, k in Counter(w).items() if k > 1)


def letter_stats(w: Word) -> LetterStats:
    occ = dict(Counter(w))
    return LetterStats(
        content=frozenset(occ),
        occ=occ,
        simple=frozenset(a for a, k in occ.items() if k == 1),
        multiple=frozenset(a for a, k in occ.items() if k > 1),
    )


def first_occurrence_order(w: Word) -> list[str]:
    return list(dict.fromkeys(w))


def project(w: Word, keep: Iterable[str]) -> Word:
    keep = set(keep)
    return tuple(a for a in w if a in keep)


def reverse(w: Word) -> Word:
    return w[::-1]


# -- factors -----------------------------------------------------------------


def find_factor(u: Word, w: Word, start: int = 0) -> int:
    n = len(u)
    for i in range(start, len(w) - n + 1):
        if w[i : i + n] == u:
            return i
    return -1


def is_factor(u: Word, w: Word) -> bool:
    return find_factor(u, w) >= 0


def factors(w: Word) -> set[Word]:
    """All distinct contiguous factors of ``w``, the empty word included."""
    out = {EMPTY}
    for i in range(len(w)):
        for j in range(i + 1, len(w) + 1):
            out.add(w[i:j])
    return out


def factors_of_all(words: Iterable[Word]) -> set[Word]:
    out = {EMPTY}
    for w in words:
        out |= factors(w)
    return out


# -- decompositions ----------------------------------------------------------


@dataclass(frozen=True)
class DividerRef:
    """A divider of a word.  Equality is by name so that dividers of two
    different words can be compared directly."""

    index: int = field(compare=False)
    name: str

    @property
    def is_bottom(self) -> bool:
        return self.index == 0

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Decomposition:
    dividers: tuple[str, ...]  # dividers[0] is BOTTOM
    blocks: tuple[Word, ...]

    @property
    def m(self) -> int:
        return len(self.dividers) - 1

    def reassemble(self) -> Word:
        out: list[str] = []
        for i, (t, b) in enumerate(zip(self.dividers, self.blocks)):
            if i:
                out.append(t)
            out.extend(b)
        return tuple(out)

    def prefix(self, k: int) -> Word:
        """``w_0 t_1 w_1 ... w_{k-1} t_k``: everything before block ``k``."""
        return Decomposition(self.dividers[:k + 1], self.blocks[:k] + (EMPTY,)).reassemble()

    def suffix(self, k: int) -> Word:
        """``t_{k+1} w_{k+1} ... t_m w_m``: everything after block ``k``."""
        out: list[str] = []
        for t, b in zip(self.dividers[k + 1 :], self.blocks[k + 1 :]):
            out.append(t)
            out.extend(b)
        return tuple(out)


def decompose(w: Word) -> Decomposition:
    simple = simple_letters(w)
    dividers = [BOTTOM]
    blocks: list[list[str]] = [[]]
    for a in w:
        if a in simple:
            dividers.append(a)
            blocks.append([])
        else:
            blocks[-1].append(a)
    return Decomposition(tuple(dividers), tuple(tuple(b) for b in blocks))


def divider_query(w: Word, x: str, i: int) -> DividerRef:
    """The right-most divider strictly before the ``i``-th occurrence of ``x``."""
    if i < 1:
        raise ValueError(f"occurrence index must be >= 1, got {i}")
    simple = simple_letters(w)
    last = DividerRef(0, BOTTOM)
    seen = 0
    for a in w:
        if a == x:
            seen += 1
            if seen == i:
                return last
        if a in simple:
            last = DividerRef(last.index + 1, a)
    if seen == 0:
        raise ValueError(f"letter {x!r} does not occur in {render(w)}")
    raise ValueError(f"letter {x!r} occurs only {seen} times in {render(w)}, asked for #{i}")


def last_divider(w: Word, x: str) -> DividerRef:
    return divider_query(w, x, w.count(x))


# -- reduced words and the tau congruence -------------------------------------


def runs(w: Word) -> list[tuple[str, int]]:
    """Maximal letter powers ``a^e`` of ``w``, left to right."""
    return [(a, len(list(g))) for a, g in groupby(w)]


def reduce(w: Word) -> Word:
    """The reduced word of the same type as ``w``.

    A first run ``a^e`` with ``e >= 2`` keeps exactly two letters; every other
    run collapses to a single letter.
    """
    seen: set[str] = set()
    out: list[str] = []
    for a, e in runs(w):
        if a not in seen and e >= 2:
            out += [a, a]
        else:
            out.append(a)
        seen.add(a)
    return tuple(out)


def is_reduced(w: Word) -> bool:
    seen: set[str] = set()
    for i, a in enumerate(w):
        if i + 1 < len(w) and w[i + 1] == a and a in seen:
            return False
        seen.add(a)
    return True


def _type_signature(w: Word) -> tuple[tuple[str, ...], frozenset[str]]:
    rs = runs(w)
    seen: set[str] = set()
    adjacent: set[str] = set()
    for a, e in rs:
        if a not in seen and e >= 2:
            adjacent.add(a)
        seen.add(a)
    return tuple(a for a, _ in rs), frozenset(adjacent)


def same_type(u: Word, v: Word) -> bool:
    """Same sequence of maximal powers, and for every letter its first two
    occurrences are adjacent in ``u`` iff they are in ``v``."""
    return _type_signature(u) == _type_signature(v)


def tau_equiv(u: Word, v: Word) -> bool:
    return reduce(u) == reduce(v)


# -- enumeration helpers -----------------------------------------------------


def all_words(alphabet: Iterable[str], max_len: int, min_len: int = 0) -> Iterator[Word]:
    """Words over ``alphabet`` by (length, lexicographic) order."""
    from itertools import product

    letters = sorted(alphabet)
    for n in range(min_len, max_len + 1):
        yield from product(letters, repeat=n)


def word_key(w: Word) -> tuple[int, Word]:
    return (len(w), w)


def substitute(w: Word, sigma: dict[str, Word]) -> Word:
    out: list[str] = []
    for a in w:
        out.extend(sigma.get(a, (a,)))
    return tuple(out)
