"""Identities, named presets, identity families and the F∨E word problem."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Sequence

from .words import (
    Decomposition,
    Word,
    decompose,
    divider_query,
    first_occurrence_order,
    last_divider,
    letter_stats,
    parse_word,
    render,
    reverse,
    substitute,
)


class UnknownPreset(KeyError):
    pass


class AlignmentError(ValueError):
    """The two sides of an identity do not share a divider sequence."""


@dataclass(frozen=True, eq=False)
class Identity:
    """An unordered pair of words.  ``label`` is cosmetic and ignored by ``==``."""

    lhs: Word
    rhs: Word
    label: str | None = field(default=None)

    def _key(self) -> frozenset:
        return frozenset((self.lhs, self.rhs))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Identity):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    @property
    def trivial(self) -> bool:
        return self.lhs == self.rhs

    @property
    def letters(self) -> list[str]:
        return first_occurrence_order(self.lhs + self.rhs)

    def flipped(self) -> "Identity":
        return Identity(self.rhs, self.lhs, self.label)

    def substitute(self, sigma: dict[str, Word]) -> "Identity":
        return Identity(substitute(self.lhs, sigma), substitute(self.rhs, sigma))

    def relabel(self, label: str | None) -> "Identity":
        return Identity(self.lhs, self.rhs, label)

    @classmethod
    def parse(cls, text: str, label: str | None = None) -> "Identity":
        for sep in ("==", "≈", "~", "="):
            if sep in text:
                left, _, right = text.partition(sep)
                return cls(parse_word(left), parse_word(right), label)
        raise ValueError(f"identity needs '==' between its sides: {text!r}")

    def __str__(self) -> str:
        return f"{render(self.lhs)} == {render(self.rhs)}"

    def __repr__(self) -> str:
        tag = f"{self.label}: " if self.label else ""
        return f"<Identity {tag}{self}>"


def read_identities(lines: Iterable[str]) -> list[Identity]:
    """One identity per line; blank lines and ``#`` comments are skipped."""
    out = []
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if line:
            try:
                out.append(Identity.parse(line))
            except ValueError as exc:
                raise ValueError(f"line {n}: {exc}") from exc
    return out


# -- presets -----------------------------------------------------------------

NAMED = {
    "ID-A": "xyx == xyx^2",
    "ID-B": "x^2y^2 == y^2x^2",
    "ID-C": "xyzxy == yxzxy",
    "ID-D": "xyxztx == xyxzxtx",
    "ID-E": "xzxyxty == xzyxty",
    "ID-F": "xyx == x^2yx",
    "ID-G": "x^2 == x^3",
    "ID-H": "xtyzxy == xtyzyx",
    "ID-I": "x^2yzx^2 == x^2yxzx^2",
    "ID-K": "yx^2txy == xyxtxy",
    "ID-L": "x^2ytxy == xyxtxy",
    # unnamed identities that appear in variety bases and proof chains
    "x2y=x2yx": "x^2y == x^2yx",
    "yx2=xyx": "yx^2 == xyx",
    "x2y=x2yx2": "x^2y == x^2yx^2",
    "xyx2=x2yx2": "xyx^2 == x^2yx^2",
}

VARIETIES = {
    "K": ("ID-A", "ID-B", "x2y=x2yx"),
    "Q": ("ID-A", "ID-B", "ID-F"),
    "E": ("ID-B", "ID-G", "yx2=xyx"),
    "F": ("ID-A", "ID-B", "ID-C", "x2y=x2yx"),
    "O": ("ID-B", "ID-E"),
}

J_BASE = ("ID-A", "ID-B", "ID-C", "ID-D")
FAMILY_KINDS = ("alpha", "beta", "gamma", "gamma'")
_KIND_ALIASES = {"α": "alpha", "β": "beta", "γ": "gamma", "γ'": "gamma'"}


def named(handle: str) -> Identity:
    try:
        return Identity.parse(NAMED[handle], label=handle)
    except KeyError:
        raise UnknownPreset(handle) from None


def _e(i: int) -> str:
    return "x" if i % 2 else "y"


def _tail(lo: int, hi: int) -> Word:
    out: list[str] = []
    for i in range(lo, hi + 1):
        out += [f"t{i}", _e(i)]
    return tuple(out)


def family(kind: str, n: int, as_printed: bool = False) -> Identity:
    """Members ``alpha_n``, ``beta_n``, ``gamma_n``, ``gamma'_n`` of the Phi families.

    The tail ``t_i e_i`` alternates ``e_i = x`` (odd i) and ``y`` (even i).
    ``beta_n`` is built with the tail ``t_2 e_2 ... t_{n+1} e_{n+1}`` on both
    sides; ``as_printed=True`` gives the variant whose right side carries
    ``t_1 e_1 ... t_n e_n`` instead (a different, content-changing identity).
    """
    kind = _KIND_ALIASES.get(kind, kind)
    if kind not in FAMILY_KINDS:
        raise UnknownPreset(kind)
    if n < 1:
        raise ValueError(f"family index must be >= 1, got {n}")
    x, y = ("x",), ("y",)
    if kind == "alpha":
        lhs, rhs = x + y + _tail(1, n + 1), y + x + _tail(1, n + 1)
    elif kind == "beta":
        rtail = _tail(1, n) if as_printed else _tail(2, n + 1)
        lhs, rhs = y + x + x + _tail(2, n + 1), x + y + x + rtail
    elif kind == "gamma":
        lhs, rhs = x + x + y + _tail(1, n + 1), x + y + x + _tail(1, n + 1)
    else:
        lhs, rhs = x + x + y + _tail(2, n + 1), x + y + x + _tail(2, n + 1)
    return Identity(lhs, rhs, f"{kind}_{n}")


def parse_family_handle(handle: str) -> tuple[str, int] | None:
    h = handle.replace("_", "")
    # longest first so gamma' wins over gamma
    for kind in sorted(set(FAMILY_KINDS) | set(_KIND_ALIASES), key=len, reverse=True):
        if h.startswith(kind) and h[len(kind):].isdigit():
            return _KIND_ALIASES.get(kind, kind), int(h[len(kind):])
    return None


def j_identity(n: int, perm: Sequence[int]) -> Identity:
    """``x z_{1π}..z_{nπ} x prod(t_i z_i) == x^2 z_{1π}..z_{nπ} prod(t_i z_i)``.

    ``perm`` lists ``(1π, ..., nπ)`` one-based.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"{tuple(perm)} is not a permutation of 1..{n}")
    zs = tuple(f"z{p}" for p in perm)
    tail: list[str] = []
    for i in range(1, n + 1):
        tail += [f"t{i}", f"z{i}"]
    lhs = ("x",) + zs + ("x",) + tuple(tail)
    rhs = ("x", "x") + zs + tuple(tail)
    return Identity(lhs, rhs, f"J({n};{','.join(map(str, perm))})")


def j_basis(max_n: int = 2) -> list[Identity]:
    if max_n < 1:
        raise ValueError("J truncation bound must be >= 1")
    out = [named(h) for h in J_BASE]
    for n in range(1, max_n + 1):
        out += [j_identity(n, p) for p in permutations(range(1, n + 1))]
    return out


def dual_identity(ident: Identity) -> Identity:
    label = f"dual({ident.label})" if ident.label else None
    return Identity(reverse(ident.lhs), reverse(ident.rhs), label)


def dual_preset(ids: Iterable[Identity]) -> list[Identity]:
    return [dual_identity(i) for i in ids]


def preset(name: str, n: int = 2) -> list[Identity] | Identity:
    """Look up a variety basis (``K Q E F O J``) or a single identity handle.

    ``J`` is truncated at permutation length ``n``; ``J:3`` is also accepted.
    ``dual:NAME`` reverses every word.
    """
    if name.startswith("dual:"):
        inner = preset(name[5:], n)
        return dual_preset(inner) if isinstance(inner, list) else dual_identity(inner)
    if name in VARIETIES:
        return [named(h) for h in VARIETIES[name]]
    if name == "J" or name.startswith("J:"):
        if ":" in name:
            n = int(name.split(":", 1)[1])
        return j_basis(n)
    if name in NAMED:
        return named(name)
    fam = parse_family_handle(name)
    if fam is not None:
        return family(*fam)
    raise UnknownPreset(name)


def preset_list(name: str, n: int = 2) -> list[Identity]:
    got = preset(name, n)
    return got if isinstance(got, list) else [got]


def canonical_renaming(ident: Identity) -> Identity:
    """Rename letters by first occurrence to ``x, y, z, t, s, r, ...``, then
    ``x1, y1, ...``; the orientation giving the smaller result wins."""
    pool = list("xyztsrqpwvu")

    def rename(a: Word, b: Word) -> tuple[Word, Word]:
        order = first_occurrence_order(a + b)
        names = {}
        for k, letter in enumerate(order):
            base, idx = pool[k % len(pool)], k // len(pool)
            names[letter] = base if idx == 0 else f"{base}{idx}"
        return tuple(names[c] for c in a), tuple(names[c] for c in b)

    cands = [rename(ident.lhs, ident.rhs), rename(ident.rhs, ident.lhs)]
    lhs, rhs = min(cands, key=lambda p: (len(p[0]), p[0], len(p[1]), p[1]))
    return Identity(lhs, rhs, ident.label)


# -- the F∨E word problem --------------------------------------------------------

Comparison = dict[str, tuple[str | None, str | None]]


@dataclass(frozen=True)
class Claims:
    """Per-claim reports; each ``h*``/``t`` map sends a letter to the pair of
    divider names (``None`` where undefined) on the two sides."""

    c_sim: bool
    h1: Comparison
    h2: Comparison
    t: Comparison

    @staticmethod
    def _agree(cmp: Comparison) -> bool:
        return all(a == b for a, b in cmp.values())

    @property
    def c_h1(self) -> bool:
        return self._agree(self.h1)

    @property
    def c_h2(self) -> bool:
        return self._agree(self.h2)

    @property
    def c_t(self) -> bool:
        return self._agree(self.t)

    @property
    def holds(self) -> bool:
        return self.c_sim and self.c_h1 and self.c_h2 and self.c_t

    def failures(self) -> list[str]:
        out = [] if self.c_sim else ["sim/mul"]
        for tag, cmp in (("h1", self.h1), ("h2", self.h2), ("t", self.t)):
            out += [f"{tag}({x}): {a} vs {b}" for x, (a, b) in sorted(cmp.items()) if a != b]
        return out


def _div(w: Word, x: str, i: int | None) -> str | None:
    n = w.count(x)
    if n == 0:
        return None
    if i is None:
        return last_divider(w, x).name
    if i > n:
        return None
    return divider_query(w, x, i).name


def claims_check(ident: Identity) -> Claims:
    u, v = ident.lhs, ident.rhs
    su, sv = letter_stats(u), letter_stats(v)
    c_sim = su.simple == sv.simple and su.multiple == sv.multiple
    h1: Comparison = {}
    h2: Comparison = {}
    t: Comparison = {}
    for x in sorted(su.content | sv.content):
        h1[x] = (_div(u, x, 1), _div(v, x, 1))
        # h2 is only defined for letters occurring at least twice
        if su.occ.get(x, 0) >= 2 or sv.occ.get(x, 0) >= 2:
            h2[x] = (_div(u, x, 2), _div(v, x, 2))
        t[x] = (_div(u, x, None), _div(v, x, None))
    return Claims(c_sim, h1, h2, t)


def fve_holds(ident: Identity) -> bool:
    """Whether ``ident`` holds in the join F∨E (divider criterion)."""
    return ident.trivial or claims_check(ident).holds


# -- structure of identities -----------------------------------------------------


def aligned_decompositions(ident: Identity) -> tuple[Decomposition, Decomposition]:
    du, dv = decompose(ident.lhs), decompose(ident.rhs)
    if du.dividers != dv.dividers:
        raise AlignmentError(
            f"divider sequences differ: {du.dividers} vs {dv.dividers} in {ident}"
        )
    return du, dv


def is_well_balanced(ident: Identity) -> tuple[bool, tuple[str, int] | None]:
    """``(True, None)`` or ``(False, (letter, block index))`` for the first
    offender, letters scanned by first occurrence in the left side."""
    du, dv = aligned_decompositions(ident)
    for x in first_occurrence_order(ident.lhs + ident.rhs):
        for i, (bu, bv) in enumerate(zip(du.blocks, dv.blocks)):
            if bu.count(x) != bv.count(x):
                return False, (x, i)
    return True, None


class NotWellBalanced(ValueError):
    pass


class _Unknown:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "UNKNOWN"

    def __bool__(self) -> bool:
        return False


UNKNOWN = _Unknown()


def invertibility_chain(ident: Identity, max_steps: int | None = None) -> list[Word] | _Unknown:
    """Words ``u = w_0, ..., w_k = v`` joined by single adjacent swaps ``xy -> yx``
    of letters occurring elsewhere in the word.

    Swaps never cross a divider, so each block is sorted independently; moving
    the next needed letter leftward one swap at a time uses exactly the
    inversion count, which is the least possible.  Returns ``UNKNOWN`` when
    that exceeds ``max_steps``.
    """
    ok, offender = is_well_balanced(ident)
    if not ok:
        raise NotWellBalanced(f"{ident} is not well-balanced at {offender}")
    du, dv = aligned_decompositions(ident)
    blocks = [list(b) for b in du.blocks]
    chain = [ident.lhs]

    def current() -> Word:
        return Decomposition(du.dividers, tuple(tuple(b) for b in blocks)).reassemble()

    for i, target in enumerate(dv.blocks):
        cur = blocks[i]
        for j, letter in enumerate(target):
            k = cur.index(letter, j)
            while k > j:
                cur[k - 1], cur[k] = cur[k], cur[k - 1]
                k -= 1
                chain.append(current())
                if max_steps is not None and len(chain) - 1 > max_steps:
                    return UNKNOWN
    assert chain[-1] == ident.rhs
    return chain


def is_one_invertible_step(a: Word, b: Word) -> bool:
    if len(a) != len(b):
        return False
    diff = [i for i in range(len(a)) if a[i] != b[i]]
    if len(diff) != 2 or diff[1] != diff[0] + 1:
        return False
    i = diff[0]
    if (a[i], a[i + 1]) != (b[i + 1], b[i]):
        return False
    rest = set(a[:i] + a[i + 2 :])
    return a[i] in rest and a[i + 1] in rest
