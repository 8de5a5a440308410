"""Finite monoids given by multiplication tables.

Builds Rees quotients ``S(W)`` of the free monoid and their τ-analogues
``S_τ(W)``, checks structural properties, and decides whether a finite monoid
satisfies an identity by exhausting all substitutions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Iterator, Mapping

import numpy as np

from .identities import Identity
from .words import (
    EMPTY,
    Word,
    factors,
    factors_of_all,
    first_occurrence_order,
    is_reduced,
    parse_word,
    reduce,
    render,
    runs,
    word_key,
)

ZERO_NAME = "0"

# Largest number of substitutions evaluated in one vectorised numpy call.
VECTOR_CHUNK = 1 << 16


class MonoidSchemaError(ValueError):
    pass


class ClosureError(ValueError):
    def __init__(self, message: str, witness: Word | None = None):
        super().__init__(message)
        self.witness = witness


class FiniteMonoid:
    """Elements are indices ``0..n-1`` with display names; ``table[a, b]`` is
    the index of ``a·b``.  Instances are treated as immutable."""

    def __init__(
        self,
        elements: Iterable[str],
        identity: int,
        zero: int | None,
        table,
        words: Iterable[Word | None] | None = None,
    ):
        self.elements = tuple(elements)
        self.identity = int(identity)
        self.zero = None if zero is None else int(zero)
        self.table = np.asarray(table, dtype=np.int32)
        self.table.setflags(write=False)
        self.words = tuple(words) if words is not None else None
        self._index = {name: i for i, name in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteMonoid):
            return NotImplemented
        return (
            self.elements == other.elements
            and self.identity == other.identity
            and self.zero == other.zero
            and np.array_equal(self.table, other.table)
        )

    def __repr__(self) -> str:
        return f"<FiniteMonoid |M|={len(self)} zero={self.zero is not None}>"

    def index(self, name: str | int) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no element named {name!r}") from None

    def name(self, i: int) -> str:
        return self.elements[i]

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])


# -- construction --------------------------------------------------------------


def rho_quotient(words: Iterable[Word], normal_form: Callable[[Word], Word]) -> FiniteMonoid:
    """Rees quotient of ``F^1/ρ`` by the ideal of classes outside ``words``.

    ``words`` holds one normal form per class and ``normal_form`` picks the
    representative of a word's class.  The empty word must be its own class.
    """
    elems = sorted(set(words) | {EMPTY}, key=word_key)
    n = len(elems)
    idx = {w: i for i, w in enumerate(elems)}
    zero = n
    table = np.full((n + 1, n + 1), zero, dtype=np.int32)
    for i, u in enumerate(elems):
        for j, v in enumerate(elems):
            table[i, j] = idx.get(normal_form(u + v), zero)
    names = [render(w) for w in elems] + [ZERO_NAME]
    return FiniteMonoid(names, idx[EMPTY], zero, table, words=elems + [None])


def rees_quotient(W: Iterable[Word]) -> FiniteMonoid:
    """``S(W)``: factors of words in ``W`` plus a zero collecting all non-factors."""
    W = [tuple(w) for w in W]
    if not W or any(not w for w in W):
        raise ValueError("S(W) needs a non-empty list of non-empty words")
    return rho_quotient(factors_of_all(W), lambda w: w)


def _class_samples(w: Word) -> Iterator[Word]:
    """Words of the τ-class of a reduced word whose factors reduce to every
    reduced factor of the class.  A first occurrence of exponent one is fixed,
    a square can grow, and a later single occurrence can grow or stay; a cube
    stands in for every exponent above one, including cuts inside the run."""
    seen: set[str] = set()
    choices = []
    for a, e in runs(w):
        choices.append((1,) if e == 1 and a not in seen else (3,) if e >= 2 else (1, 3))
        seen.add(a)
    rs = runs(w)
    for exps in product(*choices):
        yield tuple(a for (a, _), k in zip(rs, exps) for _ in range(k))


def tau_closure(W: Iterable[Word]) -> set[Word]:
    """Smallest set of reduced words containing the reduced forms of ``W``
    whose classes are closed under taking factors."""
    out: set[Word] = set()
    todo = [reduce(tuple(w)) for w in W]
    while todo:
        w = todo.pop()
        if w in out:
            continue
        out.add(w)
        todo.extend(r for v in _class_samples(w) for r in map(reduce, factors(v)) if r not in out)
    return out


def check_tau_closed(W: Iterable[Word]) -> None:
    """Raise unless every word is reduced and every factor of every word in
    its class reduces back into ``W``."""
    W = set(W)
    for w in sorted(W, key=word_key):
        if not is_reduced(w):
            raise ClosureError(f"{render(w)} is not reduced", w)
    for w in sorted(W, key=word_key):
        for v in _class_samples(w):
            for f in sorted(factors(v), key=word_key):
                r = reduce(f)
                if r not in W:
                    raise ClosureError(
                        f"reduced factor {render(r)} of {render(v)} (class of {render(w)}) is missing", r
                    )


def tau_quotient(W_reduced: Iterable[Word], validate: bool = True) -> FiniteMonoid:
    """``S_τ(W)`` with ``W`` given by reduced representatives."""
    W = set(map(tuple, W_reduced)) | {EMPTY}
    if validate:
        check_tau_closed(W)
    return rho_quotient(W, reduce)


def j_generator_words(k: int, l: int) -> Word:
    return ("x", "z", "y") + ("x",) * k + ("t",) + ("y",) * l


def _reduced_factor_set(k_max: int, l_max: int) -> set[Word]:
    out: set[Word] = set()
    for k in range(1, k_max + 1):
        for l in range(1, l_max + 1):
            out |= {reduce(f) for f in factors(j_generator_words(k, l))}
    return out


def saturate_j_generator(k_max: int, l_max: int) -> tuple[set[Word], bool]:
    """Reduced forms of all factors of ``xzyx^k t y^l`` for ``k <= k_max``,
    ``l <= l_max``, and whether the set already equals the one one step lower."""
    if k_max < 1 or l_max < 1:
        raise ValueError("k_max and l_max must be >= 1")
    got = _reduced_factor_set(k_max, l_max)
    stabilized = k_max > 1 and l_max > 1 and got == _reduced_factor_set(k_max - 1, l_max - 1)
    return got, stabilized


def from_table(table, names: Iterable[str] | None = None) -> FiniteMonoid:
    """Wrap a raw Cayley table, locating the identity and a zero if present."""
    t = np.asarray(table, dtype=np.int32)
    n = t.shape[0]
    names = list(names) if names is not None else [str(i) for i in range(n)]
    ar = np.arange(n)
    ids = [e for e in range(n) if (t[e] == ar).all() and (t[:, e] == ar).all()]
    if not ids:
        raise MonoidSchemaError("table has no identity element")
    zeros = [z for z in range(n) if (t[z] == z).all() and (t[:, z] == z).all()]
    zero = zeros[0] if zeros and n > 1 else None
    return FiniteMonoid(names, ids[0], zero, t)


# -- structure -----------------------------------------------------------------


def validate(M: FiniteMonoid) -> list[str]:
    """Problems with ``M`` as a monoid; empty when it is one."""
    t = M.table
    n = len(M.elements)
    if t.ndim != 2 or t.shape != (n, n):
        return [f"table shape {t.shape} does not match {n} elements"]
    if n and (t.min() < 0 or t.max() >= n):
        return ["table entry out of range"]
    problems = []
    e = M.identity
    if not 0 <= e < n:
        return [f"identity index {e} out of range"]
    ar = np.arange(n)
    bad = np.nonzero((t[e] != ar) | (t[:, e] != ar))[0]
    if bad.size:
        problems.append(f"identity {M.elements[e]!r} is not neutral for {M.elements[bad[0]]!r}")
    if M.zero is not None:
        z = M.zero
        if not 0 <= z < n:
            problems.append(f"zero index {z} out of range")
        else:
            bad = np.nonzero((t[z] != z) | (t[:, z] != z))[0]
            if bad.size:
                problems.append(f"zero {M.elements[z]!r} is not absorbing for {M.elements[bad[0]]!r}")
    triple = non_associative_triple(M)
    if triple is not None:
        a, b, c = (M.elements[i] for i in triple)
        problems.append(f"not associative at ({a}, {b}, {c})")
    return problems


def non_associative_triple(M: FiniteMonoid) -> tuple[int, int, int] | None:
    t = M.table
    for a in range(len(M)):
        left = t[t[a]]  # (a·b)·c indexed [b, c]
        right = t[a][t]  # a·(b·c)
        bad = np.argwhere(left != right)
        if bad.size:
            b, c = bad[0]
            return a, int(b), int(c)
    return None


def idempotents(M: FiniteMonoid) -> set[int]:
    ar = np.arange(len(M))
    return set(np.nonzero(M.table[ar, ar] == ar)[0].tolist())


def idempotents_commute(M: FiniteMonoid) -> bool:
    es = sorted(idempotents(M))
    t = M.table
    sub = np.ix_(es, es)
    return bool((t[sub] == t[sub].T).all())


def is_aperiodic(M: FiniteMonoid) -> bool:
    """Every element ``a`` has some ``n <= |M|`` with ``a^n = a^(n+1)``."""
    n = len(M)
    ar = np.arange(n)
    power = ar.copy()
    settled = np.zeros(n, dtype=bool)
    for _ in range(n):
        nxt = M.table[power, ar]
        settled |= nxt == power
        if settled.all():
            return True
        power = nxt
    return bool(settled.all())


# -- evaluation and identity checking ----------------------------------------------


def evaluate(M: FiniteMonoid, w: Word, s: Mapping[str, int | str]) -> int:
    acc = M.identity
    for a in w:
        if a not in s:
            raise KeyError(f"letter {a!r} is not mapped")
        acc = int(M.table[acc, M.index(s[a])])
    return acc


@dataclass
class CheckResult:
    holds: bool
    witness: dict[str, int] | None = None
    checked: int = 0

    def __bool__(self) -> bool:
        return self.holds

    def witness_names(self, M: FiniteMonoid) -> dict[str, str] | None:
        if self.witness is None:
            return None
        return {a: M.elements[i] for a, i in self.witness.items()}


def _segments(side: Word, assigned: set[str]) -> list[Word]:
    out, cur = [], []
    for a in side:
        if a in assigned:
            cur.append(a)
        elif cur:
            out.append(tuple(cur))
            cur = []
    if cur:
        out.append(tuple(cur))
    return out


def satisfies(M: FiniteMonoid, ident: Identity, vector_letters: int | None = None) -> CheckResult:
    """Exhaustive check of ``ident`` over all ``|M|^k`` substitutions.

    Substitutions are scanned in mixed-radix order (first letter most
    significant, letters ordered by first occurrence), so the reported witness
    is the first counterexample in that order.  The trailing letters are
    evaluated as numpy blocks; leading letters are assigned depth-first and a
    branch is skipped when both sides already contain a factor equal to zero.
    """
    if ident.trivial:
        return CheckResult(True)
    letters = first_occurrence_order(ident.lhs + ident.rhs)
    k, n = len(letters), len(M)
    t = M.table
    if vector_letters is None:
        vector_letters = 0
        while vector_letters < k and n ** (vector_letters + 1) <= VECTOR_CHUNK:
            vector_letters += 1
        vector_letters = max(vector_letters, 1) if k else 0
    vector_letters = min(max(vector_letters, 0), k)
    depth = k - vector_letters
    outer, inner = letters[:depth], letters[depth:]
    axis = {a: i for i, a in enumerate(inner)}
    shape = (n,) * len(inner)
    ranges = {
        a: np.arange(n).reshape([n if j == i else 1 for j in range(len(inner))])
        for a, i in axis.items()
    }
    # per-depth segments of fully assigned letters, for zero pruning
    prune_segments = []
    for d in range(depth + 1):
        assigned = set(outer[:d])
        prune_segments.append(
            (_segments(ident.lhs, assigned), _segments(ident.rhs, assigned))
        )
    checked = 0

    def side_value(side: Word, values: dict[str, int]):
        acc = np.asarray(M.identity)
        for a in side:
            acc = t[acc, values[a] if a in values else ranges[a]]
        return acc

    def forced_zero(segs: list[Word], values: dict[str, int]) -> bool:
        for seg in segs:
            acc = M.identity
            for a in seg:
                acc = t[acc, values[a]]
                if acc == M.zero:
                    return True
        return False

    values: dict[str, int] = {}

    def leaf() -> CheckResult | None:
        nonlocal checked
        lv = np.broadcast_to(side_value(ident.lhs, values), shape)
        rv = np.broadcast_to(side_value(ident.rhs, values), shape)
        checked += int(np.prod(shape, dtype=np.int64))
        diff = np.asarray(lv != rv)
        if diff.any():
            # first difference in C order is the first in mixed-radix order;
            # argwhere would lose it on a 0-d block
            first = np.unravel_index(int(np.argmax(diff)), shape)
            wit = dict(values)
            for a, i in axis.items():
                wit[a] = int(first[i])
            return CheckResult(False, {a: wit[a] for a in letters}, checked)
        return None

    def dfs(d: int) -> CheckResult | None:
        nonlocal checked
        if d == depth:
            return leaf()
        a = outer[d]
        for val in range(n):
            values[a] = val
            if M.zero is not None:
                ls, rs = prune_segments[d + 1]
                if forced_zero(ls, values) and forced_zero(rs, values):
                    checked += n ** (k - d - 1)
                    continue
            got = dfs(d + 1)
            if got is not None:
                return got
        del values[a]
        return None

    found = dfs(0)
    return found if found is not None else CheckResult(True, None, checked)


@dataclass
class SatisfactionReport:
    results: list[tuple[Identity, CheckResult]] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(r.holds for _, r in self.results)

    def failures(self) -> list[tuple[Identity, CheckResult]]:
        return [(i, r) for i, r in self.results if not r.holds]


def satisfies_all(M: FiniteMonoid, ids: Iterable[Identity]) -> SatisfactionReport:
    return SatisfactionReport([(i, satisfies(M, i)) for i in ids])


# -- serialization ---------------------------------------------------------------


def to_dict(M: FiniteMonoid) -> dict:
    return {
        "elements": list(M.elements),
        "identity": M.identity,
        "zero": M.zero,
        "table": M.table.tolist(),
    }


def serialize(M: FiniteMonoid) -> str:
    return json.dumps(to_dict(M), separators=(",", ":"), sort_keys=True) + "\n"


def deserialize(data: str | Mapping) -> FiniteMonoid:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise MonoidSchemaError(f"not JSON: {exc}") from exc
    for key in ("elements", "identity", "zero", "table"):
        if key not in data:
            raise MonoidSchemaError(f"missing field {key!r}")
    elements = data["elements"]
    table = data["table"]
    n = len(elements)
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        raise MonoidSchemaError("elements must be a list of names")
    if len(set(elements)) != n:
        raise MonoidSchemaError("duplicate element names")
    if not isinstance(table, list) or len(table) != n:
        raise MonoidSchemaError(f"table must have {n} rows, found {len(table) if isinstance(table, list) else 'none'}")
    for r, row in enumerate(table):
        if not isinstance(row, list) or len(row) != n:
            raise MonoidSchemaError(f"row {r} must have {n} entries")
        if not all(isinstance(v, int) and 0 <= v < n for v in row):
            raise MonoidSchemaError(f"row {r} has an entry outside 0..{n - 1}")
    ident, zero = data["identity"], data["zero"]
    if not isinstance(ident, int) or not 0 <= ident < n:
        raise MonoidSchemaError("identity must be an element index")
    if zero is not None and (not isinstance(zero, int) or not 0 <= zero < n):
        raise MonoidSchemaError("zero must be an element index or null")
    M = FiniteMonoid(elements, ident, zero, table)
    problems = validate(M)
    if problems:
        raise MonoidSchemaError("; ".join(problems))
    return M


def parse_monoid_text(text: str) -> FiniteMonoid:
    """Inline constructors: ``S(w1,w2,...)`` and ``Stau(saturate:k,l)`` or
    ``Stau(w1,w2,...)`` (words are closed first, see :func:`tau_closure`)."""
    text = text.strip()
    if text.startswith("S(") and text.endswith(")"):
        return rees_quotient([parse_word(w) for w in text[2:-1].split(",")])
    if text.startswith("Stau(") and text.endswith(")"):
        body = text[5:-1].strip()
        if body.startswith("saturate:"):
            k, l = (int(v) for v in body[len("saturate:"):].split(","))
            return tau_quotient(saturate_j_generator(k, l)[0])
        ws = [parse_word(w) for w in body.split(",")]
        return tau_quotient(tau_closure(ws))
    raise ValueError(f"unrecognised monoid constructor {text!r}")
