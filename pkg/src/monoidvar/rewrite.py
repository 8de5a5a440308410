"""Equational rewriting over the free monoid.

Substitutions may send letters to the empty word.  ``derivable`` is a bounded
semi-decision procedure: it returns a checked trace or ``None`` (unknown),
never a negative answer.  ``free_object`` computes relatively free monoids of
locally finite varieties and is the exact oracle for small alphabets.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from itertools import product
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .identities import Identity, preset_list
from .monoids import FiniteMonoid, satisfies, validate
from .words import EMPTY, Word, first_occurrence_order, parse_word, render, substitute, word_key

log = logging.getLogger(__name__)

Substitution = dict[str, Word]

LR, RL = "lr", "rl"


class StepError(ValueError):
    pass


# -- matching ----------------------------------------------------------------------


@dataclass(frozen=True)
class Match:
    substitution: tuple[tuple[str, Word], ...]
    position: int
    end: int

    @property
    def sigma(self) -> Substitution:
        return dict(self.substitution)


@dataclass
class MatchResult:
    matches: list[Match]
    truncated: bool = False

    def __iter__(self):
        return iter(self.matches)

    def __len__(self) -> int:
        return len(self.matches)


def match_pattern(
    pattern: Word,
    target: Word,
    cap: int = 200_000,
    bound: Substitution | None = None,
    positions: Iterable[int] | None = None,
) -> MatchResult:
    """All ``(σ, i)`` with ``target[i:i+|σ(pattern)|] == σ(pattern)``.

    Images may be empty.  Order: by position, then lexicographically on the
    images of the pattern letters taken in order of first occurrence.
    ``bound`` pre-assigns some letters.
    """
    order = first_occurrence_order(pattern)
    n = len(target)
    found: list[Match] = []
    sigma: Substitution = dict(bound or {})
    truncated = False

    def rec(k: int, pos: int, start: int) -> bool:
        # returns False when the cap is hit
        if k == len(pattern):
            found.append(Match(tuple((a, sigma[a]) for a in order), start, pos))
            return len(found) < cap
        a = pattern[k]
        if a in sigma:
            img = sigma[a]
            if target[pos : pos + len(img)] == img:
                return rec(k + 1, pos + len(img), start)
            return True
        for end in range(pos, n + 1):
            sigma[a] = target[pos:end]
            ok = rec(k + 1, end, start)
            if not ok:
                del sigma[a]
                return False
        del sigma[a]
        return True

    for start in positions if positions is not None else range(n + 1):
        if not rec(0, start, start):
            truncated = True
            break
    return MatchResult(found, truncated)


# -- rewrite steps -------------------------------------------------------------------


@dataclass(frozen=True)
class RewriteStep:
    identity: Identity
    direction: str  # LR replaces σ(lhs) by σ(rhs)
    substitution: tuple[tuple[str, Word], ...]
    position: int

    @property
    def handle(self) -> str:
        return self.identity.label or str(self.identity)

    @property
    def sigma(self) -> Substitution:
        return dict(self.substitution)

    def sides(self) -> tuple[Word, Word]:
        i = self.identity
        return (i.lhs, i.rhs) if self.direction == LR else (i.rhs, i.lhs)

    def flipped(self) -> "RewriteStep":
        return RewriteStep(self.identity, RL if self.direction == LR else LR, self.substitution, self.position)


def make_step(identity: Identity, direction: str, sigma: Substitution, position: int) -> RewriteStep:
    letters = first_occurrence_order(identity.lhs + identity.rhs)
    full = {a: tuple(sigma.get(a, EMPTY)) for a in letters}
    return RewriteStep(identity, direction, tuple(full.items()), position)


def apply_step(w: Word, step: RewriteStep) -> Word:
    src, dst = step.sides()
    sigma = step.sigma
    missing = [a for a in set(src) | set(dst) if a not in sigma]
    if missing:
        raise StepError(f"substitution does not cover {sorted(missing)}")
    s_img, d_img = substitute(src, sigma), substitute(dst, sigma)
    p = step.position
    if p > len(w) or w[p : p + len(s_img)] != s_img:
        raise StepError(f"{render(s_img)} does not occur at position {p} of {render(w)}")
    return w[:p] + d_img + w[p + len(s_img) :]


def successors(
    w: Word, basis: Sequence[Identity], max_len: int, match_cap: int = 200_000
) -> Iterator[tuple[Word, RewriteStep]]:
    """One-step rewrites of ``w`` in deterministic order, no-ops dropped."""
    for ident in basis:
        for direction in (LR, RL):
            src, dst = (ident.lhs, ident.rhs) if direction == LR else (ident.rhs, ident.lhs)
            extra = [a for a in first_occurrence_order(dst) if a not in set(src)]
            res = match_pattern(src, w, cap=match_cap)
            if res.truncated:
                log.warning("match cap hit for %s in %s", ident, render(w))
            for m in res:
                sigma = m.sigma
                for a in extra:
                    sigma[a] = EMPTY
                img = substitute(dst, sigma)
                new = w[: m.position] + img + w[m.end :]
                if new != w and len(new) <= max_len:
                    yield new, make_step(ident, direction, sigma, m.position)


# -- traces ------------------------------------------------------------------------


@dataclass
class DerivationTrace:
    start: Word
    steps: list[RewriteStep]
    end: Word
    title: str = ""

    def __len__(self) -> int:
        return len(self.steps)

    def words(self) -> list[Word]:
        out = [self.start]
        for s in self.steps:
            out.append(apply_step(out[-1], s))
        return out


@dataclass
class TraceCheck:
    ok: bool
    failed_step: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_trace(trace: DerivationTrace, allowed: Iterable[Identity]) -> TraceCheck:
    allowed = set(allowed)
    cur = trace.start
    for i, step in enumerate(trace.steps):
        if step.identity not in allowed:
            return TraceCheck(False, i, f"identity {step.handle} ({step.identity}) is not allowed")
        try:
            cur = apply_step(cur, step)
        except StepError as exc:
            return TraceCheck(False, i, str(exc))
    if cur != trace.end:
        return TraceCheck(False, len(trace.steps), f"chain ends at {render(cur)}, not {render(trace.end)}")
    return TraceCheck(True)


def trace_to_dict(trace: DerivationTrace, allowed: Iterable[Identity] | None = None) -> dict:
    out = {
        "title": trace.title,
        "start": render(trace.start),
        "end": render(trace.end),
        "steps": [
            {
                "identity": s.handle,
                "formula": str(s.identity),
                "direction": s.direction,
                "substitution": {a: render(img) for a, img in s.substitution},
                "position": s.position,
            }
            for s in trace.steps
        ],
    }
    if allowed is not None:
        out["allowed"] = [{"identity": i.label or str(i), "formula": str(i)} for i in allowed]
    return out


def _identity_entry(entry: dict) -> Identity:
    return Identity.parse(entry["formula"], label=entry.get("identity"))


def trace_from_dict(data: dict) -> tuple[DerivationTrace, list[Identity] | None]:
    steps = []
    for k, s in enumerate(data["steps"]):
        if s.get("direction") not in (LR, RL):
            raise ValueError(f"step {k}: direction must be 'lr' or 'rl'")
        ident = _identity_entry(s)
        sigma = {a: parse_word(img) for a, img in s["substitution"].items()}
        steps.append(RewriteStep(ident, s["direction"], tuple(sigma.items()), int(s["position"])))
    trace = DerivationTrace(parse_word(data["start"]), steps, parse_word(data["end"]), data.get("title", ""))
    allowed = [_identity_entry(e) for e in data["allowed"]] if "allowed" in data else None
    return trace, allowed


def load_trace(path: str | Path) -> tuple[DerivationTrace, list[Identity] | None]:
    return trace_from_dict(json.loads(Path(path).read_text()))


def dump_trace(trace: DerivationTrace, allowed: Iterable[Identity] | None = None) -> str:
    return json.dumps(trace_to_dict(trace, allowed), indent=2, ensure_ascii=False) + "\n"


def golden_traces() -> dict[str, tuple[DerivationTrace, list[Identity]]]:
    """The proof chains shipped with the package, keyed by file stem."""
    out = {}
    root = resources.files("monoidvar") / "data" / "traces"
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".json"):
            trace, allowed = trace_from_dict(json.loads(entry.read_text()))
            out[entry.name[:-5]] = (trace, allowed or [])
    return out


# -- bounded derivation search -------------------------------------------------------


@dataclass(frozen=True)
class SearchBudget:
    max_word_len: int | None = None  # default: longest side + 4
    max_steps: int = 8
    max_states: int = 200_000
    match_cap: int = 200_000


def derivable(
    u: Word, v: Word, basis: Sequence[Identity], budget: SearchBudget = SearchBudget()
) -> DerivationTrace | None:
    """Bidirectional breadth-first search for a chain from ``u`` to ``v``.

    Returns a trace that passes :func:`verify_trace`, or ``None`` when the
    budget runs out (meaning *unknown*).
    """
    if u == v:
        return DerivationTrace(u, [], v)
    max_len = budget.max_word_len if budget.max_word_len is not None else max(len(u), len(v)) + 4
    parents = ({u: None}, {v: None})
    frontiers = ([u], [v])
    depths = [0, 0]
    states = 2

    def path(side: int, w: Word) -> list[RewriteStep]:
        steps = []
        while parents[side][w] is not None:
            prev, step = parents[side][w]
            steps.append(step)
            w = prev
        return steps[::-1]

    while depths[0] + depths[1] < budget.max_steps and frontiers[0] and frontiers[1]:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        mine, other = parents[side], parents[1 - side]
        layer: list[Word] = []
        for w in sorted(frontiers[side], key=word_key):
            for new, step in successors(w, basis, max_len, budget.match_cap):
                if new in mine:
                    continue
                mine[new] = (w, step)
                layer.append(new)
                states += 1
                if new in other:
                    steps = path(0, new) + [s.flipped() for s in reversed(path(1, new))]
                    trace = DerivationTrace(u, steps, v)
                    assert verify_trace(trace, basis), "search produced an invalid trace"
                    return trace
                if states > budget.max_states:
                    log.info("derivation budget exhausted after %d states", states)
                    return None
        frontiers[side][:] = layer
        depths[side] += 1
    return None


# -- relatively free objects -------------------------------------------------------


@dataclass(frozen=True)
class FreeObjectCaps:
    max_len: int = 8
    max_classes: int = 5000
    verify: bool = True


@dataclass
class FreeObjectResult:
    monoid: FiniteMonoid | None
    stable: bool
    caps: FreeObjectCaps
    letters: tuple[str, ...]
    representatives: list[Word] = field(default_factory=list)
    reason: str = ""
    _action: np.ndarray | None = None

    def element(self, w: Word) -> int:
        """Class of ``w`` (any length) in the free object."""
        if not self.stable:
            raise ValueError(f"free object is not stable: {self.reason}")
        col = {a: i for i, a in enumerate(self.letters)}
        cur = self.monoid.identity
        for a in w:
            cur = int(self._action[cur, col[a]])
        return cur

    def equal(self, u: Word, v: Word) -> bool:
        return self.element(u) == self.element(v)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        p = self.parent
        root = i
        while p[root] != root:
            root = p[root]
        while p[i] != root:
            p[i], i = root, p[i]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # smaller index (shortest, lexicographically least word) stays root
        if ra < rb:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb
        return True


def _instances(ident: Identity, alphabet: Sequence[str], max_len: int) -> Iterator[tuple[Word, Word]]:
    """All ``(σ(lhs), σ(rhs))`` over ``alphabet`` with both sides within ``max_len``."""
    letters = first_occurrence_order(ident.lhs + ident.rhs)
    cl = [ident.lhs.count(a) for a in letters]
    cr = [ident.rhs.count(a) for a in letters]
    words_by_len: dict[int, list[Word]] = {}

    def words_of(n: int) -> list[Word]:
        if n not in words_by_len:
            words_by_len[n] = list(product(sorted(alphabet), repeat=n))
        return words_by_len[n]

    def lengths(k: int, used_l: int, used_r: int, acc: list[int]) -> Iterator[list[int]]:
        if k == len(letters):
            yield list(acc)
            return
        n = 0
        while used_l + cl[k] * n <= max_len and used_r + cr[k] * n <= max_len:
            acc.append(n)
            yield from lengths(k + 1, used_l + cl[k] * n, used_r + cr[k] * n, acc)
            acc.pop()
            if cl[k] == 0 and cr[k] == 0:
                break
            n += 1

    for lens in lengths(0, 0, 0, []):
        for images in product(*(words_of(n) for n in lens)):
            sigma = dict(zip(letters, images))
            yield substitute(ident.lhs, sigma), substitute(ident.rhs, sigma)


def free_object(
    basis: Sequence[Identity], letters: Iterable[str], caps: FreeObjectCaps = FreeObjectCaps()
) -> FreeObjectResult:
    """Relatively free monoid of ``var(basis)`` on ``letters``.

    Words of length ``<= caps.max_len`` are merged along every instance of a
    basis identity and then closed under left and right multiplication by
    letters.  The result is *stable* when every class has a representative
    shorter than the cap (so products stay inside the enumerated words), the
    class count is under ``max_classes`` and, with ``verify``, the quotient is
    associative and satisfies every basis identity.  Under those conditions it
    is exactly the free object; otherwise no table is returned.
    """
    alphabet = tuple(sorted(set(letters)))
    L = caps.max_len
    words = [w for n in range(L + 1) for w in product(alphabet, repeat=n)]
    idx = {w: i for i, w in enumerate(words)}
    uf = _UnionFind(len(words))
    for ident in basis:
        for a, b in _instances(ident, alphabet, L):
            uf.union(idx[a], idx[b])
    changed = True
    while changed:
        changed = False
        for i, w in enumerate(words):
            if len(w) >= L:
                break
            r = words[uf.find(i)]
            if r == w:
                continue
            for a in alphabet:
                changed |= uf.union(idx[w + (a,)], idx[r + (a,)])
                changed |= uf.union(idx[(a,) + w], idx[(a,) + r])
    roots = sorted({uf.find(i) for i in range(len(words))})
    reps = [words[r] for r in roots]
    result = FreeObjectResult(None, False, caps, alphabet, reps)
    if len(roots) >= caps.max_classes:
        result.reason = f"{len(roots)} classes reach max_classes={caps.max_classes}"
        return result
    if any(len(r) >= L for r in reps):
        long = next(r for r in reps if len(r) >= L)
        result.reason = f"class of {render(long)} has no representative shorter than {L}"
        return result
    cls = {root: k for k, root in enumerate(roots)}
    action = np.empty((len(reps), len(alphabet)), dtype=np.int32)
    for k, r in enumerate(reps):
        for j, a in enumerate(alphabet):
            action[k, j] = cls[uf.find(idx[r + (a,)])]
    col = {a: j for j, a in enumerate(alphabet)}
    table = np.empty((len(reps), len(reps)), dtype=np.int32)
    for m, s in enumerate(reps):
        cur = np.arange(len(reps))
        for a in s:
            cur = action[cur, col[a]]
        table[:, m] = cur
    names = [render(r) for r in reps]
    zeros = [z for z in range(len(reps)) if (table[z] == z).all() and (table[:, z] == z).all()]
    monoid = FiniteMonoid(names, cls[uf.find(idx[EMPTY])], zeros[0] if zeros and len(reps) > 1 else None, table, words=reps)
    result.monoid, result._action = monoid, action
    if caps.verify:
        problems = validate(monoid)
        if problems:
            result.monoid = None
            result.reason = "quotient is not a monoid: " + problems[0]
            return result
        for ident in basis:
            if not satisfies(monoid, ident).holds:
                result.monoid = None
                result.reason = f"quotient violates {ident}; increase max_len"
                return result
    result.stable = True
    return result


class Verdict(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"


@lru_cache(maxsize=64)
def _cached_free_object(basis: tuple[Identity, ...], letters: tuple[str, ...], caps: FreeObjectCaps) -> FreeObjectResult:
    return free_object(basis, letters, caps)


def holds_in_variety(
    ident: Identity, basis: Sequence[Identity] | str, caps: FreeObjectCaps = FreeObjectCaps()
) -> Verdict:
    if ident.trivial:
        return Verdict.HOLDS
    if isinstance(basis, str):
        basis = preset_list(basis)
    letters = tuple(sorted(set(ident.lhs + ident.rhs)))
    fo = _cached_free_object(tuple(basis), letters, caps)
    if not fo.stable:
        return Verdict.UNKNOWN
    return Verdict.HOLDS if fo.equal(ident.lhs, ident.rhs) else Verdict.FAILS
