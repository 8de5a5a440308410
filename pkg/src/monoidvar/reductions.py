"""Reduction of identities inside O to well-balanced form and to the Phi basis.

``well_balance`` repairs per-block letter counts, ``phi_basis`` walks the
invertibility chain of a well-balanced identity and names the Phi member
needed at each swap, and ``subvariety_basis`` chains the two.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import chain, count
from typing import Iterable, Sequence

from .identities import (
    Identity,
    NotWellBalanced,
    aligned_decompositions,
    claims_check,
    family,
    fve_holds,
    is_well_balanced,
    named,
    parse_family_handle,
    preset_list,
)
from .monoids import FiniteMonoid, satisfies
from .words import Decomposition, Word, all_words, content, tau_equiv

log = logging.getLogger(__name__)

PHI_NAMED = ("ID-C", "ID-K", "ID-L")


class OutsideJoin(ValueError):
    """The identity fails in F∨E, so the variety it defines misses E or F."""


# -- well-balancing ------------------------------------------------------------------


@dataclass(frozen=True)
class BalancedReductionResult:
    identity: Identity
    used_D: bool
    repairs: tuple[tuple[str, int, str], ...] = ()  # (letter, block, "pad" | "append")


def _repair(u: Word, v: Word, x: str, k: int) -> tuple[Word, str]:
    """Raise the count of ``x`` in block ``k`` of ``u`` to that of ``v``."""
    du, dv = aligned_decompositions(Identity(u, v))
    need = dv.blocks[k].count(x) - du.blocks[k].count(x)
    before = du.prefix(k)
    block = list(du.blocks[k])
    if x in block:
        # pad an occurrence that already has an x somewhere to its left
        for j, a in enumerate(block):
            if a == x and (x in before or x in block[:j]):
                block[j:j + 1] = [x] * (need + 1)
                kind = "pad"
                break
        else:
            raise OutsideJoin(f"no earlier occurrence of {x} to pad in block {k}")
    else:
        block += [x] * dv.blocks[k].count(x)
        kind = "append"
    blocks = du.blocks[:k] + (tuple(block),) + du.blocks[k + 1:]
    return Decomposition(du.dividers, blocks).reassemble(), kind


def well_balance(ident: Identity) -> BalancedReductionResult:
    """Pad blocks until every letter has the same count in aligned blocks.

    Repairs go one at a time: the first unbalanced letter, then its first
    unbalanced block.  Padding inside a block uses ID-A; appending a letter to a
    block that lacks it needs ID-D, which is reported through ``used_D``.
    """
    if not fve_holds(ident):
        raise OutsideJoin(
            f"{ident} fails in F∨E ({'; '.join(claims_check(ident).failures())}); "
            "such a variety lies in K or in dual:K (see presets K, Q)"
        )
    u, v = ident.lhs, ident.rhs
    repairs = []
    used_D = False
    while True:
        ok, offender = is_well_balanced(Identity(u, v))
        if ok:
            break
        x, k = offender
        du, dv = aligned_decompositions(Identity(u, v))
        if du.blocks[k].count(x) < dv.blocks[k].count(x):
            u, kind = _repair(u, v, x, k)
        else:
            v, kind = _repair(v, u, x, k)
        used_D |= kind == "append"
        repairs.append((x, k, kind))
        log.debug("balance %s in block %d by %s", x, k, kind)
    out = ident if not repairs else Identity(u, v, ident.label)
    return BalancedReductionResult(out, used_D, tuple(repairs))


# -- the Phi basis -------------------------------------------------------------------


@dataclass(frozen=True)
class PhiMember:
    """A member of Phi: ID-C, ID-K, ID-L, or ``alpha_n``, ``beta_n``,
    ``gamma_n``, ``gamma'_n``."""

    handle: str

    def __post_init__(self):
        if self.handle in PHI_NAMED:
            return
        fam = parse_family_handle(self.handle)
        if fam is None or fam[1] < 1:
            raise ValueError(f"{self.handle!r} is not a Phi member")
        object.__setattr__(self, "handle", f"{fam[0]}_{fam[1]}")

    @property
    def family(self) -> tuple[str, int] | None:
        return parse_family_handle(self.handle) if self.handle not in PHI_NAMED else None

    @property
    def identity(self) -> Identity:
        fam = self.family
        return named(self.handle) if fam is None else family(*fam)

    def __str__(self) -> str:
        return self.handle


@dataclass(frozen=True)
class PhiStep:
    """One swap of the chain and the case that handled it."""

    block: int
    x: str
    y: str
    mirrored: bool  # roles of x and y exchanged
    case: str
    member: PhiMember | None
    before: Word
    after: Word


@dataclass
class PhiBasisResult:
    members: list[PhiMember]
    steps: list[PhiStep] = field(default_factory=list)
    complete: bool = True

    def identities(self) -> list[Identity]:
        return [m.identity for m in self.members]

    def cases(self) -> list[str]:
        return [s.case for s in self.steps]


def _label_runs(blocks: Sequence[Word], pair: tuple[str, str]) -> list[str] | None:
    """Compressed sequence of which letter of ``pair`` each later block holds.

    ``None`` if some block holds both (the ``.1`` subcases)."""
    out: list[str] = []
    for b in blocks:
        hit = [a for a in pair if a in b]
        if len(hit) == 2:
            return None
        if hit and (not out or out[-1] != hit[0]):
            out.append(hit[0])
    return out


def _classify(dv: Decomposition, i: int, lead: Word, a: Word, b: Word, x: str, y: str):
    """Return ``(mirrored, case, member)`` for the swap ``xy -> yx`` in block ``i``.

    ``lead`` is ``v'`` (everything before ``a`` in the word).
    """
    ctx = content(lead + a + b)
    if x in ctx and y in ctx:
        return False, "0", None
    # the proof handles y outside the context and gets the rest by symmetry
    mirrored = y in ctx
    X, Y = (y, x) if mirrored else (x, y)
    in_front, in_b = X in content(lead + a), X in content(b)
    if in_front and in_b:
        return mirrored, "0", None
    runs = _label_runs(dv.blocks[i + 1:], (X, Y))
    if not in_front and not in_b:
        if runs is None:
            return mirrored, "1.1", PhiMember("ID-C")
        return mirrored, "1.2", PhiMember(f"alpha_{len(runs) - 1}")
    if in_b:
        if runs is None:
            return mirrored, "2.1", PhiMember("ID-K")
        if runs and runs[0] == X:
            runs = runs[1:]
        return mirrored, "2.2", PhiMember(f"beta_{len(runs)}")
    if runs is None:
        return mirrored, "3.1", PhiMember("ID-L")
    if runs[0] == X:
        return mirrored, "3.2", PhiMember(f"gamma_{len(runs) - 1}")
    return mirrored, "3.2", PhiMember(f"gamma'_{len(runs)}")


def phi_basis(ident: Identity, max_steps: int | None = None) -> PhiBasisResult:
    """Phi members that, with O, define the same variety as ``ident``.

    Each round finds the first block where the current right side ``v`` differs
    from ``u``, swaps the letter ``x`` that ``u`` wants next one place left in
    ``v`` and records which member justifies that swap.  Stops with
    ``complete=False`` after ``max_steps`` swaps.
    """
    ok, offender = is_well_balanced(ident)
    if not ok:
        raise NotWellBalanced(f"{ident} is not well-balanced at {offender}")
    u, v = ident.lhs, ident.rhs
    du = aligned_decompositions(ident)[0]
    members: list[PhiMember] = []
    steps: list[PhiStep] = []
    for n in count():
        if v == u:
            return PhiBasisResult(members, steps, True)
        if max_steps is not None and n >= max_steps:
            log.info("phi_basis stopped after %d swaps", n)
            return PhiBasisResult(members, steps, False)
        dv = aligned_decompositions(Identity(u, v))[1]
        i = next(j for j, (bu, bv) in enumerate(zip(du.blocks, dv.blocks)) if bu != bv)
        ui, vi = du.blocks[i], dv.blocks[i]
        lp = next(j for j in range(len(ui)) if ui[j] != vi[j])
        x = ui[lp]
        jx = vi.index(x, lp)
        y = vi[jx - 1]
        lead = dv.prefix(i) + vi[:lp]
        a, b = vi[lp:jx - 1], vi[jx + 1:]
        mirrored, case, member = _classify(dv, i, lead, a, b, x, y)
        w = lead + a + (x, y) + b + dv.suffix(i)
        steps.append(PhiStep(i, x, y, mirrored, case, member, v, w))
        log.debug("block %d swap %s%s: case %s%s -> %s", i, y, x, case,
                  " (mirrored)" if mirrored else "", member)
        if member is not None and member not in members:
            members.append(member)
        v = w
    raise AssertionError("unreachable")


# -- bases for subvarieties of O -------------------------------------------------------


@dataclass
class SubvarietyBasis:
    identities: list[Identity]
    members: list[PhiMember]
    used_D: bool
    complete: bool = True


def _minimize(members: Iterable[PhiMember]) -> list[PhiMember]:
    """Within each family keep only the least index; later ones follow from it."""
    best: dict[str, int] = {}
    for m in members:
        if m.family:
            kind, n = m.family
            best[kind] = min(n, best.get(kind, n))
    out = []
    for m in members:
        if m.family and m.family[1] != best[m.family[0]]:
            continue
        if m not in out:
            out.append(m)
    return out


def subvariety_basis(ids: Iterable[Identity], max_steps: int | None = None) -> SubvarietyBasis:
    """A finite basis of the subvariety of O defined by ``ids``.

    Every input must hold in F∨E; ``complete`` is false if some chain walk ran
    out of ``max_steps``.
    """
    ids = list(ids)
    for ident in ids:
        if not fve_holds(ident):
            raise OutsideJoin(
                f"{ident} fails in F∨E; the variety then lies in K or dual:K, "
                "whose bases are the presets K and Q"
            )
    used_D = False
    complete = True
    found: list[PhiMember] = []
    for ident in ids:
        bal = well_balance(ident)
        used_D |= bal.used_D
        res = phi_basis(bal.identity, max_steps)
        complete &= res.complete
        found += [m for m in res.members if m not in found]
    members = _minimize(found)
    basis = preset_list("O")
    if used_D:
        basis.append(named("ID-D"))
    basis += [m.identity for m in members]
    return SubvarietyBasis(basis, members, used_D, complete)


# -- tau-term violations ----------------------------------------------------------------


@dataclass(frozen=True)
class TauSearchBudget:
    max_len: int | None = None  # default: |w| + 2
    extra_letters: int = 1


def _fresh(used: set[str], k: int) -> list[str]:
    out = []
    for name in chain("xyztsrqpwvu", (f"z{n}" for n in count(1))):
        if len(out) == k:
            break
        if name not in used:
            out.append(name)
    return out


def tau_term_violation(
    w: Word, M: FiniteMonoid, budget: TauSearchBudget = TauSearchBudget()
) -> Word | None:
    """First word ``w'`` (shortest, then lexicographic) with ``M ⊨ w ≈ w'`` but
    ``r(w) != r(w')``; ``None`` means nothing was found within the budget.

    Candidates use every letter of ``w`` plus at most ``extra_letters`` fresh
    letters.
    """
    base = content(w)
    alphabet = sorted(base) + _fresh(set(base), budget.extra_letters)
    max_len = budget.max_len if budget.max_len is not None else len(w) + 2
    for cand in all_words(alphabet, max_len, min_len=len(base)):
        if not base <= content(cand) or tau_equiv(w, cand):
            continue
        if satisfies(M, Identity(w, cand)).holds:
            return cand
    return None

