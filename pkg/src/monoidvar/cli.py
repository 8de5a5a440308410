"""Command-line driver: ``monoidvar <command> ...`` or ``python -m monoidvar``.

Exit codes: 0 success or "holds", 1 "fails", 2 unknown (budget ran out),
3 usage or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import acceptance
from .identities import (
    NAMED,
    VARIETIES,
    Identity,
    NotWellBalanced,
    UnknownPreset,
    claims_check,
    is_well_balanced,
    named,
    preset,
    preset_list,
    read_identities,
)
from .monoids import (
    MonoidSchemaError,
    deserialize,
    idempotents,
    idempotents_commute,
    is_aperiodic,
    parse_monoid_text,
    rees_quotient,
    satisfies,
    saturate_j_generator,
    serialize,
    tau_quotient,
    validate,
)
from .reductions import OutsideJoin, TauSearchBudget, phi_basis, subvariety_basis, tau_term_violation, well_balance
from .rewrite import (
    FreeObjectCaps,
    SearchBudget,
    derivable,
    free_object,
    load_trace,
    trace_to_dict,
    verify_trace,
)
from .words import (
    WordSyntaxError,
    content,
    decompose,
    divider_query,
    last_divider,
    parse_word,
    reduce,
    render,
    simple_letters,
    multiple_letters,
)

OK, FALSE, UNKNOWN, USAGE = 0, 1, 2, 3
CACHE_ENV = "MONOIDVAR_CACHE"
SEPARATORS = ("==", "≈", "~", "=")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- input helpers -------------------------------------------------------------------


def _identity(text: str) -> Identity:
    """Identity text ``u == v`` or a preset handle such as ``ID-C`` or ``alpha_2``."""
    text = text.strip()
    if text in NAMED or text.startswith("dual:") or not any(sep in text for sep in SEPARATORS):
        got = preset(text)
        if isinstance(got, list):
            raise UsageError(f"{text} names a basis, not a single identity")
        return got
    return Identity.parse(text)


def _identities(args) -> list[Identity]:
    ids = [_identity(t) for t in (args.id or [])]
    if getattr(args, "ids_file", None):
        ids += read_identities(Path(args.ids_file).read_text().splitlines())
    return ids


def _basis(items: list[str] | None) -> list[Identity]:
    """Each item is a preset name (``O``, ``J:3``), a handle, identity text or a file."""
    out: list[Identity] = []
    for item in items or []:
        for part in [item] if "==" in item else item.split(","):
            part = part.strip()
            if Path(part).is_file():
                out += read_identities(Path(part).read_text().splitlines())
            elif part in NAMED or not any(sep in part for sep in SEPARATORS):
                out += preset_list(part)
            else:
                out.append(Identity.parse(part))
    return out


def _cache_path(text: str) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    return Path(root) / f"monoid-{digest}.json"


def load_monoid(text: str):
    """A JSON file path, or an inline constructor cached under ``$MONOIDVAR_CACHE``."""
    if Path(text).is_file():
        return deserialize(Path(text).read_text())
    cache = _cache_path(text)
    if cache is not None and cache.is_file():
        return deserialize(cache.read_text())
    M = parse_monoid_text(text)
    if cache is not None:
        cache.parent.mkdir(parents=True, exist_ok=True)
        cache.write_text(serialize(M))
    return M


def _budget(args) -> SearchBudget:
    base = SearchBudget()
    return SearchBudget(
        max_word_len=args.max_len,
        max_steps=args.max_steps if args.max_steps is not None else base.max_steps,
        max_states=args.max_states if args.max_states is not None else base.max_states,
    )


def _monoid_summary(M) -> dict:
    return {
        "size": len(M),
        "problems": validate(M),
        "aperiodic": is_aperiodic(M),
        "idempotents": sorted(M.name(i) for i in idempotents(M)),
        "idempotents_commute": idempotents_commute(M),
    }


# -- commands --------------------------------------------------------------------------


def cmd_analyze(args):
    w = parse_word(args.word)
    d = decompose(w)
    letters = {}
    for x in sorted(content(w)):
        info = {"occurrences": w.count(x), "h1": divider_query(w, x, 1).name, "t": last_divider(w, x).name}
        if w.count(x) >= 2:
            info["h2"] = divider_query(w, x, 2).name
        letters[x] = info
    return OK, {
        "word": render(w),
        "length": len(w),
        "simple": sorted(simple_letters(w)),
        "multiple": sorted(multiple_letters(w)),
        "dividers": list(d.dividers),
        "blocks": [render(b) for b in d.blocks],
        "reduced": render(reduce(w)),
        "letters": letters,
    }


def cmd_fve(args):
    ident = _identity(args.id)
    c = claims_check(ident)
    holds = ident.trivial or c.holds
    return (OK if holds else FALSE), {"identity": str(ident), "holds": holds, "failures": c.failures()}


def _build_out(M, args, extra):
    out = {**extra, **_monoid_summary(M)}
    if args.out:
        Path(args.out).write_text(serialize(M))
        out["written"] = args.out
    return (OK if not out["problems"] else FALSE), out


def cmd_rees(args):
    W = [parse_word(w) for w in args.words]
    return _build_out(rees_quotient(W), args, {"words": [render(w) for w in W]})


def cmd_tau_rees(args):
    if args.saturate:
        k, l = (int(v) for v in args.saturate.split(","))
        W, stable = saturate_j_generator(k, l)
        extra = {"saturate": [k, l], "stabilized": stable, "words": len(W)}
    elif args.words:
        W = {parse_word(w) for w in args.words}
        extra = {"words": len(W)}
    else:
        raise UsageError("give reduced words or --saturate K,L")
    return _build_out(tau_quotient(W), args, extra)


def cmd_check(args):
    M = load_monoid(args.monoid)
    ids = _identities(args) + _basis(args.preset)
    if not ids:
        raise UsageError("nothing to check: give --id, --ids-file or --preset")
    results = []
    for ident in ids:
        r = satisfies(M, ident)
        results.append({
            "identity": ident.label or str(ident),
            "holds": r.holds,
            "witness": r.witness_names(M),
            "checked": r.checked,
        })
    holds = all(r["holds"] for r in results)
    return (OK if holds else FALSE), {"monoid": args.monoid, "size": len(M), "holds": holds, "results": results}


def cmd_derive(args):
    basis = _basis(args.basis)
    u, v = parse_word(args.src), parse_word(args.dst)
    tr = derivable(u, v, basis, _budget(args))
    if tr is None:
        return UNKNOWN, {"from": render(u), "to": render(v), "status": "unknown", "trace": None}
    return OK, {
        "from": render(u),
        "to": render(v),
        "status": "derived",
        "length": len(tr),
        "words": [render(w) for w in tr.words()],
        "trace": trace_to_dict(tr),
    }


def cmd_verify_trace(args):
    trace, allowed = load_trace(args.path)
    if args.allow:
        allowed = _basis(args.allow)
    if allowed is None:
        raise UsageError("the trace file lists no allowed identities; pass --allow")
    res = verify_trace(trace, allowed)
    return (OK if res else FALSE), {
        "title": trace.title,
        "ok": res.ok,
        "steps": len(trace),
        "failed_step": res.failed_step,
        "reason": res.reason,
    }


def cmd_free_object(args):
    basis = _basis(args.basis)
    letters = parse_word(args.letters)
    caps = FreeObjectCaps(max_len=args.max_len or FreeObjectCaps.max_len, max_classes=args.max_classes)
    fo = free_object(basis, letters, caps)
    out = {"letters": list(letters), "stable": fo.stable, "classes": len(fo.representatives), "reason": fo.reason}
    if args.show:
        out["representatives"] = [render(w) for w in fo.representatives]
    code = OK if fo.stable else UNKNOWN
    if args.id and fo.stable:
        ident = _identity(args.id)
        out["identity"] = str(ident)
        out["holds"] = fo.equal(ident.lhs, ident.rhs)
        code = OK if out["holds"] else FALSE
    return code, out


def cmd_balance(args):
    ident = _identity(args.id)
    res = well_balance(ident)
    return OK, {
        "input": str(ident),
        "identity": str(res.identity),
        "used_D": res.used_D,
        "repairs": [list(r) for r in res.repairs],
    }


def cmd_phi_basis(args):
    ident = _identity(args.id)
    if not is_well_balanced(ident)[0]:
        ident = well_balance(ident).identity
    res = phi_basis(ident, args.max_steps)
    return (OK if res.complete else UNKNOWN), {
        "identity": str(ident),
        "complete": res.complete,
        "members": [str(m) for m in res.members],
        "steps": [
            {"block": s.block, "x": s.x, "y": s.y, "case": s.case, "mirrored": s.mirrored,
             "member": str(s.member) if s.member else None, "after": render(s.after)}
            for s in res.steps
        ],
    }


def cmd_subvariety_basis(args):
    res = subvariety_basis(_identities(args), args.max_steps)
    return (OK if res.complete else UNKNOWN), {
        "complete": res.complete,
        "used_D": res.used_D,
        "members": [str(m) for m in res.members],
        "basis": [{"identity": i.label or str(i), "formula": str(i)} for i in res.identities],
    }


def cmd_tau_witness(args):
    w = parse_word(args.word)
    M = load_monoid(args.monoid)
    budget = TauSearchBudget(max_len=args.max_len, extra_letters=args.extra_letters)
    found = tau_term_violation(w, M, budget)
    if found is None:
        return UNKNOWN, {"word": render(w), "witness": None, "status": "none found within budget"}
    return OK, {"word": render(w), "witness": render(found), "status": "found"}


def cmd_presets(args):
    if args.name:
        ids = preset_list(args.name)
        return OK, {"name": args.name, "identities": [{"identity": i.label or str(i), "formula": str(i)} for i in ids]}
    return OK, {
        "identities": {h: str(named(h)) for h in NAMED},
        "varieties": {v: list(hs) for v, hs in VARIETIES.items()},
        "families": ["alpha_N", "beta_N", "gamma_N", "gamma'_N"],
        "other": ["J", "J:N", "dual:NAME"],
    }


def cmd_accept(args):
    only = {int(n) for n in args.only.split(",")} if args.only else None
    results = acceptance.run(only)
    if args.format == "text":
        for r in results:
            print(r.line())
        passed = sum(r.passed for r in results)
        print(f"{passed}/{len(results)} criteria passed")
        return (OK if passed == len(results) else FALSE), None
    return (OK if all(r.passed for r in results) else FALSE), {
        "criteria": [
            {"number": r.number, "title": r.title, "passed": r.passed, "seconds": round(r.seconds, 3),
             "limit": r.limit, "detail": r.detail}
            for r in results
        ]
    }


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    search = _Parser(add_help=False)
    search.add_argument("--max-steps", type=int, default=None)
    search.add_argument("--max-len", type=int, default=None)
    search.add_argument("--max-states", type=int, default=None)

    p = _Parser(prog="monoidvar", description="Words, identities and finite monoids for varieties of aperiodic monoids.")
    p.add_argument("--format", choices=("json", "text"), default="text")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help, parents=()):
        sp = sub.add_parser(name, help=help, parents=[common, *parents])
        sp.set_defaults(func=func)
        return sp

    sp = add("analyze", cmd_analyze, "decomposition and reduced form of a word")
    sp.add_argument("word")

    sp = add("fve", cmd_fve, "does an identity hold in F∨E")
    sp.add_argument("--id", required=True)

    for name, func in (("rees", cmd_rees), ("tau-rees", cmd_tau_rees)):
        sp = add(name, func, f"build {'S' if name == 'rees' else 'S_tau'}(W) and report its structure")
        sp.add_argument("words", nargs="*" if name == "tau-rees" else "+")
        sp.add_argument("--out", help="write the monoid as JSON")
        if name == "tau-rees":
            sp.add_argument("--saturate", metavar="K,L", help="use the reduced factors of xzyx^k t y^l")

    sp = add("check", cmd_check, "brute-force satisfaction of identities in a monoid")
    sp.add_argument("--monoid", required=True, help="S(w1,..), Stau(saturate:k,l), Stau(w1,..) or a JSON file")
    sp.add_argument("--id", action="append")
    sp.add_argument("--ids-file")
    sp.add_argument("--preset", action="append", help="check a whole basis, e.g. J")

    sp = add("derive", cmd_derive, "bounded search for a rewrite chain", [search])
    sp.add_argument("--basis", action="append", required=True)
    sp.add_argument("--from", dest="src", required=True)
    sp.add_argument("--to", dest="dst", required=True)

    sp = add("verify-trace", cmd_verify_trace, "check a JSON rewrite chain")
    sp.add_argument("path")
    sp.add_argument("--allow", action="append", help="override the allowed identities")

    sp = add("free-object", cmd_free_object, "relatively free monoid of a basis on a few letters")
    sp.add_argument("--basis", action="append", required=True)
    sp.add_argument("--letters", default="xy")
    sp.add_argument("--max-len", type=int, default=None)
    sp.add_argument("--max-classes", type=int, default=FreeObjectCaps.max_classes)
    sp.add_argument("--id", help="also decide this identity")
    sp.add_argument("--show", action="store_true", help="list class representatives")

    sp = add("balance", cmd_balance, "well-balanced form of an F∨E identity")
    sp.add_argument("--id", required=True)

    sp = add("phi-basis", cmd_phi_basis, "Phi members equivalent to an identity within O")
    sp.add_argument("--id", required=True)
    sp.add_argument("--max-steps", type=int, default=None)

    sp = add("subvariety-basis", cmd_subvariety_basis, "finite basis of a subvariety of O")
    sp.add_argument("--id", action="append")
    sp.add_argument("--ids-file")
    sp.add_argument("--max-steps", type=int, default=None)

    sp = add("tau-witness", cmd_tau_witness, "search for w' with M |= w == w' and r(w) != r(w')")
    sp.add_argument("--word", required=True)
    sp.add_argument("--monoid", required=True)
    sp.add_argument("--max-len", type=int, default=None)
    sp.add_argument("--extra-letters", type=int, default=1)

    sp = add("presets", cmd_presets, "list named identities and variety bases")
    sp.add_argument("name", nargs="?")

    sp = add("accept", cmd_accept, "run the acceptance criteria")
    sp.add_argument("--only", help="comma-separated criterion numbers")
    return p


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))
        return
    width = max((len(k) for k in payload), default=0)
    for key, value in payload.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, ensure_ascii=False)
        print(f"{key:<{width}}  {value}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    fmt = "text"
    try:
        args = parser.parse_args(argv)
        fmt = args.format
        code, payload = args.func(args)
    except (UsageError, WordSyntaxError, UnknownPreset, NotWellBalanced, OutsideJoin,
            MonoidSchemaError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, (UsageError, UnknownPreset)) and exc.args else str(exc)
        if isinstance(exc, UnknownPreset):
            msg = f"unknown preset {msg!r}"
        err = {"error": msg}
        if isinstance(exc, WordSyntaxError):
            err["position"] = exc.position
        if fmt == "json":
            print(json.dumps(err, sort_keys=True, ensure_ascii=False))
        else:
            print(f"error: {msg}", file=sys.stderr)
        return USAGE
    if payload is not None:
        _emit(payload, fmt)
    return code


if __name__ == "__main__":
    sys.exit(main())
