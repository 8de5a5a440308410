"""Write the shipped rewrite chains to src/monoidvar/data/traces/.

Each chain is a concrete instance of a hand derivation; every step names its
identity, direction, substitution and position, and the file lists exactly the
identities the chain may use.  Run with ``--check`` to verify without writing.
"""

import argparse
import sys
from pathlib import Path

from monoidvar.identities import Identity, named
from monoidvar.rewrite import DerivationTrace, dump_trace, make_step, verify_trace
from monoidvar.words import parse_word as W

OUT = Path(__file__).resolve().parent.parent / "src" / "monoidvar" / "data" / "traces"


def step(ident, direction, sigma, pos):
    return make_step(ident, direction, {a: W(v) for a, v in sigma.items()}, pos)


def chains():
    A, E, G, H, I = (named(h) for h in ("ID-A", "ID-E", "ID-G", "ID-H", "ID-I"))

    # xyx == x^p y x^q with p = q = 2, plus x^2 == x^3, gives xyx == xyx^2
    hyp = Identity.parse("xyx == x^2yx^2", "xyx=x2yx2")
    yield "power_shift", [hyp, G], DerivationTrace(W("xyx"), [
        step(hyp, "lr", {"x": "x", "y": "y"}, 0),
        step(G, "lr", {"x": "x"}, 3),
        step(hyp, "rl", {"x": "x", "y": "y"}, 0),
    ], W("xyx^2"), "xyx == x^2yx^2 and x^2 == x^3 give xyx == xyx^2")

    hyp = named("x2y=x2yx2")
    yield "square_absorbs_tail", [hyp, A], DerivationTrace(W("x^2y"), [
        step(hyp, "lr", {"x": "x", "y": "y"}, 0),
        step(A, "rl", {"x": "x", "y": "xy"}, 0),
    ], W("x^2yx"), "x^2y == x^2yx^2 gives x^2y == x^2yx")

    hyp = named("xyx2=x2yx2")
    yield "square_prefix_collapse", [hyp, A], DerivationTrace(W("x^2yx"), [
        step(A, "lr", {"x": "x", "y": "xy"}, 0),
        step(hyp, "rl", {"x": "x", "y": "y"}, 0),
        step(A, "rl", {"x": "x", "y": "y"}, 0),
    ], W("xyx"), "xyx^2 == x^2yx^2 gives x^2yx == xyx")

    # v1 v2 a v3 -> v1 a v2 a v3 with v1 = ay, v2 = xy, v3 = x; the last letter
    # of v2 already occurs to its left, so ID-H moves it past a
    hyp = Identity.parse("ayxayx == ayaxayx", "shorter instance")
    yield "move_letter_left_shared", [H, hyp], DerivationTrace(W("ayxyax"), [
        step(H, "rl", {"x": "a", "t": "1", "y": "y", "z": "x"}, 0),
        step(hyp, "lr", {"a": "a", "y": "y", "x": "x"}, 0),
        step(H, "lr", {"x": "a", "t": "1", "y": "y", "z": "ax"}, 0),
    ], W("ayaxyax"), "ayxyax == ayaxyax via ID-H and a shorter instance")

    # same move with v1 = a, v2 = yx, v3 = xy; the last letter of v2 is new
    # to the left, so ID-E is used instead
    hyp = Identity.parse("aayaxaxy == ayaxaxy", "shorter instance")
    yield "move_letter_left_fresh", [E, hyp], DerivationTrace(W("ayxaxy"), [
        step(E, "rl", {"x": "a", "z": "y", "y": "x", "t": "1"}, 0),
        step(hyp, "rl", {"a": "a", "y": "y", "x": "x"}, 0),
        step(E, "lr", {"x": "a", "z": "ay", "y": "x", "t": "1"}, 0),
    ], W("aayxaxy"), "ayxaxy == aayxaxy via ID-E and a shorter instance")

    # v1 v2 == v1 x1..xn with v1 = xy, v2 = yxy
    yield "sort_second_occurrences", [H, A], DerivationTrace(W("xyyxy"), [
        step(H, "lr", {"x": "x", "t": "1", "y": "y", "z": "y"}, 0),
        step(A, "rl", {"x": "y", "y": "1"}, 1),
    ], W("xy^2x"), "xy.yxy == xy.yx via ID-H then ID-A")

    yield "insert_before_divider", [A, I], DerivationTrace(W("xyxztx"), [
        step(A, "lr", {"x": "x", "y": "y"}, 0),
        step(A, "lr", {"x": "x", "y": "yx^2zt"}, 0),
        step(I, "lr", {"x": "x", "y": "z", "z": "t"}, 2),
        step(A, "rl", {"x": "x", "y": "yx^2zxt"}, 0),
        step(A, "rl", {"x": "x", "y": "y"}, 0),
    ], W("xyxzxtx"), "ID-A and ID-I give xyxztx == xyxzxtx")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--check", action="store_true", help="verify only")
    args = ap.parse_args(argv)
    bad = 0
    for name, allowed, trace in chains():
        res = verify_trace(trace, allowed)
        print(f"{name:28s} {'ok' if res else 'FAILED: ' + res.reason}")
        bad += not res
        if res and not args.check:
            OUT.mkdir(parents=True, exist_ok=True)
            (OUT / f"{name}.json").write_text(dump_trace(trace, allowed))
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
