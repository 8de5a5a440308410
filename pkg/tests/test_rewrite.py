import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from monoidvar.identities import Identity, fve_holds, named, preset_list
from monoidvar.monoids import rees_quotient, satisfies
from monoidvar.rewrite import (
    LR,
    RL,
    DerivationTrace,
    FreeObjectCaps,
    SearchBudget,
    StepError,
    Verdict,
    apply_step,
    derivable,
    dump_trace,
    free_object,
    golden_traces,
    holds_in_variety,
    make_step,
    match_pattern,
    successors,
    trace_from_dict,
    trace_to_dict,
    verify_trace,
)
from monoidvar.words import EMPTY, all_words, substitute, word
from strategies import words

I = Identity.parse


# -- matching --------------------------------------------------------------------------


def _pairs(res):
    return {(tuple(sorted(m.sigma.items())), m.position) for m in res}


def test_match_square():
    got = _pairs(match_pattern(word("x^2"), word("aabb")))
    assert ((("x", ("a",)),), 0) in got
    assert ((("x", ("b",)),), 2) in got
    # ab·ab is not a factor of aabb
    assert all(s != (("x", ("a", "b")),) for s, _ in got)


def test_match_with_empty_images():
    got = _pairs(match_pattern(word("xyx"), word("aba")))
    assert ((("x", ("a",)), ("y", ("b",))), 0) in got
    assert ((("x", ()), ("y", ("a", "b", "a"))), 0) in got
    assert _pairs(match_pattern(word("x"), EMPTY)) == {((("x", ()),), 0)}


def test_match_order_and_truncation():
    res = match_pattern(word("xyx"), word("aba"))
    positions = [m.position for m in res]
    assert positions == sorted(positions)
    cut = match_pattern(word("xyz"), word("abcabc"), cap=3)
    assert cut.truncated and len(cut) == 3


def test_match_respects_bound_letters():
    res = match_pattern(word("xy"), word("abab"), bound={"x": word("ab")})
    assert {m.position for m in res} == {0, 2}
    assert all(m.sigma["x"] == word("ab") for m in res)


@given(words("xy", 3), words("ab", 6))
@settings(max_examples=80)
def test_every_match_is_a_real_occurrence(pattern, target):
    for m in match_pattern(pattern, target):
        img = substitute(pattern, m.sigma)
        assert target[m.position : m.end] == img


@given(words("xy", 3, min_size=1), st.dictionaries(st.sampled_from("xy"), words("ab", 2), min_size=2), words("ab", 3), words("ab", 3))
@settings(max_examples=80)
def test_planted_occurrence_is_found(pattern, sigma, pre, post):
    target = pre + substitute(pattern, sigma) + post
    found = _pairs(match_pattern(pattern, target))
    key = tuple(sorted((a, sigma[a]) for a in set(pattern)))
    assert (key, len(pre)) in found


# -- rewrite steps ------------------------------------------------------------------------


def test_apply_step_examples():
    b = make_step(named("ID-B"), LR, {"x": word("a"), "y": word("b")}, 0)
    assert apply_step(word("a^2b^2"), b) == word("b^2a^2")
    e = make_step(named("ID-E"), LR, {a: (a,) for a in "xzyt"}, 0)
    assert apply_step(word("xzxyxty"), e) == word("xzyxty")
    e0 = make_step(named("ID-E"), LR, {"x": word("x"), "z": word("z")}, 0)
    assert apply_step(word("xzx^2"), e0) == word("xzx")


def test_apply_step_errors():
    step = make_step(named("ID-B"), LR, {"x": word("a"), "y": word("b")}, 1)
    with pytest.raises(StepError):
        apply_step(word("a^2b^2"), step)
    with pytest.raises(StepError):
        apply_step(word("a"), make_step(named("ID-B"), LR, {}, 5))


@given(words("abc", 7), st.integers(0, 10**6))
@settings(max_examples=80)
def test_steps_are_reversible(w, seed):
    basis = preset_list("O") + [named("ID-A")]
    succ = list(successors(w, basis, len(w) + 3))
    if not succ:
        return
    new, step = random.Random(seed).choice(succ)
    assert apply_step(w, step) == new
    back = make_step(step.identity, RL if step.direction == LR else LR, step.sigma, step.position)
    assert apply_step(new, back) == w
    assert step.flipped() == back


# -- derivations ------------------------------------------------------------------------------


def test_derivable_examples():
    E = [named("ID-E")]
    t = derivable(word("xzx^2"), word("xzx"), E)
    assert t is not None and len(t) == 1 and verify_trace(t, E)
    t = derivable(word("x^3"), word("x^2"), E)
    assert t is not None and len(t) == 1
    assert len(derivable(word("xy"), word("xy"), [])) == 0


def test_derivable_reports_unknown_when_out_of_budget():
    F = preset_list("F")
    assert derivable(word("xy"), word("yx"), F, SearchBudget(max_steps=4)) is None
    ident = named("ID-C")
    assert derivable(ident.lhs, ident.rhs, preset_list("O"), SearchBudget(max_steps=1)) is None


def test_verify_trace_golden_chains():
    traces = golden_traces()
    assert len(traces) == 7
    for name, (trace, allowed) in traces.items():
        assert verify_trace(trace, allowed), name


@pytest.mark.parametrize("name", sorted(golden_traces()))
def test_removing_an_identity_breaks_the_chain(name):
    trace, allowed = golden_traces()[name]
    first = trace.steps[0].identity
    check = verify_trace(trace, [i for i in allowed if i != first])
    assert not check and check.failed_step == 0


def test_verify_trace_reports_wrong_end_and_bad_position():
    trace, allowed = golden_traces()["square_absorbs_tail"]
    wrong_end = DerivationTrace(trace.start, trace.steps, word("xy"))
    assert verify_trace(wrong_end, allowed).failed_step == len(trace.steps)
    step = trace.steps[0]
    moved = make_step(step.identity, step.direction, step.sigma, step.position + 1)
    bad = DerivationTrace(trace.start, [moved] + trace.steps[1:], trace.end)
    assert verify_trace(bad, allowed).failed_step == 0


def test_trace_json_round_trip():
    for trace, allowed in golden_traces().values():
        back, back_allowed = trace_from_dict(json.loads(dump_trace(trace, allowed)))
        assert back == trace and back_allowed == allowed
    t = derivable(word("x^3"), word("x^2"), [named("ID-E")])
    back, none = trace_from_dict(trace_to_dict(t))
    assert back == t and none is None


def test_trace_from_dict_rejects_bad_direction():
    data = trace_to_dict(golden_traces()["power_shift"][0])
    data["steps"][0]["direction"] = "up"
    with pytest.raises(ValueError):
        trace_from_dict(data)


# -- free objects ------------------------------------------------------------------------------


def test_free_object_examples():
    e = free_object(preset_list("E"), ["x"])
    assert e.stable and len(e.monoid) == 3
    assert e.equal(word("x^3"), word("x^2")) and not e.equal(word("x"), word("x^2"))
    idem = free_object([I("x == x^2")], ["x"])
    assert idem.stable and len(idem.monoid) == 2
    f = free_object(preset_list("F"), ["x"])
    assert f.stable and set(f.monoid.elements) == {"1", "x", "x^2"}


def test_free_object_instability():
    # x^n are pairwise distinct in the free monoid
    r = free_object([], ["x"], FreeObjectCaps(max_len=5))
    assert not r.stable and r.monoid is None and "representative" in r.reason
    with pytest.raises(ValueError):
        r.element(word("x"))
    small = free_object(preset_list("O"), ["x", "y", "z"], FreeObjectCaps(max_len=4, max_classes=10))
    assert not small.stable and "max_classes" in small.reason


def test_holds_in_variety_examples():
    assert holds_in_variety(named("ID-G"), preset_list("E")) is Verdict.HOLDS
    assert holds_in_variety(I("xy == yx"), preset_list("F")) is Verdict.FAILS
    assert holds_in_variety(I("xyx == xyx"), []) is Verdict.HOLDS
    assert holds_in_variety(I("xy == yx"), [], FreeObjectCaps(max_len=4)) is Verdict.UNKNOWN
    assert holds_in_variety(named("ID-A"), "O") is Verdict.HOLDS


TWO_LETTER = list(all_words("xy", 4))


@pytest.mark.parametrize("variety", ["F", "E", "K", "Q"])
def test_search_agrees_with_free_object(variety):
    basis = preset_list(variety)
    fo = free_object(basis, ["x", "y"], FreeObjectCaps(max_len=7))
    assert fo.stable
    rng = random.Random(11)
    for _ in range(60):
        u, v = rng.choice(TWO_LETTER), rng.choice(TWO_LETTER)
        t = derivable(u, v, basis, SearchBudget(max_steps=5))
        if t is not None:
            assert verify_trace(t, basis)
            assert fo.equal(u, v)
    # everything the search finds is sound; the converse needs enough budget
    for u in TWO_LETTER[:12]:
        for v in TWO_LETTER[:12]:
            if fo.equal(u, v):
                assert derivable(u, v, basis, SearchBudget(max_steps=6)) is not None


def test_derivations_are_sound_in_monoid_models():
    rng = random.Random(4)
    basis = preset_list("F")
    found = []
    for _ in range(40):
        u, v = rng.choice(TWO_LETTER), rng.choice(TWO_LETTER)
        t = derivable(u, v, basis, SearchBudget(max_steps=4))
        if t is not None and u != v:
            found.append(Identity(u, v))
    assert found
    models = [rees_quotient([word(w) for w in W]) for W in (["xyx"], ["xy"], ["xyz", "zx"], ["xzxyty"])]
    models.append(free_object(basis, ["x", "y"], FreeObjectCaps(max_len=7)).monoid)
    hits = 0
    for m in models:
        if all(satisfies(m, i) for i in basis):
            hits += 1
            assert all(satisfies(m, i) for i in found)
    assert hits


def test_fve_matches_free_objects_on_all_short_three_letter_words():
    F, E = preset_list("F"), preset_list("E")
    f = free_object(F, ("x", "y", "z"), FreeObjectCaps(max_len=7))
    e = free_object(E, ("x", "y", "z"), FreeObjectCaps(max_len=7))
    assert f.stable and e.stable
    ws = list(all_words("xyz", 5))
    classes = {w: (f.element(w), e.element(w)) for w in ws}
    for i, u in enumerate(ws):
        for v in ws[i:]:
            assert fve_holds(Identity(u, v)) == (classes[u] == classes[v]), (u, v)
