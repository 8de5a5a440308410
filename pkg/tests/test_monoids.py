import json
import random
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monoidvar.identities import Identity, named
from monoidvar.monoids import (
    ClosureError,
    FiniteMonoid,
    MonoidSchemaError,
    check_tau_closed,
    deserialize,
    evaluate,
    from_table,
    idempotents,
    idempotents_commute,
    is_aperiodic,
    non_associative_triple,
    parse_monoid_text,
    rees_quotient,
    satisfies,
    satisfies_all,
    saturate_j_generator,
    serialize,
    tau_closure,
    tau_quotient,
    validate,
)
from monoidvar.rewrite import golden_traces
from monoidvar.words import EMPTY, factors, is_reduced, reduce, render, runs, substitute, word
from strategies import substitutions, words

I = Identity.parse


def naive_satisfies(M, ident):
    """Every assignment, no pruning, no vectorization."""
    letters = sorted(set(ident.lhs + ident.rhs))
    for values in product(range(len(M)), repeat=len(letters)):
        s = dict(zip(letters, values))
        if evaluate(M, ident.lhs, s) != evaluate(M, ident.rhs, s):
            return False
    return True


# -- Rees quotients ------------------------------------------------------------------


def test_rees_quotient_examples():
    m = rees_quotient([word("xyx")])
    assert set(m.elements) == {"1", "x", "y", "xy", "yx", "xyx", "0"}
    assert len(rees_quotient([word("xzxyty")])) == 21
    assert set(rees_quotient([word("x")]).elements) == {"1", "x", "0"}


def test_rees_quotient_products():
    m = rees_quotient([word("xyx")])
    x, y = m.index("x"), m.index("y")
    assert m.name(m.mul(x, y)) == "xy"
    assert m.mul(x, x) == m.zero
    assert m.mul(m.identity, y) == y
    assert not validate(m)


def test_rees_quotient_rejects_empty_input():
    with pytest.raises(ValueError):
        rees_quotient([])
    with pytest.raises(ValueError):
        rees_quotient([EMPTY])


@st.composite
def word_lists(draw, max_words=3, max_size=6):
    return draw(st.lists(words("xyz", max_size, min_size=1), min_size=1, max_size=max_words))


@given(word_lists())
@settings(max_examples=60)
def test_rees_quotient_invariants(W):
    m = rees_quotient(W)
    assert not validate(m)
    fs = set().union(*(factors(w) for w in W))
    assert len(m) == len(fs) + 1
    assert is_aperiodic(m) and m.zero is not None
    # products of factors are concatenations when they stay factors
    for u in list(fs)[:8]:
        for v in list(fs)[:8]:
            got = m.mul(m.index(render(u)), m.index(render(v)))
            assert got == (m.index(render(u + v)) if u + v in fs else m.zero)


@given(words("xyz", 5, min_size=1), words("xyz", 6))
@settings(max_examples=80)
def test_generating_word_is_an_isoterm(u, v):
    # in S(u) the word u itself only satisfies the trivial identity
    if v != u:
        assert not satisfies(rees_quotient([u]), Identity(u, v)).holds


# -- tau quotients -------------------------------------------------------------------


def test_tau_quotient_examples():
    ws, _ = saturate_j_generator(2, 2)
    m = tau_quotient(ws)
    x = m.index("x")
    assert m.name(m.mul(x, x)) == "x^2"
    assert m.name(m.mul(m.index("x^2"), x)) == "x^2"
    assert m.name(m.mul(m.index("zy"), m.index("x^2"))) == "zyx^2"
    assert m.mul(m.index("t"), m.index("t")) == m.zero
    for e in range(len(m)):
        assert m.mul(m.identity, e) == e
    assert not validate(m)


def test_saturation():
    w11, _ = saturate_j_generator(1, 1)
    assert word("xzyxty") in w11
    assert {reduce(f) for f in factors(word("xzyxty"))} <= w11
    w33, stable = saturate_j_generator(3, 3)
    assert stable and w33 == saturate_j_generator(2, 2)[0]
    assert all(is_reduced(w) for w in w33)
    with pytest.raises(ValueError):
        saturate_j_generator(0, 1)


def test_tau_closure_errors():
    with pytest.raises(ClosureError) as exc:
        check_tau_closed({word("x^3")})
    assert exc.value.witness == word("x^3")
    with pytest.raises(ClosureError):
        tau_quotient({word("xy")})  # x and y missing


@given(words("xyzt", 9), words("xyzt", 9))
@settings(max_examples=150)
def test_tau_quotient_is_well_defined(u, v):
    # the letter map is a homomorphism: any word evaluates to the class of its
    # reduced form, independent of how it is split
    ws, _ = saturate_j_generator(2, 2)
    m = tau_quotient(ws)
    ident = {a: a for a in "xyzt"}

    def cls(w):
        r = reduce(w)
        return m.index(render(r)) if r in ws or r == EMPTY else m.zero

    assert evaluate(m, u + v, ident) == cls(u + v)
    assert m.mul(cls(u), cls(v)) == cls(u + v)


def test_stau_constructor():
    m = parse_monoid_text("Stau(xzyxty)")
    assert not validate(m)
    assert m == tau_quotient(saturate_j_generator(2, 2)[0])
    assert parse_monoid_text("S(xyx)") == rees_quotient([word("xyx")])
    with pytest.raises(ValueError):
        parse_monoid_text("T(xyx)")


def test_reduced_factors_alone_are_not_closed():
    # xzyx stands for xzyx^k too, whose factor x^2 must be present
    W = {reduce(f) for f in factors(word("xzyxty"))}
    with pytest.raises(ClosureError) as exc:
        check_tau_closed(W)
    assert exc.value.witness == word("x^2")


def _class_members(w, top=4):
    """Brute-force slice of the τ-class of a reduced word: every run raised to
    every exponent up to ``top`` that keeps the reduced form."""
    rs = runs(w)
    for exps in product(range(1, top + 1), repeat=len(rs)):
        v = tuple(a for (a, _), e in zip(rs, exps) for _ in range(e))
        if reduce(v) == w:
            yield v


@given(st.lists(words("xyz", 5, min_size=1), min_size=1, max_size=2))
@settings(max_examples=60)
def test_tau_closure_is_closed_and_gives_a_monoid(W):
    closed = tau_closure(W)
    for w in closed:
        for v in _class_members(w):
            assert {reduce(f) for f in factors(v)} <= closed | {EMPTY}
    check_tau_closed(closed)
    assert not validate(tau_quotient(closed))


# -- structure -------------------------------------------------------------------------


def test_structure_examples():
    m = rees_quotient([word("xyx")])
    assert idempotents(m) == {m.identity, m.zero}
    assert idempotents_commute(m)
    assert is_aperiodic(rees_quotient([word("xzxyty")]))
    z2 = from_table([[0, 1], [1, 0]], ["e", "g"])
    assert not is_aperiodic(z2) and not validate(z2)
    assert z2.zero is None


def test_idempotents_that_do_not_commute():
    # left-zero band with identity adjoined
    m = from_table([[0, 1, 2], [1, 1, 1], [2, 2, 2]])
    assert idempotents(m) == {0, 1, 2}
    assert not idempotents_commute(m)


def test_from_table_needs_identity():
    with pytest.raises(MonoidSchemaError):
        from_table([[0, 0], [0, 0]])


# -- evaluation and satisfaction ----------------------------------------------------------


def test_evaluate_examples():
    m = rees_quotient([word("xyx")])
    assert m.name(evaluate(m, word("xyx"), {"x": "x", "y": "y"})) == "xyx"
    assert evaluate(m, EMPTY, {}) == m.identity
    assert evaluate(m, word("x^2"), {"x": "x"}) == m.zero
    with pytest.raises(KeyError):
        evaluate(m, word("xy"), {"x": "x"})


def test_satisfies_examples():
    m = rees_quotient([word("xyx")])
    a = satisfies(m, named("ID-A"))
    assert not a and a.witness_names(m) == {"x": "x", "y": "y"}
    assert satisfies(m, named("ID-G"))
    assert satisfies(m, I("xzyxty == xzyxty"))
    report = satisfies_all(m, [named("ID-A"), named("ID-G")])
    assert not report.holds and [i for i, _ in report.failures()] == [named("ID-A")]


def test_witness_is_a_real_counterexample():
    m = rees_quotient([word("xzxyty")])
    for handle in ("ID-A", "ID-B", "ID-C", "ID-E", "ID-H"):
        r = satisfies(m, named(handle))
        if not r:
            i = named(handle)
            assert evaluate(m, i.lhs, r.witness) != evaluate(m, i.rhs, r.witness)


MONOIDS = {
    "S(xyx)": rees_quotient([word("xyx")]),
    "S(xzxyty)": rees_quotient([word("xzxyty")]),
    "S(xyxy,yx^2)": rees_quotient([word("xyxy"), word("yx^2")]),
    "Z2": from_table([[0, 1], [1, 0]]),
}


@pytest.mark.parametrize("name", sorted(MONOIDS))
@pytest.mark.parametrize(
    "handle", ["ID-A", "ID-B", "ID-C", "ID-F", "ID-G", "x2y=x2yx", "yx2=xyx", "xy == yx"]
)
def test_satisfies_matches_naive_enumeration(name, handle):
    m = MONOIDS[name]
    ident = I(handle) if "==" in handle else named(handle)
    assert satisfies(m, ident).holds == naive_satisfies(m, ident)


@given(words("xy", 5), words("xy", 5))
@settings(max_examples=100)
def test_satisfies_matches_naive_on_random_identities(u, v):
    m = MONOIDS["S(xyxy,yx^2)"]
    ident = Identity(u, v)
    assert satisfies(m, ident).holds == naive_satisfies(m, ident)


@given(words("xy", 5), words("xy", 5), substitutions("xy", "xyz", 3))
@settings(max_examples=100)
def test_satisfaction_is_stable_under_substitution(u, v, sigma):
    m = MONOIDS["S(xyx)"]
    if satisfies(m, Identity(u, v)):
        assert satisfies(m, Identity(substitute(u, sigma), substitute(v, sigma)))


@pytest.mark.parametrize("vector_letters", [0, 1, 2, 4])
def test_vectorized_and_scalar_paths_agree(vector_letters):
    m = MONOIDS["S(xzxyty)"]
    for handle in ("ID-C", "ID-E", "ID-H", "ID-I"):
        i = named(handle)
        got, ref = satisfies(m, i, vector_letters=vector_letters), satisfies(m, i)
        assert (got.holds, got.witness) == (ref.holds, ref.witness)
        assert got.holds == naive_satisfies(m, i)


# -- a monoid model is sound for derivations --------------------------------------------------


def test_golden_chains_are_sound_in_random_rees_quotients():
    rng = random.Random(3)
    traces = golden_traces()
    hits = 0
    for _ in range(40):
        W = [tuple(rng.choice("xyzt") for _ in range(rng.randint(1, 5))) for _ in range(rng.randint(1, 2))]
        m = rees_quotient(W)
        for trace, allowed in traces.values():
            if all(satisfies(m, i) for i in allowed):
                hits += 1
                assert satisfies(m, Identity(trace.start, trace.end))
    assert hits > 0


# -- serialization -------------------------------------------------------------------------


def test_serialize_round_trip():
    m = rees_quotient([word("xyx")])
    back = deserialize(serialize(m))
    assert back == m
    assert deserialize(json.loads(serialize(m))) == m


def _table_dict(table, identity=0, zero=None):
    n = len(table)
    return {"elements": [str(i) for i in range(n)], "identity": identity, "zero": zero, "table": table}


def test_deserialize_names_non_associative_triple():
    # identity 0; a·a = b, everything else 2-valued so that (a a) b != a (a b)
    table = [[0, 1, 2], [1, 2, 1], [2, 2, 2]]
    m = FiniteMonoid(["e", "a", "b"], 0, None, table)
    triple = non_associative_triple(m)
    assert triple is not None
    with pytest.raises(MonoidSchemaError, match=r"not associative at \("):
        deserialize(_table_dict(table))


@pytest.mark.parametrize(
    "data, message",
    [
        ({"elements": ["e"], "zero": None, "table": [[0]]}, "identity"),
        (_table_dict([[0, 1], [1]]), "row 1"),
        (_table_dict([[0, 1], [1, 5]]), "outside"),
        (_table_dict([[0, 1], [1, 1]], identity=1), "not neutral"),
        ({"elements": ["a", "a"], "identity": 0, "zero": None, "table": [[0, 1], [1, 1]]}, "duplicate"),
    ],
)
def test_deserialize_errors(data, message):
    with pytest.raises(MonoidSchemaError, match=message):
        deserialize(data)


def test_deserialize_rejects_bad_json():
    with pytest.raises(MonoidSchemaError):
        deserialize("{not json")


def test_table_is_read_only():
    m = rees_quotient([word("x")])
    with pytest.raises(ValueError):
        m.table[0, 0] = 1
    assert isinstance(m.table, np.ndarray)
