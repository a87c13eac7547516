import pytest
from hypothesis import given, settings, strategies as st

from bbdiv.colouring import Partition
from bbdiv.lts import (
    TAU,
    AutParseError,
    LassoBoundExceeded,
    Lts,
    emit_aut,
    enumerate_lassos,
    has_divergence_within,
    opt_step,
    parse_aut,
    quotient,
    successors,
    tau_closure,
    tau_plus,
)
from conftest import ltss, tiny_tau_ltss
from oracles import walk_lasso_sets


def test_parse_minimal():
    lts = parse_aut("des (0,0,1)")
    assert lts.state_count == 1 and not lts.transitions


def test_parse_fix1(fix1):
    assert fix1.state_count == 3
    assert len(fix1.transitions) == 3
    assert [lab.name for lab in fix1.alphabet] == ["tau", "a"]
    assert fix1.alphabet[0].is_tau and not fix1.alphabet[1].is_tau


def test_parse_out_of_range_state():
    with pytest.raises(AutParseError, match="line 2.*state 5 out of range"):
        parse_aut('des (0,1,1)\n(0,"b",5)')


def test_parse_errors():
    with pytest.raises(AutParseError, match="line 1"):
        parse_aut("not a header")
    with pytest.raises(AutParseError, match="count mismatch"):
        parse_aut('des (0,2,2)\n(0,"a",1)')
    with pytest.raises(AutParseError, match="line 2"):
        parse_aut('des (0,1,2)\nbroken')


def test_tau_alias_normalized():
    lts = parse_aut('des (0,1,2)\n(0,"i",1)')
    assert lts.transition_names() == ((0, "tau", 1),)
    assert 'tau' in emit_aut(lts)


def test_emit_empty():
    assert emit_aut(Lts(1, 0, (), [])) == "des (0,0,1)\n"


def test_roundtrip_fixtures(fix1, fix2):
    for lts in (fix1, fix2):
        again = parse_aut(emit_aut(lts))
        assert again.transition_names() == lts.transition_names()
        assert again.state_count == lts.state_count
        assert again.initial == lts.initial


@given(ltss())
def test_roundtrip_random(lts):
    again = parse_aut(emit_aut(lts))
    assert again.transition_names() == lts.transition_names()


def test_successors(fix1):
    a = fix1.label_index("a")
    assert successors(fix1, 0, TAU) == {0}
    assert successors(fix1, 1, a) == {2}
    assert successors(fix1, 2, TAU) == frozenset()
    assert successors(fix1, 2, a) == frozenset()


def test_opt_step(fix1):
    a = fix1.label_index("a")
    assert opt_step(fix1, 1, TAU) == {1}
    assert opt_step(fix1, 0, TAU) == {0}
    assert opt_step(fix1, 0, a) == {2}


def test_tau_closure(fix1, fix2, fix3):
    assert tau_closure(fix1, 0) == {0}
    assert tau_closure(fix2, 0) == {0, 1}
    assert tau_closure(fix3, 0) == {0}


def test_tau_plus(fix1, fix2):
    assert tau_plus(fix1, 0) == {0}
    assert tau_plus(fix1, 1) == frozenset()
    assert tau_plus(fix2, 0) == {1}


def test_has_divergence_within(fix1):
    assert has_divergence_within(fix1, 0, {0, 1, 2})
    assert not has_divergence_within(fix1, 1, {0, 1, 2})
    assert not has_divergence_within(fix1, 0, {1, 2})


def test_enumerate_lassos_examples(fix1, fix3):
    only = enumerate_lassos(fix1, 0, {0, 1, 2})
    assert [(l.full_set, l.tail_set) for l in only] == [(frozenset({0}), frozenset({0}))]
    assert enumerate_lassos(fix3, 0, {0}) == ()
    two = Lts(2, 0, (), [(0, TAU, 1), (1, TAU, 0)])
    pair = enumerate_lassos(two, 0, {0, 1})
    assert [(l.full_set, l.tail_set) for l in pair] == [
        (frozenset({0, 1}), frozenset({0, 1}))
    ]


def test_lasso_bound():
    big = Lts(17, 0, (), [(s, TAU, (s + 1) % 17) for s in range(17)])
    with pytest.raises(LassoBoundExceeded):
        enumerate_lassos(big, 0, range(17))
    assert enumerate_lassos(big, 0, range(17), bound=17)


def test_lasso_requires_membership(fix1):
    with pytest.raises(ValueError):
        enumerate_lassos(fix1, 0, {1, 2})


@given(tiny_tau_ltss())
def test_lasso_walks_replay(lts):
    members = frozenset(range(lts.state_count))
    for lasso in enumerate_lassos(lts, 0, members):
        states = lasso.walk.states
        for x, a, y in lasso.walk.steps():
            assert a == TAU and y in lts.tau_successors(x)
        assert states[-1] in states[:-1]
        assert frozenset(states) == lasso.full_set
        assert frozenset(states[1:]) == lasso.tail_set
        assert lasso.full_set <= members


@settings(max_examples=40)
@given(tiny_tau_ltss())
def test_lasso_sets_match_walk_enumeration(lts):
    n = lts.state_count
    members = frozenset(range(n))
    got = {
        (l.full_set, l.tail_set) for l in enumerate_lassos(lts, 0, members)
    }
    expected = walk_lasso_sets(lts, 0, members, max_len=n * n + 1)
    assert got == expected


@given(tiny_tau_ltss(), st.data())
def test_divergence_agrees_with_lassos(lts, data):
    n = lts.state_count
    members = frozenset(
        data.draw(st.sets(st.integers(0, n - 1), max_size=n)) | {0}
    )
    assert has_divergence_within(lts, 0, members) == bool(
        enumerate_lassos(lts, 0, members)
    )


@given(ltss())
def test_closure_unfolding_identities(lts):
    for s in lts.states():
        step_union = frozenset().union(
            *[tau_closure(lts, y) for y in successors(lts, s, TAU)] or [frozenset()]
        )
        assert tau_closure(lts, s) == {s} | step_union
        assert tau_plus(lts, s) == step_union


def test_quotient_identity(fix1):
    q = quotient(fix1, Partition.discrete(3))
    assert q.transition_names() == fix1.transition_names()
    assert q.state_count == 3


def test_quotient_merges_without_divergence(fix2):
    q = quotient(fix2, Partition.from_blocks([(0, 2), (1, 3)], 4))
    assert q.state_count == 2
    assert q.transition_names() == ((0, "tau", 1),)


def test_quotient_keeps_divergent_self_loop(fix1):
    from bbdiv.relations import compute_bbd

    q = quotient(fix1, compute_bbd(fix1))
    assert q.state_count == 3
    assert (0, "tau", 0) in q.transition_names()


def test_empty_system():
    empty = parse_aut("des (0,0,0)")
    assert empty.state_count == 0
    assert parse_aut(emit_aut(empty)).state_count == 0
    assert quotient(empty, Partition.single_block(0)).state_count == 0
