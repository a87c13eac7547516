import pytest

from bbdiv.generators import RunConfig, lts_stream, random_relation
from bbdiv.relations import ConditionId, check_condition, compose, parse_relation
from bbdiv.search import (
    CompositionWitness,
    SearchExhausted,
    find_composition_counterexample,
    search_composition_counterexamples,
)
from conftest import load_fixture, FIXTURES

CONFIG = RunConfig(seed=0, max_states=6)


def test_lts_stream_deterministic():
    first = [lts.transition_names() for lts in lts_stream(RunConfig(seed=5, sample_count=20))]
    second = [lts.transition_names() for lts in lts_stream(RunConfig(seed=5, sample_count=20))]
    assert first == second
    third = [lts.transition_names() for lts in lts_stream(RunConfig(seed=6, sample_count=20))]
    assert first != third


def test_random_relation_flavours():
    config = RunConfig(seed=1, sample_count=5)
    rng = config.rng()
    for lts in lts_stream(config):
        bbd = random_relation(rng, lts, "bbd")
        assert check_condition(lts, bbd, ConditionId.T).holds
        assert check_condition(lts, bbd, ConditionId.D2).holds
        bb = random_relation(rng, lts, "bb")
        assert check_condition(lts, bb, ConditionId.T).holds
        random_relation(rng, lts, "uniform")


def test_search_finds_both_phenomena():
    witnesses = search_composition_counterexamples(CONFIG)
    assert set(witnesses) == {ConditionId.D, ConditionId.D1}
    for cond, witness in witnesses.items():
        assert witness.lts.state_count <= 6
        assert witness.verify(), cond


def test_search_deterministic():
    first = find_composition_counterexample(ConditionId.D1, CONFIG)
    second = find_composition_counterexample(ConditionId.D1, CONFIG)
    assert first.lts.transition_names() == second.lts.transition_names()
    assert first.r1 == second.r1 and first.r2 == second.r2


def test_search_exhaustion_on_single_state():
    with pytest.raises(SearchExhausted):
        find_composition_counterexample(ConditionId.D, RunConfig(seed=0, max_states=1))


@pytest.mark.parametrize("stem,cond", [("comp_d", ConditionId.D), ("comp_d1", ConditionId.D1)])
def test_frozen_witnesses_still_exhibit(stem, cond):
    """Regression fixtures captured from the search keep their meaning."""
    lts = load_fixture(f"{stem}.aut")
    r1 = parse_relation((FIXTURES / f"{stem}_r1.rel").read_text(), lts)
    r2 = parse_relation((FIXTURES / f"{stem}_r2.rel").read_text(), lts)
    witness = CompositionWitness(lts, r1, r2, cond)
    assert witness.verify()
    assert not check_condition(lts, compose(r1, r2), cond).holds
