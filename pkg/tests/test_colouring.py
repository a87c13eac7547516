from hypothesis import given, settings, strategies as st

from bbdiv.colouring import (
    Partition,
    Signature,
    all_coloured_traces,
    coloured_trace_of_path,
    coloured_traces_up_to,
    is_c_divergent,
    is_consistent,
    preserves_divergence,
    refine_to_coarsest,
    refinement_rounds,
    signature,
)
from bbdiv.lts import TAU, Lts, Path, quotient
from bbdiv.relations import compute_bb, compute_bbd
from conftest import ltss


@st.composite
def lts_with_partition(draw, max_states: int = 5):
    lts = draw(ltss(max_states=max_states))
    n = lts.state_count
    assignment = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    return lts, Partition.from_block_of(assignment)


def test_partition_canonical():
    p = Partition.from_block_of([7, 7, 3])
    assert p.block_of == (0, 0, 1)
    assert p.blocks() == ((0, 1), (2,))
    q = Partition.from_blocks([(2,), (0, 1)], 3)
    assert q == p
    assert Partition.discrete(3).refines(p)
    assert p.refines(Partition.single_block(3))
    assert not p.refines(Partition.discrete(3))


def test_partition_as_relation():
    p = Partition.from_blocks([(0, 1), (2,)], 3)
    assert p.as_relation() == {(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)}


def test_signature_single_block(fix1):
    whole = Partition.single_block(3)
    a = fix1.label_index("a")
    assert signature(fix1, whole, 0) == Signature(frozenset({(a, 0)}), True)
    assert signature(fix1, whole, 1) == Signature(frozenset({(a, 0)}), False)
    assert signature(fix1, whole, 2) == Signature(frozenset(), False)


def test_signature_discrete(fix1):
    disc = Partition.discrete(3)
    a = fix1.label_index("a")
    assert signature(fix1, disc, 0) == Signature(frozenset({(a, 2)}), True)


def test_signature_fix3(fix3):
    assert signature(fix3, Partition.single_block(1), 0) == Signature(frozenset(), False)


def test_is_consistent(fix1):
    assert is_consistent(fix1, Partition.from_blocks([(0, 1), (2,)], 3))
    assert not is_consistent(fix1, Partition.from_blocks([(0, 2), (1,)], 3))
    assert is_consistent(fix1, Partition.discrete(3))


def test_preserves_divergence(fix1, fix3):
    assert not preserves_divergence(fix1, Partition.from_blocks([(0, 1), (2,)], 3))
    assert preserves_divergence(fix1, Partition.discrete(3))
    assert preserves_divergence(fix3, Partition.single_block(1))


def test_is_c_divergent(fix1):
    for p in (Partition.single_block(3), Partition.discrete(3)):
        assert is_c_divergent(fix1, p, 0)
        assert not is_c_divergent(fix1, p, 1)
    cycle = Lts(2, 0, (), [(0, TAU, 1), (1, TAU, 0)])
    assert not is_c_divergent(cycle, Partition.discrete(2), 0)
    assert is_c_divergent(cycle, Partition.single_block(2), 0)


def test_coloured_trace_contraction(fix1):
    p = Partition.from_blocks([(0, 1), (2,)], 3)
    a = fix1.label_index("a")
    assert coloured_trace_of_path(p, Path((0,), ())) == (0,)
    assert coloured_trace_of_path(p, Path((0, 0, 2), (TAU, a))) == (0, a, 1)
    disc = Partition.discrete(4)
    assert coloured_trace_of_path(disc, Path((0, 1), (TAU,))) == (0, TAU, 1)


def test_all_coloured_traces(fix1, fix3):
    assert all_coloured_traces(fix3, Partition.single_block(1), 0, 3) == {(0,)}
    p = Partition.from_blocks([(0, 1), (2,)], 3)
    a = fix1.label_index("a")
    expected = {(0,), (0, a, 1)}
    assert all_coloured_traces(fix1, p, 0, 2) == expected
    assert all_coloured_traces(fix1, p, 1, 2) == expected


@settings(max_examples=60)
@given(lts_with_partition())
def test_length_three_lemma(bundle):
    """Signature agreement decides consistency exactly as bounded full
    coloured-trace comparison does."""
    lts, p = bundle
    bound = lts.state_count + 1
    by_traces = all(
        len({coloured_traces_up_to(lts, p, s, bound) for s in members}) == 1
        for members in p.blocks()
    )
    assert is_consistent(lts, p) == by_traces


def test_refine_examples(fix1, fix3):
    assert refine_to_coarsest(fix1, False).blocks() == ((0, 1), (2,))
    assert refine_to_coarsest(fix1, True).blocks() == ((0,), (1,), (2,))
    assert refine_to_coarsest(fix3, True).blocks() == ((0,),)
    assert refine_to_coarsest(fix3, False).blocks() == ((0,),)


@settings(max_examples=60)
@given(ltss())
def test_refinement_coincides_with_fixpoint(lts):
    assert refine_to_coarsest(lts, True) == compute_bbd(lts)
    assert refine_to_coarsest(lts, False) == compute_bb(lts)


@settings(max_examples=60)
@given(ltss())
def test_refinement_output_is_consistent(lts):
    p = refine_to_coarsest(lts, True)
    assert is_consistent(lts, p)
    assert preserves_divergence(lts, p)
    assert is_consistent(lts, refine_to_coarsest(lts, False))


@settings(max_examples=60)
@given(ltss())
def test_refinement_rounds_monotone(lts):
    rounds = refinement_rounds(lts, True)
    assert len(rounds) <= lts.state_count + 1
    for earlier, later in zip(rounds, rounds[1:]):
        assert later.refines(earlier)
        assert later.n_blocks > earlier.n_blocks


@settings(max_examples=40)
@given(ltss(max_states=5))
def test_quotient_idempotent(lts):
    p = refine_to_coarsest(lts, True)
    minimized = quotient(lts, p)
    again = refine_to_coarsest(minimized, True)
    assert again.n_blocks == minimized.state_count
    assert quotient(minimized, again).transition_names() == minimized.transition_names()
