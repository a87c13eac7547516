import pathlib

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from bbdiv.lts import TAU_NAME, Lts, parse_aut

settings.register_profile(
    "bbdiv", deadline=None, suppress_health_check=[HealthCheck.filter_too_much]
)
settings.load_profile("bbdiv")

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

#: the stuttering-closure remark relation on FIX2 (0 below-s, 1 above-s,
#: 2 below-t, 3 above-t)
FIX4R = frozenset({(0, 3), (3, 0), (1, 2), (2, 1), (1, 3), (3, 1)})


def load_fixture(name: str) -> Lts:
    return parse_aut((FIXTURES / name).read_text())


@pytest.fixture(scope="session")
def fix1() -> Lts:
    return load_fixture("fix1.aut")


@pytest.fixture(scope="session")
def fix2() -> Lts:
    return load_fixture("fix2.aut")


@pytest.fixture(scope="session")
def fix3() -> Lts:
    return load_fixture("fix3.aut")


@st.composite
def ltss(draw, max_states: int = 6, letters: tuple[str, ...] = ("a", "b"), max_degree: int = 3):
    n = draw(st.integers(min_value=1, max_value=max_states))
    labels = st.sampled_from((TAU_NAME, TAU_NAME) + letters)  # bias towards silence
    edges = draw(
        st.lists(
            st.tuples(st.integers(0, n - 1), labels, st.integers(0, n - 1)),
            max_size=max_degree * n,
        )
    )
    shell = Lts(n, 0, letters, [])
    index = {lab.name: i for i, lab in enumerate(shell.alphabet)}
    return Lts(n, 0, letters, [(s, index[a], d) for s, a, d in edges])


@st.composite
def tiny_tau_ltss(draw, max_states: int = 4, max_degree: int = 2):
    """Silent-only systems small enough for exhaustive path oracles."""
    n = draw(st.integers(min_value=1, max_value=max_states))
    edges = draw(
        st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
            max_size=max_degree * n,
            unique=True,
        )
    )
    capped: dict[int, list[int]] = {}
    for s, d in edges:
        capped.setdefault(s, [])
        if len(capped[s]) < max_degree:
            capped[s].append(d)
    flat = [(s, 0, d) for s, ds in capped.items() for d in ds]
    return Lts(n, 0, (), flat)


@st.composite
def relations_on(draw, lts: Lts, max_pairs: int = 10, symmetric: bool = False):
    n = lts.state_count
    pairs = draw(
        st.frozensets(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=max_pairs
        )
    )
    if symmetric:
        pairs = pairs | frozenset((t, s) for s, t in pairs)
    return frozenset(pairs)


@st.composite
def lts_with_relation(draw, max_states: int = 5, symmetric: bool = False):
    lts = draw(ltss(max_states=max_states))
    rel = draw(relations_on(lts, symmetric=symmetric))
    return lts, rel
