"""
Pytest configuration and shared fixtures for treesat tests
"""

import os
import sys

import pytest

# Add src directory to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from automata.core import TreeAutomaton  # noqa: E402
from automata.generator import TvParams, derive_seed, tabakov_vardi  # noqa: E402
from formats.timbuk import load_timbuk  # noqa: E402

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture
def pair_automaton():
    """Accepts exactly a(b,b): q0 -a-> (q1,q1), q1 -b->"""
    return TreeAutomaton.from_rules(
        [("a", 2), ("b", 0)],
        [("q0", "a", ("q1", "q1")), ("q1", "b", ())],
        initial=["q0"],
    )


@pytest.fixture
def all_trees_automaton():
    """Complete one-state automaton accepting every tree over {a:2, b:0}"""
    return TreeAutomaton.from_rules(
        [("a", 2), ("b", 0)],
        [("q", "a", ("q", "q")), ("q", "b", ())],
        initial=["q"],
    )


@pytest.fixture
def empty_automaton():
    """No states at all over {a:2, b:0}"""
    return TreeAutomaton.from_rules([("a", 2), ("b", 0)], [])


@pytest.fixture
def useless_states_automaton():
    """dead is unproductive, lonely is unreachable; only i and good survive RU"""
    return TreeAutomaton.from_rules(
        [("a", 2), ("b", 0)],
        [
            ("i", "a", ("good", "good")),
            ("i", "a", ("good", "dead")),
            ("good", "b", ()),
            ("dead", "a", ("dead", "dead")),
            ("lonely", "b", ()),
        ],
        initial=["i"],
        states=["i", "good", "dead", "lonely"],
    )


@pytest.fixture
def sample_timbuk():
    """Small Timbuk document with comments and state annotations"""
    return """# pairs of leaves
Ops a:2 b:0 c:0

Automaton pairs
States q0:0 q1 q2
Final States q0
Transitions
b() -> q1
c -> q2
a(q1,q2) -> q0   # mixed pair
a(q1,q1) -> q0
"""


@pytest.fixture
def linear_dw_up():
    """Stored counterexample for saturating with (downward-larger, upward-larger)"""
    return load_timbuk(os.path.join(FIXTURES, "linear_dw_up.timbuk"))


@pytest.fixture
def branching_up_dw():
    """Stored counterexample for saturations relative to downward simulation"""
    return load_timbuk(os.path.join(FIXTURES, "branching_up_dw.timbuk"))


@pytest.fixture
def isolated_up_dw():
    """Stored counterexample for (upward-smaller sources, downward-smaller targets)"""
    return load_timbuk(os.path.join(FIXTURES, "isolated_up_dw.timbuk"))


@pytest.fixture
def gfs_counterexamples(linear_dw_up, branching_up_dw, isolated_up_dw):
    """Every stored GFS counterexample"""
    return [linear_dw_up, branching_up_dw, isolated_up_dw]


@pytest.fixture
def tv_corpus():
    """Twelve small Tabakov-Vardi automata with mixed densities"""
    corpus = []
    for index in range(12):
        params = TvParams(
            n=3 + index % 2,
            s=1 + index % 2,
            td=(1.0, 1.5, 2.0)[index % 3],
            ad=(0.25, 0.5)[index % 2],
            seed=derive_seed(11, index),
        )
        corpus.append(tabakov_vardi(params))
    return corpus


@pytest.fixture
def corpus_dir(tmp_path, tv_corpus):
    """Directory with the first four corpus automata as Timbuk files"""
    from formats.timbuk import dump_timbuk

    for index, a in enumerate(tv_corpus[:4]):
        dump_timbuk(a, tmp_path / f"tv-{index:04d}.timbuk", f"tv_{index:04d}")
    return tmp_path


# Pytest configuration
def pytest_configure(config):
    """Configure pytest with custom markers"""
    config.addinivalue_line("markers", "unit: Unit tests of a single module")
    config.addinivalue_line(
        "markers", "integration: Tests that run whole pipelines or the command line"
    )
    config.addinivalue_line(
        "markers", "slow: Acceptance-scale sweeps over large corpora"
    )
