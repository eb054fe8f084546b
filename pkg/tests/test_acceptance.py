"""
Corpus-scale checks of the reduction and complement algorithms.

Run with ``pytest -m slow``.
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from automata.complement import complement, equivalent, is_empty, is_universal
from automata.core import remove_useless, stats
from automata.generator import TvParams, derive_seed, tabakov_vardi
from automata.oracle import accepts
from automata.reduce import heavy
from automata.saturate import (
    GFS_TABLE,
    GfsStatus,
    Ordering,
    better_than,
    check_gfs_claim,
    gfs_sample,
    sat1,
    sat2,
    search_gfs_counterexample,
)
from harness.pipelines import run_pipeline

pytestmark = pytest.mark.slow


def corpus(count, seed, **params):
    return [
        tabakov_vardi(TvParams(seed=derive_seed(seed, i), **params))
        for i in range(count)
    ]


# ==================== Test: reductions keep the language ====================


@pytest.mark.parametrize("td", [1.0, 1.5, 2.0, 2.5])
def test_heavy_preserves_language_across_densities(td):
    """Test Heavy(1,1) and Heavy(2,1) on a corpus per transition density"""
    for a in corpus(25, seed=100 + int(td * 10), n=6, td=td, ad=0.5):
        for x, y in ((1, 1), (2, 1)):
            reduced = heavy(a, x, y)
            assert equivalent(reduced, a)
            useful = stats(remove_useless(a))
            assert stats(reduced).transition_count <= useful.transition_count


@pytest.mark.parametrize("reduce_further", [sat1, sat2], ids=["sat1", "sat2"])
def test_saturation_pipelines_preserve_language(reduce_further):
    """Test that Sat1 and Sat2 keep the language and never lose against Heavy"""
    for a in corpus(25, seed=200, n=5, td=1.5, ad=0.5):
        h = heavy(a)
        result = reduce_further(h)
        assert equivalent(result, a)
        assert better_than(result, remove_useless(h)) is not Ordering.WORSE


# ==================== Test: complement ====================


def test_universality_grows_with_transition_density():
    """Test that dense automata are universal at least as often as sparse ones"""

    def universal_fraction(td):
        automata = corpus(20, seed=300, n=4, td=td, ad=0.5)
        return sum(is_universal(a) for a in automata) / len(automata)

    assert universal_fraction(4.0) >= universal_fraction(1.0)


def test_dense_small_automata_are_mostly_universal():
    """Test that n=4, td=4.0, ad=0.5 is universal on more than half of 300 seeds"""
    # 151 of these 300 are universal
    automata = corpus(300, seed=7, n=4, s=2, td=4.0, ad=0.5)

    universal = sum(is_universal(a) for a in automata)

    assert universal / len(automata) > 0.5


@pytest.mark.parametrize("td", [1.0, 4.0])
def test_reduced_complement_is_smaller(td):
    """Test that H+C+H never has more transitions than C, and fewer on average"""
    plain, reduced = [], []
    for index, a in enumerate(corpus(40, seed=500, n=4, s=2, td=td, ad=0.5)):
        c = run_pipeline(a, "C", str(index))
        hch = run_pipeline(a, "H+C+H", str(index))
        assert hch.final_transitions <= c.final_transitions, index
        plain.append(c.final_transitions)
        reduced.append(hch.final_transitions)

    if sum(plain) / len(plain) > 50:
        assert sum(reduced) / len(reduced) < sum(plain) / len(plain)


def test_reduced_complement_pipelines_agree():
    """Test that H+C+H and H+C+H+S2 accept the same trees as a plain complement"""
    for index, a in enumerate(corpus(15, seed=400, n=4, td=1.5, ad=0.5)):
        plain = run_pipeline(a, "C", str(index))
        reduced = run_pipeline(a, "H+C+H", str(index))
        saturated = run_pipeline(a, "H+C+H+S2", str(index))

        assert equivalent(plain.automaton, complement(a))
        assert equivalent(reduced.automaton, plain.automaton)
        assert equivalent(saturated.automaton, plain.automaton)
        assert reduced.final_states <= reduced.steps[1].states
        assert plain.empty == is_empty(complement(a))


# ==================== Test: GFS sweep ====================


@pytest.mark.parametrize(
    "cell",
    [cell for cell, good in GFS_TABLE.items() if good],
    ids=lambda c: f"{c[0].value}|{c[1].value}",
)
def test_gfs_cells_hold_on_random_sample(cell):
    """Test every GFS cell against a mixed-rank random sample"""
    sample = gfs_sample(40, seed=17, max_states=5)

    verdict = check_gfs_claim(*cell, sample, depth=4, budget_factor=1000)

    assert verdict.status is GfsStatus.NO_VIOLATION
    assert verdict.checked == 40


@pytest.mark.parametrize(
    "cell",
    [cell for cell, good in GFS_TABLE.items() if not good],
    ids=lambda c: f"{c[0].value}|{c[1].value}",
)
def test_search_refutes_every_bad_cell(cell):
    """Test that the default search finds a verified counterexample per non-GFS cell"""
    verdict = search_gfs_counterexample(
        *cell, attempts=1000, seed=3, depth=5, max_states=6
    )

    assert verdict.status is GfsStatus.COUNTEREXAMPLE
    assert accepts(verdict.saturated, verdict.witness)
    assert not accepts(verdict.automaton, verdict.witness)
