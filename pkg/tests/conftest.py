import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from explorelab import (
    FamilyParams,
    LabeledGraph,
    LollipopParams,
    build_family_graph,
    build_lollipop,
)


class ScriptPolicy:
    """Plays a fixed port sequence, then halts.  Test helper."""

    name = "script"

    def __init__(self, ports):
        self.ports = list(ports)

    def start(self):
        return _ScriptRun(self.ports)


class _ScriptRun:
    def __init__(self, ports):
        self.ports = ports
        self.idx = 0

    def observe(self, rec):
        if rec.out_port != -1:
            self.idx += 1

    def next_action(self):
        return self.ports[self.idx] if self.idx < len(self.ports) else None


def port_script(graph, labels):
    """Convert a label walk into the port sequence that realizes it."""
    return ScriptPolicy(
        [graph.port_of(a, b) for a, b in zip(labels, labels[1:])]
    )


@pytest.fixture
def path3():
    return LabeledGraph({0: [1], 1: [0, 2], 2: [1]})


@pytest.fixture
def single_edge():
    return LabeledGraph({0: [1], 1: [0]})


@pytest.fixture
def triangle():
    return LabeledGraph({0: [1, 2], 1: [0, 2], 2: [0, 1]})


def small_graph_corpus():
    """Every graph of at most 200 nodes exercised by the test suite, used by
    the oracle-equivalence checks."""
    corpus = [
        ("single-edge", LabeledGraph({0: [1], 1: [0]}), 0),
        ("path3", LabeledGraph({0: [1], 1: [0, 2], 2: [1]}), 1),
        ("triangle", LabeledGraph({0: [1, 2], 1: [0, 2], 2: [0, 1]}), 0),
    ]
    g, _ = build_family_graph(FamilyParams(2, 4, 6))
    corpus.append(("family-2-4-6", g, 0))
    g, _ = build_family_graph(FamilyParams(4, 8, 7))
    corpus.append(("family-4-8-7", g, 0))
    g, _ = build_family_graph(FamilyParams(4, 8, 7), seed=5)
    corpus.append(("family-4-8-7-s5", g, 0))
    g, _ = build_lollipop(LollipopParams(scale=1, ecc=2, alpha=Fraction(1)))
    corpus.append(("lollipop-1-2-1", g, 0))
    g, _ = build_lollipop(LollipopParams(scale=1, ecc=4, alpha=Fraction(1, 2)))
    corpus.append(("lollipop-1-4-half", g, 0))
    return corpus


@pytest.fixture(scope="session")
def graph_corpus():
    return small_graph_corpus()
