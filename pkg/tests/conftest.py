from __future__ import annotations

import pytest

from cglearn.graph import ChainGraph
from cglearn.simulate import GenConfig, random_cg

EX16_NAMES = "ABCDEFGHIJKLMNOT"
_EX16_DIRECTED = ["AD", "BE", "CT", "GT", "TK", "KO", "LK", "JN", "IM", "HI"]
_EX16_UNDIRECTED = ["DE", "EF", "BC", "FT", "IJ", "JK", "MN", "NO"]


def ex16_index(names: str) -> set[int]:
    return {EX16_NAMES.index(c) for c in names}


def ex16_graph() -> ChainGraph:
    ix = EX16_NAMES.index
    return ChainGraph(
        16,
        [(ix(a), ix(b)) for a, b in _EX16_DIRECTED],
        [(ix(a), ix(b)) for a, b in _EX16_UNDIRECTED],
    )


def ex4_graph() -> ChainGraph:
    # A=0, B=1, C=2, D=3
    return ChainGraph(4, [(0, 3), (1, 2), (1, 3)], [(2, 3)])


def suite_graphs(count: int = 200) -> list[ChainGraph]:
    """The shared random-graph suite: seed i, p = 6 + i % 7, N = 2 + i % 2."""
    return [random_cg(GenConfig(6 + i % 7, 2 + i % 2, i)) for i in range(count)]


@pytest.fixture
def ex16():
    return ex16_graph()


@pytest.fixture
def ex4():
    return ex4_graph()


@pytest.fixture(scope="session")
def small_graphs():
    return suite_graphs(40)


# criterion lines collected by the acceptance tests, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
