"""Shared complexes and strategies for the test suite."""

from itertools import combinations

import pytest
from hypothesis import strategies as st

from gerbelab.cech import nerve_from_facets

RP2_FACETS = [
    (0, 1, 3), (0, 1, 5), (0, 2, 4), (0, 2, 5), (0, 3, 4),
    (1, 2, 3), (1, 2, 4), (1, 4, 5), (2, 3, 5), (3, 4, 5),
]
TORUS_FACETS = sorted(
    {tuple(sorted((i % 7, (i + 1) % 7, (i + 3) % 7))) for i in range(7)}
    | {tuple(sorted((i % 7, (i + 2) % 7, (i + 3) % 7))) for i in range(7)}
)
SPHERE2_FACETS = list(combinations(range(4), 3))
SPHERE3_FACETS = list(combinations(range(5), 4))
SOLID_TETRA = [(0, 1, 2, 3)]
# generator of H^1(RP^2; Z/2): a 1-cocycle dual to a non-contractible loop
RP2_GENERATOR_EDGES = {(1, 2), (1, 4), (2, 3), (3, 5), (4, 5)}

NERVES = {
    "sphere2": nerve_from_facets(SPHERE2_FACETS),
    "solid_tetra": nerve_from_facets(SOLID_TETRA),
    "rp2": nerve_from_facets(RP2_FACETS),
    "torus": nerve_from_facets(TORUS_FACETS),
    "sphere3": nerve_from_facets(SPHERE3_FACETS),
    "simplex4": nerve_from_facets([tuple(range(5))]),
}
SURFACES = ("sphere2", "rp2", "torus")
ORIENTABLE = ("sphere2", "torus")


@pytest.fixture(params=sorted(NERVES))
def any_nerve(request):
    return NERVES[request.param]


def small_int_matrices(max_rows=4, max_cols=4, bound=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(
                st.lists(st.integers(-bound, bound), min_size=c, max_size=c), min_size=r, max_size=r
            )
        )
    )


# acceptance lines are collected here and echoed in the terminal summary,
# so they show up even when pytest captures stdout
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
