"""Shared fixtures and independent reference implementations.

The reference paths here deliberately avoid the package's fast
signature-based code: they materialise vertex sets and call the query
model directly, so agreement is evidence rather than tautology.
"""

from itertools import combinations

import numpy as np
import pytest

from hypersplit.hypergraph import Hypergraph, block_vertices, query
from hypersplit.oracle import materialize_test
from hypersplit.seeds import stream

#: PASS/FAIL lines recorded by the acceptance tests, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_hypergraph(n: int, max_edges: int, seed: int, n_raw: int | None = None) -> Hypergraph:
    """Uniformly random small edge sets for oracle-style cross-checks."""
    rng = stream(seed, 999)
    n_raw = n_raw or n
    m = int(rng.integers(0, max_edges + 1))
    edges = set()
    while len(edges) < m:
        e = tuple(sorted(rng.choice(np.arange(1, n_raw + 1), size=3, replace=False).tolist()))
        edges.add(e)
    return Hypergraph(n=n, edges=tuple(sorted(edges)), n_raw=n_raw)


def brute_force_level_stats(h: Hypergraph, level: int):
    """All seven level statistics by testing block unions with query()."""
    g = 3**level

    def union(blocks):
        s = set()
        for b in blocks:
            s.update(block_vertices(b, h.n, level))
        return s

    def defective(blocks) -> bool:
        return query(union(blocks), h) == 1

    block_def = {b: defective([b]) for b in range(1, g + 1)}
    pair_def = {}
    for x, y in combinations(range(1, g + 1), 2):
        pair_def[(x, y)] = defective([x, y])

    def pdef(x, y):
        return pair_def[(min(x, y), max(x, y))]

    e_g = 0
    triple_def = {}
    for t in combinations(range(1, g + 1), 3):
        triple_def[t] = defective(t)
        e_g += triple_def[t]

    nu1 = sum(block_def.values())
    nu2 = sum(
        1
        for (x, y), d in pair_def.items()
        if d and not block_def[x] and not block_def[y]
    )

    d11 = 0
    for i in range(1, g + 1):
        if block_def[i]:
            continue
        count = sum(
            1
            for j in range(1, g + 1)
            if j != i and pdef(i, j) and not block_def[j]
        )
        d11 = max(d11, count)

    d12 = 0
    for i in range(1, g + 1):
        if block_def[i]:
            continue
        count = 0
        for j1, j2 in combinations([j for j in range(1, g + 1) if j != i], 2):
            t = tuple(sorted((i, j1, j2)))
            if triple_def[t] and not pdef(i, j1) and not pdef(i, j2) and not pdef(j1, j2):
                count += 1
        d12 = max(d12, count)

    d21 = 0
    for i1, i2 in combinations(range(1, g + 1), 2):
        if pdef(i1, i2):
            continue
        count = 0
        for j in range(1, g + 1):
            if j in (i1, i2):
                continue
            t = tuple(sorted((i1, i2, j)))
            if triple_def[t] and not pdef(i1, j) and not pdef(i2, j):
                count += 1
        d21 = max(d21, count)

    return {
        "e_g": e_g,
        "nu1": nu1,
        "nu2": nu2,
        "d11": d11,
        "d12": d12,
        "d21": d21,
    }


def brute_force_outcome(h, design, level, round_index, iteration):
    """Slice of outcomes via query over materialised vertex sets."""
    T = design.params.T
    return np.array(
        [
            query(materialize_test(design, level, round_index, iteration, t), h)
            for t in range(1, T + 1)
        ],
        dtype=np.uint8,
    )


@pytest.fixture
def tiny_instance():
    """n=27 instance with a deliberate mix of signature sizes."""
    edges = (
        (1, 2, 3),  # inside block 1 at level 1
        (1, 10, 19),  # spans all three level-1 blocks
        (4, 5, 12),  # two blocks at level 1
    )
    return Hypergraph(n=27, edges=edges)
