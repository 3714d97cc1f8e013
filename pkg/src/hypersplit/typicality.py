"""Level statistics of a hypergraph under the block hierarchy, and the
concentration checks that define "typical" instances.

All statistics derive from each edge's *block support* at a level: the
set of distinct blocks its vertices occupy (1, 2 or 3 blocks).  A block
is defective when it fully contains an edge; a pair/triple of blocks is
defective when their union does.  Working over the distinct supports
keeps everything O(m * small) instead of O(g^3):

  - a block b is defective        iff some support == {b}
  - a pair {x,y} is defective     iff x or y is defective, or some
                                  support == {x,y}
  - a triple {x,y,z} is defective iff a member block or member pair is
                                  defective, or some support == {x,y,z}

The defective-triple count e_g is computed in closed form by
inclusion-exclusion over those three layers; the triple *set* is only
materialised by `level_block_hypergraph` (output-sensitive, toy scale).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from .errors import ConfigError
from .hypergraph import Hypergraph, ModelParams, edge_signatures, num_levels

THETA_SPLIT = 2.0 / 3.0
MIN_EPSILON = 0.5


def default_epsilon(n: int, m_bar: float) -> float:
    """Chernoff-scale tolerance for the edge-count window, capped at 1/2."""
    if m_bar <= 0:
        return MIN_EPSILON
    return min(MIN_EPSILON, math.sqrt(6.0 * math.log(n) / m_bar))


def e_max(m_bar: float, theta: float) -> float:
    """Cap on the defective-triple count per level (branch on theta)."""
    if theta > THETA_SPLIT:
        return 12.0 * m_bar
    return 2.0 * m_bar * math.log(m_bar) ** 2 if m_bar > 0 else 0.0


def nu1_max(m_bar: float, theta: float, g: int) -> float:
    return 3.0 * m_bar / g**2 if theta > THETA_SPLIT else 3.0 * m_bar ** (1.0 / 3.0)


def nu2_max(m_bar: float, theta: float, g: int) -> float:
    return 9.0 * m_bar / g if theta > THETA_SPLIT else 9.0 * m_bar ** (2.0 / 3.0)


def d11_max(m_bar: float) -> float:
    return 18.0 * m_bar ** (1.0 / 3.0)


def d12_max(m_bar: float) -> float:
    return 9.0 * m_bar ** (2.0 / 3.0)


def d21_max(m_bar: float) -> float:
    return 18.0 * m_bar ** (1.0 / 3.0)


def first_level(m_bar: float, L: int) -> int:
    """ceil(log3 m_bar^(1/3)) clamped into [1, L], integer-exact."""
    ell = 0
    while 27**ell < m_bar:
        ell += 1
    return max(1, min(ell, L))


@dataclass(frozen=True)
class LevelStats:
    level: int
    g: int
    e_g: int
    nu1: int
    nu2: int
    d11: int
    d12: int
    d21: int


@dataclass
class _Supports:
    """Distinct edge supports at one level, split by support size."""

    defective_blocks: set[int]
    pairs: set[tuple[int, int]]  # exact-2 supports
    triples: set[tuple[int, int, int]]  # exact-3 supports

    @property
    def clean_pairs(self) -> set[tuple[int, int]]:
        d = self.defective_blocks
        return {p for p in self.pairs if p[0] not in d and p[1] not in d}


def _supports(h: Hypergraph, level: int) -> _Supports:
    blocks: set[int] = set()
    pairs: set[tuple[int, int]] = set()
    triples: set[tuple[int, int, int]] = set()
    for row in edge_signatures(h, level):
        support = sorted(set(int(b) for b in row))
        if len(support) == 1:
            blocks.add(support[0])
        elif len(support) == 2:
            pairs.add(tuple(support))
        else:
            triples.add(tuple(support))
    return _Supports(blocks, pairs, triples)


def defective_block_p(h: Hypergraph, level: int, i: int) -> int:
    """1 iff block i fully contains some edge."""
    return int(i in _supports(h, level).defective_blocks)


def level_block_hypergraph(h: Hypergraph, level: int) -> set[tuple[int, int, int]]:
    """The set E_g of distinct-block triples whose union contains an edge.

    Output-sensitive enumeration; intended for small g (tests, reports).
    """
    g = 3**level
    if g < 3:
        raise ConfigError(f"level {level} has fewer than 3 blocks")
    sup = _supports(h, level)
    out: set[tuple[int, int, int]] = set()
    universe = range(1, g + 1)
    for b in sup.defective_blocks:
        rest = [x for x in universe if x != b]
        for p in combinations(rest, 2):
            out.add(tuple(sorted((b,) + p)))
    for x, y in sup.pairs:
        for z in universe:
            if z != x and z != y:
                out.add(tuple(sorted((x, y, z))))
    out.update(sup.triples)
    return out


def _count_defective_triples(sup: _Supports, g: int) -> int:
    """|E_g| by inclusion-exclusion, without materialising the set."""
    nd = g - len(sup.defective_blocks)
    touching_defective = comb(g, 3) - comb(nd, 3)

    clean = sup.clean_pairs
    deg: dict[int, int] = {}
    adj: dict[int, set[int]] = {}
    for x, y in clean:
        deg[x] = deg.get(x, 0) + 1
        deg[y] = deg.get(y, 0) + 1
        adj.setdefault(x, set()).add(y)
        adj.setdefault(y, set()).add(x)
    pair_term = len(clean) * (nd - 2)
    adjacent_pairs = sum(comb(d, 2) for d in deg.values())
    triangles = sum(len(adj[x] & adj[y]) for x, y in clean) // 3
    via_pairs = pair_term - adjacent_pairs + triangles

    pure_triples = 0
    d = sup.defective_blocks
    for t in sup.triples:
        if any(b in d for b in t):
            continue
        if any(p in clean for p in combinations(t, 2)):
            continue
        pure_triples += 1
    return touching_defective + via_pairs + pure_triples


def compute_level_stats(h: Hypergraph, level: int) -> LevelStats:
    """All seven Level statistics by enumeration over edge supports."""
    g = 3**level
    if g < 3:
        raise ConfigError(f"level {level} has fewer than 3 blocks")
    if g > h.n:
        raise ConfigError(f"level {level} exceeds the finest partition of n={h.n}")
    sup = _supports(h, level)
    d = sup.defective_blocks
    clean = sup.clean_pairs

    nu1 = len(d)
    nu2 = len(clean)

    deg: dict[int, int] = {}
    for x, y in clean:
        deg[x] = deg.get(x, 0) + 1
        deg[y] = deg.get(y, 0) + 1
    d11 = max(deg.values(), default=0)

    # base -> distinct qualifying partner pairs / third blocks; a pair is
    # "defective" iff an endpoint is a defective block or it is an exact-2
    # support, so qualification reduces to set lookups
    def pair_defective(x: int, y: int) -> bool:
        return x in d or y in d or (min(x, y), max(x, y)) in sup.pairs

    d12_sets: dict[int, set[tuple[int, int]]] = {}
    d21_sets: dict[tuple[int, int], set[int]] = {}
    for t in sup.triples:
        for i in t:
            if i in d:
                continue
            j1, j2 = (b for b in t if b != i)
            if pair_defective(i, j1) or pair_defective(i, j2) or pair_defective(j1, j2):
                continue
            d12_sets.setdefault(i, set()).add((min(j1, j2), max(j1, j2)))
        for x, y in combinations(t, 2):
            (j,) = (b for b in t if b != x and b != y)
            if pair_defective(x, y):
                continue  # base pair must be non-defective
            if pair_defective(x, j) or pair_defective(y, j):
                continue
            d21_sets.setdefault((x, y), set()).add(j)
    d12 = max((len(s) for s in d12_sets.values()), default=0)
    d21 = max((len(s) for s in d21_sets.values()), default=0)

    return LevelStats(
        level=level,
        g=g,
        e_g=_count_defective_triples(sup, g),
        nu1=nu1,
        nu2=nu2,
        d11=d11,
        d12=d12,
        d21=d21,
    )


@dataclass
class TypicalityReport:
    epsilon_n: float
    theta: float
    branch: str
    m: int
    m_bar: float
    edge_count_pass: bool
    levels: list[dict] = field(default_factory=list)
    overall: bool = True

    def to_dict(self) -> dict:
        return {
            "epsilon_n": self.epsilon_n,
            "theta": self.theta,
            "branch": self.branch,
            "m": self.m,
            "m_bar": self.m_bar,
            "edge_count_pass": self.edge_count_pass,
            "levels": self.levels,
            "overall": self.overall,
        }


def check_typicality(
    h: Hypergraph, params: ModelParams, epsilon_n: float | None = None
) -> TypicalityReport:
    """Check edge-count concentration and every per-level statistic bound.

    Failures are reported, never raised.  Levels run from
    max(1, ceil(log3 m_bar^(1/3))) up to log3 n inclusive.
    """
    m_bar, theta = params.m_bar, params.theta
    eps = default_epsilon(params.n, m_bar) if epsilon_n is None else epsilon_n
    m = h.m
    cond_i = (1.0 - eps) * m_bar <= m <= (1.0 + eps) * m_bar
    branch = "theta>2/3" if theta > THETA_SPLIT else "theta<=2/3"

    L = num_levels(h.n, h.k)
    report = TypicalityReport(
        epsilon_n=eps, theta=theta, branch=branch, m=m, m_bar=m_bar, edge_count_pass=bool(cond_i)
    )
    overall = bool(cond_i)
    for level in range(first_level(m_bar, L), L + 1):
        stats = compute_level_stats(h, level)
        bounds = {
            "e_g": e_max(m_bar, theta),
            "nu1": nu1_max(m_bar, theta, stats.g),
            "nu2": nu2_max(m_bar, theta, stats.g),
            "d11": d11_max(m_bar),
            "d12": d12_max(m_bar),
            "d21": d21_max(m_bar),
        }
        passes = {
            "e_g": stats.e_g <= bounds["e_g"],
            "nu1": stats.nu1 <= bounds["nu1"],
            "nu2": stats.nu2 <= bounds["nu2"],
            "d11": stats.d11 <= bounds["d11"],
            "d12": stats.d12 <= bounds["d12"],
            "d21": stats.d21 <= bounds["d21"],
        }
        overall = overall and all(passes.values())
        report.levels.append(
            {
                "level": level,
                "g": stats.g,
                "e_g": stats.e_g,
                "nu1": stats.nu1,
                "nu2": stats.nu2,
                "d11": stats.d11,
                "d12": stats.d12,
                "d21": stats.d21,
                "bounds": bounds,
                "pass": passes,
            }
        )
    report.overall = overall
    return report
