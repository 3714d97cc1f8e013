"""Deterministic coarse-to-fine decoder and the COMP baseline.

The decoder walks levels l_min .. L-1 keeping a set of possibly-defective
(PD) block triples.  A triple is eliminated once some iteration co-assigns
all of its blocks to a test whose outcome is negative; surviving triples
are refined into all 84 distinct-block child triples (C(9,3) over the
nine child blocks).  At the final, singleton level every triple that no
negative test rules out across all rounds is declared an edge.

Structural guarantee used throughout: a test containing all blocks of a
defective triple also contains the witnessing edge, so its outcome is
positive and defective triples are never eliminated -- the estimate can
only over-shoot, never miss an edge.

Cost accounting: a probe = one examined (triple, iteration) pair.  Scans
stop at the first negative co-assignment, and the probe counter records
the iterations examined up to that point (all of them for survivors).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from . import backend
from ._ranking import all_ktuples
from .errors import ConfigError, ResourceCapError
from .oracle import OutcomeTable
from .testdesign import DesignParams, TestDesign

#: ceiling on C(k^2, k) child tuples per refinement for k-uniform runs
MAX_REFINE_CHILDREN = 20_000

#: largest n for which the COMP baseline will enumerate all C(n,3) triples
DEFAULT_COMP_CAP = 3**5


@dataclass(frozen=True)
class PDSet:
    """Canonical possibly-defective block tuples at one level (0-based array)."""

    level: int
    blocks: np.ndarray  # (P, k) int32, rows ascending, lexicographically sorted

    @property
    def size(self) -> int:
        return int(self.blocks.shape[0])

    def as_tuples(self) -> set[tuple[int, ...]]:
        """1-based canonical tuples."""
        return {tuple(int(b) + 1 for b in row) for row in self.blocks}


@dataclass
class DecodeResult:
    estimated_edges: tuple[tuple[int, ...], ...]
    pd_sizes: list[int]
    outcome_checks: int
    eliminations_per_level: list[int]
    wall_time_ms: float
    levels: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "estimated_edges": [list(e) for e in self.estimated_edges],
            "pd_sizes": self.pd_sizes,
            "outcome_checks": self.outcome_checks,
            "eliminations_per_level": self.eliminations_per_level,
            "wall_time_ms": self.wall_time_ms,
        }


def init_pd(params: DesignParams) -> PDSet:
    """All C(g, k) ascending tuples at the starting level."""
    g = params.k**params.l_min
    if g < params.k:
        raise ConfigError(f"starting level has {g} < {params.k} blocks")
    tuples = all_ktuples(g, params.k).astype(np.int32)
    return PDSet(level=params.l_min, blocks=tuples)


def refine_children_per_tuple(k: int) -> int:
    return comb(k * k, k)


def refine(triple: tuple[int, ...], level: int, L: int, k: int = 3) -> list[tuple[int, ...]]:
    """Child tuples of one PD tuple (1-based in, 1-based out).

    Block b's children are {k(b-1)+1, ..., kb}; the children of a tuple
    are all C(k^2, k) ascending k-subsets of its k*k child blocks.
    """
    if level >= L:
        raise ConfigError(f"cannot refine at the final level {level}")
    if refine_children_per_tuple(k) > MAX_REFINE_CHILDREN:
        raise ResourceCapError(
            f"refinement would emit C({k * k},{k}) children per tuple "
            f"(> {MAX_REFINE_CHILDREN}); k too large"
        )
    child_blocks = sorted(c for b in triple for c in range(k * (b - 1) + 1, k * b + 1))
    return [tuple(sub) for sub in combinations(child_blocks, k)]


_COMB_CACHE: dict[int, list[tuple[int, ...]]] = {}


def _comb_rows(k: int) -> list[tuple[int, ...]]:
    if k not in _COMB_CACHE:
        _COMB_CACHE[k] = list(combinations(range(k * k), k))
    return _COMB_CACHE[k]


def _refine_batch(blocks: np.ndarray, k: int) -> np.ndarray:
    """Vectorised refine + dedup for a (S, k) 0-based survivor array.

    Children are encoded as integer keys combination-by-combination so the
    peak transient is one key vector per child, not an (S, C, k) cube.
    """
    if blocks.shape[0] == 0:
        return blocks
    offsets = np.arange(k, dtype=np.int64)
    # (S, k*k) child blocks; ascending because parent rows are ascending
    children = (blocks.astype(np.int64)[:, :, None] * k + offsets[None, None, :]).reshape(
        blocks.shape[0], k * k
    )
    base = int(blocks.max()) * k + k  # > any child block id
    key_parts = []
    for sel in _comb_rows(k):
        keys = children[:, sel[0]].copy()
        for col in sel[1:]:
            keys *= base
            keys += children[:, col]
        key_parts.append(keys)
    uniq_keys = np.unique(np.concatenate(key_parts))
    del key_parts
    out = np.empty((uniq_keys.size, k), dtype=np.int32)
    rem = uniq_keys
    for col in range(k - 1, -1, -1):
        out[:, col] = rem % base
        rem = rem // base
    return out


def is_eliminated(
    triple: tuple[int, ...],
    level: int,
    design: TestDesign,
    outcomes: OutcomeTable,
) -> tuple[bool, int]:
    """Early-exit elimination check for one tuple; returns (eliminated, probes).

    Probes count iterations examined: the killing iteration's index + 1,
    or every available iteration when the tuple survives.  The final
    level scans its rounds in order.
    """
    p = design.params
    row = np.array([sorted(b - 1 for b in triple)], dtype=np.int32)
    if level == p.L:
        probes = 0
        for rnd in range(p.final_rounds):
            killed = backend.probe_slab(
                design.final[rnd].materialize(), outcomes.final[rnd], row
            )[0]
            if killed:
                return True, probes + int(killed)
            probes += p.R
        return False, probes
    ld = design.level_design(level)
    killed = backend.probe_slab(ld.materialize(), outcomes.slice_for(level), row)[0]
    return (True, int(killed)) if killed else (False, p.R)


def decode(design: TestDesign, outcomes: OutcomeTable) -> DecodeResult:
    """Run the full coarse-to-fine elimination; pure in (design, outcomes)."""
    t_start = time.perf_counter()
    p = design.params
    _check_dims(p, outcomes)

    pd = init_pd(design.params)
    pd_sizes: list[int] = []
    eliminations: list[int] = []
    levels: list[int] = []
    checks = 0

    blocks = pd.blocks
    for level in range(p.l_min, p.L):
        pd_sizes.append(blocks.shape[0])
        levels.append(level)
        ld = design.level_design(level)
        killed = backend.probe_slab(ld.materialize(), outcomes.slice_for(level), blocks)
        checks += int(np.where(killed > 0, killed, p.R).sum(dtype=np.int64))
        survivors = blocks[killed == 0]
        eliminations.append(int(blocks.shape[0] - survivors.shape[0]))
        blocks = _refine_batch(survivors, p.k)

    # final level: scan rounds in order, dropping tuples as they die
    pd_sizes.append(blocks.shape[0])
    levels.append(p.L)
    alive = blocks
    final_killed = 0
    for rnd in range(p.final_rounds):
        if alive.shape[0] == 0:
            break
        killed = backend.probe_slab(design.final[rnd].materialize(), outcomes.final[rnd], alive)
        checks += int(np.where(killed > 0, killed, p.R).sum(dtype=np.int64))
        final_killed += int((killed > 0).sum())
        alive = alive[killed == 0]
    eliminations.append(final_killed)

    edges = tuple(sorted(tuple(int(b) + 1 for b in row) for row in alive))
    return DecodeResult(
        estimated_edges=edges,
        pd_sizes=pd_sizes,
        outcome_checks=checks,
        eliminations_per_level=eliminations,
        wall_time_ms=(time.perf_counter() - t_start) * 1e3,
        levels=levels,
    )


def _check_dims(p: DesignParams, outcomes: OutcomeTable) -> None:
    if outcomes.n != p.n or outcomes.T != p.T or outcomes.R != p.R:
        raise ConfigError("outcome table dimensions do not match the design")
    if outcomes.final_rounds != p.final_rounds or outcomes.l_min != p.l_min:
        raise ConfigError("outcome table slicing does not match the design")


def comp_decode(
    design: TestDesign,
    outcomes: OutcomeTable,
    n: int,
    cap: int = DEFAULT_COMP_CAP,
) -> set[tuple[int, ...]]:
    """COMP baseline: a vertex k-tuple is an edge unless some negative
    final-level test contains all of its vertices.  Brute force over all
    C(n, k) tuples using final-level outcomes only.
    """
    p = design.params
    if n != p.n:
        raise ConfigError(f"n={n} does not match design n={p.n}")
    if n > cap:
        raise ResourceCapError(f"COMP brute force refused for n={n} > cap {cap}", estimate=comb(n, p.k))
    alive = all_ktuples(n, p.k).astype(np.int32)
    for rnd in range(p.final_rounds):
        if alive.shape[0] == 0:
            break
        killed = backend.probe_slab(design.final[rnd].materialize(), outcomes.final[rnd], alive)
        alive = alive[killed == 0]
    return {tuple(int(v) + 1 for v in row) for row in alive}


def assert_pd_bound(pd_sizes: list[int], e_max_value: float) -> bool:
    """Candidate-set cap: max_l |PD| <= 168 * E_max."""
    return max(pd_sizes, default=0) <= 168.0 * e_max_value
