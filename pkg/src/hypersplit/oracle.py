"""Pooled-test outcome evaluation for a hypergraph under a TestDesign.

The fast path is edge-centric: a test is positive iff some edge has all
of its blocks assigned to that test in that iteration, so each (level,
round) slice costs O(m) instead of O(n).  `materialize_test` provides the
slow, vertex-set view of a single test for cross-checking against the
query model.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import ConfigError
from .hypergraph import Hypergraph, num_levels
from .testdesign import TestDesign

_MAGIC = b"HSO1"


@dataclass
class OutcomeTable:
    """Outcome bits per (level, round): uint8 arrays of shape (R, T)."""

    n: int
    T: int
    R: int
    l_min: int
    L: int
    final_rounds: int
    levels: dict[int, np.ndarray] = field(default_factory=dict)
    final: list[np.ndarray] = field(default_factory=list)

    @property
    def positive_test_count(self) -> int:
        total = sum(int(a.sum()) for a in self.levels.values())
        total += sum(int(a.sum()) for a in self.final)
        return total

    def slice_for(self, level: int, round_index: int | None = None) -> np.ndarray:
        if level == self.L:
            if round_index is None or not 0 <= round_index < self.final_rounds:
                raise ConfigError("final level requires a round index in range")
            return self.final[round_index]
        if level not in self.levels:
            raise ConfigError(f"no outcomes stored for level {level}")
        return self.levels[level]


def _level_signatures(h: Hypergraph, level: int) -> np.ndarray:
    """Edges as 0-based block-id rows at a level (unsorted is fine here)."""
    size = h.n // (h.k**level)
    return ((h.edge_array() - 1) // size).astype(np.int32)


def evaluate_outcomes(h: Hypergraph, design: TestDesign) -> OutcomeTable:
    """Outcome table for every slice of the design, edge-centrically."""
    p = design.params
    if h.n != p.n:
        raise ConfigError(f"hypergraph n={h.n} does not match design n={p.n}")
    if h.k != p.k:
        raise ConfigError(f"hypergraph uniformity {h.k} does not match design k={p.k}")
    table = OutcomeTable(
        n=p.n, T=p.T, R=p.R, l_min=p.l_min, L=p.L, final_rounds=p.final_rounds
    )
    for ld in design.levels:
        sigs = _level_signatures(h, ld.level)
        table.levels[ld.level] = backend.outcomes_slab(ld.materialize(), sigs, p.T)
    if design.final:
        sigs = _level_signatures(h, p.L)
        for fd in design.final:
            table.final.append(backend.outcomes_slab(fd.materialize(), sigs, p.T))
    return table


def materialize_test(
    design: TestDesign, level: int, round_index: int | None, iteration: int, t: int
) -> set[int]:
    """Vertex set of test t (1-based) at one (level, round, iteration)."""
    p = design.params
    if level == p.L:
        ld = design.final[_checked_round(p, round_index)]
    else:
        ld = design.level_design(level)
    if not 1 <= t <= p.T:
        raise ConfigError(f"test id {t} outside 1..{p.T}")
    if not 0 <= iteration < ld.R:
        raise ConfigError(f"iteration {iteration} outside 0..{ld.R - 1}")
    column = ld.materialize()[:, iteration]
    blocks = np.nonzero(column == t - 1)[0]  # 0-based block ids
    size = p.n // ld.g
    out: set[int] = set()
    for b in blocks:
        start = int(b) * size
        out.update(range(start + 1, start + size + 1))
    return out


def _checked_round(p, round_index) -> int:
    if round_index is None or not 0 <= round_index < p.final_rounds:
        raise ConfigError("final level requires a round index in range")
    return round_index


# ---------------------------------------------------------------------------
# binary export: header (magic, n, T, R, level_count, final_rounds) then one
# packed little-endian bit row per (slice, iteration), slices ordered levels
# ascending then final rounds ascending


def write_outcomes(table: OutcomeTable, path) -> None:
    header = struct.pack(
        "<4sIIIII", _MAGIC, table.n, table.T, table.R, len(table.levels), table.final_rounds
    )
    with open(path, "wb") as f:
        f.write(header)
        for level in sorted(table.levels):
            f.write(np.packbits(table.levels[level], axis=1, bitorder="little").tobytes())
        for arr in table.final:
            f.write(np.packbits(arr, axis=1, bitorder="little").tobytes())


def read_outcomes(path) -> OutcomeTable:
    with open(path, "rb") as f:
        raw = f.read(struct.calcsize("<4sIIIII"))
        magic, n, T, R, level_count, final_rounds = struct.unpack("<4sIIIII", raw)
        if magic != _MAGIC:
            raise ConfigError(f"bad magic {magic!r}; not an outcome file")
        L = num_levels(n, 3)
        l_min = L - level_count
        row_bytes = (T + 7) // 8
        table = OutcomeTable(n=n, T=T, R=R, l_min=l_min, L=L, final_rounds=final_rounds)

        def read_slice() -> np.ndarray:
            data = np.frombuffer(f.read(R * row_bytes), dtype=np.uint8).reshape(R, row_bytes)
            return np.unpackbits(data, axis=1, bitorder="little")[:, :T].astype(np.uint8)

        for level in range(l_min, L):
            table.levels[level] = read_slice()
        for _ in range(final_rounds):
            table.final.append(read_slice())
    return table
