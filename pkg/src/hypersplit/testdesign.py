"""Non-adaptive hierarchical test design.

For each level ell = l_min .. L-1 (L = log_k n) the design runs R
independent iterations; in each iteration every one of the k^ell blocks
is assigned uniformly at random to one of T tests.  At the final level
(singleton blocks) the same procedure is repeated for `final_rounds`
rounds.  Sizes:

    T            = ceil(C1 * m_bar^(1/k))
    R            = ceil(C2 * m_bar^(1-1/k))
    final_rounds = ceil(C_prime * log_k n)
    total tests  = T * R * ((L - l_min) + final_rounds)

Assignments are reproducible: iteration r of (level, round) draws its g
values from the stream keyed by (seed, DESIGN, level, round, r).  A
design can therefore be shipped as parameters + seed and regenerated on
demand ("lazy" storage) instead of held in memory ("dense").

Construction never looks at a hypergraph or an outcome: the design is
non-adaptive by shape.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ResourceCapError
from .hypergraph import ModelParams, num_levels
from .seeds import Domain, derive_key, generator

DEFAULT_C1 = 6.0
DEFAULT_C2 = 40.0
DEFAULT_C_PRIME = 5.0

#: refuse to materialise dense assignment storage above this many bytes
DEFAULT_MEMORY_CAP = 2 << 30


@dataclass(frozen=True)
class DesignParams:
    n: int
    m_bar: float
    k: int
    C1: float
    C2: float
    C_prime: float
    seed: int
    l_min: int
    L: int
    T: int
    R: int
    final_rounds: int
    paper_faithful: bool = False

    @property
    def num_level_stages(self) -> int:
        """Intermediate levels processed: l_min .. L-1."""
        return self.L - self.l_min

    @property
    def total_tests(self) -> int:
        return self.T * self.R * (self.num_level_stages + self.final_rounds)


def derive_params(
    model: ModelParams,
    C1: float = DEFAULT_C1,
    C2: float = DEFAULT_C2,
    C_prime: float = DEFAULT_C_PRIME,
    k: int | None = None,
    seed: int | None = None,
    paper_faithful: bool = False,
) -> DesignParams:
    """Turn model parameters and constants into concrete design sizes."""
    k = k if k is not None else model.k
    if k < 3:
        raise ConfigError(f"uniformity k={k} must be >= 3")
    if paper_faithful:
        if C1 < 155:
            raise ConfigError(f"faithful constants require C1 >= 155, got {C1}")
        if C2 != C1**3:
            raise ConfigError(f"faithful constants require C2 = C1^3, got C2={C2}")
        if C_prime <= 4:
            raise ConfigError(f"faithful constants require C_prime > 4, got {C_prime}")
    if min(C1, C2, C_prime) <= 0:
        raise ConfigError("design constants must be positive")
    m_bar = model.m_bar
    L = num_levels(model.n, k)
    l_min = _first_level_k(m_bar, L, k)
    T = max(1, math.ceil(C1 * m_bar ** (1.0 / k)))
    R = max(1, math.ceil(C2 * m_bar ** (1.0 - 1.0 / k)))
    final_rounds = max(1, math.ceil(C_prime * L))
    return DesignParams(
        n=model.n,
        m_bar=m_bar,
        k=k,
        C1=C1,
        C2=C2,
        C_prime=C_prime,
        seed=model.seed if seed is None else seed,
        l_min=l_min,
        L=L,
        T=T,
        R=R,
        final_rounds=final_rounds,
        paper_faithful=paper_faithful,
    )


def _first_level_k(m_bar: float, L: int, k: int) -> int:
    # smallest ell with k^(k*ell) >= m_bar, clamped into [1, L]
    ell = 0
    while (k**k) ** ell < m_bar:
        ell += 1
    return max(1, min(ell, L))


@dataclass
class LevelDesign:
    """Assignments for one (level, round): an R x g table of test ids.

    Stored internally 0-based, block-major (g, R), so that a probe over
    iterations streams contiguously per block.  `assignment` exposes the
    1-based contract value.
    """

    level: int
    g: int
    T: int
    R: int
    stream_seed: int
    round_index: int = 0
    _assign: np.ndarray | None = field(default=None, repr=False)

    def materialize(self) -> np.ndarray:
        """The (g, R) int16/int32 assignment table, building it if lazy."""
        if self._assign is not None:
            return self._assign
        return _generate_assign(self.stream_seed, self.level, self.round_index, self.g, self.R, self.T)

    def store(self) -> None:
        self._assign = self.materialize()

    def assignment(self, iteration: int, block: int) -> int:
        """Test id in [1, T] given to `block` (1-based) at `iteration` (0-based)."""
        if not 0 <= iteration < self.R:
            raise ConfigError(f"iteration {iteration} outside 0..{self.R - 1}")
        if not 1 <= block <= self.g:
            raise ConfigError(f"block {block} outside 1..{self.g}")
        return int(self.materialize()[block - 1, iteration]) + 1


def _dtype_for(T: int):
    return np.int16 if T <= np.iinfo(np.int16).max else np.int32


def _generate_assign(seed: int, level: int, round_index: int, g: int, R: int, T: int) -> np.ndarray:
    dtype = _dtype_for(T)
    rows = np.empty((R, g), dtype=dtype)
    for r in range(R):
        key = derive_key(seed, Domain.DESIGN, level, round_index, r)
        rows[r] = generator(key).integers(0, T, size=g, dtype=dtype)
    return np.ascontiguousarray(rows.T)


@dataclass
class TestDesign:
    params: DesignParams
    levels: list[LevelDesign]
    final: list[LevelDesign]

    @property
    def total_tests(self) -> int:
        return self.params.total_tests

    def count_emitted_tests(self) -> int:
        """Count tests design-object by design-object (identity check)."""
        n = sum(ld.T * ld.R for ld in self.levels)
        n += sum(fd.T * fd.R for fd in self.final)
        return n

    def level_design(self, level: int) -> LevelDesign:
        p = self.params
        if not p.l_min <= level < p.L:
            raise ConfigError(f"level {level} outside {p.l_min}..{p.L - 1}")
        return self.levels[level - p.l_min]

    def assignment_of(self, level: int, iteration: int, block: int, round_index: int | None = None) -> int:
        """Stored h value for a block; O(1) on dense storage."""
        if level == self.params.L:
            if round_index is None or not 0 <= round_index < self.params.final_rounds:
                raise ConfigError("final level requires a round index in range")
            return self.final[round_index].assignment(iteration, block)
        return self.level_design(level).assignment(iteration, block)

    def export_dict(self) -> dict:
        """Seed + dimensions only; assignments are regenerable, not shipped."""
        p = self.params
        return {
            "n": p.n,
            "m_bar": p.m_bar,
            "k": p.k,
            "C1": p.C1,
            "C2": p.C2,
            "C_prime": p.C_prime,
            "seed": p.seed,
            "l_min": p.l_min,
            "L": p.L,
            "T": p.T,
            "R": p.R,
            "final_rounds": p.final_rounds,
            "paper_faithful": p.paper_faithful,
            "total_tests": p.total_tests,
            "levels": [{"level": ld.level, "g": ld.g, "T": ld.T, "R": ld.R} for ld in self.levels],
            "final": [{"level": fd.level, "g": fd.g, "round": fd.round_index} for fd in self.final],
        }

    def export_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.export_dict(), f, indent=2)
            f.write("\n")


def estimate_memory_bytes(params: DesignParams) -> int:
    itemsize = np.dtype(_dtype_for(params.T)).itemsize
    cells = sum(params.k**ell * params.R for ell in range(params.l_min, params.L))
    cells += params.final_rounds * params.n * params.R
    return cells * itemsize


def build_design(
    params: DesignParams,
    storage: str = "auto",
    memory_cap_bytes: int = DEFAULT_MEMORY_CAP,
) -> TestDesign:
    """Create the design; `storage` is "dense", "lazy" or "auto".

    Dense storage materialises every assignment table up front and raises
    ResourceCapError when the estimate exceeds the cap.  Lazy storage
    regenerates tables from the seed on each access.  Auto picks dense
    when it fits.
    """
    if storage not in ("auto", "dense", "lazy"):
        raise ConfigError(f"unknown storage mode {storage!r}")
    estimate = estimate_memory_bytes(params)
    if storage == "dense" and estimate > memory_cap_bytes:
        raise ResourceCapError(
            f"dense design storage needs ~{estimate} bytes (cap {memory_cap_bytes})",
            estimate=estimate,
        )
    dense = storage == "dense" or (storage == "auto" and estimate <= memory_cap_bytes)

    levels = [
        LevelDesign(level=ell, g=params.k**ell, T=params.T, R=params.R, stream_seed=params.seed)
        for ell in range(params.l_min, params.L)
    ]
    final = [
        LevelDesign(
            level=params.L,
            g=params.n,
            T=params.T,
            R=params.R,
            stream_seed=params.seed,
            round_index=rnd,
        )
        for rnd in range(params.final_rounds)
    ]
    design = TestDesign(params=params, levels=levels, final=final)
    if dense:
        for ld in design.levels:
            ld.store()
        for fd in design.final:
            fd.store()
    return design
