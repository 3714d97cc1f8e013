"""Random hypergraph model, block arithmetic, and ground-truth queries.

Vertices are 1-indexed, 1..n, with n padded up to a power of three (or a
power of k for k-uniform runs).  Padding vertices sit at the top of the
index range and never appear in an edge, so they cannot change any
pooled-test outcome.  Edges are stored canonically: each tuple ascending,
tuples sorted lexicographically, no duplicates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from ._ranking import unrank_ktuple, unrank_triples
from .errors import ConfigError
from .seeds import generator

#: expected-edge-count threshold below which sampling skips over triple
#: ranks geometrically instead of enumerating the whole complex
SPARSE_SAMPLING_THRESHOLD = 1_000_000


def pad_to_power(n_raw: int, k: int = 3) -> int:
    """Smallest k^p >= n_raw with p >= 1."""
    if n_raw < k:
        raise ConfigError(f"need at least {k} vertices, got {n_raw}")
    n = k
    while n < n_raw:
        n *= k
    return n


def pad_to_power_of_three(n_raw: int) -> int:
    """Smallest power of three >= n_raw (n_raw >= 3 required)."""
    return pad_to_power(n_raw, 3)


@dataclass(frozen=True)
class ModelParams:
    """Edge-probability model: exactly one of q, theta, m_bar is given.

    Derivations (natural logs):
      q     = multiplier * n^(-3(1-theta))   when theta is given
      m_bar = q * C(n, 3)                    always (padded n)
      theta = log(m_bar) / (3 log n)         when q or m_bar is given

    For k-uniform runs the exponents use k instead of 3.
    """

    n_raw: int
    n: int
    q: float
    theta: float
    m_bar: float
    seed: int
    multiplier: float = 1.0
    k: int = 3

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ConfigError(f"edge probability q={self.q} outside [0, 1]")


def make_model_params(
    n_raw: int,
    *,
    q: float | None = None,
    theta: float | None = None,
    m_bar: float | None = None,
    multiplier: float = 1.0,
    seed: int = 0,
    k: int = 3,
) -> ModelParams:
    """Build ModelParams from exactly one of q / theta / m_bar."""
    given = [name for name, v in (("q", q), ("theta", theta), ("m_bar", m_bar)) if v is not None]
    if len(given) != 1:
        raise ConfigError(f"supply exactly one of q, theta, m_bar (got {given or 'none'})")
    if multiplier <= 0:
        raise ConfigError("q multiplier must be positive")
    n = pad_to_power(n_raw, k)
    total = comb(n, k)
    # the multiplier is the free constant in q = c * n^(-k(1-theta)); it has
    # no effect when q or m_bar is supplied directly
    if q is not None:
        qv = float(q)
    elif theta is not None:
        if not 0.0 < theta < 1.0:
            raise ConfigError(f"theta={theta} outside (0, 1)")
        qv = multiplier * n ** (-k * (1.0 - theta))
    else:
        if m_bar < 0:
            raise ConfigError("m_bar must be non-negative")
        qv = m_bar / total
    if not 0.0 <= qv <= 1.0:
        raise ConfigError(f"derived edge probability {qv} outside [0, 1]")
    mb = qv * total
    th = theta if theta is not None else _theta_of(mb, n, k)
    return ModelParams(n_raw=n_raw, n=n, q=qv, theta=th, m_bar=mb, seed=seed, multiplier=multiplier, k=k)


def _theta_of(m_bar: float, n: int, k: int = 3) -> float:
    # sparsity exponent from m_bar = n^(k*theta); degenerate m_bar maps to 0
    if m_bar <= 1.0:
        return 0.0
    return math.log(m_bar) / (k * math.log(n))


@dataclass(frozen=True)
class Hypergraph:
    """n vertices (1..n, padded) and a canonical ascending edge set."""

    n: int
    edges: tuple[tuple[int, ...], ...]
    n_raw: int = 0
    k: int = 3

    def __post_init__(self):
        if self.n_raw == 0:
            object.__setattr__(self, "n_raw", self.n)
        seen = set()
        for e in self.edges:
            if len(e) != self.k or len(set(e)) != self.k:
                raise ConfigError(f"edge {e} is not {self.k} distinct vertices")
            if list(e) != sorted(e):
                raise ConfigError(f"edge {e} not ascending")
            if e[0] < 1 or e[-1] > self.n_raw:
                raise ConfigError(f"edge {e} outside vertex range 1..{self.n_raw}")
            if e in seen:
                raise ConfigError(f"duplicate edge {e}")
            seen.add(e)
        if tuple(sorted(self.edges)) != self.edges:
            object.__setattr__(self, "edges", tuple(sorted(self.edges)))

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_array(self) -> np.ndarray:
        """Edges as an (m, k) int64 array (1-based vertex ids)."""
        if not self.edges:
            return np.empty((0, self.k), dtype=np.int64)
        return np.array(self.edges, dtype=np.int64)


def from_edge_array(n: int, arr: np.ndarray, n_raw: int | None = None, k: int = 3) -> Hypergraph:
    arr = np.sort(np.asarray(arr, dtype=np.int64), axis=1)
    rows = sorted({tuple(int(v) for v in row) for row in arr})
    return Hypergraph(n=n, edges=tuple(rows), n_raw=n_raw or n, k=k)


def sample_er(params: ModelParams) -> Hypergraph:
    """Draw H ~ ER(n, q): each k-subset of the first n_raw vertices is an
    edge independently with probability q.  Deterministic given the seed.

    Below SPARSE_SAMPLING_THRESHOLD expected edges, skips over subset
    ranks with geometric gaps (O(m) work); above it, Bernoulli-samples
    rank chunks.  Both paths are reproducible; which one runs is itself a
    deterministic function of the parameters.
    """
    n_raw, k, q = params.n_raw, params.k, params.q
    total = comb(n_raw, k)
    rng = generator(params.seed)

    if q <= 0.0:
        ranks = np.empty(0, dtype=np.int64)
    elif q >= 1.0:
        ranks = np.arange(total, dtype=np.int64)
    elif q * total < SPARSE_SAMPLING_THRESHOLD:
        ranks = _geometric_skip_ranks(rng, q, total)
    else:
        ranks = _dense_ranks(rng, q, total)

    if k == 3:
        rows = unrank_triples(ranks, n_raw) + 1
        edges = tuple(tuple(int(v) for v in row) for row in rows)
    else:
        edges = tuple(tuple(v + 1 for v in unrank_ktuple(int(r), n_raw, k)) for r in ranks)
    return Hypergraph(n=params.n, edges=edges, n_raw=n_raw, k=k)


def _geometric_skip_ranks(rng, q: float, total: int) -> np.ndarray:
    """Ranks of selected subsets via geometric gap jumps."""
    log1mq = math.log1p(-q)
    expected = q * total
    batch = max(64, int(expected + 6.0 * math.sqrt(expected + 1.0)))
    parts = []
    pos = -1
    while pos < total:
        u = rng.random(batch)
        gaps = 1 + np.floor(np.log(u) / log1mq).astype(np.int64)
        ranks = pos + np.cumsum(gaps)
        parts.append(ranks)
        pos = int(ranks[-1])
        batch = 1024
    ranks = np.concatenate(parts)
    return ranks[ranks < total]


def _dense_ranks(rng, q: float, total: int, chunk: int = 1 << 22) -> np.ndarray:
    parts = []
    for start in range(0, total, chunk):
        size = min(chunk, total - start)
        mask = rng.random(size) < q
        parts.append(start + np.nonzero(mask)[0].astype(np.int64))
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


# ---------------------------------------------------------------------------
# block arithmetic


def block_of(v: int, n: int, level: int, k: int = 3) -> int:
    """Index (1-based) of the level-`level` block containing vertex v.

    Level ell splits 1..n into k^ell equal contiguous intervals.
    """
    g = _check_level(n, level, k)
    if not 1 <= v <= n:
        raise ConfigError(f"vertex {v} outside 1..{n}")
    size = n // g
    return (v - 1) // size + 1


def _check_level(n: int, level: int, k: int = 3) -> int:
    if level < 0:
        raise ConfigError(f"negative level {level}")
    g = k**level
    if g > n or n % g != 0:
        raise ConfigError(f"level {level} invalid for n={n} (k={k})")
    return g


def num_levels(n: int, k: int = 3) -> int:
    """log_k n for n a power of k."""
    L = 0
    m = 1
    while m < n:
        m *= k
        L += 1
    if m != n:
        raise ConfigError(f"n={n} is not a power of {k}")
    return L


def block_vertices(block: int, n: int, level: int, k: int = 3) -> range:
    """Vertices (1-based) of a block; contiguous by construction."""
    g = _check_level(n, level, k)
    if not 1 <= block <= g:
        raise ConfigError(f"block {block} outside 1..{g}")
    size = n // g
    return range((block - 1) * size + 1, block * size + 1)


def edge_block_signature(edge: tuple[int, ...], n: int, level: int, k: int = 3) -> tuple[int, ...]:
    """Sorted multiset of the blocks hit by an edge's vertices."""
    return tuple(sorted(block_of(v, n, level, k) for v in edge))


def edge_signatures(h: Hypergraph, level: int) -> np.ndarray:
    """All edges' block multisets at one level, (m, k) int64, rows sorted."""
    g = _check_level(h.n, level, h.k)
    size = h.n // g
    arr = (h.edge_array() - 1) // size  # 0-based blocks
    return np.sort(arr, axis=1) + 1


def query(subset, h: Hypergraph) -> int:
    """Edge-detecting query: 1 iff some edge is fully inside `subset`."""
    s = subset if isinstance(subset, (set, frozenset)) else set(subset)
    for e in h.edges:
        if all(v in s for v in e):
            return 1
    return 0


# ---------------------------------------------------------------------------
# text format: line 1 "n_raw n m", then m ascending lines "u v w"


def write_text(h: Hypergraph, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{h.n_raw} {h.n} {h.m}\n")
        for e in h.edges:
            f.write(" ".join(str(v) for v in e) + "\n")


def read_text(path) -> Hypergraph:
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 3:
            raise ConfigError("malformed header: expected 'n_raw n m'")
        n_raw, n, m = (int(x) for x in header)
        if n != pad_to_power(n_raw, 3):
            raise ConfigError(f"header n={n} is not the padded size for n_raw={n_raw}")
        edges = []
        for lineno, line in enumerate(f, start=2):
            if not line.strip():
                continue
            vals = tuple(int(x) for x in line.split())
            if len(vals) != 3:
                raise ConfigError(f"line {lineno}: expected 3 vertex ids")
            if not vals[0] < vals[1] < vals[2]:
                raise ConfigError(f"line {lineno}: triple {vals} not strictly ascending")
            if vals[0] < 1 or vals[2] > n_raw:
                raise ConfigError(f"line {lineno}: vertex id outside 1..{n_raw}")
            edges.append(vals)
        if len(edges) != m:
            raise ConfigError(f"header claims {m} edges, file has {len(edges)}")
        if len(set(edges)) != len(edges):
            raise ConfigError("duplicate edges in file")
        return Hypergraph(n=n, edges=tuple(sorted(edges)), n_raw=n_raw)
