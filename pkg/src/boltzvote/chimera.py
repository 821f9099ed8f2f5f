"""Chimera hardware topology, complete-graph minor embedding, and decoding.

The target topology is a grid of K_{4,4} cells: each cell holds 4
"vertical" and 4 "horizontal" qubits, fully cross-connected inside the
cell; vertical qubits couple to the same shore index in the cell below,
horizontal qubits to the same shore index in the cell to the right.

Complete graphs are embedded with a deterministic triangular construction:
logical units are packed four to a cell-group, and each chain is an L-shape
of one horizontal arm and one vertical arm meeting on the grid diagonal.
Longer chains (2x/3x) are produced by embedding a proportionally larger
clique and merging consecutive chains.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import networkx as nx
import numpy as np

from . import validation
from .errors import (
    DimensionMismatch,
    EmbeddingCapacityError,
    EmbeddingError,
)
from .model import IsingProblem


class ChimeraGraph:
    """Grid of cross-connected K_{shore,shore} cells.

    Qubit ``(row, col, u, k)`` has linear index
    ``((row * cols) + col) * 2 * shore + u * shore + k`` where ``u`` is 0
    for vertical and 1 for horizontal qubits and ``k`` is the shore index.
    """

    def __init__(self, rows: int, cols: int, shore: int = 4):
        if rows < 1 or cols < 1 or shore < 1:
            raise ValueError("rows, cols, and shore must be positive")
        self.rows = int(rows)
        self.cols = int(cols)
        self.shore = int(shore)
        self.edges = frozenset(self._build_edges())
        self._neighbors: dict[int, frozenset[int]] | None = None

    @property
    def n_qubits(self) -> int:
        return self.rows * self.cols * 2 * self.shore

    def qubit(self, row: int, col: int, u: int, k: int) -> int:
        """Linear index of a qubit from its grid coordinates."""
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise ValueError(f"cell ({row}, {col}) outside grid")
        if u not in (0, 1) or not 0 <= k < self.shore:
            raise ValueError("bad orientation or shore index")
        return ((row * self.cols) + col) * 2 * self.shore + u * self.shore + k

    def _build_edges(self):
        edges = []
        for r in range(self.rows):
            for c in range(self.cols):
                for k1 in range(self.shore):
                    v = self.qubit(r, c, 0, k1)
                    for k2 in range(self.shore):
                        edges.append(_norm(v, self.qubit(r, c, 1, k2)))
                if r + 1 < self.rows:
                    for k in range(self.shore):
                        edges.append(
                            _norm(self.qubit(r, c, 0, k), self.qubit(r + 1, c, 0, k))
                        )
                if c + 1 < self.cols:
                    for k in range(self.shore):
                        edges.append(
                            _norm(self.qubit(r, c, 1, k), self.qubit(r, c + 1, 1, k))
                        )
        return edges

    def has_edge(self, p: int, q: int) -> bool:
        return _norm(p, q) in self.edges

    def neighbors(self, q: int) -> frozenset[int]:
        if self._neighbors is None:
            adj: dict[int, set[int]] = {i: set() for i in range(self.n_qubits)}
            for a, b in self.edges:
                adj[a].add(b)
                adj[b].add(a)
            self._neighbors = {i: frozenset(s) for i, s in adj.items()}
        return self._neighbors[q]


def _norm(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Embedding:
    """Map from logical unit to its ordered chain of physical qubits."""

    chains: tuple[tuple[int, ...], ...]

    @property
    def n_logical(self) -> int:
        return len(self.chains)

    def chain(self, logical: int) -> tuple[int, ...]:
        return self.chains[logical]

    def to_json(self) -> str:
        return json.dumps({str(i): list(c) for i, c in enumerate(self.chains)})

    @classmethod
    def from_json(cls, text: str) -> "Embedding":
        raw = json.loads(text)
        chains = [tuple(raw[str(i)]) for i in range(len(raw))]
        return cls(tuple(chains))


def validate_embedding(emb: Embedding, graph: ChimeraGraph) -> None:
    """Raise ``EmbeddingError`` unless all embedding invariants hold.

    Checks chain disjointness, per-chain connectivity within the graph, and
    the presence of at least one coupler between every pair of chains.
    """
    seen: set[int] = set()
    for i, chain in enumerate(emb.chains):
        if not chain:
            raise EmbeddingError(f"chain {i} is empty")
        members = set(chain)
        if len(members) != len(chain):
            raise EmbeddingError(f"chain {i} repeats a qubit")
        if members & seen:
            raise EmbeddingError(f"chain {i} overlaps another chain")
        seen |= members
        if any(q < 0 or q >= graph.n_qubits for q in chain):
            raise EmbeddingError(f"chain {i} uses a qubit outside the graph")
        sub = nx.Graph()
        sub.add_nodes_from(chain)
        sub.add_edges_from(
            (p, q) for p in chain for q in graph.neighbors(p) if q in members
        )
        if not nx.is_connected(sub):
            raise EmbeddingError(f"chain {i} is not connected")
    for i in range(emb.n_logical):
        for j in range(i + 1, emb.n_logical):
            if not _coupling_edges(emb.chains[i], emb.chains[j], graph):
                raise EmbeddingError(f"chains {i} and {j} are not coupled")


def _coupling_edges(chain_a, chain_b, graph: ChimeraGraph):
    members_b = set(chain_b)
    return [
        (p, q) for p in chain_a for q in graph.neighbors(p) if q in members_b
    ]


def clique_embedding(k: int, graph: ChimeraGraph) -> Embedding:
    """Deterministic embedding of the complete graph K_k.

    Unit ``v`` in cell-group ``g = v // shore`` owns the horizontal qubits
    of row ``g`` up to the diagonal and the vertical qubits of column ``g``
    from the diagonal down, all at shore index ``v % shore``; chains have
    at most ``ceil(k / shore) + 1`` qubits.  A trailing group holding a
    single unit drops its vertical corner, so K_1 is a single qubit.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    capacity = graph.shore * min(graph.rows, graph.cols)
    if k > capacity:
        raise EmbeddingCapacityError(
            f"K_{k} does not fit: capacity is {capacity} "
            f"(shore {graph.shore} x min({graph.rows}, {graph.cols}))"
        )
    t = math.ceil(k / graph.shore)
    chains = []
    for v in range(k):
        g, shore_idx = divmod(v, graph.shore)
        horizontal = [graph.qubit(g, c, 1, shore_idx) for c in range(g + 1)]
        vertical = [graph.qubit(r, g, 0, shore_idx) for r in range(g, t)]
        last_group_size = k - g * graph.shore
        if g == t - 1 and last_group_size == 1:
            vertical = []  # no higher group and no sibling to reach
        chains.append(tuple(horizontal + vertical))
    emb = Embedding(tuple(chains))
    validate_embedding(emb, graph)
    return emb


def stretch_embedding(k: int, multiplier: int, graph: ChimeraGraph) -> Embedding:
    """Embed K_k with chains lengthened by merging a larger clique's chains.

    Builds the K_{k * multiplier} embedding and fuses each run of
    ``multiplier`` consecutive chains into one logical chain, then
    re-validates the result.
    """
    if multiplier not in (1, 2, 3):
        raise ValueError("multiplier must be 1, 2, or 3")
    if multiplier == 1:
        return clique_embedding(k, graph)
    base = clique_embedding(k * multiplier, graph)
    merged = tuple(
        tuple(
            q
            for part in base.chains[v * multiplier : (v + 1) * multiplier]
            for q in part
        )
        for v in range(k)
    )
    emb = Embedding(merged)
    validate_embedding(emb, graph)
    return emb


class EmbeddingPlan:
    """Precomputed structure for repeatedly embedding problem parameters.

    Splitting rules: each logical field is divided equally over its chain,
    each logical coupling equally over every physical coupler joining the
    two chains, and every intra-chain coupler receives ``+chain_strength``
    (positive couplings favour alignment).
    """

    def __init__(self, emb: Embedding, graph: ChimeraGraph, validate: bool = True):
        if validate:
            validate_embedding(emb, graph)
        self.embedding = emb
        self.graph = graph
        self.chain_arrays = [np.array(c, dtype=np.intp) for c in emb.chains]
        self.intra_pairs = []
        for chain in emb.chains:
            members = set(chain)
            self.intra_pairs.extend(
                (p, q)
                for p in chain
                for q in graph.neighbors(p)
                if q in members and p < q
            )
        self.inter_pairs: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for i in range(emb.n_logical):
            for j in range(i + 1, emb.n_logical):
                self.inter_pairs[(i, j)] = _coupling_edges(
                    emb.chains[i], emb.chains[j], graph
                )

    @property
    def active_qubits(self) -> np.ndarray:
        return np.sort(np.concatenate(self.chain_arrays))

    def embed(self, logical: IsingProblem, chain_strength: float) -> IsingProblem:
        if logical.n_spins != self.embedding.n_logical:
            raise DimensionMismatch(
                f"embedding is for {self.embedding.n_logical} logical units, "
                f"problem has {logical.n_spins}"
            )
        if not chain_strength > 0:
            raise ValueError("chain_strength must be positive")
        n = self.graph.n_qubits
        h = np.zeros(n)
        j = np.zeros((n, n))
        for i, chain in enumerate(self.chain_arrays):
            h[chain] = logical.fields_h[i] / chain.shape[0]
        for (a, b), couplers in self.inter_pairs.items():
            if not couplers:
                continue
            value = logical.couplings_J[a, b] / len(couplers)
            for p, q in couplers:
                j[p, q] += value
                j[q, p] += value
        for p, q in self.intra_pairs:
            j[p, q] += chain_strength
            j[q, p] += chain_strength
        return IsingProblem(h, j, logical.energy_offset)

    def default_chain_strength(self, logical: IsingProblem) -> float:
        """Twice the largest per-coupler magnitude after splitting."""
        best = 0.0
        for (a, b), couplers in self.inter_pairs.items():
            if couplers:
                best = max(best, abs(logical.couplings_J[a, b]) / len(couplers))
        return 2.0 * best if best > 0.0 else 1.0


def embed_ising(
    logical: IsingProblem,
    emb: Embedding,
    graph: ChimeraGraph,
    chain_strength: float,
) -> IsingProblem:
    """Physical spin problem over all graph qubits realizing ``logical``."""
    return EmbeddingPlan(emb, graph).embed(logical, chain_strength)


def majority_vote_decode(batch, emb: Embedding, seed: int) -> np.ndarray:
    """Resolve each chain of each read to one logical spin by majority.

    Exact ties fall back to a fair coin from a stream seeded by ``seed`` and
    keyed by (read, logical) position, so decoding is deterministic and
    independent of evaluation order.
    """
    spins = validation.check_spin_batch(batch)
    reads = spins.shape[0]
    k = emb.n_logical
    sums = np.empty((reads, k), dtype=np.int64)
    for i, chain in enumerate(emb.chains):
        sums[:, i] = spins[:, list(chain)].sum(axis=1)
    coins = np.random.default_rng(seed).random((reads, k))
    out = np.where(sums > 0, 1, -1).astype(np.int8)
    ties = sums == 0
    out[ties] = np.where(coins[ties] < 0.5, 1, -1)
    return out


def chain_break_fraction(batch, emb: Embedding) -> float:
    """Fraction of (read, chain) pairs whose chain spins are not unanimous."""
    spins = validation.check_spin_batch(batch)
    reads = spins.shape[0]
    broken = 0
    for chain in emb.chains:
        chain_spins = spins[:, list(chain)]
        broken += int((np.abs(chain_spins.sum(axis=1)) != len(chain)).sum())
    return broken / (reads * emb.n_logical)
