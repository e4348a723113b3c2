"""Construction, perturbation and serialization of the selection-prior graph."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class PriorGraph:
    """Symmetric nonnegative edge-weight matrix with a zero diagonal.

    Weights need not be 0/1; any nonnegative real expresses the strength of
    joint inclusion of the two endpoints.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("graph weights must be a square matrix")
        if not np.array_equal(w, w.T):
            raise ValueError("graph weights must be symmetric")
        if np.any(np.diag(w) != 0):
            raise ValueError("graph diagonal must be zero")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("graph weights must be finite and nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def p(self) -> int:
        return self.weights.shape[0]


def empty_graph(p: int) -> PriorGraph:
    """Graph with no edges; the prior then treats covariates independently."""
    if p < 1:
        raise ValueError("p must be positive")
    return PriorGraph(np.zeros((p, p)))


def from_precision_pattern(omega: np.ndarray, tol: float = 1e-8) -> PriorGraph:
    """Adjacency of the nonzero pattern of a symmetric precision matrix.

    Off-diagonal entries with |omega_ij| > tol become unit edges; the diagonal
    is discarded.
    """
    omega = np.asarray(omega, dtype=float)
    if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
        raise ValueError("omega must be square")
    if not np.allclose(omega, omega.T, rtol=0.0, atol=tol):
        raise ValueError("omega must be symmetric")
    w = (np.abs(omega) > tol).astype(float)
    np.fill_diagonal(w, 0.0)
    w = np.maximum(w, w.T)
    return PriorGraph(w)


def edge_count(g: PriorGraph) -> int:
    """Number of nonzero strictly-upper-triangle entries."""
    return int(np.count_nonzero(np.triu(g.weights, k=1)))


def _upper_edges(g: PriorGraph) -> np.ndarray:
    """Edge endpoints (i, j), i < j, in row-major upper-triangle order."""
    mask = np.triu(g.weights, k=1) != 0
    return np.argwhere(mask)


def remove_edges_uniform(g: PriorGraph, k: int) -> PriorGraph:
    """Keep every k-th edge of the row-major upper-triangle enumeration.

    Edges at 1-based positions 1, 1+k, 1+2k, ... survive; the fraction removed
    is (k-1)/k up to rounding.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    edges = _upper_edges(g)
    keep = edges[::k]
    w = np.zeros_like(g.weights)
    for i, j in keep:
        w[i, j] = w[j, i] = g.weights[i, j]
    return PriorGraph(w)


def remove_block_edges(g: PriorGraph, block, disconnect: bool = False) -> PriorGraph:
    """Delete the edges within a vertex block, or all edges touching it.

    With disconnect=False only the within-block off-diagonal entries are
    zeroed; with disconnect=True the whole rows and columns of the block
    vertices are zeroed, isolating them. Indices are 0-based.
    """
    block = np.asarray(sorted(set(int(i) for i in block)), dtype=int)
    if block.size and (block.min() < 0 or block.max() >= g.p):
        raise ValueError(f"block indices must lie in [0, {g.p - 1}]")
    w = np.array(g.weights)
    if disconnect:
        w[block, :] = 0.0
        w[:, block] = 0.0
    else:
        w[np.ix_(block, block)] = 0.0
    return PriorGraph(w)


def add_false_edges(g: PriorGraph, fraction: float, seed: int) -> PriorGraph:
    """Turn round(fraction * edge_count) uniformly chosen non-edges into edges.

    New edges get weight 1 and never duplicate an existing edge or create a
    self loop. Deterministic given the seed.
    """
    if fraction <= 0:
        raise ValueError("fraction must be positive")
    n_edges = edge_count(g)
    if n_edges == 0:
        raise ValueError("graph has no edges to take a fraction of")
    m = int(np.floor(fraction * n_edges + 0.5))  # round half up
    iu, ju = np.triu_indices(g.p, k=1)
    free = np.flatnonzero(g.weights[iu, ju] == 0)
    if free.size < m:
        raise ValueError(f"only {free.size} non-edges available, need {m}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    chosen = rng.choice(free, size=m, replace=False)
    w = np.array(g.weights)
    w[iu[chosen], ju[chosen]] = 1.0
    w[ju[chosen], iu[chosen]] = 1.0
    return PriorGraph(w)


def write_graph(g: PriorGraph, path) -> None:
    """Edge-list text format: header `p=<dim>`, then `i j weight` (1-based)."""
    path = Path(path)
    lines = [f"p={g.p}"]
    for i, j in _upper_edges(g):
        lines.append(f"{i + 1} {j + 1} {repr(float(g.weights[i, j]))}")
    path.write_text("\n".join(lines) + "\n")


def load_graph(path) -> PriorGraph:
    path = Path(path)
    lines = [ln.strip() for ln in path.read_text().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("p="):
        raise ValueError(f"{path}: graph file must start with a 'p=<dim>' header")
    try:
        p = int(lines[0][2:])
    except ValueError:
        raise ValueError(f"{path}: bad dimension in header {lines[0]!r}") from None
    w = np.zeros((p, p))
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}: line {lineno}: expected 'i j weight'")
        i, j = int(parts[0]) - 1, int(parts[1]) - 1
        weight = float(parts[2])
        if not (0 <= i < p and 0 <= j < p):
            raise ValueError(f"{path}: line {lineno}: vertex out of range 1..{p}")
        w[i, j] = w[j, i] = weight
    return PriorGraph(w)
