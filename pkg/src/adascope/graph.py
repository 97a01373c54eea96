"""Sparse graph core: CSR adjacency, normalized propagation operators,
node homophily, and PageRank.

Conventions
-----------
The adjacency is stored in compressed-row layout with row = destination and
columns = in-neighbors, so an arc (src, dst) sits at ``adjacency[dst, src]``
and aggregation always flows along stored arcs source -> destination. For
undirected graphs both arcs are stored and the matrix is symmetric.

Self-loops are never stored in the adjacency; the symmetric-normalized
operator adds them through its (A + I) term, which keeps degree bookkeeping
unambiguous.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, ContractError, InputDataError


@dataclass(frozen=True)
class Graph:
    """Immutable sparse graph.

    ``num_edges`` counts stored arcs (adjacency nnz); for undirected graphs
    this is twice the logical edge count.
    """

    num_nodes: int
    num_edges: int
    adjacency: sp.csr_array
    directed: bool
    degrees: np.ndarray = field(repr=False)  # in-degree per node

    def __post_init__(self):
        self.degrees.flags.writeable = False


@dataclass(frozen=True)
class PropagationOperator:
    """Normalized propagation matrix, same node indexing as the graph."""

    kind: str  # "symmetric" | "row"
    matrix: sp.csr_array


def build_graph(edge_list, num_nodes: int, directed: bool = False) -> Graph:
    """Build a Graph from (src, dst) pairs.

    Duplicate pairs and self-loops are dropped; undirected input is mirrored.
    Raises InputDataError naming the offending 1-based line for out-of-range
    ids.
    """
    edges = np.asarray(list(edge_list), dtype=np.int64)
    if edges.size == 0:
        edges = edges.reshape(0, 2)
    if edges.ndim != 2 or edges.shape[1] != 2:
        raise ContractError("edge list must be pairs of node ids")
    if num_nodes <= 0:
        raise ContractError("num_nodes must be positive")

    bad = (edges < 0) | (edges >= num_nodes)
    if bad.any():
        line = int(np.nonzero(bad.any(axis=1))[0][0]) + 1
        raise InputDataError(
            f"edge line {line}: node id out of range [0, {num_nodes})"
        )

    edges = edges[edges[:, 0] != edges[:, 1]]  # drop self-loops
    if not directed and edges.size:
        edges = np.vstack([edges, edges[:, ::-1]])
    src, dst = edges[:, 0], edges[:, 1]
    adj = sp.csr_array(
        (np.ones(len(edges), dtype=np.float64), (dst, src)),
        shape=(num_nodes, num_nodes),
    )
    # COO->CSR conversion summed duplicates; reset entries to 1
    adj.data[:] = 1.0
    adj.sort_indices()
    adj.data.flags.writeable = False
    degrees = np.diff(adj.indptr).astype(np.int64)
    return Graph(
        num_nodes=num_nodes,
        num_edges=int(adj.nnz),
        adjacency=adj,
        directed=directed,
        degrees=degrees,
    )


def symmetric_normalized(g: Graph) -> PropagationOperator:
    """D^(-1/2) (A + I) D^(-1/2) with D = diag(degree + 1).

    Degrees are in-degrees, which equal undirected degrees on mirrored
    graphs. Every node gets a self-loop through the identity term.
    """
    scale = 1.0 / np.sqrt(g.degrees + 1.0)
    a_hat = (g.adjacency + sp.eye_array(g.num_nodes, format="csr")).tocsr()
    d_half = sp.diags_array(scale, format="csr")
    mat = sp.csr_array(d_half @ a_hat @ d_half)
    mat.sort_indices()
    return PropagationOperator(kind="symmetric", matrix=mat)


def row_normalized(g: Graph) -> PropagationOperator:
    """D^(-1) A: mean aggregation over in-neighbors; zero-degree rows stay zero."""
    inv = np.zeros(g.num_nodes)
    nz = g.degrees > 0
    inv[nz] = 1.0 / g.degrees[nz]
    mat = sp.csr_array(sp.diags_array(inv, format="csr") @ g.adjacency)
    mat.sort_indices()
    return PropagationOperator(kind="row", matrix=mat)


def propagate(op: PropagationOperator, x: np.ndarray) -> np.ndarray:
    """Sparse-dense product op.matrix @ x with per-row sequential summation."""
    x = np.asarray(x, dtype=np.float64)
    if op.matrix.shape[1] != x.shape[0]:
        raise ContractError(
            f"operator columns ({op.matrix.shape[1]}) do not match "
            f"input rows ({x.shape[0]})"
        )
    return op.matrix @ x


def node_homophily(g: Graph, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-node fraction of in-neighbors sharing the node's class.

    Returns (values, isolated) where isolated flags zero-degree nodes, whose
    value is fixed to 0 (the fraction is undefined there).
    """
    labels = np.asarray(labels, dtype=np.int64)
    adj = g.adjacency
    rows = np.repeat(np.arange(g.num_nodes), g.degrees)
    same = (labels[adj.indices] == labels[rows]).astype(np.float64)
    agree = np.bincount(rows, weights=same, minlength=g.num_nodes)
    values = np.zeros(g.num_nodes)
    nz = g.degrees > 0
    values[nz] = agree[nz] / g.degrees[nz]
    return values, ~nz


def average_node_homophily(g: Graph, labels: np.ndarray) -> float:
    """Mean node homophily; isolated nodes contribute 0."""
    values, _ = node_homophily(g, labels)
    return float(values.mean())


def pagerank(
    g: Graph,
    damping: float = 0.85,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> np.ndarray:
    """PageRank by power iteration with uniform teleport.

    The walk follows stored arcs source -> destination; dangling mass is
    redistributed uniformly. Emits a warning and returns the last iterate if
    the L1 change has not dropped below ``tol`` within ``max_iter``.
    """
    if not 0.0 < damping < 1.0:
        raise ConfigError("damping must lie in (0, 1)")
    n = g.num_nodes
    # out-adjacency = adjacency transpose (row = source); row-normalize it,
    # then iterate on its transpose.
    out = sp.csr_array(g.adjacency.T)
    out_deg = np.diff(out.indptr).astype(np.float64)
    inv = np.zeros(n)
    nz = out_deg > 0
    inv[nz] = 1.0 / out_deg[nz]
    pt = sp.csr_array((sp.diags_array(inv, format="csr") @ out).T)
    dangling = ~nz

    pi = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    for _ in range(max_iter):
        new = damping * (pt @ pi)
        new += damping * pi[dangling].sum() / n + teleport
        delta = np.abs(new - pi).sum()
        pi = new
        if delta < tol:
            return pi
    warnings.warn(
        f"pagerank did not converge in {max_iter} iterations (L1 change {delta:.3e})",
        RuntimeWarning,
    )
    return pi
