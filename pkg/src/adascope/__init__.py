"""adascope: per-node GNN depth routing.

Train a family of node classifiers at depths 0..L_max, learn a per-node
scope-size predictor from structural encodings, raw features, and the family
logits, and route each test node to the depth that generalizes best for it.
Ships with a synthetic subgroup-CSBM laboratory for studying how depth
interacts with per-node homophily.
"""

from .graph import (
    Graph,
    PropagationOperator,
    average_node_homophily,
    build_graph,
    node_homophily,
    pagerank,
    propagate,
    row_normalized,
    symmetric_normalized,
)
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "PropagationOperator",
    "RngStream",
    "average_node_homophily",
    "build_graph",
    "node_homophily",
    "pagerank",
    "propagate",
    "row_normalized",
    "symmetric_normalized",
    "__version__",
]
