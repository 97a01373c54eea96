import numpy as np
import pytest

from adascope import (
    RngStream,
    average_node_homophily,
    build_graph,
    node_homophily,
    pagerank,
    propagate,
    row_normalized,
    symmetric_normalized,
)
from adascope.errors import InputDataError, ContractError


def random_graph(rng, n, p=0.2, directed=False):
    mask = rng.uniform((n, n)) < p
    src, dst = np.nonzero(mask)
    keep = src != dst
    return build_graph(list(zip(src[keep], dst[keep])), n, directed=directed)


def path_graph(n):
    return build_graph([(i, i + 1) for i in range(n - 1)], n)


# ---------------------------------------------------------------------------
# construction

def test_undirected_edge_is_mirrored():
    g = build_graph([(0, 1), (1, 0)], 2, directed=False)
    assert g.num_nodes == 2
    assert g.num_edges == 2  # two stored arcs
    assert g.adjacency[0, 1] == 1.0 and g.adjacency[1, 0] == 1.0


def test_directed_duplicates_collapse():
    g = build_graph([(0, 1), (0, 1)], 2, directed=True)
    assert g.num_edges == 1
    assert g.adjacency[1, 0] == 1.0
    assert g.adjacency[0, 1] == 0.0


def test_path_degrees():
    g = path_graph(5)
    assert list(g.degrees) == [1, 2, 2, 2, 1]


def test_self_loops_dropped():
    g = build_graph([(0, 0), (0, 1)], 2)
    assert g.adjacency[0, 0] == 0.0
    assert g.num_edges == 2


def test_out_of_range_id_reports_line():
    with pytest.raises(InputDataError, match="line 2"):
        build_graph([(0, 1), (0, 9)], 3)


# ---------------------------------------------------------------------------
# operators

def test_symmetric_operator_isolated_node():
    g = build_graph([], 1)
    op = symmetric_normalized(g)
    assert op.matrix.toarray() == pytest.approx(np.array([[1.0]]))


def test_symmetric_operator_two_nodes():
    g = build_graph([(0, 1)], 2)
    dense = symmetric_normalized(g).matrix.toarray()
    assert dense == pytest.approx(np.array([[0.5, 0.5], [0.5, 0.5]]))


def test_symmetric_operator_star_entry():
    # center 0, leaves 1..4
    g = build_graph([(0, i) for i in range(1, 5)], 5)
    dense = symmetric_normalized(g).matrix.toarray()
    assert dense[0, 1] == pytest.approx(1.0 / np.sqrt(5 * 2))


def test_symmetric_operator_is_symmetric_on_undirected():
    rng = RngStream(7)
    for trial in range(20):
        g = random_graph(rng.child(trial), int(rng.integers(2, 51)))
        m = symmetric_normalized(g).matrix
        assert np.allclose(m.toarray(), m.toarray().T)


def test_row_normalized_two_nodes():
    g = build_graph([(0, 1)], 2)
    dense = row_normalized(g).matrix.toarray()
    assert dense == pytest.approx(np.array([[0.0, 1.0], [1.0, 0.0]]))


def test_row_normalized_isolated_row_zero():
    g = build_graph([(0, 1)], 3)
    dense = row_normalized(g).matrix.toarray()
    assert dense[2] == pytest.approx([0.0, 0.0, 0.0])


def test_row_normalized_triangle():
    g = build_graph([(0, 1), (1, 2), (2, 0)], 3)
    dense = row_normalized(g).matrix.toarray()
    expected = np.full((3, 3), 0.5)
    np.fill_diagonal(expected, 0.0)
    assert dense == pytest.approx(expected)


def test_row_sums_are_zero_or_one():
    rng = RngStream(11)
    for trial in range(20):
        g = random_graph(rng.child(trial), int(rng.integers(2, 40)), directed=True)
        sums = row_normalized(g).matrix.sum(axis=1)
        for s in sums:
            assert s == pytest.approx(0.0, abs=1e-9) or s == pytest.approx(1.0, abs=1e-9)


# ---------------------------------------------------------------------------
# propagate

def test_propagate_identity_on_isolated_self_loop():
    g = build_graph([], 1)
    op = symmetric_normalized(g)
    x = np.array([[3.0, -2.0]])
    assert propagate(op, x) == pytest.approx(x)


def test_propagate_zero():
    g = build_graph([(0, 1), (1, 2)], 3)
    op = symmetric_normalized(g)
    assert propagate(op, np.zeros((3, 4))) == pytest.approx(np.zeros((3, 4)))


def test_propagate_matches_dense_oracle():
    rng = RngStream(3)
    for trial in range(10):
        n = int(rng.integers(2, 21))
        g = random_graph(rng.child(trial), n, p=0.3)
        x = rng.normal((n, 5))
        for op in (symmetric_normalized(g), row_normalized(g)):
            dense = op.matrix.toarray() @ x
            assert np.max(np.abs(propagate(op, x) - dense)) < 1e-12


def test_propagate_dimension_mismatch():
    g = build_graph([(0, 1)], 2)
    with pytest.raises(ContractError):
        propagate(symmetric_normalized(g), np.zeros((3, 2)))


# ---------------------------------------------------------------------------
# homophily

def test_homophily_all_same_and_all_diff():
    g = build_graph([(0, 1), (0, 2)], 3)
    same, _ = node_homophily(g, np.array([0, 0, 0]))
    assert same[0] == 1.0
    diff, _ = node_homophily(g, np.array([0, 1, 1]))
    assert diff[0] == 0.0


def test_homophily_star_center_half():
    g = build_graph([(0, i) for i in range(1, 5)], 5)
    y = np.array([0, 0, 0, 1, 1])
    values, isolated = node_homophily(g, y)
    assert values[0] == 0.5
    assert not isolated.any()


def test_homophily_isolated_flagged_zero():
    g = build_graph([(0, 1)], 3)
    values, isolated = node_homophily(g, np.array([0, 0, 0]))
    assert values[2] == 0.0
    assert isolated[2] and not isolated[0]


def test_homophily_in_unit_interval():
    rng = RngStream(5)
    for trial in range(10):
        n = int(rng.integers(2, 40))
        g = random_graph(rng.child(trial), n)
        y = rng.integers(0, 3, size=n)
        values, _ = node_homophily(g, y)
        assert np.all(values >= 0.0) and np.all(values <= 1.0)


def test_average_homophily_extremes():
    g = build_graph([(0, 1), (1, 2), (2, 0)], 3)
    assert average_node_homophily(g, np.array([1, 1, 1])) == 1.0
    bip = build_graph([(0, 2), (0, 3), (1, 2), (1, 3)], 4)
    assert average_node_homophily(bip, np.array([0, 0, 1, 1])) == 0.0


# ---------------------------------------------------------------------------
# pagerank

def test_pagerank_cycle_uniform():
    k = 6
    g = build_graph([(i, (i + 1) % k) for i in range(k)], k, directed=True)
    pi = pagerank(g)
    assert pi == pytest.approx(np.full(k, 1.0 / k), abs=1e-8)


def test_pagerank_single_node():
    g = build_graph([], 1)
    assert pagerank(g) == pytest.approx(np.array([1.0]))


def dense_pagerank_oracle(g, damping):
    """Solve (I - d M) pi = (1-d)/n directly, M = column-stochastic walk."""
    n = g.num_nodes
    a = g.adjacency.toarray().T  # row = source, col = destination
    out_deg = a.sum(axis=1)
    m = np.zeros((n, n))
    for u in range(n):
        if out_deg[u] > 0:
            m[:, u] = a[u] / out_deg[u]
        else:
            m[:, u] = 1.0 / n
    return np.linalg.solve(np.eye(n) - damping * m, np.full(n, (1 - damping) / n))


def test_pagerank_matches_dense_solve():
    g = build_graph([(0, 1), (1, 2), (2, 3)], 4, directed=True)
    pi = pagerank(g, damping=0.85, tol=1e-12, max_iter=1000)
    oracle = dense_pagerank_oracle(g, 0.85)
    assert np.max(np.abs(pi - oracle)) < 1e-8


def test_pagerank_sums_to_one_nonnegative_permutation_invariant():
    rng = RngStream(17)
    for trial in range(5):
        n = int(rng.integers(3, 30))
        g = random_graph(rng.child(trial), n, p=0.25, directed=True)
        pi = pagerank(g)
        assert pi.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.all(pi >= 0)
        perm = rng.permutation(n)
        src, dst = g.adjacency.nonzero()  # (dst, src) layout: rows are dest
        edges = [(perm[s], perm[d]) for d, s in zip(src, dst)]
        gp = build_graph(edges, n, directed=True)
        pi_perm = pagerank(gp)
        assert np.max(np.abs(pi_perm[perm] - pi)) < 1e-7


def test_pagerank_nonconvergence_warns():
    g = build_graph([(0, 1), (1, 2)], 3, directed=True)
    with pytest.warns(RuntimeWarning):
        pagerank(g, tol=0.0, max_iter=2)
