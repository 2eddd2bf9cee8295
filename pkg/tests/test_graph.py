"""Tests for halfhop/graph.py"""
from halfhop import (Graph, GraphError, DimensionError, build_graph,
                     degree_view, symmetrize, homophily_ratio, edge_homophily,
                     graph_statistics, load_graph)
import os
import pytest
import numpy as np
from numpy.testing import assert_equal


PATH = np.array(((0, 1), (1, 2)))  # Path 0-1-2
PATH_LABELS = np.array((0, 0, 1))
TRIANGLE = np.array(((0, 1), (1, 2), (2, 0)))

# Benchmark edge lists and labels: <name>_edges.txt and <name>_labels.csv
HOMOPHILY_FIXTURES = os.environ.get('HALFHOP_HOMOPHILY_FIXTURES')

# Published node homophily ratios and tolerances
BENCHMARK_HOMOPHILY = {
    'texas': (0.11, 5e-3),
    'wisconsin': (0.21, 5e-3),
    'squirrel': (0.22, 5e-3),
    'chameleon': (0.23, 5e-3),
    'cornell': (0.30, 5e-3),
    'wikics': (0.6588, 5e-4),
    'amazon_photos': (0.8365, 5e-4),
}


def edgeset(graph):
    """Set of directed edges of a graph"""
    return set(map(tuple, graph.edges.tolist()))


def test_build_graph():
    """'build_graph' function: minimal graph and deduplication"""
    graph = build_graph(2, [(0, 1)], features=np.eye(2))
    assert graph.num_nodes == 2
    assert graph.num_edges == 1
    assert_equal(graph.features, np.eye(2))

    # Duplicates removed, order of first occurrences kept
    graph = build_graph(3, [(1, 2), (0, 1), (1, 2), (0, 1), (2, 0)],
                        weights=[1., 2., 3., 4., 5.])
    assert_equal(graph.edges, ((1, 2), (0, 1), (2, 0)))
    assert_equal(graph.weights, (1., 2., 5.))

    # Duplicates kept on demand
    assert build_graph(2, [(0, 1), (0, 1)], dedup=False).num_edges == 2

    # Default features
    assert_equal(build_graph(3, PATH).features, np.ones((3, 1)))


def test_build_graph_errors():
    """'build_graph' function: invalid inputs"""
    # Out of range endpoint
    with pytest.raises(GraphError) as excinfo:
        build_graph(3, [(0, 1), (0, 5)])
    assert 'Edge 1 (0, 5)' in str(excinfo.value)
    with pytest.raises(GraphError) as excinfo:
        build_graph(3, [(0, 5)])
    assert 'Edge 0' in str(excinfo.value)
    with pytest.raises(GraphError):
        build_graph(3, [(-1, 2)])

    # Feature rows mismatch
    with pytest.raises(DimensionError) as excinfo:
        build_graph(3, PATH, features=np.ones((2, 4)))
    assert 'Feature matrix has 2 rows, graph has 3 nodes' in str(
        excinfo.value)

    # Labels, weights and masks
    with pytest.raises(DimensionError):
        build_graph(3, PATH, labels=[0, 1])
    with pytest.raises(GraphError) as excinfo:
        build_graph(3, PATH, weights=[1., -1.])
    assert 'nonnegative' in str(excinfo.value)
    with pytest.raises(GraphError) as excinfo:
        build_graph(3, PATH, masks={'train': [1, 1, 0], 'test': [0, 1, 1]})
    assert 'overlaps' in str(excinfo.value)
    with pytest.raises(DimensionError):
        build_graph(3, PATH, masks={'train': [1, 0]})


def test_graph_immutable():
    """'Graph' class: arrays are read-only, 'replace' derives graphs"""
    features = np.zeros((3, 2))
    graph = Graph(3, PATH, features=features)

    # Input arrays are copied
    features[0, 0] = 1
    assert graph.features[0, 0] == 0

    with pytest.raises(ValueError):
        graph.features[0, 0] = 1
    with pytest.raises(ValueError):
        graph.edges[0, 0] = 2

    other = graph.replace(features=np.ones((3, 2)), labels=PATH_LABELS)
    assert_equal(other.edges, graph.edges)
    assert_equal(other.features, np.ones((3, 2)))
    assert graph.labels is None
    assert 'labeled' in repr(other)


def test_graph_adjacency():
    """'Graph' class: weighted adjacency matrix"""
    graph = Graph(3, PATH, weights=[2., 3.])
    assert_equal(graph.adjacency().toarray(),
                 ((0, 2, 0), (0, 0, 3), (0, 0, 0)))
    assert_equal(Graph(3, PATH).edge_weights, (1., 1.))


def test_degree_view():
    """'degree_view' function: degrees and neighbors"""
    view = degree_view(Graph(2, [(0, 1)]))
    assert_equal(view.in_degree, (0, 1))
    assert_equal(view.out_degree, (1, 0))

    view = degree_view(Graph(1, [(0, 0)]))
    assert_equal(view.in_degree, (1,))
    assert_equal(view.out_degree, (1,))
    assert view.undirected_neighbors == (frozenset(),)

    view = degree_view(Graph(2, [(0, 1), (1, 0)]))
    assert view.undirected_neighbors[0] == {1}

    # Degree sums equal the edge count
    generator = np.random.default_rng(0)
    graph = build_graph(20, generator.integers(0, 20, (60, 2)))
    view = degree_view(graph)
    assert view.in_degree.sum() == view.out_degree.sum() == graph.num_edges


def test_symmetrize():
    """'symmetrize' function: reverse edges"""
    assert edgeset(symmetrize(Graph(2, [(0, 1)]))) == {(0, 1), (1, 0)}

    graph = Graph(3, [(0, 1), (1, 0), (1, 2)], weights=[1., 2., 3.])
    result = symmetrize(graph)
    assert_equal(result.edges, ((0, 1), (1, 0), (1, 2), (2, 1)))
    assert_equal(result.weights, (1., 2., 3., 3.))

    # Idempotence
    assert_equal(symmetrize(result).edges, result.edges)


def test_homophily_ratio():
    """'homophily_ratio' function: hand examples"""
    assert homophily_ratio(Graph(3, TRIANGLE, labels=[2, 2, 2])) == 1.0
    assert homophily_ratio(Graph(2, [(0, 1)], labels=[0, 1])) == 0.0
    assert homophily_ratio(Graph(3, PATH, labels=PATH_LABELS)) == 0.5

    # Direction and duplicates do not matter
    graph = Graph(3, [(1, 0), (0, 1), (2, 1)], labels=PATH_LABELS)
    assert homophily_ratio(graph) == 0.5

    # Isolated nodes and self-loops excluded
    graph = Graph(5, [(0, 1), (1, 2), (4, 4)], labels=[0, 0, 1, 1, 0])
    assert homophily_ratio(graph) == 0.5


def test_homophily_ratio_invariance():
    """'homophily_ratio' function: invariant under label permutation"""
    generator = np.random.default_rng(1)
    graph = build_graph(30, generator.integers(0, 30, (90, 2)),
                        labels=generator.integers(0, 4, 30))
    permutation = np.array((2, 0, 3, 1))
    relabeled = graph.replace(labels=permutation[graph.labels])
    assert homophily_ratio(relabeled) == homophily_ratio(graph)


@pytest.mark.skipif(HOMOPHILY_FIXTURES is None,
                    reason='HALFHOP_HOMOPHILY_FIXTURES is not set')
@pytest.mark.parametrize('name', sorted(BENCHMARK_HOMOPHILY))
def test_homophily_ratio_benchmarks(name):
    """'homophily_ratio' function: benchmark datasets"""
    edges = os.path.join(HOMOPHILY_FIXTURES, name + '_edges.txt')
    labels = os.path.join(HOMOPHILY_FIXTURES, name + '_labels.csv')
    if not (os.path.isfile(edges) and os.path.isfile(labels)):
        pytest.skip('no {} files'.format(name))

    graph, _ = load_graph(edges, labels=labels)
    expected, tolerance = BENCHMARK_HOMOPHILY[name]
    assert abs(homophily_ratio(graph) - expected) <= tolerance


def test_homophily_ratio_errors():
    """'homophily_ratio' function: missing labels and isolated graph"""
    with pytest.raises(GraphError) as excinfo:
        homophily_ratio(Graph(3, PATH))
    assert 'no labels' in str(excinfo.value)
    with pytest.raises(GraphError) as excinfo:
        homophily_ratio(Graph(2, [(0, 0)], labels=[0, 1]))
    assert 'all nodes are isolated' in str(excinfo.value)


def test_edge_homophily():
    """'edge_homophily' function: fraction of equal label edges"""
    graph = Graph(3, [(0, 1), (1, 2), (1, 0), (2, 2)], labels=PATH_LABELS)
    assert edge_homophily(graph) == pytest.approx(2 / 3)


def test_graph_statistics():
    """'graph_statistics' function: dataset statistics"""
    graph = Graph(4, [(0, 1), (1, 2), (3, 3)], features=np.ones((4, 3)),
                  labels=[0, 0, 1, 1])
    stats = graph_statistics(graph)
    assert stats['nodes'] == 4
    assert stats['edges'] == 3
    assert stats['features'] == 3
    assert stats['self_loops'] == 1
    assert stats['isolated'] == 1
    assert stats['classes'] == 2
    assert stats['node_homophily'] == 0.5
    assert 'node_homophily' not in graph_statistics(Graph(2, [(0, 1)]))
