"""Tests for halfhop/diffusion.py"""
from halfhop import (Graph, GraphError, DimensionError, HalfHopConfig,
                     LatentModel, ZeroInDegreeWarning, build_operator,
                     grid_graph, half_hop, propagate, receptive_field,
                     sample_latent_graph, self_weight_curve, strip_slow_nodes)
from halfhop.diffusion import (attributed_receptive_field,
                               propagate_directed_halfhop,
                               sampled_receptive_fields)
import pytest
import numpy as np
from numpy.testing import assert_equal, assert_allclose


GRID = grid_graph(15, 15)
CENTER = 112  # Center of the 15 x 15 grid


def dense(operator):
    """Operator matrix as a dense array"""
    matrix = operator.matrix
    return matrix if isinstance(matrix, np.ndarray) else matrix.toarray()


def test_build_operator_mean():
    """'build_operator' function: row normalized aggregation"""
    graph = Graph(3, [(0, 1), (2, 1), (1, 0), (1, 2)], weights=[1, 3, 1, 1])
    matrix = dense(build_operator(graph, 'mean', self_loops=False))
    assert_allclose(matrix, ((0, 1, 0), (0.25, 0, 0.75), (0, 1, 0)))

    matrix = dense(build_operator(graph, 'mean', self_loops=True))
    assert_allclose(matrix, ((0.5, 0.5, 0), (0.2, 0.2, 0.6), (0, 0.5, 0.5)))
    assert_allclose(matrix.sum(axis=1), 1)


def test_build_operator_self_loops():
    """'build_operator' function: self-loop policy"""
    graph = Graph(2, [(0, 0), (1, 0), (0, 1)], weights=[5, 1, 1])

    # Stored self-loop weight replaced by 1
    assert_allclose(dense(build_operator(graph, self_loops=True)),
                    ((0.5, 0.5), (0.5, 0.5)))

    # Stored self-loop dropped
    assert_allclose(dense(build_operator(graph, self_loops=False)),
                    ((0, 1), (1, 0)))


def test_build_operator_sym():
    """'build_operator' function: symmetric normalization"""
    operator = build_operator(GRID, 'sym', self_loops=True)
    matrix = dense(operator)
    assert operator.kind == 'sym'
    assert_allclose(matrix, matrix.T, rtol=0, atol=1e-15)

    # Center and corner have 5 and 3 aggregated nodes
    assert matrix[CENTER, CENTER + 1] == pytest.approx(1 / 5)
    assert matrix[0, 1] == pytest.approx(1 / np.sqrt(3 * 4))

    with pytest.raises(ValueError) as excinfo:
        build_operator(GRID, 'max')
    assert 'kind must be one of mean, sym' in str(excinfo.value)


def test_build_operator_zero_in_degree():
    """'build_operator' function: zero rows for nodes without in-neighbor"""
    graph = Graph(3, [(0, 1), (1, 2)])
    with pytest.warns(ZeroInDegreeWarning) as record:
        operator = build_operator(graph, self_loops=False)
    assert '1 nodes have no in-neighbor' in str(record[0].message)
    assert_equal(dense(operator)[0], 0)
    assert_allclose(dense(operator).sum(axis=1), (0, 1, 1))


def test_build_operator_storage():
    """'build_operator' function: dense or sparse storage"""
    assert not build_operator(GRID).dense
    complete = Graph(10, [(i, j) for i in range(10) for j in range(10)])
    operator = build_operator(complete)
    assert operator.dense
    assert operator.size == 10
    assert_allclose(operator.matrix, np.full((10, 10), 0.1))


def test_propagate():
    """'propagate' function: repeated products"""
    operator = build_operator(GRID)
    features = np.random.default_rng(0).random((225, 3))
    assert_equal(propagate(operator, features, 0), features)
    matrix = dense(operator)
    assert_allclose(propagate(operator, features, 3),
                    np.linalg.matrix_power(matrix, 3) @ features, rtol=1e-12)

    with pytest.raises(DimensionError) as excinfo:
        propagate(operator, np.ones((10, 2)), 1)
    assert '10 feature rows for an operator of size 225' in str(excinfo.value)
    with pytest.raises(ValueError):
        propagate(operator, features, -1)


def test_receptive_field_grid():
    """'receptive_field' function: stochastic rows on the grid"""
    operator = build_operator(GRID, 'mean', self_loops=True)
    assert_equal(receptive_field(operator, CENTER, 0), np.eye(225)[CENTER])
    assert receptive_field(operator, CENTER, 1)[CENTER] == 1 / 5
    for k in range(1, 21):
        field = receptive_field(operator, CENTER, k)
        assert np.all(field >= 0)
        assert abs(field.sum() - 1) <= 1e-10

    # Row of L^k
    matrix = dense(operator)
    assert_allclose(receptive_field(operator, 7, 4),
                    np.linalg.matrix_power(matrix, 4)[7], rtol=1e-12)

    with pytest.raises(GraphError):
        receptive_field(operator, 225, 1)


def test_attributed_receptive_field():
    """'attributed_receptive_field' function: mass on original nodes"""
    augmented = half_hop(GRID, HalfHopConfig(alpha=0.5))
    operator = build_operator(augmented.graph, 'mean', self_loops=True)
    for k in range(0, 12):
        field = attributed_receptive_field(augmented, operator, CENTER, k)
        assert field.shape == (225,)
        assert np.all(field >= 0)
        assert abs(field.sum() - 1) <= 1e-10

    # One round: center, its 4 slow nodes (half center) and self-loop
    field = attributed_receptive_field(augmented, operator, CENTER, 1)
    assert field[CENTER] == pytest.approx(0.6)
    assert field[CENTER + 1] == pytest.approx(0.1)

    with pytest.raises(GraphError):
        attributed_receptive_field(augmented, operator, 300, 1)


def test_self_weight_curve_ordering():
    """'self_weight_curve' function: Half-Hop keeps more self-weight"""
    curve = self_weight_curve(GRID, [0.5], 10)
    assert list(curve.columns) == ['baseline', 'alpha=0.5']
    assert list(curve.index) == list(range(11))
    assert curve['baseline'][0] == curve['alpha=0.5'][0] == 1
    assert curve['baseline'][1] == 1 / 5
    for k in range(1, 11):
        assert curve['alpha=0.5'][k] > curve['baseline'][k]


def test_self_weight_curve_alphas():
    """'self_weight_curve' function: several alphas, default center"""
    curve = self_weight_curve(grid_graph(5, 5), [0.0, 1.0], 3)
    assert list(curve.columns) == ['baseline', 'alpha=0', 'alpha=1']
    operator = build_operator(grid_graph(5, 5))
    for k in range(4):
        assert curve['baseline'][k] == pytest.approx(
            receptive_field(operator, 12, k)[12])


def test_sampled_receptive_fields():
    """'sampled_receptive_fields' function: extremes of p"""
    graph = grid_graph(5, 5)
    fields = sampled_receptive_fields(graph, HalfHopConfig(p=0.5, seed=3),
                                      12, 3, 4)
    assert fields.shape == (4, 25)
    assert_allclose(fields.sum(axis=1), 1)

    # p = 0 is the baseline, p = 1 the full transform
    baseline = receptive_field(build_operator(graph), 12, 3)
    fields = sampled_receptive_fields(graph, HalfHopConfig(p=0.0), 12, 3, 2)
    assert_allclose(fields, np.stack((baseline, baseline)), rtol=1e-12)

    augmented = half_hop(graph)
    full = attributed_receptive_field(augmented,
                                      build_operator(augmented.graph), 12, 3)
    fields = sampled_receptive_fields(graph, HalfHopConfig(p=1.0), 12, 3, 2)
    assert_allclose(fields, np.stack((full, full)), rtol=1e-12)

    # Determinism
    assert_equal(sampled_receptive_fields(graph, HalfHopConfig(p=0.5, seed=3),
                                          12, 3, 4),
                 sampled_receptive_fields(graph, HalfHopConfig(p=0.5, seed=3),
                                          12, 3, 4))


def test_build_operator_hand():
    """'build_operator' function: hand normalized small graphs"""
    edge = Graph(2, [(0, 1), (1, 0)])
    assert_allclose(dense(build_operator(edge)), np.full((2, 2), 0.5))

    # Isolated node aggregates itself only
    matrix = dense(build_operator(Graph(3, [(0, 1), (1, 0)])))
    assert_equal(matrix[2], (0, 0, 1))

    path = Graph(3, [(0, 1), (1, 0), (1, 2), (2, 1)])
    operator = build_operator(path)
    assert_allclose(dense(operator)[1], np.full(3, 1 / 3))
    assert_allclose(propagate(operator, np.eye(3), 1)[1], np.full(3, 1 / 3))
    assert_allclose(receptive_field(operator, 1, 1), np.full(3, 1 / 3))


def test_propagate_properties():
    """'propagate' function: stochasticity and repeated application"""
    operator = build_operator(GRID)
    ones = np.ones((225, 1))
    assert np.max(np.abs(propagate(operator, ones, 64) - 1)) <= 1e-10

    features = np.random.default_rng(1).random((225, 2))
    assert_allclose(propagate(operator, features, 5),
                    propagate(operator, propagate(operator, features, 2), 3),
                    rtol=0, atol=1e-12)


def test_receptive_field_locality():
    """'receptive_field' function: locality and half-hop distance doubling"""
    graph = grid_graph(9, 9)
    center = 40
    rows, cols = np.divmod(np.arange(81), 9)
    hops = np.abs(rows - 4) + np.abs(cols - 4)

    operator = build_operator(graph)
    augmented = half_hop(graph, HalfHopConfig(alpha=0.5))
    halfhop_op = build_operator(augmented.graph)
    for k in range(1, 9):
        field = receptive_field(operator, center, k)
        assert_equal(field > 0, hops <= k)

        field = attributed_receptive_field(augmented, halfhop_op, center, k)
        assert_equal(field > 0, hops <= (k + 1) // 2)


def test_propagate_directed_halfhop():
    """'propagate_directed_halfhop' function: same as the augmented graph"""
    graph = sample_latent_graph(LatentModel(), 30, 2).graph
    operator = build_operator(graph, 'mean', self_loops=False)
    for alpha in (0.0, 0.25, 1.0):
        augmented = half_hop(graph, HalfHopConfig(
            alpha=alpha, variant='hh1', init='interpolate'))
        augmented_op = build_operator(augmented.graph, 'mean',
                                      self_loops=False)
        for k in range(6):
            expected = strip_slow_nodes(augmented, propagate(
                augmented_op, augmented.graph.features, k)).features
            assert_allclose(
                propagate_directed_halfhop(operator, graph.features, k,
                                           alpha),
                expected, rtol=1e-10, atol=1e-12)

    # Node without in-neighbor
    path = Graph(3, [(0, 1), (1, 2)], features=[[1.0], [2.0], [4.0]])
    with pytest.warns(ZeroInDegreeWarning):
        operator = build_operator(path, self_loops=False)
    assert_allclose(propagate_directed_halfhop(operator, path.features, 1,
                                               0.5),
                    ((0,), (1.5,), (3,)))
    assert_allclose(propagate_directed_halfhop(operator, path.features, 2,
                                               0.5),
                    ((0,), (1,), (2,)))

    with pytest.raises(ValueError) as excinfo:
        propagate_directed_halfhop(build_operator(GRID), GRID.features, 1, 0.5)
    assert 'without self-loops' in str(excinfo.value)
    with pytest.raises(ValueError):
        propagate_directed_halfhop(operator, path.features, -1, 0.5)
