"""Parameter-free linear message passing and receptive fields"""

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd
import scipy.sparse as sp

from halfhop.augment import HalfHopConfig, half_hop, half_hop_sampled
from halfhop.graph import DimensionError, GraphError
from halfhop.params import choice

log = logging.getLogger(__name__)

KINDS = ('mean', 'sym')

# Dense storage above this edge density (for graphs up to DENSE_MAX nodes)
DENSE_DENSITY = 0.5
DENSE_MAX = 5000


@dataclass(frozen=True)
class DiffusionOperator:
    """
    Propagation matrix L of a graph.

    Row i of L holds the aggregation weights of node i over its
    in-neighbors, so one message passing round is H <- L H.

    Attributes
    ----------
    kind : str
        'mean' (row normalized, D^-1 A) or 'sym' (D^-1/2 A D^-1/2).
    self_loops : bool
        True if every node aggregates itself with unit weight.
    matrix : scipy.sparse.csr_matrix or numpy.ndarray
        n x n propagation matrix.
    """
    kind: str
    self_loops: bool
    matrix: object

    @property
    def size(self):
        """Operator dimension n."""
        return self.matrix.shape[0]

    @property
    def dense(self):
        """True if the matrix is stored as a dense array."""
        return isinstance(self.matrix, np.ndarray)


def build_operator(graph, kind='mean', self_loops=True):
    """
    Build the propagation operator of a graph.

    Aggregation is over in-neighbors with edge weights. Nodes without any
    in-neighbor (after applying the self-loop policy) get an all-zero row and
    a ZeroInDegreeWarning is emitted.

    Parameters
    ----------
    graph : halfhop.Graph
        Input graph. Undirected graphs must be symmetrized first.
    kind : str, optional
        'mean' or 'sym'.
    self_loops : bool, optional
        If True, stored self-loops are replaced by unit self-loops on every
        node. If False, stored self-loops are dropped.

    Return
    ------
    out : DiffusionOperator
    """
    kind = choice('kind', KINDS)(kind)
    n = graph.num_nodes
    offdiag = graph.sources != graph.targets

    # Aggregation matrix: row = target, column = source
    aggregation = sp.csr_matrix(
        (graph.edge_weights[offdiag],
         (graph.targets[offdiag], graph.sources[offdiag])), shape=(n, n))
    if self_loops:
        aggregation = (aggregation + sp.identity(n, format='csr')).tocsr()

    degree = np.asarray(aggregation.sum(axis=1)).ravel()
    isolated = degree == 0
    if isolated.any():
        warnings.warn('{} nodes have no in-neighbor, their operator rows are '
                      'zero'.format(int(isolated.sum())), ZeroInDegreeWarning,
                      stacklevel=2)

    with np.errstate(divide='ignore'):
        if kind == 'mean':
            scale = np.where(isolated, 0.0, 1.0 / degree)
            matrix = sp.diags(scale) @ aggregation
        else:
            scale = np.where(isolated, 0.0, 1.0 / np.sqrt(degree))
            matrix = sp.diags(scale) @ aggregation @ sp.diags(scale)

    matrix = matrix.tocsr()
    if n <= DENSE_MAX and matrix.nnz >= DENSE_DENSITY * n * n:
        matrix = matrix.toarray()
    log.debug('Built %s operator (n=%d, nnz=%d, self_loops=%s)', kind, n,
              np.count_nonzero(matrix) if isinstance(matrix, np.ndarray)
              else matrix.nnz, self_loops)
    return DiffusionOperator(kind=kind, self_loops=bool(self_loops),
                             matrix=matrix)


def propagate(operator, features, k):
    """
    Apply k rounds of message passing: L^k H.

    Computed by k successive products, L^k is never formed.

    Parameters
    ----------
    operator : DiffusionOperator
        Propagation operator.
    features : numpy.ndarray
        Features H, one row per node.
    k : int
        Number of rounds, >= 0.

    Return
    ------
    out : numpy.ndarray
    """
    features = np.asarray(features, dtype=np.float64)
    if features.shape[0] != operator.size:
        raise DimensionError('propagate: {} feature rows for an operator of '
                             'size {}'.format(features.shape[0], operator.size))
    if k < 0:
        raise ValueError('propagate: k must be >= 0, got {}'.format(k))

    result = np.array(features)
    for _ in range(int(k)):
        result = np.asarray(operator.matrix @ result)
    return result


def propagate_directed_halfhop(operator, features, k, alpha):
    """
    Original node features after k rounds of mean aggregation on the fully
    half-hopped graph, variant 'hh1' with interpolated slow nodes and no
    self-loops, without building the augmented graph.

    The slow node of edge j -> i receives only from j and is the only
    in-neighbor of i on that edge, so with H^(0) = H:

        H^(1) = (1 - alpha) r * H + alpha L H
        H^(t + 1) = L H^(t - 1)

    where L is the original graph operator and r its row sums (0 for nodes
    without in-neighbor).

    Parameters
    ----------
    operator : DiffusionOperator
        Mean operator of the original graph built with self_loops=False.
    features : numpy.ndarray
        Original node features, one row per node.
    k : int
        Number of rounds, >= 0.
    alpha : float
        Slow node mixing parameter.

    Return
    ------
    out : numpy.ndarray
        Same as stripping slow nodes from "propagate" on the augmented graph.
    """
    if operator.kind != 'mean' or operator.self_loops:
        raise ValueError('propagate_directed_halfhop: requires a mean '
                         'operator without self-loops')
    if k < 0:
        raise ValueError('propagate_directed_halfhop: k must be >= 0, got '
                         '{}'.format(k))
    previous = propagate(operator, features, 0)
    if k == 0:
        return previous

    rowsum = np.asarray(operator.matrix.sum(axis=1)).reshape(
        (-1,) + (1,) * (previous.ndim - 1))
    current = ((1.0 - alpha) * rowsum * previous +
               alpha * np.asarray(operator.matrix @ previous))
    for _ in range(int(k) - 1):
        previous, current = current, np.asarray(operator.matrix @ previous)
    return current


def receptive_field(operator, center, k):
    """
    Receptive field of a node: its row of L^k.

    Entry j is the weight of node j initial features in the center node
    embedding after k rounds.

    Parameters
    ----------
    operator : DiffusionOperator
        Propagation operator.
    center : int
        Center node.
    k : int
        Number of rounds, >= 0.

    Return
    ------
    out : numpy.ndarray of float, shape (n,)
    """
    if not 0 <= center < operator.size:
        raise GraphError('receptive_field: center {} outside [0, {})'.format(
            center, operator.size))
    row = np.zeros(operator.size)
    row[center] = 1.0
    transposed = operator.matrix.T
    for _ in range(int(k)):
        row = np.asarray(transposed @ row).ravel()
    return row


def attributed_receptive_field(augmented, operator, center, k):
    """
    Receptive field of an original node of a half-hopped graph, read off on
    original nodes.

    Slow node weights are attributed to original nodes through the
    interpolation map: (e_c^T L^k) P (See
    "AugmentedGraph.interpolation_matrix").

    Parameters
    ----------
    augmented : halfhop.AugmentedGraph
        Half-hopped graph.
    operator : DiffusionOperator
        Operator of the augmented graph.
    center : int
        Original center node.
    k : int
        Number of rounds.

    Return
    ------
    out : numpy.ndarray of float, shape (n,)
    """
    if not 0 <= center < augmented.original_count:
        raise GraphError('attributed_receptive_field: center {} is not an '
                         'original node'.format(center))
    row = receptive_field(operator, center, k)
    return np.asarray(augmented.interpolation_matrix().T @ row).ravel()


def self_weight_curve(graph, alphas, K, center=None, self_loops=True):
    """
    Center node self-weight against the number of message passing rounds.

    The baseline column uses the graph operator. Each alpha column uses the
    fully half-hopped graph (variant 'hh', interpolated slow nodes) with
    slow node weights attributed to original nodes.

    Parameters
    ----------
    graph : halfhop.Graph
        Input graph.
    alphas : list of float
        Mixing parameters.
    K : int
        Largest number of rounds.
    center : int, optional
        Center node. Default to the middle node id (the center of a grid
        with odd dimensions).
    self_loops : bool, optional
        Self-loop policy of operators.

    Return
    ------
    out : pandas.DataFrame
        Indexed by k = 0..K, columns "baseline" and "alpha=<value>".
    """
    center = graph.num_nodes // 2 if center is None else int(center)
    columns = {'baseline': _self_weights(
        build_operator(graph, 'mean', self_loops), center, K)}

    for alpha in alphas:
        augmented = half_hop(graph, HalfHopConfig(alpha=alpha, variant='hh',
                                                  init='interpolate'))
        operator = build_operator(augmented.graph, 'mean', self_loops)
        attribution = augmented.interpolation_matrix().T
        columns['alpha={:g}'.format(alpha)] = _self_weights(
            operator, center, K, attribution)

    frame = pd.DataFrame(columns, index=pd.RangeIndex(K + 1, name='k'))
    return frame


def sampled_receptive_fields(graph, config, center, k, samples,
                             self_loops=True):
    """
    Attributed receptive fields of probabilistic Half-Hop samples.

    Sample s uses the configuration seed + s.

    Parameters
    ----------
    graph : halfhop.Graph
        Input graph.
    config : halfhop.HalfHopConfig
        Transform parameters ("p" < 1 for probabilistic Half-Hop).
    center : int
        Center node.
    k : int
        Number of rounds.
    samples : int
        Number of samples.
    self_loops : bool, optional
        Self-loop policy.

    Return
    ------
    out : numpy.ndarray, shape (samples, n)
        One receptive field per row.
    """
    fields = np.empty((int(samples), graph.num_nodes))
    for sample in range(int(samples)):
        augmented = half_hop_sampled(
            graph, config.copy(seed=config['seed'] + sample))
        operator = build_operator(augmented.graph, 'mean', self_loops)
        fields[sample] = attributed_receptive_field(augmented, operator,
                                                    center, k)
    return fields


def _self_weights(operator, center, K, attribution=None):
    """Center self-weight for k = 0..K"""
    row = np.zeros(operator.size)
    row[center] = 1.0
    transposed = operator.matrix.T
    weights = []
    for k in range(int(K) + 1):
        if k:
            row = np.asarray(transposed @ row).ravel()
        original = row if attribution is None else attribution @ row
        weights.append(float(original[center]))
    return weights


class ZeroInDegreeWarning(UserWarning):
    """Emitted when operator rows are zero for nodes without in-neighbor."""
