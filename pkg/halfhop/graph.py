"""'Graph' definition, construction and graph level statistics"""

import logging
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)


class Graph:
    """
    Directed graph with dense per-node features.

    Node ids are dense 0-based integers. Instances are immutable: all arrays
    are stored read-only, use "replace" to derive a modified graph.

    Use "build_graph" to create graphs from raw edge lists (it removes
    duplicate edges); the constructor only validates.

    Parameters
    ----------
    num_nodes : int
        Number of nodes.
    edges : array-like of int, shape (m, 2)
        Directed (source, target) pairs.
    features : array-like of float, shape (num_nodes, d) or (num_nodes,)
        Node features. If None, a constant all-ones column.
    weights : array-like of float, shape (m,), optional
        Nonnegative edge weights. None means all weights are 1.
    labels : array-like, shape (num_nodes,), optional
        Integer class or real regression target per node.
    masks : dict of str: array-like of bool, optional
        Named node subsets (train, val, test, ...), pairwise disjoint.
    """

    def __init__(self, num_nodes, edges, features=None, weights=None,
                 labels=None, masks=None):
        num_nodes = int(num_nodes)
        if num_nodes < 1:
            raise GraphError('A graph needs at least one node')
        self._num_nodes = num_nodes
        self._edges = _readonly(_edgearray(edges))
        self._check_endpoints()

        # Features
        if features is None:
            features = np.ones((num_nodes, 1))
        features = np.asarray(features, dtype=np.float64)
        if features.ndim == 1:
            features = features[:, np.newaxis]
        if features.ndim != 2 or features.shape[0] != num_nodes:
            raise DimensionError(
                'Feature matrix has {} rows, graph has {} nodes'.format(
                    features.shape[0] if features.ndim else 0, num_nodes))
        self._features = _readonly(features)

        # Edge weights
        if weights is not None:
            weights = np.asarray(weights, dtype=np.float64).ravel()
            if weights.shape[0] != self._edges.shape[0]:
                raise DimensionError(
                    '{} edge weights for {} edges'.format(
                        weights.shape[0], self._edges.shape[0]))
            if not np.all(np.isfinite(weights)) or np.any(weights < 0):
                raise GraphError('Edge weights must be finite and nonnegative')
            weights = _readonly(weights)
        self._weights = weights

        # Labels
        if labels is not None:
            labels = np.asarray(labels)
            if labels.ndim != 1 or labels.shape[0] != num_nodes:
                raise DimensionError('{} labels for {} nodes'.format(
                    labels.size, num_nodes))
            labels = _readonly(labels)
        self._labels = labels

        # Masks
        checked = {}
        union = np.zeros(num_nodes, dtype=bool)
        for name, mask in (masks or {}).items():
            mask = np.asarray(mask, dtype=bool).ravel()
            if mask.shape[0] != num_nodes:
                raise DimensionError('Mask {!r} has length {}, expected {}'.format(
                    name, mask.shape[0], num_nodes))
            if np.any(union & mask):
                raise GraphError('Mask {!r} overlaps another mask'.format(name))
            union |= mask
            checked[str(name)] = _readonly(mask)
        self._masks = MappingProxyType(checked)

    def _check_endpoints(self):
        """Raise GraphError naming the first edge with an invalid endpoint"""
        edges = self._edges
        invalid = np.flatnonzero(((edges < 0) | (edges >= self._num_nodes)).any(
            axis=1))
        if invalid.size:
            index = int(invalid[0])
            raise GraphError(
                'Edge {} ({}, {}) has an endpoint outside [0, {})'.format(
                    index, edges[index, 0], edges[index, 1], self._num_nodes))

    @property
    def num_nodes(self):
        """Number of nodes."""
        return self._num_nodes

    @property
    def num_edges(self):
        """Number of directed edges."""
        return self._edges.shape[0]

    @property
    def edges(self):
        """Directed edges as a read-only (m, 2) int64 array."""
        return self._edges

    @property
    def sources(self):
        """Edge source nodes."""
        return self._edges[:, 0]

    @property
    def targets(self):
        """Edge target nodes."""
        return self._edges[:, 1]

    @property
    def weights(self):
        """Edge weights, or None if the graph is unweighted."""
        return self._weights

    @property
    def edge_weights(self):
        """Edge weights, ones for unweighted graphs."""
        if self._weights is None:
            return np.ones(self.num_edges)
        return self._weights

    @property
    def features(self):
        """Node features as a read-only (num_nodes, d) float64 array."""
        return self._features

    @property
    def feature_dim(self):
        """Feature dimension d."""
        return self._features.shape[1]

    @property
    def labels(self):
        """Node labels or None."""
        return self._labels

    @property
    def masks(self):
        """Read-only mapping of named boolean node masks."""
        return self._masks

    def replace(self, **changes):
        """
        Return a new graph with some fields replaced.

        Parameters
        ----------
        **changes
            Any of the constructor arguments.

        Return
        ------
        out : Graph
        """
        fields = dict(num_nodes=self._num_nodes, edges=self._edges,
                      features=self._features, weights=self._weights,
                      labels=self._labels, masks=dict(self._masks))
        fields.update(changes)
        return Graph(**fields)

    def adjacency(self):
        """
        Return the weighted adjacency matrix, A[i, j] = weight of edge i -> j.

        Return
        ------
        out : scipy.sparse.csr_matrix of shape (num_nodes, num_nodes)
        """
        n = self._num_nodes
        return sp.csr_matrix(
            (self.edge_weights, (self.sources, self.targets)), shape=(n, n))

    def __repr__(self):
        return 'Graph(num_nodes={}, num_edges={}, feature_dim={}{}{})'.format(
            self._num_nodes, self.num_edges, self.feature_dim,
            ', weighted' if self._weights is not None else '',
            ', labeled' if self._labels is not None else '')


@dataclass(frozen=True)
class DegreeView:
    """
    Per-node degrees of a graph.

    Attributes
    ----------
    in_degree : numpy.ndarray of int
        Number of edges targeting each node.
    out_degree : numpy.ndarray of int
        Number of edges leaving each node.
    undirected_neighbors : tuple of frozenset
        Neighbors of each node treating edges as undirected (self-loops
        excluded).
    """
    in_degree: np.ndarray
    out_degree: np.ndarray
    undirected_neighbors: tuple


def build_graph(num_nodes, edges, features=None, labels=None, weights=None,
                masks=None, dedup=True):
    """
    Build a validated graph from a raw edge list.

    Parameters
    ----------
    num_nodes : int
        Number of nodes.
    edges : array-like of int, shape (m, 2)
        Directed (source, target) pairs.
    features : array-like, optional
        Node features (num_nodes rows). Default to a constant column.
    labels : array-like, optional
        Node labels.
    weights : array-like, optional
        Edge weights.
    masks : dict, optional
        Named node masks.
    dedup : bool, optional
        If True, remove duplicate directed edges, keeping the first
        occurrence. Insertion order of surviving edges is preserved.

    Return
    ------
    out : Graph
    """
    graph = Graph(num_nodes, edges, features=features, weights=weights,
                  labels=labels, masks=masks)
    if not dedup:
        return graph

    keep = _first_occurrences(graph.edges, graph.num_nodes)
    if keep.size == graph.num_edges:
        return graph

    log.debug('Removed %d duplicate edges', graph.num_edges - keep.size)
    return graph.replace(
        edges=graph.edges[keep],
        weights=None if graph.weights is None else graph.weights[keep])


def degree_view(graph):
    """
    Return in/out degrees and undirected neighbor sets.

    Parameters
    ----------
    graph : Graph
        Input graph.

    Return
    ------
    out : DegreeView
    """
    n = graph.num_nodes
    in_degree = np.bincount(graph.targets, minlength=n)
    out_degree = np.bincount(graph.sources, minlength=n)

    pairs = _undirected_pairs(graph)
    neighbors = [set() for _ in range(n)]
    for node, neighbor in pairs:
        neighbors[node].add(int(neighbor))
    return DegreeView(in_degree=in_degree, out_degree=out_degree,
                      undirected_neighbors=tuple(
                          frozenset(item) for item in neighbors))


def symmetrize(graph):
    """
    Add the reverse of every edge.

    Reverse edges get the weight of the edge they reverse. Existing edges
    and their weights are kept first, in their original order.

    Parameters
    ----------
    graph : Graph
        Input graph.

    Return
    ------
    out : Graph
    """
    edges = np.concatenate((graph.edges, graph.edges[:, ::-1]))
    weights = graph.weights
    if weights is not None:
        weights = np.concatenate((weights, weights))
    keep = _first_occurrences(edges, graph.num_nodes)
    return graph.replace(edges=edges[keep],
                         weights=None if weights is None else weights[keep])


def homophily_ratio(graph):
    """
    Node homophily ratio.

    Mean over nodes of the fraction of undirected neighbors sharing the node
    label. Isolated nodes (no neighbor other than itself) are excluded from
    the mean.

    Parameters
    ----------
    graph : Graph
        Labeled graph.

    Return
    ------
    out : float
        Ratio in [0, 1].
    """
    labels = _require_labels(graph)
    pairs = _undirected_pairs(graph)
    n = graph.num_nodes
    degree = np.bincount(pairs[:, 0], minlength=n)
    agree = labels[pairs[:, 0]] == labels[pairs[:, 1]]
    same = np.bincount(pairs[:, 0], weights=agree.astype(np.float64),
                       minlength=n)
    connected = degree > 0
    if not connected.any():
        raise GraphError('homophily_ratio: all nodes are isolated')
    return float(np.mean(same[connected] / degree[connected]))


def edge_homophily(graph):
    """
    Edge homophily ratio.

    Fraction of directed non-self edges that join nodes of equal label.

    Parameters
    ----------
    graph : Graph
        Labeled graph.

    Return
    ------
    out : float
    """
    labels = _require_labels(graph)
    edges = graph.edges[graph.sources != graph.targets]
    if not edges.shape[0]:
        raise GraphError('edge_homophily: graph has no non-self edge')
    return float(np.mean(labels[edges[:, 0]] == labels[edges[:, 1]]))


def graph_statistics(graph):
    """
    Dataset statistics.

    Parameters
    ----------
    graph : Graph
        Input graph.

    Return
    ------
    out : dict
        "nodes", "edges", "features", "self_loops", "isolated" and, for
        labeled graphs, "classes", "node_homophily" and "edge_homophily".
    """
    connected = np.unique(_undirected_pairs(graph)[:, 0]).size
    stats = {
        'nodes': graph.num_nodes,
        'edges': graph.num_edges,
        'features': graph.feature_dim,
        'self_loops': int(np.count_nonzero(graph.sources == graph.targets)),
        'isolated': graph.num_nodes - connected,
    }
    if graph.labels is not None:
        stats['classes'] = int(np.unique(graph.labels).size)
        try:
            stats['node_homophily'] = homophily_ratio(graph)
            stats['edge_homophily'] = edge_homophily(graph)
        except GraphError:
            pass
    return stats


def _edgearray(edges):
    """Return edges as a (m, 2) int64 array"""
    edges = np.asarray(edges, dtype=np.int64)
    if edges.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if edges.ndim != 2 or edges.shape[1] != 2:
        raise DimensionError('Edges must be (source, target) pairs')
    return edges


def _first_occurrences(edges, num_nodes):
    """Sorted indices of the first occurrence of each directed edge"""
    if not edges.shape[0]:
        return np.zeros(0, dtype=np.int64)
    keys = edges[:, 0] * num_nodes + edges[:, 1]
    return np.sort(np.unique(keys, return_index=True)[1])


def _undirected_pairs(graph):
    """Unique (node, neighbor) pairs of the undirected view, no self pairs"""
    edges = graph.edges[graph.sources != graph.targets]
    pairs = np.concatenate((edges, edges[:, ::-1]))
    return pairs[_first_occurrences(pairs, graph.num_nodes)]


def _require_labels(graph):
    """Return labels or raise GraphError"""
    if graph.labels is None:
        raise GraphError('Graph has no labels')
    return graph.labels


def _readonly(array):
    """Return a read-only array, copying only writeable inputs"""
    if array.flags.writeable:
        array = array.copy()
        array.flags.writeable = False
    return array


class GraphError(ValueError):
    """Raised when a graph is invalid or lacks required data."""


class DimensionError(GraphError):
    """Raised when array dimensions do not match the graph."""
