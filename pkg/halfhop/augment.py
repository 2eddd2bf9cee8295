"""Half-Hop graph upsampling transforms"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from halfhop.graph import Graph, GraphError
from halfhop.params import Params, ParamError, choice, unit_interval
from halfhop.synth import rng

log = logging.getLogger(__name__)

VARIANTS = ('hh', 'hh1', 'hh2')
INITS = ('interpolate', 'zero', 'random')

# Motif of each variant as (from, to) roles: 0 = source i, 1 = target j,
# 2 = slow node k. The first edge is always i -> k.
_MOTIFS = {
    'hh': ((0, 2), (1, 2), (2, 1)),
    'hh1': ((0, 2), (2, 1)),
    'hh2': ((0, 2), (2, 0), (1, 2), (2, 1)),
}


class HalfHopConfig(Params):
    """
    Half-Hop transform parameters.
    """
    _default = {
        'alpha': 0.5,
        'p': 1.0,
        'variant': 'hh',
        'init': 'interpolate',
        'seed': 0,
    }
    _dtype = {'alpha': float, 'p': float, 'variant': str, 'init': str,
              'seed': int}
    _doc = {
        'alpha': 'Mixing parameter: slow node features are '
                 '(1 - alpha) * target + alpha * source.',
        'p': 'Probability of half-hopping all incoming edges of a node.',
        'variant': "Connectivity motif: 'hh' (i->k, j->k, k->j), "
                   "'hh1' (i->k, k->j) or 'hh2' (i<->k<->j).",
        'init': "Slow node features: 'interpolate', 'zero' or 'random' "
                "(uniform in [0, 1)).",
        'seed': 'Seed of node sampling and random initialization.',
    }
    _nonewkey = True

    _set_alpha = staticmethod(unit_interval('alpha'))
    _set_p = staticmethod(unit_interval('p'))
    _set_variant = staticmethod(choice('variant', VARIANTS))
    _set_init = staticmethod(choice('init', INITS))

    @staticmethod
    def _set_seed(value):
        if value < 0:
            raise ParamError('seed must be >= 0, got {}'.format(value))
        return value


@dataclass(frozen=True)
class AugmentedGraph:
    """
    A half-hopped graph with slow node provenance.

    Attributes
    ----------
    graph : halfhop.Graph
        Augmented graph: original nodes 0..n-1 followed by slow nodes
        n..n+m-1. Carries no labels and no masks.
    original_count : int
        Number of original nodes n.
    provenance : numpy.ndarray of int, shape (m, 2)
        (source, target) of the directed edge half-hopped by each slow node.
    config : HalfHopConfig
        Transform parameters.
    labels : numpy.ndarray or None
        Labels of the original nodes.
    masks : dict
        Masks of the original nodes.
    """
    graph: Graph
    original_count: int
    provenance: np.ndarray
    config: HalfHopConfig
    labels: np.ndarray = None
    masks: dict = None

    @property
    def num_slow(self):
        """Number of slow nodes m."""
        return self.provenance.shape[0]

    @property
    def slow_ids(self):
        """Slow node ids."""
        return np.arange(self.original_count,
                         self.original_count + self.num_slow)

    def interpolation_matrix(self):
        """
        Attribution map P from augmented nodes to original nodes.

        Identity rows for original nodes. For a slow node of edge (i, j),
        row (1 - alpha) e_j + alpha e_i when slow features are interpolated,
        a zero row otherwise.

        Return
        ------
        out : scipy.sparse.csr_matrix of shape (n + m, n)
        """
        n, m = self.original_count, self.num_slow
        rows = [np.arange(n)]
        cols = [np.arange(n)]
        data = [np.ones(n)]
        if self.config['init'] == 'interpolate' and m:
            alpha = self.config['alpha']
            slow = np.arange(n, n + m)
            rows.extend((slow, slow))
            cols.extend((self.provenance[:, 1], self.provenance[:, 0]))
            data.extend((np.full(m, 1.0 - alpha), np.full(m, alpha)))
        return sp.csr_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n + m, n))


def half_hop(graph, config=None):
    """
    Half-hop all non self-loop edges (deterministic transform).

    The "p" value of the configuration is ignored (treated as 1).

    Parameters
    ----------
    graph : halfhop.Graph
        Input graph.
    config : HalfHopConfig, optional
        Transform parameters.

    Return
    ------
    out : AugmentedGraph
    """
    config = HalfHopConfig() if config is None else config
    return _transform(graph, np.ones(graph.num_edges, dtype=bool), config)


def half_hop_sampled(graph, config=None):
    """
    Node sampled Half-Hop.

    Each node is selected with probability "p" (draws in ascending node id
    order); all incoming non self-loop edges of selected nodes are
    half-hopped, other edges are left untouched.

    Parameters
    ----------
    graph : halfhop.Graph
        Input graph.
    config : HalfHopConfig, optional
        Transform parameters.

    Return
    ------
    out : AugmentedGraph
    """
    config = HalfHopConfig() if config is None else config
    selected = select_nodes(graph.num_nodes, config)
    return _transform(graph, selected[graph.targets], config)


def select_nodes(num_nodes, config):
    """
    Draw the set of nodes whose incoming edges are half-hopped.

    Parameters
    ----------
    num_nodes : int
        Number of nodes.
    config : HalfHopConfig
        Transform parameters ("p" and "seed").

    Return
    ------
    out : numpy.ndarray of bool
    """
    sampling = rng(_streams(config['seed'])[0])
    return sampling.random(num_nodes) < config['p']


def strip_slow_nodes(augmented, features=None):
    """
    Remove slow nodes and restore the original edges.

    Each slow node is collapsed back to the edge it half-hopped, at the
    position of its first motif edge, so the original edge order is
    restored.

    Parameters
    ----------
    augmented : AugmentedGraph
        Half-hopped graph.
    features : numpy.ndarray, optional
        Current features of the augmented nodes (n + m rows), for example
        after diffusion. Default to the augmented graph features.

    Return
    ------
    out : halfhop.Graph
        Graph over the original nodes, with the current original node
        features.
    """
    n = augmented.original_count
    graph = augmented.graph
    provenance = np.asarray(augmented.provenance)
    if (provenance.ndim != 2 or provenance.shape[1] != 2 or
            graph.num_nodes != n + provenance.shape[0]):
        raise GraphError('strip_slow_nodes: provenance does not match the '
                         'slow nodes of the graph')
    if provenance.size and (provenance.min() < 0 or provenance.max() >= n):
        raise GraphError('strip_slow_nodes: provenance refers to nodes '
                         'outside [0, {})'.format(n))

    features = graph.features if features is None else np.asarray(features)
    if features.shape[0] != graph.num_nodes:
        raise GraphError('strip_slow_nodes: {} feature rows for {} '
                         'augmented nodes'.format(features.shape[0],
                                                  graph.num_nodes))

    sources, targets = graph.sources, graph.targets
    untouched = (sources < n) & (targets < n)

    # Entry edge i -> k of each slow node k
    entry = (sources < n) & (targets >= n)
    entry[entry] = provenance[targets[entry] - n, 0] == sources[entry]
    hopped = targets[entry] - n
    if np.bincount(hopped, minlength=provenance.shape[0]).max(
            initial=1) != 1 or hopped.size != provenance.shape[0]:
        raise GraphError('strip_slow_nodes: each slow node needs exactly one '
                         'edge from its source')

    keep = untouched | entry
    edges = np.array(graph.edges[keep])
    collapsed = edges[:, 1] >= n
    edges[collapsed] = provenance[edges[collapsed, 1] - n]

    weights = graph.weights
    return Graph(n, edges, features=features[:n],
                 weights=None if weights is None else weights[keep],
                 labels=augmented.labels, masks=augmented.masks)


def make_views(graph, config1, config2):
    """
    Generate two independent node sampled Half-Hop views.

    Original node ids are identical in both views, so node i of a view is
    paired with node i of the other.

    Parameters
    ----------
    graph : halfhop.Graph
        Input graph.
    config1, config2 : HalfHopConfig
        Parameters of each view. Seeds should differ (see "split_seed").

    Return
    ------
    out : tuple of AugmentedGraph
    """
    return half_hop_sampled(graph, config1), half_hop_sampled(graph, config2)


def split_seed(seed, count):
    """
    Derive independent integer seeds from a base seed.

    Parameters
    ----------
    seed : int
        Base seed.
    count : int
        Number of seeds.

    Return
    ------
    out : list of int
    """
    return [int(child.generate_state(1, np.uint64)[0]) for child in
            np.random.SeedSequence(seed).spawn(count)]


def _streams(seed):
    """Node sampling and feature initialization seed sequences"""
    return np.random.SeedSequence(seed).spawn(2)


def _transform(graph, candidates, config):
    """Half-hop candidate edges that are not self-loops"""
    n = graph.num_nodes
    edges = graph.edges
    hop = candidates & (graph.sources != graph.targets)
    provenance = edges[hop]
    m = provenance.shape[0]
    motif = np.array(_MOTIFS[config['variant']])

    # Each edge is replaced in place by 1 (untouched) or len(motif) edges
    counts = np.where(hop, motif.shape[0], 1)
    starts = np.cumsum(counts) - counts
    newedges = np.empty((int(counts.sum()), 2), dtype=np.int64)
    newedges[starts[~hop]] = edges[~hop]

    slow = np.arange(n, n + m)
    roles = np.stack((provenance[:, 0], provenance[:, 1], slow))
    hopstarts = starts[hop]
    for offset, (origin, destination) in enumerate(motif):
        newedges[hopstarts + offset, 0] = roles[origin]
        newedges[hopstarts + offset, 1] = roles[destination]

    weights = graph.weights
    if weights is not None:
        weights = np.repeat(weights, counts)

    features = np.concatenate(
        (graph.features, _slow_features(graph.features, provenance, config)))

    log.debug('Half-hopped %d of %d edges (variant %s)', m, graph.num_edges,
              config['variant'])
    augmented = Graph(n + m, newedges, features=features, weights=weights)
    return AugmentedGraph(graph=augmented, original_count=n,
                          provenance=provenance, config=config.copy(),
                          labels=graph.labels, masks=dict(graph.masks))


def _slow_features(features, provenance, config):
    """Initial features of slow nodes"""
    shape = (provenance.shape[0], features.shape[1])
    init = config['init']
    if init == 'zero':
        return np.zeros(shape)
    if init == 'random':
        return rng(_streams(config['seed'])[1]).random(shape)
    alpha = config['alpha']
    return ((1.0 - alpha) * features[provenance[:, 1]] +
            alpha * features[provenance[:, 0]])
