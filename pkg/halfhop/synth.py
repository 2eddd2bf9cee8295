"""Synthetic graph generators"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from halfhop.graph import Graph
from halfhop.params import Params, ParamError

log = logging.getLogger(__name__)

# Random generator algorithm, recorded in provenance
PRNG = 'PCG64'


def rng(seed):
    """
    Return the package random generator for a seed.

    Parameters
    ----------
    seed : int or numpy.random.SeedSequence
        Seed.

    Return
    ------
    out : numpy.random.Generator
    """
    return np.random.Generator(np.random.PCG64(seed))


class LatentModel(Params):
    """
    Latent space random graph and regression model.

    Latent positions z ~ N(0, sigma) generate edge weights
    W_ij = epsilon + exp(-|z_i - z_j|^2 / 2), observed features
    x = projection^T z (+ optional noise) and labels y = z . beta_star.

    Defaults are the reference 4 dimensional setting.
    """
    _default = {
        'sigma': np.diag([2.0, 1.0, 0.5, 0.25]),
        'projection': np.eye(4),
        'beta_star': np.full(4, 0.5),
        'epsilon': 0.1,
        'ridge_gamma': 0.1,
        'feature_noise': 0.0,
    }
    _dtype = {
        'sigma': (np.ndarray, {'ndim': 2, 'dtype': np.float64}),
        'projection': (np.ndarray, {'ndim': 2, 'dtype': np.float64}),
        'beta_star': (np.ndarray, {'ndim': 1, 'dtype': np.float64}),
        'epsilon': float,
        'ridge_gamma': float,
        'feature_noise': float,
    }
    _doc = {
        'sigma': 'Latent covariance (latent_dim x latent_dim), symmetric '
                 'positive definite.',
        'projection': 'Projection matrix M (latent_dim x feature_dim).',
        'beta_star': 'True regression coefficients (latent_dim).',
        'epsilon': 'Edge weight offset, >= 0.',
        'ridge_gamma': 'Ridge penalty, > 0.',
        'feature_noise': 'Standard deviation of Gaussian noise added to '
                         'observed features, >= 0.',
    }
    _nonewkey = True

    @staticmethod
    def _set_sigma(value):
        if value.shape[0] != value.shape[1]:
            raise ParamError('sigma must be square')
        if not np.allclose(value, value.T, rtol=0, atol=1e-12):
            raise ParamError('sigma must be symmetric')
        if not np.all(np.isfinite(value)) or np.linalg.eigvalsh(value)[0] <= 0:
            raise ParamError('sigma must be positive definite')
        return (value + value.T) / 2

    @staticmethod
    def _set_beta_star(value):
        if not np.all(np.isfinite(value)):
            raise ParamError('beta_star must be finite')
        return value

    @staticmethod
    def _set_epsilon(value):
        if not value >= 0:
            raise ParamError('epsilon must be >= 0, got {!r}'.format(value))
        return value

    @staticmethod
    def _set_ridge_gamma(value):
        if not value > 0:
            raise ParamError('ridge_gamma must be > 0, got {!r}'.format(value))
        return value

    @staticmethod
    def _set_feature_noise(value):
        if not value >= 0:
            raise ParamError('feature_noise must be >= 0, got {!r}'.format(
                value))
        return value

    @property
    def latent_dim(self):
        """Latent dimension."""
        return self['sigma'].shape[0]

    @property
    def feature_dim(self):
        """Observed feature dimension."""
        return self['projection'].shape[1]

    def validate(self):
        """
        Check dimensions consistency between parameters.

        Return
        ------
        out : LatentModel
            This model.
        """
        dim = self.latent_dim
        if self['projection'].shape[0] != dim:
            raise ParamError('projection must have {} rows, got {}'.format(
                dim, self['projection'].shape[0]))
        if self['beta_star'].shape[0] != dim:
            raise ParamError('beta_star must have {} entries, got {}'.format(
                dim, self['beta_star'].shape[0]))
        return self


@dataclass(frozen=True)
class LatentSample:
    """
    A latent space random graph sample.

    Attributes
    ----------
    graph : halfhop.Graph
        Dense weighted graph (all ordered pairs, self-loops included),
        observed features and labels.
    latents : numpy.ndarray
        Latent positions Z (n x latent_dim).
    seed : int
        Seed used.
    """
    graph: Graph
    latents: np.ndarray
    seed: int


def grid_graph(rows, cols, features=None):
    """
    2D planar 4-neighbors lattice.

    Node (r, c) has id r * cols + c. Every lattice link is stored as two
    directed edges.

    Parameters
    ----------
    rows : int
        Number of rows, >= 1.
    cols : int
        Number of columns, >= 1.
    features : array-like, optional
        Node features. Default to a constant all-ones scalar feature.

    Return
    ------
    out : halfhop.Graph
    """
    rows, cols = int(rows), int(cols)
    if rows < 1 or cols < 1:
        raise ParamError('grid dimensions must be >= 1, got {}x{}'.format(
            rows, cols))

    ids = np.arange(rows * cols).reshape(rows, cols)
    horizontal = np.stack((ids[:, :-1].ravel(), ids[:, 1:].ravel()), axis=1)
    vertical = np.stack((ids[:-1, :].ravel(), ids[1:, :].ravel()), axis=1)
    links = np.concatenate((horizontal, vertical))

    # Both directions of each link, sorted by source then target
    edges = np.concatenate((links, links[:, ::-1]))
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    return Graph(rows * cols, edges, features=features)


def sample_latent_graph(model, n, seed):
    """
    Sample a latent space random graph.

    Parameters
    ----------
    model : LatentModel
        Model parameters.
    n : int
        Number of nodes, >= 2.
    seed : int
        Seed. Identical seeds give bit-identical samples.

    Return
    ------
    out : LatentSample
    """
    model.validate()
    n = int(n)
    if n < 2:
        raise ParamError('n must be >= 2, got {}'.format(n))

    generator = rng(seed)
    cholesky = np.linalg.cholesky(model['sigma'])
    latents = generator.standard_normal((n, model.latent_dim)) @ cholesky.T

    weights = model['epsilon'] + np.exp(
        -0.5 * cdist(latents, latents, 'sqeuclidean'))
    sources, targets = np.indices((n, n))
    edges = np.stack((sources.ravel(), targets.ravel()), axis=1)

    features = latents @ model['projection']
    if model['feature_noise']:
        features = features + model['feature_noise'] * \
            generator.standard_normal(features.shape)

    log.debug('Sampled latent graph: n=%d, seed=%s', n, seed)
    graph = Graph(n, edges, features=features, weights=weights.ravel(),
                  labels=latents @ model['beta_star'])
    return LatentSample(graph=graph, latents=latents, seed=seed)


def split_masks(n, train_fraction, seed):
    """
    Random train/test node split.

    Parameters
    ----------
    n : int
        Number of nodes.
    train_fraction : float
        Fraction of training nodes, in (0, 1). The number of training nodes
        is train_fraction * n rounded half up.
    seed : int
        Seed.

    Return
    ------
    out : tuple of numpy.ndarray of bool
        (train mask, test mask), disjoint and exhaustive.
    """
    if not 0 < train_fraction < 1:
        raise ParamError('train_fraction must be in (0, 1), got {!r}'.format(
            train_fraction))
    n = int(n)
    count = int(np.floor(train_fraction * n + 0.5))
    if not 0 < count < n:
        raise ParamError(
            'train_fraction {} leaves an empty split for {} nodes'.format(
                train_fraction, n))

    train = np.zeros(n, dtype=bool)
    train[rng(seed).permutation(n)[:count]] = True
    return train, ~train
