"""Ridge regression on diffused features and test risk curves"""

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from halfhop.augment import HalfHopConfig, half_hop, strip_slow_nodes
from halfhop.diffusion import build_operator
from halfhop.graph import DimensionError
from halfhop.synth import split_masks

log = logging.getLogger(__name__)

ENCODINGS = ('raw', 'onehot')

# Largest condition number accepted for an unpenalized system
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class RidgeEstimate:
    """
    Fitted ridge coefficients.

    Attributes
    ----------
    beta_hat : numpy.ndarray
        Coefficients, shape (feature_dim,) or (feature_dim, outputs).
    gamma : float
        Ridge penalty.
    k : int
        Number of message passing rounds applied to the features.
    train_size : int
        Number of training rows.
    """
    beta_hat: np.ndarray
    gamma: float
    k: int
    train_size: int

    def predict(self, features):
        """
        Predict targets.

        Parameters
        ----------
        features : numpy.ndarray
            Features, one row per node.

        Return
        ------
        out : numpy.ndarray
        """
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[1] != self.beta_hat.shape[0]:
            raise DimensionError(
                'predict: features must have {} columns, got shape {}'.format(
                    self.beta_hat.shape[0], features.shape))
        return features @ self.beta_hat


@dataclass(frozen=True)
class RiskCurve:
    """
    Test risk against the number of message passing rounds, for the
    baseline and the half-hopped graph.

    Attributes
    ----------
    ks : tuple of int
        Numbers of rounds.
    baseline_mse, halfhop_mse : tuple of float
        Test mean squared error of each arm at each k.
    config : dict
        Run provenance (operator, penalty, transform, split).
    """
    ks: tuple
    baseline_mse: tuple
    halfhop_mse: tuple
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if not len(self.ks) == len(self.baseline_mse) == len(self.halfhop_mse):
            raise ValueError('RiskCurve: inconsistent curve lengths')

    def to_frame(self):
        """
        Return the curves as a table.

        Return
        ------
        out : pandas.DataFrame
            Columns "k", "baseline_mse", "halfhop_mse".
        """
        return pd.DataFrame({'k': list(self.ks),
                             'baseline_mse': list(self.baseline_mse),
                             'halfhop_mse': list(self.halfhop_mse)})

    def oversmoothing_onset(self, arm, factor=1.1):
        """
        First k after the curve minimum where the risk exceeds
        factor x the minimum.

        Parameters
        ----------
        arm : str
            'baseline' or 'halfhop'.
        factor : float, optional
            Tolerated risk increase over the minimum.

        Return
        ------
        out : int or None
            None if the curve never exceeds the threshold.
        """
        if arm not in ('baseline', 'halfhop'):
            raise ValueError("arm must be 'baseline' or 'halfhop', got "
                             "{!r}".format(arm))
        values = np.asarray(getattr(self, arm + '_mse'))
        best = int(np.argmin(values))
        above = np.flatnonzero(values[best:] > factor * values[best])
        return int(self.ks[best + above[0]]) if above.size else None


def fit_ridge(features, targets, gamma, k=0):
    """
    Fit ridge regression coefficients.

    Minimizes (1 / (2 n)) |Y - X b|^2 + gamma |b|^2, with closed form
    b = (X^T X + 2 gamma n I)^-1 X^T Y solved by Cholesky factorization.

    Parameters
    ----------
    features : numpy.ndarray
        Training features X (n x d).
    targets : numpy.ndarray
        Training targets Y, shape (n,) or (n, outputs).
    gamma : float
        Ridge penalty, >= 0. Zero is accepted only for numerically full
        rank features.
    k : int, optional
        Number of message passing rounds applied to the features, recorded
        in the estimate.

    Return
    ------
    out : RidgeEstimate
    """
    features = np.asarray(features, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if features.ndim != 2:
        raise DimensionError('fit_ridge: features must be 2D, got {}D'.format(
            features.ndim))
    if features.shape[0] < 1 or targets.shape[0] != features.shape[0]:
        raise DimensionError(
            'fit_ridge: {} target rows for {} feature rows'.format(
                targets.shape[0], features.shape[0]))
    if not (np.all(np.isfinite(features)) and np.all(np.isfinite(targets))):
        raise RidgeError('fit_ridge: features and targets must be finite')
    if not gamma >= 0:
        raise RidgeError('fit_ridge: gamma must be >= 0, got {!r}'.format(
            gamma))

    size, dim = features.shape
    gram = features.T @ features + 2.0 * gamma * size * np.eye(dim)
    if gamma == 0 and not np.linalg.cond(gram) <= MAX_CONDITION:
        raise RidgeError('fit_ridge: singular system with gamma = 0')
    try:
        factor = cho_factor(gram)
    except LinAlgError:
        raise RidgeError('fit_ridge: system is not positive definite')
    beta = cho_solve(factor, features.T @ targets)

    if not np.all(np.isfinite(beta)):
        raise RidgeError('fit_ridge: non finite coefficients')
    return RidgeEstimate(beta_hat=beta, gamma=float(gamma), k=int(k),
                         train_size=size)


def test_risk(estimate, features, targets):
    """
    Test mean squared error: |Y - X b|^2 / n_test.

    Parameters
    ----------
    estimate : RidgeEstimate
        Fitted coefficients.
    features : numpy.ndarray
        Test features.
    targets : numpy.ndarray
        Test targets.

    Return
    ------
    out : float
    """
    targets = np.asarray(targets, dtype=np.float64)
    if targets.shape[0] == 0:
        raise RidgeError('test_risk: empty test set')
    residuals = targets - estimate.predict(features)
    if residuals.shape != targets.shape:
        raise DimensionError('test_risk: {} targets for {} predictions'.format(
            targets.shape, residuals.shape))
    return float(np.sum(residuals ** 2) / targets.shape[0])


# Not a test function
test_risk.__test__ = False


def encode_targets(labels, encoding='raw'):
    """
    Regression targets from node labels.

    Parameters
    ----------
    labels : numpy.ndarray
        Node labels.
    encoding : str, optional
        'raw' uses labels as real targets. 'onehot' uses class indicators,
        one column per distinct label in sorted order.

    Return
    ------
    out : numpy.ndarray of float64
    """
    labels = np.asarray(labels)
    if encoding == 'raw':
        return labels.astype(np.float64)
    if encoding == 'onehot':
        classes, index = np.unique(labels, return_inverse=True)
        return np.eye(classes.size)[index.ravel()]
    raise ValueError('encoding must be one of {}, got {!r}'.format(
        ', '.join(ENCODINGS), encoding))


def mse_curve(graph, config=None, kind='mean', self_loops=True, gamma=0.1,
              K=16, train_mask=None, test_mask=None, train_fraction=0.5,
              seed=0, encoding='raw', intercept=False):
    """
    Test risk of parameter free diffusion followed by ridge regression, for
    k = 0..K rounds, with and without Half-Hop.

    The baseline arm diffuses the graph features. The half-hop arm fully
    half-hops the graph, diffuses the augmented features, then strips slow
    nodes. Both arms are fitted and scored on the same split with the same
    penalty.

    Parameters
    ----------
    graph : halfhop.Graph
        Labeled graph.
    config : halfhop.HalfHopConfig, optional
        Transform parameters. Default to variant 'hh', alpha 0.5.
    kind : str, optional
        Operator kind ('mean' or 'sym').
    self_loops : bool, optional
        Operator self-loop policy.
    gamma : float, optional
        Ridge penalty.
    K : int, optional
        Largest number of rounds.
    train_mask, test_mask : numpy.ndarray of bool, optional
        Split. Default to the graph "train" and "test" masks if present, else
        a random split (See "train_fraction" and "seed").
    train_fraction : float, optional
        Training fraction of the random split.
    seed : int, optional
        Random split seed.
    encoding : str, optional
        Target encoding (See "encode_targets").
    intercept : bool, optional
        If True, a constant feature column is appended before fitting.

    Return
    ------
    out : RiskCurve
    """
    if graph.labels is None:
        raise ValueError('mse_curve: graph has no labels')
    config = HalfHopConfig() if config is None else config
    train, test, split = _resolve_split(graph, train_mask, test_mask,
                                        train_fraction, seed)
    targets = encode_targets(graph.labels, encoding)

    augmented = half_hop(graph, config)
    baseline_op = build_operator(graph, kind, self_loops)
    halfhop_op = build_operator(augmented.graph, kind, self_loops)
    baseline_features = np.array(graph.features, dtype=np.float64)
    halfhop_features = np.array(augmented.graph.features, dtype=np.float64)

    baseline_mse, halfhop_mse = [], []
    for k in range(int(K) + 1):
        if k:
            baseline_features = np.asarray(
                baseline_op.matrix @ baseline_features)
            halfhop_features = np.asarray(halfhop_op.matrix @ halfhop_features)
        stripped = strip_slow_nodes(augmented, halfhop_features).features

        for features, curve in ((baseline_features, baseline_mse),
                                (stripped, halfhop_mse)):
            design = _design(features, intercept)
            estimate = fit_ridge(design[train], targets[train], gamma, k)
            curve.append(test_risk(estimate, design[test], targets[test]))
        log.debug('k=%d: baseline %.6g, half-hop %.6g', k, baseline_mse[-1],
                  halfhop_mse[-1])

    provenance = {
        'operator': {'kind': baseline_op.kind, 'self_loops': bool(self_loops)},
        'gamma': float(gamma),
        'encoding': encoding,
        'intercept': bool(intercept),
        'halfhop': config.asdict(),
        'split': split,
    }
    return RiskCurve(ks=tuple(range(int(K) + 1)),
                     baseline_mse=tuple(baseline_mse),
                     halfhop_mse=tuple(halfhop_mse), config=provenance)


def _resolve_split(graph, train, test, train_fraction, seed):
    """Train and test masks with their provenance"""
    if train is None and test is None:
        if 'train' in graph.masks and 'test' in graph.masks:
            train, test = graph.masks['train'], graph.masks['test']
            split = {'source': 'graph masks'}
        else:
            train, test = split_masks(graph.num_nodes, train_fraction, seed)
            split = {'source': 'random', 'train_fraction': train_fraction,
                     'seed': seed}
    elif train is None or test is None:
        raise ValueError('mse_curve: train_mask and test_mask go together')
    else:
        split = {'source': 'given'}
    train = np.asarray(train, dtype=bool)
    test = np.asarray(test, dtype=bool)
    if train.shape != (graph.num_nodes,) or test.shape != (graph.num_nodes,):
        raise DimensionError('mse_curve: masks must have {} entries'.format(
            graph.num_nodes))
    split.update(train_size=int(train.sum()), test_size=int(test.sum()))
    return train, test, split


def _design(features, intercept):
    """Design matrix, with optional constant column"""
    if not intercept:
        return features
    return np.hstack((features, np.ones((features.shape[0], 1))))


class RidgeError(ValueError):
    """Raised when a ridge system cannot be solved."""
