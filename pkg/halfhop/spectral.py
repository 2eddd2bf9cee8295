"""
Closed form risk of diffused features in the latent space random graph model
and Monte Carlo validation.

Mean aggregation on a latent space random graph acts on feature covariances
through the smoothing operator A = (I + sigma^-1)^-1, so every prediction is
a function of sigma's eigenvalues in sigma's eigenbasis.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import linalg

from halfhop.augment import split_seed
from halfhop.diffusion import build_operator, propagate, \
    propagate_directed_halfhop
from halfhop.regression import MAX_CONDITION, fit_ridge, test_risk
from halfhop.synth import sample_latent_graph, split_masks

log = logging.getLogger(__name__)

ARMS = ('baseline', 'halfhop')

# Eigenvalues below this are treated as zero
EIGEN_CLAMP = 1e-12

# Tolerances on symmetric and positive semi-definite inputs
SYMMETRY_TOL = 1e-8
PSD_TOL = 1e-10

# Eigenvalue grid of decay rate fits
DECAY_GRID = np.logspace(-4, -2, 21)

# Memory of one Monte Carlo trial per node pair, and default budget of
# concurrent trials
TRIAL_BYTES_PER_PAIR = 120
TRIAL_MEMORY_BUDGET = 2 * 1024 ** 3


@dataclass(frozen=True)
class SmoothingOperator:
    """
    Smoothing operator A = (I + sigma^-1)^-1.

    Attributes
    ----------
    matrix : numpy.ndarray
        A, symmetric.
    sigma_eigenvalues : numpy.ndarray
        Eigenvalues of sigma, ascending.
    eigenvectors : numpy.ndarray
        Shared orthonormal eigenvectors of sigma and A (columns).
    """
    matrix: np.ndarray
    sigma_eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_sigma(cls, sigma):
        """
        Build the operator of a latent covariance.

        Parameters
        ----------
        sigma : numpy.ndarray
            Symmetric positive definite latent covariance.

        Return
        ------
        out : SmoothingOperator
        """
        values, vectors = linalg.eigh(np.asarray(sigma, dtype=np.float64))
        return cls(matrix=_compose(vectors, values / (1.0 + values)),
                   sigma_eigenvalues=values, eigenvectors=vectors)

    @property
    def eigenvalues(self):
        """Eigenvalues of A: lambda / (1 + lambda)."""
        return self.sigma_eigenvalues / (1.0 + self.sigma_eigenvalues)

    def apply(self, values):
        """
        Return the symmetric matrix with the given eigenvalues in the shared
        eigenbasis.

        Parameters
        ----------
        values : numpy.ndarray
            Eigenvalues, in the order of "sigma_eigenvalues".

        Return
        ------
        out : numpy.ndarray
        """
        return _compose(self.eigenvectors, values)


def baseline_eigenvalue_map(lam, k):
    """
    Covariance eigenvalue after k rounds of mean aggregation:
    (lam / (1 + lam))^(2k) lam.

    Parameters
    ----------
    lam : float or numpy.ndarray
        Latent covariance eigenvalues.
    k : int
        Number of rounds, >= 0.

    Return
    ------
    out : float or numpy.ndarray
    """
    _check_rounds(k)
    lam = np.asarray(lam, dtype=np.float64)
    return (lam / (1.0 + lam)) ** (2 * k) * lam


def halfhop_eigenvalue_map(lam, k, alpha):
    """
    Covariance eigenvalue after k rounds of mean aggregation on the
    directed half-hopped graph, averaged over original and slow nodes:
    1/2 a^(k-1) (1 + ((1 - alpha) + alpha a)^2) lam, a = lam / (1 + lam).

    Parameters
    ----------
    lam : float or numpy.ndarray
        Latent covariance eigenvalues.
    k : int
        Odd number of rounds.
    alpha : float
        Mixing parameter.

    Return
    ------
    out : float or numpy.ndarray
    """
    _check_odd(k)
    lam = np.asarray(lam, dtype=np.float64)
    a = lam / (1.0 + lam)
    return 0.5 * a ** (k - 1) * (1.0 + ((1.0 - alpha) + alpha * a) ** 2) * lam


def halfhop_original_eigenvalue_map(lam, k, alpha):
    """
    Covariance eigenvalue of original node embeddings after k rounds on the
    directed half-hopped graph: a^(k-1) ((1 - alpha) + alpha a)^2 lam.

    Parameters
    ----------
    lam : float or numpy.ndarray
        Latent covariance eigenvalues.
    k : int
        Odd number of rounds.
    alpha : float
        Mixing parameter.

    Return
    ------
    out : float or numpy.ndarray
    """
    _check_odd(k)
    lam = np.asarray(lam, dtype=np.float64)
    a = lam / (1.0 + lam)
    return a ** (k - 1) * ((1.0 - alpha) + alpha * a) ** 2 * lam


def predicted_cov_baseline(model, k):
    """
    Feature covariance after k rounds of mean aggregation: A^(2k) sigma.

    Parameters
    ----------
    model : halfhop.LatentModel
        Model.
    k : int
        Number of rounds, >= 0.

    Return
    ------
    out : numpy.ndarray
    """
    _check_rounds(k)
    if k == 0:
        return np.array(model['sigma'])
    operator = SmoothingOperator.from_sigma(model['sigma'])
    return operator.apply(baseline_eigenvalue_map(
        operator.sigma_eigenvalues, k))


def predicted_cov_halfhop(model, k, alpha):
    """
    Feature covariance after k rounds on the directed half-hopped graph:
    1/2 A^(k-1) (I + ((1 - alpha) I + alpha A)^2) sigma.

    Only odd k are covered by the underlying recursion.

    Parameters
    ----------
    model : halfhop.LatentModel
        Model.
    k : int
        Odd number of rounds.
    alpha : float
        Mixing parameter.

    Return
    ------
    out : numpy.ndarray
    """
    operator = SmoothingOperator.from_sigma(model['sigma'])
    return operator.apply(halfhop_eigenvalue_map(
        operator.sigma_eigenvalues, k, alpha))


def predicted_cov_halfhop_original(model, k, alpha):
    """
    Covariance of original node embeddings after k rounds on the directed
    half-hopped graph: A^(k-1) ((1 - alpha) I + alpha A)^2 sigma.

    This is the covariance observed once slow nodes are stripped.

    Parameters
    ----------
    model : halfhop.LatentModel
        Model.
    k : int
        Odd number of rounds.
    alpha : float
        Mixing parameter.

    Return
    ------
    out : numpy.ndarray
    """
    operator = SmoothingOperator.from_sigma(model['sigma'])
    return operator.apply(halfhop_original_eigenvalue_map(
        operator.sigma_eigenvalues, k, alpha))


def r_reg(cov, model, gamma=None):
    """
    Asymptotic ridge regression test risk for features of covariance S.

    R(S) = b^T K b with b = sigma^1/2 beta_star and
    K = (I - S^1/2 M (gamma I + M^T S M)^-1 M^T S^1/2)^2.

    Parameters
    ----------
    cov : numpy.ndarray
        Effective latent covariance S, symmetric positive semi-definite.
    model : halfhop.LatentModel
        Model (sigma, projection M, beta_star, ridge_gamma).
    gamma : float, optional
        Ridge penalty. Default to the model "ridge_gamma".

    Return
    ------
    out : float
    """
    model.validate()
    gamma = model['ridge_gamma'] if gamma is None else float(gamma)
    if not gamma >= 0:
        raise SpectralDomainError('r_reg: gamma must be >= 0, got {!r}'.format(
            gamma))

    cov = np.asarray(cov, dtype=np.float64)
    dim = model.latent_dim
    if cov.shape != (dim, dim):
        raise SpectralDomainError('r_reg: covariance must be {0}x{0}, got '
                                  'shape {1}'.format(dim, cov.shape))
    if np.max(np.abs(cov - cov.T), initial=0.0) > SYMMETRY_TOL:
        raise SpectralDomainError('r_reg: covariance is not symmetric')

    cov_half = _sqrtm(cov, 'r_reg')
    projection = model['projection']
    inner = gamma * np.eye(projection.shape[1]) + \
        projection.T @ cov @ projection
    if not np.linalg.cond(inner) <= MAX_CONDITION:
        raise SpectralDomainError('r_reg: singular system, gamma I + M^T S M '
                                  'is not invertible')
    hat = cov_half @ projection @ np.linalg.solve(inner,
                                                  projection.T @ cov_half)
    residual = np.eye(dim) - hat
    kernel = residual @ residual

    signal = _sqrtm(model['sigma'], 'r_reg') @ model['beta_star']
    return float(max(signal @ kernel @ signal, 0.0))


def loglog_slope(function, lambdas=None):
    """
    Fitted slope of log(function(lambda)) against log(lambda).

    Parameters
    ----------
    function : callable
        Eigenvalue map, vectorized.
    lambdas : numpy.ndarray, optional
        Eigenvalue grid. Default to 21 log spaced values in [1e-4, 1e-2].

    Return
    ------
    out : float
    """
    lambdas = DECAY_GRID if lambdas is None else np.asarray(lambdas)
    slope, _ = np.polyfit(np.log(lambdas), np.log(function(lambdas)), 1)
    return float(slope)


def eigen_decay_table(model, k, alpha, lambdas=None, halfhop=True):
    """
    Per eigendirection covariance eigenvalues after k rounds and small
    eigenvalue decay rates.

    Parameters
    ----------
    model : halfhop.LatentModel
        Model.
    k : int
        Odd number of rounds (any number of rounds if not "halfhop").
    alpha : float
        Mixing parameter.
    lambdas : numpy.ndarray, optional
        Eigenvalue grid of the slope fits (See "loglog_slope").
    halfhop : bool, optional
        If False, only the "lambda" and "baseline" columns are computed.

    Return
    ------
    out : tuple (pandas.DataFrame, dict)
        Table with columns "lambda", "baseline", "halfhop",
        "halfhop_original" (one row per sigma eigenvalue, ascending) and
        fitted log-log slopes by column name.
    """
    if halfhop:
        _check_odd(k)
    else:
        _check_rounds(k)
    values = SmoothingOperator.from_sigma(model['sigma']).sigma_eigenvalues
    maps = {'baseline': lambda lam: baseline_eigenvalue_map(lam, k)}
    if halfhop:
        maps['halfhop'] = lambda lam: halfhop_eigenvalue_map(lam, k, alpha)
        maps['halfhop_original'] = \
            lambda lam: halfhop_original_eigenvalue_map(lam, k, alpha)
    table = pd.DataFrame({'lambda': values})
    slopes = {}
    for name, function in maps.items():
        table[name] = function(values)
        slopes[name] = loglog_slope(function, lambdas)
    return table, slopes


@dataclass(frozen=True)
class MonteCarloRisk:
    """
    Empirical test risk over independent latent graph samples.

    Attributes
    ----------
    arm : str
        'baseline' or 'halfhop'.
    k : int
        Number of rounds.
    alpha : float
        Mixing parameter (half-hop arm).
    n : int
        Number of nodes.
    seed : int
        Base seed.
    risks : tuple of float
        Test risk of each trial, in seed order.
    """
    arm: str
    k: int
    alpha: float
    n: int
    seed: int
    risks: tuple

    @property
    def trials(self):
        """Number of trials."""
        return len(self.risks)

    @property
    def mean(self):
        """Mean test risk."""
        return float(np.mean(self.risks))

    @property
    def stderr(self):
        """Standard error of the mean."""
        if self.trials < 2:
            return 0.0
        return float(np.std(self.risks, ddof=1) / np.sqrt(self.trials))

    def asdict(self):
        """Return a JSON compatible summary."""
        return {'arm': self.arm, 'k': self.k, 'alpha': self.alpha,
                'n': self.n, 'seed': self.seed, 'trials': self.trials,
                'mean': self.mean, 'stderr': self.stderr,
                'risks': list(self.risks)}


def default_threads(n, trials):
    """
    Default number of concurrent Monte Carlo trials.

    Parameters
    ----------
    n : int
        Number of nodes of sampled graphs.
    trials : int
        Number of trials.

    Return
    ------
    out : int
        Between 1 and min(trials, CPU count).
    """
    fit = TRIAL_MEMORY_BUDGET // (TRIAL_BYTES_PER_PAIR * int(n) ** 2)
    return int(max(1, min(trials, os.cpu_count() or 1, fit)))


def monte_carlo_risk(model, n, k, alpha=0.5, arm='baseline', trials=20,
                     seed=0, train_fraction=0.5, threads=None):
    """
    Empirical test risk of diffusion followed by ridge regression on
    sampled latent space random graphs.

    Each trial samples a latent graph and a random split. The baseline arm
    runs k rounds of mean aggregation over the weighted graph without
    self-loops. The half-hop arm applies the directed variant 'hh1' with
    interpolated slow nodes, runs k rounds on the augmented graph and strips
    slow nodes, computed with "halfhop.diffusion.propagate_directed_halfhop"
    so the augmented graph is never built. Ridge is fitted with penalty ridge_gamma / 2, which matches
    "r_reg" penalty convention.

    Parameters
    ----------
    model : halfhop.LatentModel
        Model.
    n : int
        Number of nodes.
    k : int
        Number of rounds.
    alpha : float, optional
        Mixing parameter of the half-hop arm.
    arm : str, optional
        'baseline' or 'halfhop'.
    trials : int, optional
        Number of trials.
    seed : int, optional
        Base seed. Trial seeds are derived from it.
    train_fraction : float, optional
        Training fraction of each split.
    threads : int, optional
        Maximum number of concurrent trials. Default to the number of CPUs,
        reduced so that concurrent trials fit in TRIAL_MEMORY_BUDGET.

    Return
    ------
    out : MonteCarloRisk
    """
    if arm not in ARMS:
        raise ValueError("arm must be 'baseline' or 'halfhop', got "
                         "{!r}".format(arm))
    _check_rounds(k)
    if trials < 1:
        raise ValueError('trials must be >= 1, got {}'.format(trials))
    model.validate()

    seeds = split_seed(seed, trials)
    if threads is None:
        threads = default_threads(n, trials)
    with ThreadPoolExecutor(max_workers=threads) as executor:
        risks = tuple(executor.map(
            lambda trial: _trial(model, n, k, alpha, arm, trial,
                                 train_fraction), seeds))
    log.info('Monte Carlo %s k=%d: %d trials on %d threads', arm, k, trials,
             threads)
    return MonteCarloRisk(arm=arm, k=int(k), alpha=float(alpha), n=int(n),
                          seed=int(seed), risks=risks)


@dataclass(frozen=True)
class SpectralReport:
    """
    Predicted and optionally measured risks at k rounds.

    Half-hop fields are None for baseline only reports.

    Attributes
    ----------
    k : int
        Number of rounds.
    alpha : float
        Mixing parameter.
    predicted_cov_baseline, predicted_cov_hh, predicted_cov_hh_original :
        numpy.ndarray
        Predicted covariances.
    predicted_risk_baseline, predicted_risk_hh, predicted_risk_hh_original :
        float
        "r_reg" of the predicted covariances.
    eigen_table : pandas.DataFrame
        See "eigen_decay_table".
    slopes : dict
        Fitted small eigenvalue decay rates.
    empirical_risk_baseline, empirical_risk_hh : MonteCarloRisk or None
        Monte Carlo measurements.
    """
    k: int
    alpha: float
    predicted_cov_baseline: np.ndarray
    predicted_risk_baseline: float
    eigen_table: pd.DataFrame
    predicted_cov_hh: np.ndarray = None
    predicted_cov_hh_original: np.ndarray = None
    predicted_risk_hh: float = None
    predicted_risk_hh_original: float = None
    slopes: dict = field(default_factory=dict)
    empirical_risk_baseline: MonteCarloRisk = None
    empirical_risk_hh: MonteCarloRisk = None

    def asdict(self):
        """Return a JSON compatible report (without the eigen table)."""
        content = {'k': self.k, 'alpha': self.alpha,
                   'slopes': dict(self.slopes)}
        for key in ('predicted_cov_baseline', 'predicted_cov_hh',
                    'predicted_cov_hh_original', 'predicted_risk_baseline',
                    'predicted_risk_hh', 'predicted_risk_hh_original',
                    'empirical_risk_baseline', 'empirical_risk_hh'):
            value = getattr(self, key)
            if isinstance(value, np.ndarray):
                value = value.tolist()
            elif isinstance(value, MonteCarloRisk):
                value = value.asdict()
            content[key] = value
        return content


def spectral_report(model, k, alpha, n=None, trials=20, seed=0,
                    threads=None, halfhop=True):
    """
    Assemble predictions and, if "n" is given, Monte Carlo measurements.

    Parameters
    ----------
    model : halfhop.LatentModel
        Model.
    k : int
        Odd number of rounds (any number of rounds if not "halfhop").
    alpha : float
        Mixing parameter.
    n : int, optional
        Number of nodes of Monte Carlo samples. No measurement if None.
    trials : int, optional
        Number of Monte Carlo trials.
    seed : int, optional
        Monte Carlo base seed.
    threads : int, optional
        Maximum number of concurrent trials.
    halfhop : bool, optional
        If False, only the baseline is predicted and measured.

    Return
    ------
    out : SpectralReport
    """
    if halfhop:
        _check_odd(k)
    else:
        _check_rounds(k)
    model.validate()
    cov_baseline = predicted_cov_baseline(model, k)
    table, slopes = eigen_decay_table(model, k, alpha, halfhop=halfhop)
    fields = {}
    if halfhop:
        fields['predicted_cov_hh'] = predicted_cov_halfhop(model, k, alpha)
        fields['predicted_cov_hh_original'] = predicted_cov_halfhop_original(
            model, k, alpha)
        fields['predicted_risk_hh'] = r_reg(fields['predicted_cov_hh'], model)
        fields['predicted_risk_hh_original'] = r_reg(
            fields['predicted_cov_hh_original'], model)

    if n is not None:
        arms = (('baseline', 'empirical_risk_baseline'),
                ('halfhop', 'empirical_risk_hh'))
        for arm, key in arms if halfhop else arms[:1]:
            fields[key] = monte_carlo_risk(model, n, k, alpha, arm, trials,
                                           seed, threads=threads)

    return SpectralReport(
        k=int(k), alpha=float(alpha), predicted_cov_baseline=cov_baseline,
        predicted_risk_baseline=r_reg(cov_baseline, model),
        eigen_table=table, slopes=slopes, **fields)


def _trial(model, n, k, alpha, arm, seed, train_fraction):
    """Test risk of one Monte Carlo trial"""
    graph_seed, mask_seed = split_seed(seed, 2)
    graph = sample_latent_graph(model, n, graph_seed).graph
    train, test = split_masks(n, train_fraction, mask_seed)

    operator = build_operator(graph, 'mean', self_loops=False)
    if arm == 'baseline':
        features = propagate(operator, graph.features, k)
    else:
        features = propagate_directed_halfhop(operator, graph.features, k,
                                              alpha)

    labels = graph.labels
    estimate = fit_ridge(features[train], labels[train],
                         model['ridge_gamma'] / 2, k)
    return test_risk(estimate, features[test], labels[test])


def _compose(vectors, values):
    """Symmetric matrix of given eigenpairs"""
    matrix = (vectors * values) @ vectors.T
    return (matrix + matrix.T) / 2


def _sqrtm(matrix, operation):
    """Symmetric square root with eigenvalue clamping"""
    values, vectors = linalg.eigh((matrix + matrix.T) / 2)
    if values[0] < -PSD_TOL:
        raise SpectralDomainError(
            '{}: matrix is not positive semi-definite (eigenvalue '
            '{:.3g})'.format(operation, values[0]))
    values = np.where(values < EIGEN_CLAMP, 0.0, values)
    return (vectors * np.sqrt(values)) @ vectors.T


def _check_rounds(k):
    if int(k) != k or k < 0:
        raise SpectralDomainError('k must be a nonnegative integer, got '
                                  '{!r}'.format(k))


def _check_odd(k):
    _check_rounds(k)
    if k % 2 == 0:
        raise SpectralDomainError(
            'k must be odd, got {}: the half-hop covariance recursion is only '
            'stated for an odd number of rounds'.format(k))


class SpectralDomainError(ValueError):
    """Raised when spectral predictions are requested outside their domain."""
