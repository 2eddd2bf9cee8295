# -*- coding: utf-8 -*-
"""Half-Hop graph upsampling and linear diffusion analysis"""

from halfhop.version import VERSION as __version__

# Populate namespace with useful names only
from halfhop.params import Params, ParamError
from halfhop.graph import (Graph, DegreeView, GraphError, DimensionError,
                           build_graph, degree_view, symmetrize,
                           homophily_ratio, edge_homophily, graph_statistics)
from halfhop.file import FileFormatError, load_graph
from halfhop.synth import (LatentModel, LatentSample, grid_graph,
                           sample_latent_graph, split_masks)
from halfhop.augment import (HalfHopConfig, AugmentedGraph, half_hop,
                             half_hop_sampled, strip_slow_nodes, make_views)
from halfhop.diffusion import (DiffusionOperator, ZeroInDegreeWarning,
                               build_operator, propagate,
                               propagate_directed_halfhop, receptive_field,
                               self_weight_curve)
from halfhop.regression import (RidgeEstimate, RiskCurve, RidgeError,
                                fit_ridge, test_risk, mse_curve)
from halfhop.spectral import (SmoothingOperator, SpectralReport,
                              SpectralDomainError, r_reg,
                              predicted_cov_baseline, predicted_cov_halfhop,
                              eigen_decay_table, monte_carlo_risk)

for _func in (Params, ParamError, Graph, DegreeView, GraphError,
              DimensionError, build_graph, degree_view, symmetrize,
              homophily_ratio, edge_homophily, graph_statistics,
              FileFormatError, load_graph, LatentModel, LatentSample,
              grid_graph, sample_latent_graph, split_masks, HalfHopConfig,
              AugmentedGraph, half_hop, half_hop_sampled, strip_slow_nodes,
              make_views, DiffusionOperator, ZeroInDegreeWarning,
              build_operator, propagate, propagate_directed_halfhop,
              receptive_field, self_weight_curve,
              RidgeEstimate, RiskCurve, RidgeError, fit_ridge, test_risk,
              mse_curve, SmoothingOperator, SpectralReport,
              SpectralDomainError, r_reg, predicted_cov_baseline,
              predicted_cov_halfhop, eigen_decay_table, monte_carlo_risk):
    _func.__module__ = _func.__module__[:_func.__module__.rfind('.')]
del _func
