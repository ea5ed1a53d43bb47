"""Monte Carlo wavelet frames from sampled reproducing kernels.

Build a frame of wavelets on a data-defined reproducing space: draw i.i.d.
samples, eigendecompose the normalized kernel matrix, shape the spectrum
with a regularizing filter family, and verify the frame identities and
convergence rates empirically.
"""

from .filters import (AsymptoticRegularization, FilterDomainError, FilterFamily,
                      IteratedTikhonov, Landweber, Tikhonov, make_family)
from .frame import CoefficientTable, ParsevalReport, WaveletFrame, default_tau
from .kernels import (Circle, CircleKernel, DomainError, EuclideanBox,
                      FiniteGraph, GaussianKernel, GraphHeatKernel)
from .operator import (EigenSystem, RankError, SampleSet, derive_seed,
                       draw_samples, eigendecompose, empirical_eigensystem,
                       extension_gram, hilbert_norm, hs_distance,
                       kernel_matrix, nystrom_extend, philox)
from .reference import (BoxReference, CircleReference, GraphReference,
                        ReferenceOperator, reference_operator)
from .signals import (SignalSpec, continuous_residual, evaluate_signal,
                      hilbert_norm_of, make_sobolev_signal,
                      reconstruction_error, sample_values, source_norm)
from .experiments import (ExperimentReport, RateFit, fit_rate,
                          run_approximation_decay, run_concentration,
                          run_end_to_end)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticRegularization", "BoxReference", "Circle", "CircleKernel",
    "CircleReference", "CoefficientTable", "DomainError", "EigenSystem",
    "EuclideanBox", "ExperimentReport", "FilterDomainError", "FilterFamily",
    "FiniteGraph", "GaussianKernel", "GraphHeatKernel", "GraphReference",
    "IteratedTikhonov", "Landweber", "ParsevalReport", "RankError", "RateFit",
    "ReferenceOperator", "SampleSet", "SignalSpec", "Tikhonov", "WaveletFrame",
    "continuous_residual", "default_tau", "derive_seed", "draw_samples",
    "eigendecompose", "empirical_eigensystem", "evaluate_signal",
    "extension_gram", "fit_rate", "hilbert_norm", "hilbert_norm_of",
    "hs_distance", "kernel_matrix", "make_family", "make_sobolev_signal",
    "nystrom_extend", "philox", "reconstruction_error", "reference_operator",
    "run_approximation_decay", "run_concentration", "run_end_to_end",
    "sample_values", "source_norm",
]
