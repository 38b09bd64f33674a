"""Sparse recovery toolkit for coherent radar imaging with missing samples.

Synthesizes point-scatterer radar grids, removes or corrupts samples under
controlled masks, and recovers both the signal and a focused image by
least-squares recovery on a detected sparse support or by descending the
concentration measure of a cross-term-reduced time-frequency image.
"""

__version__ = "0.1.0"

from .analysis import (SnrReport, monte_carlo_snr, snr_input, snr_predicted,
                       snr_recovered)
from .direct import (RecoveryReport, SingularSystemError, recover_direct,
                     recover_iterative, select_support, solve_ls)
from .estimators import DirectRecovery, GradientRecovery, IterativeRecovery, SMethod
from .gradient import (GradientConfig, GradientTrace, gradient_sweep,
                       measure_differential, recover_gradient)
from .scenario import Scenario, ScenarioError, preset
from .synthesis import (RadarParams, RotationModel, Scatterer, add_noise,
                        make_mask, synthesize_nonuniform, synthesize_rotating,
                        synthesize_uniform)
from .transforms import (SparsityMeasure, dft2, half_norm, idft2, partial_dft2,
                         smethod, smethod_increment, sparsity_measure)
from .validation import check_complex_grid, check_mask, split_observed

__all__ = [
    "DirectRecovery",
    "GradientConfig",
    "GradientRecovery",
    "GradientTrace",
    "IterativeRecovery",
    "RadarParams",
    "RecoveryReport",
    "RotationModel",
    "SMethod",
    "Scatterer",
    "Scenario",
    "ScenarioError",
    "SingularSystemError",
    "SnrReport",
    "SparsityMeasure",
    "__version__",
    "add_noise",
    "check_complex_grid",
    "check_mask",
    "dft2",
    "gradient_sweep",
    "half_norm",
    "idft2",
    "make_mask",
    "measure_differential",
    "monte_carlo_snr",
    "partial_dft2",
    "preset",
    "recover_direct",
    "recover_gradient",
    "recover_iterative",
    "select_support",
    "smethod",
    "smethod_increment",
    "snr_input",
    "snr_predicted",
    "snr_recovered",
    "solve_ls",
    "sparsity_measure",
    "split_observed",
    "synthesize_nonuniform",
    "synthesize_rotating",
    "synthesize_uniform",
]
