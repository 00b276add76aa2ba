"""Random earthquake slip realizations on discretized faults, seafloor
deformation through a unit-source dislocation bank, and Monte Carlo
tsunami-proxy statistics."""

from .covariance import (AcfSpec, SlipDistribution, TaperSpec, build_distribution,
                         correlation_matrix, gaussian_params_for_lognormal,
                         lognormal_moments, mean_slip, scale_covariance, taper_value)
from .geometry import (DeformGrid, FaultModel, PatchDistance, SubfaultPatch,
                       build_1d_fault, build_grid_1d, build_grid_2d, load_fault,
                       patch_distance)
from .klbasis import (KLBasis, Realization, ZStream, basis_for, draw_z,
                      eigendecompose, realize_gaussian, realize_lognormal)
from .moment import (DEFAULT_RIGIDITY, MomentSpec, magnitude_to_moment,
                     moment_magnitude, rescale_to_magnitude, seismic_moment)
from .okada import (Deformation, UnitSourceBank, build_bank, deform, load_bank,
                    mode_deformations, okada_patch, save_bank)
from .proxies import ProxyConfig, ProxySet, ShoreDensity, compute_proxies, shore_density
from .ptha_stats import (DensityEstimate, EnsemblePipeline, HazardCurve, SampleEnsemble,
                         exceedance_at, filter_extremes, hazard_curve, kde_1d, kde_2d,
                         run_ensemble, z_log_density)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
