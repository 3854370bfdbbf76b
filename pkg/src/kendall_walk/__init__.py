"""Kendall random walks: exact laws through the Williamson transform,
simulation, joint distributions, tail asymptotics and limit laws."""
from .asymptotics import (ClassificationError, FiniteMoment, LimitLaw, NormingError, RegVar,
                          RegVarWalk, convergence_diagnostic, corollary_regime, limit_cdf,
                          limit_pdf, norming_sequence, tail_expansion)
from .distributions import (Dirac1, DistributionError, GammaStep, GenericCdf, LackOfMemory,
                            ParetoMix, StableLimit, StepDistribution, Uniform01, make_family)
from .fdd import (FddQuery, ScaledFddQuery, fdd_cdf_dp, fdd_cdf_enum, fdd_cdf_stieltjes,
                  fdd_limit_finite_moment,
                  fdd_limit_regvar, fdd_zn, weighted_chain)
from .kernel import KernelQuery, kernel_cdf, kernel_trunc_moment, point_mass_convolution
from .simulator import SimConfig, WalkEnsemble, sample_ensemble, sample_path
from .williamson import cdf_n, invert_to_cdf, psi, tail_n, williamson_G

__version__ = "0.1.0"
