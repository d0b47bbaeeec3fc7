"""Bayesian-bootstrap estimation of three-class ROC surfaces and their VUS."""

__version__ = "0.1.0"

from .bootstrap import BbConfig, bb_cdf_band, bb_estimate
from .classical import (
    bandwidth_nrd0,
    bandwidth_ucv,
    bootstrap_vus_ci,
    empirical_cdf,
    empirical_vus,
    kernel_cdf,
    kernel_vus,
    normal_vus,
    plug_in_surface,
    vus_estimate,
)
from .core import (
    DegenerateInputError,
    InvalidArgumentError,
    ProbabilityGrid,
    RocSurfaceEstimate,
    ThreeGroupSample,
    VusPosterior,
    default_grid,
    emse,
    vus_from_surface,
)
from .estimators import (
    BayesianBootstrapROCSurface,
    EmpiricalROCSurface,
    KernelROCSurface,
    NormalROCSurface,
)
from .io import DataParseError, load_csv, load_tmt

__all__ = [
    "BayesianBootstrapROCSurface",
    "BbConfig",
    "DataParseError",
    "DegenerateInputError",
    "EmpiricalROCSurface",
    "InvalidArgumentError",
    "KernelROCSurface",
    "NormalROCSurface",
    "ProbabilityGrid",
    "RocSurfaceEstimate",
    "ThreeGroupSample",
    "VusPosterior",
    "bandwidth_nrd0",
    "bandwidth_ucv",
    "bb_cdf_band",
    "bb_estimate",
    "bootstrap_vus_ci",
    "default_grid",
    "empirical_cdf",
    "empirical_vus",
    "emse",
    "kernel_cdf",
    "kernel_vus",
    "load_csv",
    "load_tmt",
    "normal_vus",
    "plug_in_surface",
    "vus_estimate",
    "vus_from_surface",
]
