"""Multi-fidelity surrogate fusion: LHS designs, kriging, EHK, pipeline."""

from .datasets import Dataset, load_dataset, save_dataset
from .ehk import EHKModel, ehk_predict, fit_ehk, refit_ehk_gls
from .emulators import generate_campaign, generate_dataset, truth_coefficients, truth_on
from .kriging import FitError, FusionConfig, KrigingModel, fit_kriging
from .pipeline import (
    FusionReport,
    assemble_database,
    default_increment_tables,
    fuse_aerodb,
    single_source_database,
)
from .sampling import lhs_sample

__all__ = [
    "Dataset",
    "EHKModel",
    "FitError",
    "FusionConfig",
    "FusionReport",
    "KrigingModel",
    "assemble_database",
    "default_increment_tables",
    "ehk_predict",
    "fit_ehk",
    "fit_kriging",
    "fuse_aerodb",
    "generate_campaign",
    "generate_dataset",
    "lhs_sample",
    "load_dataset",
    "refit_ehk_gls",
    "save_dataset",
    "single_source_database",
    "truth_coefficients",
    "truth_on",
]
