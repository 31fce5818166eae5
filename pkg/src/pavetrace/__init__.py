"""Smartphone-based pavement roughness toolkit.

Accelerometer/GPS traces go in; section RMS, estimated IRI, distress index,
panel-rating QA, and RMS-vs-index regressions come out.
"""

from .config import Config, load_config
from .correlation import correlate_indices, fit_iri_model, ols_fit
from .distress import WeightTable, compute_pdi
from .model import (
    GRAVITY_MPS2,
    AccelSample,
    DistressRecord,
    GpsSample,
    RatingRecord,
    RegressionFit,
    SectionDefinition,
    SectionRun,
    Trace,
)
from .panel_qa import (
    anova_one_way,
    anova_two_way_no_replication,
    boxplot_outliers,
    delta_r_table,
    rating_ranges,
    repeatability,
)
from .roughness import IriModel, compute_rms, estimate_iri, section_rms_table
from .segmentation import assign_sections, chainage_of, haversine_m

__version__ = "0.1.0"

__all__ = [
    "AccelSample",
    "Config",
    "DistressRecord",
    "GRAVITY_MPS2",
    "GpsSample",
    "IriModel",
    "RatingRecord",
    "RegressionFit",
    "SectionDefinition",
    "SectionRun",
    "Trace",
    "WeightTable",
    "anova_one_way",
    "anova_two_way_no_replication",
    "assign_sections",
    "boxplot_outliers",
    "chainage_of",
    "compute_pdi",
    "compute_rms",
    "correlate_indices",
    "delta_r_table",
    "estimate_iri",
    "fit_iri_model",
    "haversine_m",
    "load_config",
    "ols_fit",
    "rating_ranges",
    "repeatability",
    "section_rms_table",
]
