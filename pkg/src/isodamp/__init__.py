"""Fractional-order phase shaper design toolkit.

Realizes fractional differ-integrators as low-order rational stages,
selects the stage order by maximizing the Routh marginal loop gain, and
verifies the resulting flat-phase / iso-damped closed-loop behaviour by
frequency response and time-domain simulation.
"""

from .carlson import FoStage, alpha_from_order, carlson_iterate, order_from_alpha, realize_first_order
from .lti import MarginReport, RationalTF, char_poly, freq_response, margins, pade, pid_tf, series, tf
from .poly import Polynomial, poly_add, poly_eval, poly_mul
from .routh import MarginalGainResult, RouthTable, estimate_gain_crossover, is_hurwitz, marginal_gain, routh_table, stability_ratio
from .shaper import DesignReport, DesignSpec, design_alpha, fit_flat_stage, flatten_cascade, phase_flatness
from .sim import OvershootReport, StepSeries, iso_damping_report, overshoot, step_response, tf_to_statespace

__version__ = "0.1.0"

__all__ = [
    "FoStage", "alpha_from_order", "carlson_iterate", "order_from_alpha",
    "realize_first_order", "MarginReport", "RationalTF", "char_poly",
    "freq_response", "margins", "pade", "pid_tf", "series", "tf",
    "Polynomial", "poly_add", "poly_eval", "poly_mul", "MarginalGainResult",
    "RouthTable", "estimate_gain_crossover", "is_hurwitz", "marginal_gain",
    "routh_table", "stability_ratio", "DesignReport", "DesignSpec",
    "design_alpha", "fit_flat_stage", "flatten_cascade", "phase_flatness",
    "OvershootReport", "StepSeries", "iso_damping_report", "overshoot",
    "step_response", "tf_to_statespace", "__version__",
]
