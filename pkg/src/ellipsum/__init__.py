"""Numerical verification of elliptic hypergeometric identities."""
from .errors import *  # noqa: F401,F403
from .residual import Residual, csum, worst
from .theta import Nome, TruncationPolicy, theta_multi
from .pochhammer import RefinedBase, poch
from .inversion import SequencePair, f_entry, g_entry, f_window, g_window
from .km import KmInstance, TwoTermInstance, WbbInstance, solve_balance
from .sampling import SamplerConfig, ShapeBounds, sample_instance
from .harness import TrialReport, emit_report, run_suite

__version__ = "0.1.0"
