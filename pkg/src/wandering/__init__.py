"""Wandering subspaces of row isometries, their multi-Toeplitz kernels and transfer functions."""

__version__ = "0.1.0"

from .characteristic import (RowContraction, characteristic_series, nagy_foias_dilation,
                             rotation_system)
from .errors import *  # noqa: F403
from .fockspace import (Embedding, GradedSpace, RowIsometryTrunc, check_row_isometry,
                        dilation_row_isometry, is_wandering)
from .kernel import (ToeplitzKernel, analyticity_battery, kernel_entry, toeplitz_matrix,
                     verify_toeplitz_structure)
from .lifting import LiftingSplit, extract_gamma, lifting_eval, lifting_system, verify_restrictions
from .markov import Interaction, markov_row_isometry, markov_system, prop_wandering_check
from .report import CheckResult
from .transfer import (FormalSeries, SystemMatrix, eval_theta, formal_series, series_coefficient,
                       system_matrix, verify_realization)
from .words import Word, prefix_relation, words_up_to
