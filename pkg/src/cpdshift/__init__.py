"""Conditionally positive definite sequences and the weighted shifts they define."""

from .backext import (extend_sequence_1, extend_shift_1, extend_shift_n,
                      infinite_step_check, sigma_trace)
from .errors import (CpdError, DomainError, InvalidMeasureError, NotCPDError,
                     PositivityError, WindowError)
from .fixtures import reproduce_example
from .measures import DiscreteMeasure, moment, q_integral
from .polys import forward_diff, q_eval
from .positivity import b_frak_oracle, classify
from .sequences import (CpdSequence, RepresentingTriplet, WeightSequence,
                        is_cpd_window, is_pd_window, is_stieltjes_window,
                        shifted_triplet, synthesize, weights_from_gamma)
from .shift_analysis import (berger_from_triplet, compactness_diagnostics,
                             diagonal_triplet, flatness_analyze,
                             subnormality_check)

__version__ = "0.1.0"
