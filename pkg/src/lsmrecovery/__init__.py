"""Exact recovery of two balanced communities in the symmetric latent space model."""

from .certificate import CertificateReport, certify, expected_matrix_lambda2, lemma5_margins
from .errors import (IngestionError, InvalidInputError, InvalidParameterError,
                     KernelRangeError, LsmError, NumericalError, ResourceLimitError)
from .mle import MleResult, brute_force_mle, mle_objective, y_distance
from .model import LsmInstance, ModelParams, generate
from .moments import GaussianMoments, closed_form, monte_carlo
from .regimes import RegimeConstants, RegimeReport, classify
from .sdp import SdpSolution, SolverConfig, objective_matrix, round_labels, solve, success_test

__version__ = "0.1.0"
