"""Generalized primal-dual splitting with certified stepsizes, and decentralized EXTRA."""

from . import consensus, harness, linalg, operators, pdsolver, rng
from .pdsolver import PdParams, ProblemSpec, certify, pd_step, solve

__all__ = ["consensus", "harness", "linalg", "operators", "pdsolver", "rng",
           "PdParams", "ProblemSpec", "certify", "pd_step", "solve"]
__version__ = "0.1.0"
