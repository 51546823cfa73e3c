"""Measurement incompatibility in polyhedral general probabilistic theories."""
from .compat import gamma_model, gamma_of_family, is_compatible, region_membership
from .gpt import (Measurement, MeasurementFamily, dichotomic_family, make_ball, make_classical,
                  make_crosspolytope, make_custom, make_hypercube)
from .lp import LpProblem, solve
from .tensor_norms import rho_norm
from .witness import extract_witness, is_witness

__version__ = "0.1.0"
