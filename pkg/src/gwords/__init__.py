"""Spectral positivity of generalized words in positive definite matrices."""

__version__ = "0.1.0"

from .certify import Certificate, check_certificate, sturm_decide
from .constructions import epsilon_family, hijo_example, projection_limit, thfour_limit, thfour_word
from .linalg_core import PDMatrix, RationalMatrix, Spectrum, pd_power, spectral_factor
from .projections import blockwise_evaluate, halmos_form, two_eigenvalue_split
from .reduction import Status, classify, reduced_class
from .search import SearchConfig, epsilon_sweep, random_search
from .words import ExponentSequence, Verdict, canonicalize, evaluate, parse_word, sequence

__all__ = [
    "Certificate", "check_certificate", "sturm_decide",
    "epsilon_family", "hijo_example", "projection_limit", "thfour_limit", "thfour_word",
    "PDMatrix", "RationalMatrix", "Spectrum", "pd_power", "spectral_factor",
    "blockwise_evaluate", "halmos_form", "two_eigenvalue_split",
    "Status", "classify", "reduced_class",
    "SearchConfig", "epsilon_sweep", "random_search",
    "ExponentSequence", "Verdict", "canonicalize", "evaluate", "parse_word", "sequence",
]
