"""Schatten-class multilinear Fourier and Schur multipliers, and transference between them."""
from .groups import FiniteGroup, LatticeFunction, make_cyclic, make_dihedral, parse_group
from .linalg import Exponent, dual_align, jacobi_svd, schatten_norm, svd
from .multipliers import FourierMap, SchurMap, fourier_apply, schur_apply, tilde_lift
from .normest import EstimatorConfig, NormEstimate, brute_force_norm, estimate_multilinear_norm, estimate_s1_schur_norm
from .symbols import SymbolFunction, SymbolTensor
from .transference import check_intertwining, folner_scan, intertwiner_pi, transfer_inequality_check

__version__ = "0.1.0"

__all__ = [
    "FiniteGroup", "LatticeFunction", "make_cyclic", "make_dihedral", "parse_group",
    "Exponent", "dual_align", "jacobi_svd", "schatten_norm", "svd",
    "FourierMap", "SchurMap", "fourier_apply", "schur_apply", "tilde_lift",
    "EstimatorConfig", "NormEstimate", "brute_force_norm", "estimate_multilinear_norm", "estimate_s1_schur_norm",
    "SymbolFunction", "SymbolTensor",
    "check_intertwining", "folner_scan", "intertwiner_pi", "transfer_inequality_check",
]
