"""Transference between Fourier multipliers on a finite group and Schur multipliers.

With ``U = sum_s p_s (x) lambda_s`` (block diagonal), the *-homomorphism
``pi(x) = U (x (x) 1) U*`` sends ``E_st`` to ``E_st (x) lambda_{st^-1}`` and
intertwines the amplified Fourier multiplier with the Schur multiplier of
the lifted symbol:

    T_phi^(d)(pi(x_1), ..., pi(x_n)) = pi(M_phi~(x_1, ..., x_n)).

Since ``pi`` is isometric from S_p to L_p(M_d (x) LG), every Schur witness
lifts to a Fourier-side configuration with the same objective.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .groups import (
    FiniteGroup, LatticeFunction, compression_singular_values, default_torus_points, lambda_element, torus_norm,
)
from .linalg import Exponent, as_matrix, vector_pnorm
from .multipliers import FourierMap, SchurMap, schur_apply, tilde_lift
from .normest import EstimatorConfig, estimate_multilinear_norm, objective
from .symbols import SymbolTensor

IDENTITY_TOL = 1e-10
LIFT_TOL = 1e-9
VIOLATION_TOL = 1e-6
CONTRACTION_TOL = 1e-9


class NumericalCheckError(Exception):
    """A computed quantity failed an identity or inequality it must satisfy."""


class ContractionError(NumericalCheckError):
    """A compression exceeded the torus norm."""


def intertwiner_unitary(G: FiniteGroup) -> np.ndarray:
    return scipy.linalg.block_diag(*[lambda_element(G, s) for s in range(G.order)]).astype(np.complex128)


def intertwiner_pi(G: FiniteGroup, x) -> np.ndarray:
    """pi(x) = U (x (x) 1) U*, a (d^2) x (d^2) block matrix."""
    d = G.order
    X = as_matrix(x, "x")
    if X.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} matrix, got {X.shape}")
    U = intertwiner_unitary(G)
    return U @ np.kron(X, np.eye(d)) @ U.conj().T


@dataclass(frozen=True)
class IntertwinerReport:
    group: str
    arity: int
    max_residual: float
    inputs_tested: int

    @property
    def identity_ok(self) -> bool:
        return self.max_residual < IDENTITY_TOL

    def to_dict(self) -> dict:
        return {"group": self.group, "arity": self.arity, "max_residual": self.max_residual,
                "inputs_tested": self.inputs_tested, "identity_ok": self.identity_ok}


def check_intertwining(G: FiniteGroup, phi: SymbolTensor, batches) -> IntertwinerReport:
    """Max entrywise residual of the intertwining identity over input tuples.

    ``batches`` is a list of n-tuples of d x d matrices.
    """
    n = phi.arity
    F = FourierMap(phi, G, G.order)
    lifted = tilde_lift(phi, G)
    worst, count = 0.0, 0
    for xs in batches:
        if len(xs) != n:
            raise ValueError(f"symbol of arity {n} needs {n} inputs per batch")
        lhs = F(*[intertwiner_pi(G, x) for x in xs])
        rhs = intertwiner_pi(G, schur_apply(lifted, *xs))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        count += 1
    return IntertwinerReport(G.name, n, worst, count)


@dataclass
class TransferReport:
    group: str
    arity: int
    input_exponents: list
    output_exponent: str
    est_M: float
    est_T: float
    lifted_objective: float
    lift_gap: float
    violation: bool
    seed: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def transfer_inequality_check(G: FiniteGroup, phi: SymbolTensor, input_exponents, output_exponent,
                              config: EstimatorConfig | None = None) -> TransferReport:
    """Estimate both sides and lift the best Schur witness through pi.

    ``est_T`` is seeded with the lifted witness, so it is never below the
    lifted objective; ``violation`` flags ``est_T + 1e-6 < est_M``.
    """
    cfg = config or EstimatorConfig()
    in_exps = [Exponent.coerce(p) for p in input_exponents]
    out_exp = Exponent.coerce(output_exponent)
    schur = SchurMap(tilde_lift(phi, G))
    est_m = estimate_multilinear_norm(schur, in_exps, out_exp, cfg)
    fourier = FourierMap(phi, G, G.order)
    lifted = [intertwiner_pi(G, w) for w in est_m.witnesses]
    lifted_obj = objective(fourier, lifted, in_exps, out_exp)
    est_t = estimate_multilinear_norm(fourier, in_exps, out_exp, cfg, starts=[lifted])
    return TransferReport(
        group=G.name, arity=phi.arity,
        input_exponents=[str(p) for p in in_exps], output_exponent=str(out_exp),
        est_M=est_m.value, est_T=est_t.value, lifted_objective=lifted_obj,
        lift_gap=abs(lifted_obj - est_m.value),
        violation=est_t.value + VIOLATION_TOL < est_m.value,
        seed=cfg.seed,
    )


@dataclass(frozen=True)
class ScanRow:
    M: int
    compression: float
    torus: float
    gap: float
    points: int


def folner_scan(f: LatticeFunction, p, M_list, strict: bool = True) -> list[ScanRow]:
    """Normalised compressions (2M+1)^(-1/p) ||P_M lambda(f) P_M||_p against the torus norm.

    Raises :class:`ContractionError` when ``strict`` and a compression
    exceeds the torus norm by more than 1e-9.
    """
    p = Exponent.coerce(p)
    if not p.is_dualizable:
        raise ValueError("folner_scan needs p >= 1")
    points = default_torus_points(f)
    torus = torus_norm(f, p, points)
    rows = []
    for M in M_list:
        M = int(M)
        sv = compression_singular_values(f, M)
        comp = vector_pnorm(sv, p) * (2 * M + 1) ** (-p.reciprocal)
        if strict and comp > torus + CONTRACTION_TOL:
            raise ContractionError(f"M={M}: compression {comp!r} exceeds torus norm {torus!r}")
        rows.append(ScanRow(M, comp, torus, torus - comp, points))
    return rows


def gap_eventually_decreasing(rows, threshold: float = 0.1) -> bool:
    """Gaps are nonincreasing from the first row whose gap is below ``threshold * torus``."""
    start = next((k for k, r in enumerate(rows) if r.gap < threshold * r.torus), None)
    if start is None:
        return False
    tail = [r.gap for r in rows[start:]]
    return all(b <= a + CONTRACTION_TOL for a, b in zip(tail, tail[1:]))
