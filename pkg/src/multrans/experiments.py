"""Experiment drivers behind the command line.

Each function returns plain data (dicts and row lists) so the CLI only
handles argument resolution and file output.
"""
from __future__ import annotations

import math

import numpy as np

from .groups import LatticeFunction, parse_group
from .linalg import Exponent, complex_gaussian, schatten_norm
from .multipliers import SchurMap, rank_one_lift, slice_middle
from .normest import EstimatorConfig, estimate_s1_schur_norm, objective
from .symbols import (
    SymbolTensor, anti_triangular, cz_linear_symbol, davies_sequence,
    lifted_cz_slice, mollified_H,
)
from .transference import NumericalCheckError, folner_scan, gap_eventually_decreasing, transfer_inequality_check

CHAIN_TOL = 1e-9


def log_fit(xs, ys):
    """Least-squares fit y = a + b ln x; returns (a, b, max |residual|)."""
    lx = np.log(np.asarray(xs, dtype=float))
    y = np.asarray(ys, dtype=float)
    b, a = np.polyfit(lx, y, 1)
    return float(a), float(b), float(np.max(np.abs(y - (a + b * lx))))


def strictly_increasing(values) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# triangular truncation


def truncation_ratio(N: int) -> float:
    """||H_0 o J_N||_1 / ||J_N||_1 for the N x N all-ones J_N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return schatten_norm(anti_triangular(N), 1) / N


def trunc_growth(sizes) -> dict:
    sizes = [int(N) for N in sizes]
    if any(N < 2 for N in sizes):
        raise ValueError("sizes must be >= 2")
    rows = [{"N": N, "ratio": truncation_ratio(N), "lnN": math.log(N)} for N in sizes]
    out = {"rows": rows}
    if len(rows) >= 2:
        a, b, res = log_fit(sizes, [r["ratio"] for r in rows])
        out["fit"] = {"a": a, "b": b, "max_residual": res}
        out["increasing"] = strictly_increasing([r["ratio"] for r in rows])
    return out


# ---------------------------------------------------------------------------
# bilinear Hilbert transform chain


def lifted_bht_symbol(N: int, bump=None) -> SymbolTensor:
    """H~(x0, x1, x2) = H(x0 - x1, x1 - x2) on the window [-N, N]^3.

    H(s1, s2) depends only on s2 - s1, so H is evaluated once per difference.
    """
    H = mollified_H(bump)
    ks = np.arange(-4 * N, 4 * N + 1)
    table = np.array([H(0, int(k)) for k in ks])
    x = np.arange(-N, N + 1)
    x0, x1, x2 = np.meshgrid(x, x, x, indexing="ij")
    diff = (x1 - x2) - (x0 - x1)
    return SymbolTensor(table[diff + 4 * N].astype(np.complex128), x)


def _embed_centered(v, size):
    out = np.zeros(size, dtype=np.complex128)
    off = (size - v.size) // 2
    out[off:off + v.size] = v
    return out


def _embed_leading(v, size):
    out = np.zeros(size, dtype=np.complex128)
    out[:v.size] = v
    return out


def _chain_starts(prev, size, embed):
    """Uniform start plus the previous size's witness, embedded."""
    starts = [(np.ones(size), np.ones(size))]
    if prev is not None:
        starts.append((embed(prev[0], size), embed(prev[1], size)))
    return starts


def bht_lower(sizes, p1, p2, config: EstimatorConfig | None = None, bump=None) -> dict:
    """Certified lower bounds for the lifted bilinear Hilbert symbol on windows [-N, N].

    The slice at j = 0 gives a linear S_1 -> S_1 Schur multiplier; its best
    rank-one witness b c* lifts to rank-one (B, C) whose bilinear
    (S_p1, S_p2) -> S_1 objective equals the linear one.
    """
    cfg = config or EstimatorConfig()
    p1, p2 = Exponent.coerce(p1), Exponent.coerce(p2)
    if p1.is_infinite or p2.is_infinite or p1.value <= 1 or p2.value <= 1:
        raise ValueError("p1, p2 must lie in (1, inf)")
    if not math.isclose(p1.reciprocal + p2.reciprocal, 1.0, rel_tol=0, abs_tol=1e-12):
        raise ValueError("1/p1 + 1/p2 must equal 1")
    rows, prev = [], None
    for N in sorted(int(n) for n in sizes):
        if N < 1:
            raise ValueError("N must be >= 1")
        lifted = lifted_bht_symbol(N, bump)
        psi = slice_middle(lifted, 0)
        size = 2 * N + 1
        est = estimate_s1_schur_norm(psi, cfg, starts=_chain_starts(prev, size, _embed_centered))
        b, c = est.factors
        B, C = rank_one_lift(b, c, psi.index_of(0))
        bil = objective(SchurMap(lifted), [B, C], [p1, p2], 1)
        gap = abs(bil - est.value)
        if gap > CHAIN_TOL * max(1.0, est.value):
            raise NumericalCheckError(f"N={N}: lifted objective {bil} differs from slice {est.value}")
        rows.append({"N": N, "linear_estimate": est.value, "bilinear_objective": bil,
                     "chain_gap": gap, "ln_2N_plus_1": math.log(2 * N + 1),
                     "ratio_to_log": est.value / math.log(2 * N + 1)})
        prev = (b, c)
    return _growth_summary(rows, "bilinear_objective", [r["N"] for r in rows])


def _growth_summary(rows, key, ns) -> dict:
    out = {"rows": rows}
    vals = [r[key] for r in rows]
    out["increasing"] = strictly_increasing(vals)
    if len(rows) >= 2:
        a, b, res = log_fit(ns, vals)
        out["fit"] = {"a": a, "b": b, "max_residual": res}
    return out


# ---------------------------------------------------------------------------
# Calderon-Zygmund chain


def cz_symbol(N: int, rule: str = "2^i") -> tuple[np.ndarray, float]:
    """(1 + phi)/2 on lambda_0..lambda_N, and its max deviation from m(l_i, -l_j).

    The two agree off the origin; at (0, 0) m takes its regulated value.
    """
    lam = davies_sequence(N, rule)
    sym = cz_linear_symbol(lam)
    slice_vals = lifted_cz_slice(lam)
    dev = np.abs(sym - slice_vals)
    dev[0, 0] = 0.0
    return sym, float(dev.max())


def cz_lower(sizes, rule: str = "2^i", config: EstimatorConfig | None = None) -> dict:
    cfg = config or EstimatorConfig()
    rows, prev = [], None
    for N in sorted(int(n) for n in sizes):
        sym, dev = cz_symbol(N, rule)
        psi = SymbolTensor(sym.astype(np.complex128))
        est = estimate_s1_schur_norm(psi, cfg, starts=_chain_starts(prev, N + 1, _embed_leading))
        rows.append({"N": N, "estimate": est.value, "lnN": math.log(N) if N > 0 else 0.0,
                     "slice_identity_deviation": dev})
        prev = est.factors
    return _growth_summary(rows, "estimate", [max(r["N"], 1) for r in rows])


# ---------------------------------------------------------------------------
# Szego / Folner


def szego(f: LatticeFunction, p_list, M_list) -> dict:
    rows, decreasing = [], {}
    for p in p_list:
        p = Exponent.coerce(p)
        scan = folner_scan(f, p, M_list)
        decreasing[str(p)] = gap_eventually_decreasing(scan) if len(scan) > 1 else True
        for r in scan:
            rel = r.gap / r.torus if r.torus > 0 else 0.0
            rows.append({"p": str(p), "M": r.M, "compression": r.compression,
                         "torus": r.torus, "gap": r.gap, "relative_gap": rel,
                         "grid_points": r.points})
    return {"rows": rows, "gap_eventually_decreasing": decreasing}


# ---------------------------------------------------------------------------
# transference


def resolve_transfer_symbol(source: str, G, n: int, rng: np.random.Generator) -> SymbolTensor:
    """``random``, ``ones``, or comma-separated values for n = 1."""
    d = G.order
    if source == "random":
        return SymbolTensor(complex_gaussian((d,) * n, rng))
    if source == "ones":
        return SymbolTensor.constant(1.0, n, d)
    vals = [complex(v.strip().replace("i", "j")) for v in source.split(",")]
    if n != 1 or len(vals) != d:
        raise ValueError(f"explicit symbol values need n = 1 and {d} entries")
    return SymbolTensor(np.array(vals))


def transfer_check(group: str, n: int, source: str, input_exponents, output_exponent,
                   config: EstimatorConfig | None = None, batch: int = 1) -> dict:
    cfg = config or EstimatorConfig()
    G = parse_group(group)
    if n < 1 or len(input_exponents) != n:
        raise ValueError(f"need {n} input exponents")
    reports = []
    for k in range(batch):
        rng = np.random.default_rng([int(cfg.seed), 2**33 + k])
        phi = resolve_transfer_symbol(source, G, n, rng)
        rep = transfer_inequality_check(G, phi, input_exponents, output_exponent, cfg)
        reports.append(rep.to_dict())
    return {
        "reports": reports,
        "max_lift_gap": max(r["lift_gap"] for r in reports),
        "violations": sum(bool(r["violation"]) for r in reports),
    }
