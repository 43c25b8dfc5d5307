"""Lower-bound estimation of multilinear norms between Schatten classes.

The main routine alternates Hoelder-dual alignments: with the inputs fixed,
the output is paired with its norming functional ``Y``; with ``Y`` fixed,
each input slot is replaced by the unit matrix that norms the partial
functional ``X -> Tr(Y* T(..., X, ...))``. Every step can only increase the
objective, so each restart converges to a local maximum. Results are
certified lower bounds only: the reported value is always re-evaluated on
the reported witnesses.

A map is any object with ``arity``, ``input_shapes``, ``output_shape`` and
``__call__``. Optional hooks:

* ``partial(i, Y, xs)``: closed-form partial functional (else basis enumeration),
* ``project(i, X)``: projection onto the slot's domain (for subalgebras),
* ``random_input(i, rng)``: random start in the slot's domain,
* ``norm(X, p)``: the norm to use (default: Schatten norm).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .io import write_matrix
from .linalg import Exponent, as_matrix, complex_gaussian, dual_align, schatten_norm
from .symbols import SymbolTensor

BASIS_LIMIT = 16
BRUTE_FORCE_LIMIT = 64
USER_STREAM = 2**32


@dataclass(frozen=True)
class EstimatorConfig:
    restarts: int = 32
    max_iters: int = 200
    rel_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def rng(self, k: int) -> np.random.Generator:
        """Generator for restart ``k``; independent of how many restarts run."""
        return np.random.default_rng([int(self.seed), int(k)])

    def to_dict(self) -> dict:
        return {"restarts": self.restarts, "max_iters": self.max_iters,
                "rel_tol": self.rel_tol, "seed": int(self.seed)}


@dataclass
class NormEstimate:
    value: float
    witnesses: list
    dual_witness: np.ndarray | None
    objective_check: float
    restarts_used: int
    iterations: int
    seed: int
    converged: bool
    metadata: dict = field(default_factory=dict)
    factors: tuple | None = None

    def summary(self) -> dict:
        return {
            "value": self.value,
            "objective_check": self.objective_check,
            "restarts": self.restarts_used,
            "iterations": self.iterations,
            "seed": int(self.seed),
            "converged": self.converged,
            "metadata": self.metadata,
        }

    def save(self, directory, stem: str = "estimate") -> Path:
        """Write ``<stem>.json`` plus one matrix file per witness, referenced by name."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        refs = []
        for k, W in enumerate(self.witnesses):
            name = f"{stem}_witness{k}.json"
            write_matrix(directory / name, W)
            refs.append(name)
        obj = self.summary()
        obj["witnesses"] = refs
        if self.dual_witness is not None:
            name = f"{stem}_dual.json"
            write_matrix(directory / name, self.dual_witness)
            obj["dual_witness"] = name
        path = directory / f"{stem}.json"
        path.write_text(json.dumps(obj, indent=2, default=float))
        return path


class CallableMap:
    """Wrap a plain function of n matrices as an estimator map."""

    def __init__(self, fn, input_shapes, output_shape):
        self.fn = fn
        self.input_shapes = [tuple(s) for s in input_shapes]
        self.output_shape = tuple(output_shape)
        self.arity = len(self.input_shapes)

    def __call__(self, *xs):
        return as_matrix(self.fn(*xs), "map output")


def map_norm(T, X, p) -> float:
    fn = getattr(T, "norm", None)
    return fn(X, p) if fn is not None else schatten_norm(X, p)


def objective(T, xs, input_exponents, output_exponent) -> float:
    """||T(x)|| / prod ||x_i||, with zero inputs giving 0."""
    den = 1.0
    for x, p in zip(xs, input_exponents):
        den *= map_norm(T, x, p)
    if den == 0:
        return 0.0
    return map_norm(T, T(*xs), output_exponent) / den


def basis_partial(T, i: int, Y, xs) -> np.ndarray:
    """Partial functional by evaluating T on every matrix unit of slot i."""
    r, c = T.input_shapes[i]
    if r > BASIS_LIMIT or c > BASIS_LIMIT:
        raise ValueError(f"basis enumeration capped at {BASIS_LIMIT}x{BASIS_LIMIT}")
    Yc = np.conj(np.asarray(Y))
    Phi = np.empty((r, c), dtype=np.complex128)
    args = list(xs)
    for a in range(r):
        for b in range(c):
            E = np.zeros((r, c), dtype=np.complex128)
            E[a, b] = 1.0
            args[i] = E
            Phi[a, b] = np.conj(np.sum(Yc * T(*args)))
    return Phi


def _partial(T, i, Y, xs):
    fn = getattr(T, "partial", None)
    return fn(i, Y, xs) if fn is not None else basis_partial(T, i, Y, xs)


def _project(T, i, X):
    fn = getattr(T, "project", None)
    return fn(i, X) if fn is not None else X


def _random_start(T, rng):
    xs = []
    for i, shape in enumerate(T.input_shapes):
        fn = getattr(T, "random_input", None)
        xs.append(fn(i, rng) if fn is not None else complex_gaussian(shape, rng))
    return xs


def _normalise(T, xs, exps):
    out = []
    for x, p in zip(xs, exps):
        nrm = map_norm(T, x, p)
        out.append(x / nrm if nrm > 0 else x)
    return out


def _check_dims(T, xs):
    if len(xs) != T.arity:
        raise ValueError(f"map takes {T.arity} inputs, start has {len(xs)}")
    for k, (x, shape) in enumerate(zip(xs, T.input_shapes)):
        if np.shape(x) != tuple(shape):
            raise ValueError(f"start slot {k} has shape {np.shape(x)}, expected {tuple(shape)}")


def _ascend(T, xs, in_exps, out_exp, cfg):
    """One restart of alternating dual ascent; returns (value, xs, Y, iters, converged)."""
    dual_out = out_exp.dual()
    xs = _normalise(T, [_project(T, i, np.asarray(x, dtype=np.complex128)) for i, x in enumerate(xs)], in_exps)
    val = objective(T, xs, in_exps, out_exp)
    Y = None
    for it in range(1, cfg.max_iters + 1):
        Z = T(*xs)
        al = dual_align(Z, dual_out)
        if al.degenerate:
            return val, xs, None, it, True
        Y = _project_output(T, al.matrix)
        for i, p in enumerate(in_exps):
            step = dual_align(_partial(T, i, Y, xs), p)
            if step.degenerate:
                continue
            cand = list(xs)
            cand[i] = _normalise(T, [_project(T, i, step.matrix)], [p])[0]
            xs = cand
        new = objective(T, xs, in_exps, out_exp)
        if new <= val * (1.0 + cfg.rel_tol):
            return new, xs, Y, it, True
        val = new
    return val, xs, Y, cfg.max_iters, False


def _project_output(T, Y):
    fn = getattr(T, "project_output", None)
    return fn(Y) if fn is not None else Y


def _polish(T, xs, in_exps, out_exp, rng, steps, step0=0.3):
    """Greedy random-direction search on the product of unit spheres."""
    best = objective(T, xs, in_exps, out_exp)
    step = step0
    for _ in range(steps):
        i = int(rng.integers(T.arity))
        direction = complex_gaussian(T.input_shapes[i], rng)
        direction /= np.linalg.norm(direction)
        cand = list(xs)
        scale = max(np.linalg.norm(xs[i]), 1e-300)
        cand[i] = _project(T, i, xs[i] + step * scale * direction)
        cand = _normalise(T, cand, in_exps)
        val = objective(T, cand, in_exps, out_exp)
        if val > best:
            best, xs = val, cand
            step = min(step * 1.5, 1.0)
        else:
            step *= 0.97
            if step < 1e-7:
                break
    return best, xs


def _finish(T, best_xs, best_Y, in_exps, out_exp, **kw) -> NormEstimate:
    check = objective(T, best_xs, in_exps, out_exp)
    return NormEstimate(value=check, witnesses=best_xs, dual_witness=best_Y,
                        objective_check=check, **kw)


def _zero_estimate(T, cfg, in_exps, out_exp, restarts):
    xs = []
    for shape in T.input_shapes:
        E = np.zeros(shape, dtype=np.complex128)
        E[0, 0] = 1.0
        xs.append(E)
    return _finish(T, xs, None, in_exps, out_exp, restarts_used=restarts, iterations=0,
                   seed=cfg.seed, converged=True, metadata={"zero_map": True})


def estimate_multilinear_norm(T, input_exponents, output_exponent,
                              config: EstimatorConfig | None = None,
                              starts=None) -> NormEstimate:
    """Best lower bound for sup ||T(x_1, ..., x_n)||_p over unit inputs.

    ``starts`` is an optional list of input tuples tried before the random
    restarts; the result is never below their objectives.
    """
    cfg = config or EstimatorConfig()
    in_exps = [Exponent.coerce(p) for p in input_exponents]
    out_exp = Exponent.coerce(output_exponent)
    if len(in_exps) != T.arity:
        raise ValueError(f"map takes {T.arity} inputs, got {len(in_exps)} exponents")
    if any(not p.is_dualizable for p in in_exps):
        raise ValueError("input exponents must be >= 1")
    starts = [list(s) for s in (starts or [])]
    for s in starts:
        _check_dims(T, s)
    heuristic = not out_exp.is_dualizable

    # user starts draw from streams disjoint from the restart streams
    candidates = [(s, cfg.rng(USER_STREAM + j)) for j, s in enumerate(starts)]
    candidates += [(None, cfg.rng(k)) for k in range(cfg.restarts)]
    best_val, best_xs, best_Y = -1.0, None, None
    total_iters, all_converged = 0, True
    for xs, rng in candidates:
        if xs is None:
            xs = _random_start(T, rng)
        if heuristic:
            xs = _normalise(T, [_project(T, i, np.asarray(x, dtype=np.complex128)) for i, x in enumerate(xs)], in_exps)
            val, xs = _polish(T, xs, in_exps, out_exp, rng, steps=cfg.max_iters * 10)
            Y, iters, conv = None, cfg.max_iters * 10, True
        else:
            val, xs, Y, iters, conv = _ascend(T, xs, in_exps, out_exp, cfg)
        total_iters += iters
        all_converged &= conv
        if val > best_val:
            best_val, best_xs, best_Y = val, xs, Y
    if best_val <= 0:
        return _zero_estimate(T, cfg, in_exps, out_exp, len(candidates))
    meta = {"path": "random-search" if heuristic else "dual-ascent",
            "input_exponents": [str(p) for p in in_exps], "output_exponent": str(out_exp)}
    if heuristic:
        meta["note"] = "heuristic, no ascent guarantee"
    return _finish(T, best_xs, best_Y, in_exps, out_exp, restarts_used=len(candidates),
                   iterations=total_iters, seed=cfg.seed, converged=all_converged, metadata=meta)


def _top_pair(K):
    U, s, Vh = np.linalg.svd(K)
    return np.conj(U[:, 0]), Vh[0], s[0]


def estimate_s1_schur_norm(psi: SymbolTensor, config: EstimatorConfig | None = None,
                           starts=None) -> NormEstimate:
    """Lower bound for ||M_psi : S_1 -> S_1|| over rank-one inputs b c*.

    Rank-one matrices are the extreme points of the S_1 unit ball, so the
    supremum is attained on them. Each restart alternates
    ``Y <- polar(psi o b c*)`` with ``(b, c) <- top singular pair of conj(Y) o psi``,
    which never decreases ``||psi o b c*||_1``. ``starts`` holds (b, c) pairs.
    The estimate carries ``factors = (b, c)`` and the witness ``b c*``.
    """
    cfg = config or EstimatorConfig()
    if psi.arity != 2:
        raise ValueError(f"estimate_s1_schur_norm needs a linear symbol, got arity {psi.arity}")
    P = psi.values
    d = psi.axis_size

    def value(b, c):
        return schatten_norm(P * np.outer(b, np.conj(c)), 1)

    inits = []
    for b, c in starts or []:
        b = np.asarray(b, dtype=np.complex128).ravel()
        c = np.asarray(c, dtype=np.complex128).ravel()
        if b.size != d or c.size != d:
            raise ValueError("start vectors must match the symbol axis")
        inits.append((b, c))
    for k in range(cfg.restarts):
        rng = cfg.rng(k)
        inits.append((complex_gaussian(d, rng), complex_gaussian(d, rng)))

    best = (-1.0, None, None, None)
    total, all_conv = 0, True
    for b, c in inits:
        b, c = b / np.linalg.norm(b), c / np.linalg.norm(c)
        val, Y, conv = value(b, c), None, False
        for it in range(1, cfg.max_iters + 1):
            al = dual_align(P * np.outer(b, np.conj(c)), math.inf)
            if al.degenerate:
                conv = True
                break
            Y = al.matrix
            nb, nc, _ = _top_pair(np.conj(Y) * P)
            new = value(nb, nc)
            if new > val:
                b, c = nb, nc
            if new <= val * (1.0 + cfg.rel_tol):
                val = max(val, new)
                conv = True
                break
            val = new
        total += it
        all_conv &= conv
        if val > best[0]:
            best = (val, b, c, Y)
    _, b, c, Y = best
    W = np.outer(b, np.conj(c))
    check = value(b, c)
    return NormEstimate(value=check, witnesses=[W], dual_witness=Y, objective_check=check,
                        restarts_used=len(inits), iterations=total, seed=cfg.seed,
                        converged=all_conv, metadata={"path": "s1-rank-one"}, factors=(b, c))


def brute_force_norm(T, input_exponents, output_exponent, samples: int = 4000,
                     polish_steps: int = 3000, seed: int = 0, polish_best: int = 12) -> NormEstimate:
    """Oracle lower bound by unit-sphere sampling plus greedy compass polishing.

    Uses no dual alignment, so it is independent of
    :func:`estimate_multilinear_norm`. When the output exponent is >= 1 the
    objective is convex in each input, so S_1 slots are searched over their
    extreme points ``u v*``. Refuses slots with more than 64 entries.
    """
    in_exps = [Exponent.coerce(p) for p in input_exponents]
    out_exp = Exponent.coerce(output_exponent)
    for shape in T.input_shapes:
        if shape[0] * shape[1] > BRUTE_FORCE_LIMIT:
            raise ValueError(f"brute force refuses a {shape[0]}x{shape[1]} slot "
                             f"(limit {BRUTE_FORCE_LIMIT} entries)")
    rank_one = [p.value == 1 and out_exp.is_dualizable for p in in_exps]
    rng = np.random.default_rng([int(seed), 0])
    pool = []
    for k in range(samples):
        params = []
        for shape, r1 in zip(T.input_shapes, rank_one):
            if r1:
                params.append([complex_gaussian(shape[0], rng), complex_gaussian(shape[1], rng)])
            else:
                params.append([complex_gaussian(shape, rng)])
        xs = _build(T, params, in_exps)
        pool.append((map_norm(T, T(*xs), out_exp), k, params))
    pool.sort(key=lambda t: (-t[0], t[1]))
    best_val, best_params = -1.0, None
    for val, _, params in pool[:polish_best]:
        val, params = _compass(T, params, in_exps, out_exp, polish_steps)
        if val > best_val:
            best_val, best_params = val, params
    xs = _build(T, best_params, in_exps)
    check = objective(T, xs, in_exps, out_exp)
    return NormEstimate(value=check, witnesses=xs, dual_witness=None, objective_check=check,
                        restarts_used=samples, iterations=polish_steps, seed=seed, converged=True,
                        metadata={"path": "brute-force", "rank_one_slots": rank_one})


def _slot_matrix(parts):
    return np.outer(parts[0], np.conj(parts[1])) if len(parts) == 2 else parts[0]


def _build(T, params, in_exps):
    return _normalise(T, [_slot_matrix(parts) for parts in params], in_exps)


def _compass(T, params, in_exps, out_exp, max_evals, step=0.25, min_step=1e-9):
    """Coordinate search over the real and imaginary parts of every parameter.

    Inputs stay normalised, so the objective is the output norm alone.
    """
    xs = _build(T, params, in_exps)
    best = map_norm(T, T(*xs), out_exp)
    coords = [(i, j, idx, u) for i, parts in enumerate(params) for j, arr in enumerate(parts)
              for idx in np.ndindex(arr.shape) for u in (1.0, 1j)]
    evals = 0
    while step > min_step and evals < max_evals:
        improved = False
        for i, j, idx, u in coords:
            for sign in (1.0, -1.0):
                parts = [a.copy() for a in params[i]]
                parts[j][idx] += sign * step * u * max(np.abs(parts[j]).max(), 1e-300)
                Xi = _slot_matrix(parts)
                nrm = map_norm(T, Xi, in_exps[i])
                if nrm == 0:
                    continue
                cand = list(xs)
                cand[i] = Xi / nrm
                val = map_norm(T, T(*cand), out_exp)
                evals += 1
                if val > best:
                    best, xs, improved = val, cand, True
                    params = list(params)
                    params[i] = parts
                    break
        if not improved:
            step *= 0.5
    return best, params
