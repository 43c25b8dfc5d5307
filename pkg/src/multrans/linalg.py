"""Dense complex linear algebra for Schatten classes.

Matrices are plain ``numpy`` complex128 arrays; :func:`as_matrix` is the
single validation gate. Singular values come from LAPACK by default, with a
one-sided (Hestenes) Jacobi routine available for high relative accuracy
of small singular values and as an independent cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

TINY = 1e-300


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """Return ``A`` as a 2-D complex128 array, rejecting empty or non-finite input."""
    M = np.asarray(A)
    if M.ndim == 1:
        raise ValueError(f"{name} must be 2-D, got shape {M.shape}")
    if M.ndim != 2 or M.size == 0:
        raise ValueError(f"{name} must be a nonempty 2-D array, got shape {M.shape}")
    M = M.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


@dataclass(frozen=True)
class Exponent:
    """A Schatten exponent p in (0, inf]."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v <= 0:
            raise ValueError(f"Schatten exponent must lie in (0, inf], got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def coerce(cls, p) -> "Exponent":
        if isinstance(p, Exponent):
            return p
        if isinstance(p, str):
            return cls(parse_exponent(p))
        return cls(p)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @property
    def is_dualizable(self) -> bool:
        return self.value >= 1

    @property
    def reciprocal(self) -> float:
        return 0.0 if self.is_infinite else 1.0 / self.value

    def dual(self) -> "Exponent":
        if not self.is_dualizable:
            raise ValueError(f"no Hoelder dual for p = {self.value} < 1")
        if self.value == 1:
            return Exponent(math.inf)
        if self.is_infinite:
            return Exponent(1.0)
        return Exponent(self.value / (self.value - 1.0))

    def __float__(self):
        return self.value

    def __str__(self):
        return "inf" if self.is_infinite else f"{self.value:g}"


def parse_exponent(text: str) -> float:
    """Parse ``"inf"``, ``"3/2"`` or ``"1.5"`` into a float."""
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return math.inf
    return float(Fraction(t)) if "/" in t else float(t)


def holder_output(*exponents) -> Exponent:
    """The p with 1/p = sum 1/p_i."""
    total = sum(Exponent.coerce(q).reciprocal for q in exponents)
    return Exponent(math.inf if total == 0 else 1.0 / total)


class SVDResult(NamedTuple):
    """``A = left @ diag(singular_values) @ right.conj().T``."""

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.singular_values) @ self.right.conj().T


def svd(A, method: str = "lapack") -> SVDResult:
    """Thin SVD with descending singular values.

    ``method="lapack"`` uses the Golub-Kahan based LAPACK driver;
    ``method="jacobi"`` runs :func:`jacobi_svd`.
    """
    M = as_matrix(A)
    if method == "jacobi":
        return jacobi_svd(M)
    if method != "lapack":
        raise ValueError(f"unknown svd method {method!r}")
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    return SVDResult(U, s, Vh.conj().T)


def jacobi_svd(A, tol: float | None = None, max_sweeps: int = 60) -> SVDResult:
    """One-sided Jacobi SVD.

    Columns are orthogonalised pairwise by plane rotations applied directly to
    ``A`` (no ``A* A`` is formed), so small singular values keep high relative
    accuracy. Pairs are processed in round-robin order, one vectorised batch of
    disjoint pairs at a time.
    """
    M = as_matrix(A)
    m, n = M.shape
    if m < n:
        r = jacobi_svd(M.conj().T, tol=tol, max_sweeps=max_sweeps)
        return SVDResult(r.right, r.singular_values, r.left)

    W = M.copy()
    V = np.eye(n, dtype=np.complex128)
    if tol is None:
        tol = max(n, 1) * np.finfo(float).eps
    fro = np.linalg.norm(M)
    # couplings below (1e-13 ||A||_F)^2 are treated as converged
    floor = max((1e-13 * fro) ** 2, TINY)

    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        rotated = False
        for left_idx, right_idx in rounds:
            if left_idx.size == 0:
                continue
            a = W[:, left_idx]
            b = W[:, right_idx]
            alpha = np.einsum("ij,ij->j", a.conj(), a).real
            beta = np.einsum("ij,ij->j", b.conj(), b).real
            gamma = np.einsum("ij,ij->j", a.conj(), b)
            g = np.abs(gamma)
            active = (g > tol * np.sqrt(alpha * beta)) & (g > floor)
            if not active.any():
                continue
            rotated = True
            li, ri = left_idx[active], right_idx[active]
            al, be, ga, gabs = alpha[active], beta[active], gamma[active], g[active]
            phase = ga / gabs
            zeta = (be - al) / (2.0 * gabs)
            t = np.sign(zeta) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            t[zeta == 0] = 1.0
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            for X in (W, V):
                xa = X[:, li]
                xb = X[:, ri] * phase.conj()
                X[:, li] = c * xa - s * xb
                X[:, ri] = s * xa + c * xb
        if not rotated:
            break

    sv = np.linalg.norm(W, axis=0)
    order = np.argsort(-sv, kind="stable")
    sv, W, V = sv[order], W[:, order], V[:, order]
    U = np.zeros_like(W)
    # columns at roundoff level carry no direction; complete them orthogonally
    good = sv > max(max(m, n) * np.finfo(float).eps * (sv[0] if sv.size else 0.0), TINY)
    U[:, good] = W[:, good] / sv[good]
    if not good.all():
        U = _complete_columns(U, good)
    return SVDResult(U, sv, V)


def _round_robin(n: int):
    """Disjoint pair batches covering every (i, j), i < j, once per sweep."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    k = len(players)
    rounds = []
    for _ in range(max(k - 1, 0)):
        pairs = [(players[i], players[k - 1 - i]) for i in range(k // 2)]
        pairs = [(min(p), max(p)) for p in pairs if -1 not in p]
        rounds.append((np.array([p[0] for p in pairs], dtype=int),
                       np.array([p[1] for p in pairs], dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _complete_columns(U: np.ndarray, good: np.ndarray) -> np.ndarray:
    m, n = U.shape
    basis = U[:, good]
    Q, _ = np.linalg.qr(np.hstack([basis, np.eye(m, dtype=np.complex128)]))
    out = U.copy()
    out[:, ~good] = Q[:, basis.shape[1]:basis.shape[1] + int((~good).sum())]
    return out


def singular_values(A, method: str = "lapack") -> np.ndarray:
    M = as_matrix(A)
    if method == "jacobi":
        return jacobi_svd(M).singular_values
    return np.linalg.svd(M, compute_uv=False)


def vector_pnorm(sv: np.ndarray, p) -> float:
    """(sum s^p)^(1/p) of a nonnegative vector, scaled to avoid over/underflow."""
    p = Exponent.coerce(p)
    sv = np.asarray(sv, dtype=float)
    if sv.size == 0:
        return 0.0
    top = float(sv.max())
    if top <= TINY:
        return 0.0
    if p.is_infinite:
        return top
    return top * float(np.sum((sv / top) ** p.value)) ** (1.0 / p.value)


def schatten_norm(A, p, method: str = "lapack") -> float:
    """Schatten p-(quasi)norm; the operator norm for ``p = inf``."""
    p = Exponent.coerce(p)
    M = as_matrix(A)
    sv = singular_values(M, method)
    if p.value < 1 and sv.size:
        # below p = 1 roundoff-level singular values inflate the sum by ~eps^p; treat them as zero
        sv = np.where(sv > max(M.shape) * np.finfo(float).eps * sv[0], sv, 0.0)
    return vector_pnorm(sv, p)


def group_Lp_norm(x, p, group_order: int) -> float:
    """Norm in L_p of a finite group von Neumann algebra, trace normalised by 1/d."""
    M = as_matrix(x)
    d = int(group_order)
    if M.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} matrix, got {M.shape}")
    return normalized_norm(M, p, d)


def normalized_norm(x, p, weight: int) -> float:
    """``weight**(-1/p) * ||x||_p``: the L_p norm for the trace ``Tr / weight``.

    Used for amplified algebras M_N (x) LG whose trace is Tr (x) (1/d) Tr.
    """
    p = Exponent.coerce(p)
    val = schatten_norm(x, p)
    return val if p.is_infinite else val * float(weight) ** (-p.reciprocal)


class Alignment(NamedTuple):
    matrix: np.ndarray
    value: float
    degenerate: bool


def dual_align(Z, q) -> Alignment:
    """Unit vector of S_q maximising ``Re Tr(X* Z)``.

    The maximum equals ``||Z||_{q'}``. For ``Z = 0`` every unit X is optimal;
    the canonical E_11 is returned with ``degenerate=True``.
    """
    q = Exponent.coerce(q)
    M = as_matrix(Z, "Z")
    if not q.is_dualizable:
        raise ValueError(f"dual_align needs q >= 1, got {q.value}")
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    top = s[0] if s.size else 0.0
    if top <= TINY:
        X = np.zeros_like(M)
        X[0, 0] = 1.0
        return Alignment(X, 0.0, True)
    qd = q.dual()
    if q.is_infinite:
        X = U @ Vh
    elif q.value == 1:
        X = np.outer(U[:, 0], Vh[0])
    else:
        r = s / top
        # g_k = s_k^(q'/q) / ||s||_{q'}^(q'/q), computed on s / max(s)
        g = r ** (qd.value / q.value)
        g = g / float(np.sum(r ** qd.value)) ** (1.0 / q.value)
        X = (U * g) @ Vh
    return Alignment(X, vector_pnorm(s, qd), False)


def s1_factorize(A, p1, p2):
    """Split A = B @ C with ||B||_{p1} ||C||_{p2} = ||A||_1.

    With A = U S V*, ``B = U S^(1/p1) V*`` (= u |A|^(1/p1) for the polar
    part u) and ``C = V S^(1/p2) V* = |A|^(1/p2)``.
    """
    p1, p2 = Exponent.coerce(p1), Exponent.coerce(p2)
    if p1.value <= 1 or p2.value <= 1 or p1.is_infinite or p2.is_infinite:
        raise ValueError("s1_factorize needs p1, p2 in (1, inf)")
    if not math.isclose(p1.reciprocal + p2.reciprocal, 1.0, rel_tol=0, abs_tol=1e-12):
        raise ValueError(f"1/p1 + 1/p2 must equal 1, got {p1.reciprocal + p2.reciprocal}")
    M = as_matrix(A)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    V = Vh.conj().T
    B = (U * s ** p1.reciprocal) @ Vh
    C = (V * s ** p2.reciprocal) @ Vh
    return B, C


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def complex_gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
