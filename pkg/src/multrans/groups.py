"""Finite groups, their left regular representation, and Z through finite windows.

Elements are indices ``0..d-1``. Haar measure is counting measure and the
Plancherel trace on LG is ``Tr / d``, so that ``||lambda(f)||_2 = ||f||_l2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .linalg import Exponent, as_matrix

MAX_ORDER = 4096
EXHAUSTIVE_ASSOC = 64


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A group given by its Cayley table ``table[s, t] = s t``."""

    table: np.ndarray
    name: str = "group"
    identity: int = field(init=False)
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        T = np.asarray(self.table, dtype=np.intp)
        if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] < 1:
            raise ValueError(f"Cayley table must be square and nonempty, got {T.shape}")
        d = T.shape[0]
        if d > MAX_ORDER:
            raise ValueError(f"group order {d} exceeds limit {MAX_ORDER}")
        if T.min() < 0 or T.max() >= d:
            raise ValueError("Cayley table entries out of range")
        # Latin square: every row and column is a permutation
        ref = np.arange(d)
        if not (np.all(np.sort(T, axis=1) == ref) and np.all(np.sort(T, axis=0) == ref[:, None])):
            raise ValueError("Cayley table is not a Latin square")
        ids = [e for e in range(d) if np.array_equal(T[e], ref) and np.array_equal(T[:, e], ref)]
        if not ids:
            raise ValueError("no two-sided identity")
        e = ids[0]
        inv = np.argmax(T == e, axis=1)
        if not np.all(T[np.arange(d), inv] == e) or not np.all(T[inv, np.arange(d)] == e):
            raise ValueError("inverses are not two-sided")
        T.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "table", T)
        object.__setattr__(self, "identity", int(e))
        object.__setattr__(self, "inverse", inv)
        _check_associative(T)

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def mul(self, s, t):
        return self.table[s, t]

    def inv(self, s):
        return self.inverse[s]

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"


def _check_associative(T: np.ndarray, samples: int = 200_000) -> None:
    d = T.shape[0]
    if d <= EXHAUSTIVE_ASSOC:
        left = T[T[:, :, None], np.arange(d)[None, None, :]]  # (s t) u
        right = T[np.arange(d)[:, None, None], T[None, :, :]]  # s (t u)
        ok = np.array_equal(left, right)
    else:
        rng = np.random.default_rng(0)
        s, t, u = rng.integers(0, d, size=(3, samples))
        ok = np.array_equal(T[T[s, t], u], T[s, T[t, u]])
    if not ok:
        raise ValueError("Cayley table is not associative")


def make_cyclic(m: int) -> FiniteGroup:
    if m < 1:
        raise ValueError("cyclic group needs m >= 1")
    i = np.arange(m)
    return FiniteGroup((i[:, None] + i[None, :]) % m, name=f"cyclic:{m}")


def make_dihedral(m: int) -> FiniteGroup:
    """Symmetries of the m-gon, order 2m; element ``k + m*e`` is r^k s^e."""
    if m < 1:
        raise ValueError("dihedral group needs m >= 1")
    idx = np.arange(2 * m)
    k, e = idx % m, idx // m
    # (r^a s^e)(r^b s^f) = r^(a + (-1)^e b) s^(e+f)
    sign = 1 - 2 * e[:, None]
    rot = (k[:, None] + sign * k[None, :]) % m
    ref = (e[:, None] + e[None, :]) % 2
    return FiniteGroup(rot + m * ref, name=f"dihedral:{m}")


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """G x H with element ``g * |H| + h``."""
    a, b = G.order, H.order
    idx = np.arange(a * b)
    g, h = idx // b, idx % b
    T = G.table[g[:, None], g[None, :]] * b + H.table[h[:, None], h[None, :]]
    return FiniteGroup(T, name=f"product:{G.name},{H.name}")


def parse_group(text: str) -> FiniteGroup:
    """Build a group from ``cyclic:m``, ``dihedral:m`` or ``product:A,B``."""
    text = text.strip()
    kind, _, rest = text.partition(":")
    try:
        if kind == "cyclic":
            return make_cyclic(int(rest))
        if kind == "dihedral":
            return make_dihedral(int(rest))
        if kind == "product":
            parts = rest.split(",")
            if len(parts) < 2:
                raise ValueError("product needs at least two factors")
            G = parse_group(parts[0])
            for part in parts[1:]:
                G = direct_product(G, parse_group(part))
            return G
    except ValueError as exc:
        raise ValueError(f"bad group description {text!r}: {exc}") from exc
    raise ValueError(f"unknown group description {text!r}")


def _group_vector(G: FiniteGroup, f, name="f") -> np.ndarray:
    v = np.asarray(f, dtype=np.complex128)
    if v.shape != (G.order,):
        raise ValueError(f"{name} must have length {G.order}, got shape {v.shape}")
    return v


def delta(G: FiniteGroup, s: int) -> np.ndarray:
    v = np.zeros(G.order, dtype=np.complex128)
    v[s] = 1.0
    return v


def quotient_index(G: FiniteGroup) -> np.ndarray:
    """``Q[s, t] = s t^-1``."""
    return G.table[:, G.inverse]


def lambda_matrix(G: FiniteGroup, f) -> np.ndarray:
    """lambda(f) = sum_s f(s) lambda_s, with entries ``f(s t^-1)``."""
    v = _group_vector(G, f)
    return v[quotient_index(G)]


def lambda_element(G: FiniteGroup, s: int) -> np.ndarray:
    return lambda_matrix(G, delta(G, s))


def lambda_coefficients(G: FiniteGroup, x, check: bool = True, atol: float = 1e-10) -> np.ndarray:
    """Recover f from x = lambda(f): ``f(s)`` sits in row s of the identity column."""
    M = as_matrix(x)
    d = G.order
    if M.shape != (d, d):
        raise ValueError(f"expected {d}x{d}, got {M.shape}")
    f = M[:, G.identity].copy()
    if check:
        err = np.max(np.abs(lambda_matrix(G, f) - M))
        if err > atol * max(1.0, np.max(np.abs(M))):
            raise ValueError(f"matrix is not in the group algebra (residual {err:.3g})")
    return f


def convolve(G: FiniteGroup, f, g) -> np.ndarray:
    """(f * g)(t) = sum_s f(s) g(s^-1 t)."""
    fv, gv = _group_vector(G, f), _group_vector(G, g, "g")
    d = G.order
    # s^-1 t as a (s, t) table
    idx = G.table[G.inverse[:, None], np.arange(d)[None, :]]
    return np.einsum("s,st->t", fv, gv[idx])


def involution(G: FiniteGroup, f) -> np.ndarray:
    """f*(s) = conj(f(s^-1))."""
    return np.conj(_group_vector(G, f)[G.inverse])


def conditional_expectation(G: FiniteGroup, Z) -> np.ndarray:
    """Trace-preserving projection of a d x d matrix onto LG."""
    M = as_matrix(Z)
    d = G.order
    # (1/d) Tr(lambda_s^* Z) = (1/d) sum_v Z[s v, v]
    f = M[G.table, np.arange(d)[None, :]].sum(axis=1) / d
    return lambda_matrix(G, f)


# ---------------------------------------------------------------------------
# Z and its torus dual


@dataclass(frozen=True, eq=False)
class LatticeFunction:
    """Finitely supported f on Z, stored on -M..M."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128).ravel()
        if v.size % 2 == 0:
            raise ValueError("values must have odd length 2M+1 (indices -M..M)")
        if not np.all(np.isfinite(v)):
            raise ValueError("lattice function has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def radius(self) -> int:
        return (self.values.size - 1) // 2

    def __call__(self, n):
        n = np.asarray(n)
        M = self.radius
        inside = np.abs(n) <= M
        out = np.zeros(n.shape, dtype=np.complex128)
        out[inside] = self.values[n[inside] + M]
        return out if out.ndim else complex(out)

    @classmethod
    def from_dict(cls, obj: dict) -> "LatticeFunction":
        M = int(obj["M"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if M < 0 or re.size != 2 * M + 1 or im.size != re.size:
            raise ValueError(f"lattice function with M={M} needs {2 * M + 1} values")
        return cls(re + 1j * im)

    def to_dict(self) -> dict:
        return {"M": self.radius, "re": self.values.real.tolist(), "im": self.values.imag.tolist()}

    @classmethod
    def from_terms(cls, terms: dict) -> "LatticeFunction":
        """``{n: value}`` -> lattice function, e.g. ``{1: 1, -1: 1}``."""
        M = max((abs(int(n)) for n in terms), default=0)
        v = np.zeros(2 * M + 1, dtype=np.complex128)
        for n, val in terms.items():
            v[int(n) + M] += val
        return cls(v)

    def is_hermitian(self) -> bool:
        """f(-n) = conj(f(n)), i.e. its Toeplitz compressions are self-adjoint."""
        return bool(np.allclose(self.values[::-1], np.conj(self.values), rtol=0, atol=0))


def parse_lattice(text: str) -> LatticeFunction:
    """``"1=1,-1=1"`` -> delta_1 + delta_-1; ``"0=1"`` -> delta_0."""
    terms: dict[int, complex] = {}
    for part in text.split(","):
        n, _, val = part.partition("=")
        if not _:
            raise ValueError(f"bad lattice term {part!r}; expected n=value")
        terms[int(n)] = terms.get(int(n), 0) + complex(val.strip().replace("i", "j"))
    return LatticeFunction.from_terms(terms)


def default_torus_points(f: LatticeFunction) -> int:
    return 16 * (2 * f.radius + 1)


def torus_samples(f: LatticeFunction, points: int) -> np.ndarray:
    """Values of sum_n f(n) e^{i n theta} on theta_k = 2 pi k / points."""
    M = f.radius
    if points < 2 * M + 1:
        raise ValueError("too few quadrature points to resolve the polynomial")
    coeffs = np.zeros(points, dtype=np.complex128)
    n = np.arange(-M, M + 1)
    np.add.at(coeffs, n % points, f.values)
    # sum_n c_n e^{+i n theta_k} = points * ifft(c)[k]
    return np.fft.ifft(coeffs) * points


def torus_norm(f: LatticeFunction, p, quadrature_points: int | None = None) -> float:
    """(int_T |sum f(n) z^n|^p dtheta/2pi)^(1/p) by the uniform trapezoid rule.

    ``p = inf`` gives the maximum over the grid.
    """
    p = Exponent.coerce(p)
    if not np.any(f.values):
        return 0.0
    need = default_torus_points(f)
    points = need if quadrature_points is None else int(quadrature_points)
    if points < need:
        raise ValueError(f"need at least {need} quadrature points, got {points}")
    a = np.abs(torus_samples(f, points))
    if p.is_infinite:
        return float(a.max())
    top = a.max()
    return float(top * np.mean((a / top) ** p.value) ** (1.0 / p.value))


def toeplitz_compression(f: LatticeFunction, M: int) -> np.ndarray:
    """P_F lambda(f) P_F on F = [-M, M]: the matrix ``A[s, t] = f(s - t)``."""
    if M < 0:
        raise ValueError("window radius must be >= 0")
    k = np.arange(2 * M + 1)
    col = f(k)  # f(s - t) for t = -M, s = -M + k
    row = f(-k)
    return scipy.linalg.toeplitz(col, row).astype(np.complex128)


def compression_singular_values(f: LatticeFunction, M: int) -> np.ndarray:
    """Singular values of :func:`toeplitz_compression`.

    Hermitian symbols go through a banded eigensolver (|eigenvalues| are the
    singular values); otherwise a dense SVD is used.
    """
    if f.is_hermitian():
        n = 2 * M + 1
        w = min(f.radius, n - 1)
        band = np.zeros((w + 1, n), dtype=np.complex128)
        # lower form: band[k, j] = A[j + k, j] = f(k)
        for k in range(w + 1):
            band[k, : n - k] = f(k)
        ev = scipy.linalg.eigvals_banded(band, lower=True)
        return np.sort(np.abs(ev))[::-1]
    return np.linalg.svd(toeplitz_compression(f, M), compute_uv=False)
