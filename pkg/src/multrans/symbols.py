"""Multiplier symbols: dense tensors on finite index sets and pointwise evaluators.

Built-in evaluators cover the bilinear Hilbert transform symbol, its
mollification, the slice indicators, the Davies-type divided-difference
symbol and the homogeneous Calderon-Zygmund symbol m(s, t) = s/(s - t).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import integrate

MAX_ENTRIES = 2 ** 24


@dataclass(frozen=True, eq=False)
class SymbolTensor:
    """Dense symbol on ``X^arity`` with ``|X| = axis_size``.

    ``points`` optionally labels the axis (e.g. the integers of a window).
    """

    values: np.ndarray
    points: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.ndim < 1 or len(set(v.shape)) != 1 or v.shape[0] < 1:
            raise ValueError(f"symbol must have equal positive axes, got shape {v.shape}")
        if v.size > MAX_ENTRIES:
            raise ValueError(f"symbol has {v.size} entries, above the {MAX_ENTRIES} cap")
        if not np.all(np.isfinite(v)):
            raise ValueError("symbol has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.points is not None:
            pts = np.asarray(self.points)
            if pts.shape != (v.shape[0],):
                raise ValueError("points must label every axis entry")
            object.__setattr__(self, "points", pts)

    @property
    def arity(self) -> int:
        return self.values.ndim

    @property
    def axis_size(self) -> int:
        return self.values.shape[0]

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def index_of(self, label) -> int:
        """Axis index of a point label (or the index itself when unlabelled)."""
        if self.points is None:
            j = int(label)
        else:
            hits = np.flatnonzero(np.isclose(self.points, label, rtol=0, atol=1e-12))
            if hits.size == 0:
                raise ValueError(f"{label!r} is not a point of this symbol")
            j = int(hits[0])
        if not 0 <= j < self.axis_size:
            raise ValueError(f"index {j} out of range 0..{self.axis_size - 1}")
        return j

    @classmethod
    def constant(cls, value, arity: int, axis_size: int) -> "SymbolTensor":
        return cls(np.full((axis_size,) * arity, value, dtype=np.complex128))

    def to_dict(self) -> dict:
        out = {
            "arity": self.arity,
            "axis": self.axis_size,
            "re": self.values.real.ravel().tolist(),
            "im": self.values.imag.ravel().tolist(),
        }
        if self.points is not None:
            out["points"] = self.points.tolist()
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "SymbolTensor":
        k, d = int(obj["arity"]), int(obj["axis"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if k < 1 or d < 1 or re.size != d ** k or im.size != re.size:
            raise ValueError(f"symbol object needs {d}**{k} values, got {re.size}")
        return cls((re + 1j * im).reshape((d,) * k), obj.get("points"))


@dataclass(frozen=True)
class SymbolFunction:
    """Pure pointwise symbol. ``vectorized`` evaluators accept broadcast arrays."""

    arity: int
    evaluator: Callable
    descriptor: str
    vectorized: bool = False

    def __call__(self, *args):
        if len(args) != self.arity:
            raise ValueError(f"{self.descriptor} takes {self.arity} arguments")
        if self.vectorized:
            return self.evaluator(*args)
        if all(np.ndim(a) == 0 for a in args):
            return self.evaluator(*args)
        bargs = np.broadcast_arrays(*args)
        out = np.empty(bargs[0].shape, dtype=np.complex128)
        for idx in np.ndindex(out.shape):
            out[idx] = self.evaluator(*(a[idx] for a in bargs))
        return out

    def tabulate(self, points) -> SymbolTensor:
        """Evaluate on ``points^arity``."""
        pts = np.asarray(points)
        grids = np.meshgrid(*([pts] * self.arity), indexing="ij")
        vals = np.asarray(self(*grids), dtype=np.complex128)
        return SymbolTensor(np.broadcast_to(vals, grids[0].shape).copy(), pts)


# ---------------------------------------------------------------------------
# bilinear Hilbert transform


def bht_h() -> SymbolFunction:
    """h(xi1, xi2) = 1 if xi1 >= xi2 else 0."""
    return SymbolFunction(
        2, lambda x, y: (np.asarray(x) - np.asarray(y) >= 0).astype(float), "bht-h", True)


@dataclass(frozen=True)
class PolynomialBump:
    """Even bump c (a^2 - t^2)^2 on |t| <= a, unit integral."""

    radius: float = 0.5 - 1e-3

    def __post_init__(self):
        if not 0 < self.radius < 0.5:
            raise ValueError("bump radius must lie in (0, 1/2)")

    @property
    def norm_const(self) -> float:
        return 15.0 / (16.0 * self.radius ** 5)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        a = self.radius
        return np.where(np.abs(t) <= a, self.norm_const * (a * a - t * t) ** 2, 0.0)

    def cdf(self, x: float) -> float:
        """Closed-form integral of the bump over (-inf, x]."""
        a = self.radius
        x = min(max(x, -a), a)
        F = lambda u: a ** 4 * u - 2 * a * a * u ** 3 / 3 + u ** 5 / 5
        return self.norm_const * (F(x) - F(-a))


def mollified_H(bump=None, epsabs: float = 1e-10) -> SymbolFunction:
    """H(s1, s2) = int h(s1 + t, s2 - t) bump(t) dt.

    The indicator cuts the integral at t* = (s2 - s1)/2, so H is the bump mass
    above t*; that tail is integrated adaptively. At integers s1 != s2 the cut
    lies outside the support and H agrees with h; on the diagonal the symmetric
    bump gives exactly 1/2 (where h = 1).
    """
    bump = PolynomialBump() if bump is None else bump
    a = float(getattr(bump, "radius", 0.5))

    def H(s1, s2):
        lo = max((float(s2) - float(s1)) / 2.0, -a)
        if lo >= a:
            return 0.0
        val, _ = integrate.quad(lambda t: float(bump(t)), lo, a, epsabs=epsabs, epsrel=0, limit=200)
        return val

    return SymbolFunction(2, H, "mollified-H")


def H_j_indicator(j: int) -> SymbolFunction:
    """Middle slice of the lifted Hilbert symbol on Z: 1 if s + t - 2j >= 0."""
    return SymbolFunction(
        2, lambda s, t: (np.asarray(s) + np.asarray(t) - 2 * j >= 0).astype(float), f"hj:{j}", True)


def anti_triangular(N: int) -> np.ndarray:
    """0/1 mask with ones on and below the anti-diagonal (i + j >= N - 1).

    On an odd window [-M, M] this is exactly chi(s + t >= 0).
    """
    i, j = np.indices((N, N))
    return (i + j >= N - 1).astype(float)


# ---------------------------------------------------------------------------
# divided-difference (Davies) symbol


def davies_sequence(N: int, rule: str = "2^i") -> np.ndarray:
    """lambda_0 = 0 < lambda_1 < ... < lambda_N.

    ``"2^i"`` gives lambda_i = 2^i for i >= 1 (all integers, so the rational
    grid step is 1); ``"i"`` gives lambda_i = i.
    """
    if N < 1:
        raise ValueError("need N >= 1")
    i = np.arange(1, N + 1, dtype=float)
    if rule == "2^i":
        tail = 2.0 ** i
    elif rule == "i":
        tail = i
    else:
        raise ValueError(f"unknown lambda rule {rule!r}")
    return np.concatenate([[0.0], tail])


def _check_lambdas(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1 or lam.size < 1:
        raise ValueError("lambda sequence must be a nonempty vector")
    if lam[0] < 0 or np.any(np.diff(lam) <= 0):
        raise ValueError("lambda sequence must be nonnegative and strictly increasing")
    return lam


def davies_phi(lambdas) -> SymbolFunction:
    """phi(i, j) = (l_i - l_j) / (l_i + l_j) on indices; phi(i, i) = 0."""
    lam = _check_lambdas(lambdas)

    def phi(i, j):
        li, lj = lam[np.asarray(i, dtype=int)], lam[np.asarray(j, dtype=int)]
        den = li + lj
        return np.where(den == 0, 0.0, (li - lj) / np.where(den == 0, 1.0, den))

    return SymbolFunction(2, phi, f"davies:{len(lam) - 1}", True)


def davies_matrix(lambdas) -> np.ndarray:
    lam = _check_lambdas(lambdas)
    n = lam.size
    return davies_phi(lam).tabulate(np.arange(n)).values.real.copy()


def cz_linear_symbol(lambdas) -> np.ndarray:
    """(1 + phi) / 2, the middle slice of the lifted CZ symbol on the lambda set."""
    return 0.5 * (1.0 + davies_matrix(lambdas))


# ---------------------------------------------------------------------------
# homogeneous Calderon-Zygmund symbol


def _smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, flat at both ends."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def _quadrant_profile(theta):
    c, s = np.cos(theta), np.sin(theta)
    return c / (c - s)


ARC = 1.5 * math.pi  # length of the complementary arc (0, 3 pi / 2)
_BLEND = math.pi / 8


def default_circle_profile(u):
    """Extension of m to angles u in [0, 3 pi/2] (i.e. outside the quadrant).

    Cosine smoothstep from 1 (at the positive s-axis) to 0 (at the negative
    t-axis), blended with the quadrant formula continued a little past each
    end so that every derivative matches and m is smooth off the origin.
    """
    u = np.asarray(u, dtype=float)
    mid = 0.5 * (1.0 + np.cos(math.pi * u / ARC))
    w0 = 1.0 - _smooth_step(u / _BLEND)
    w1 = 1.0 - _smooth_step((ARC - u) / _BLEND)
    near0 = np.where(u < _BLEND, u, 0.0)
    near1 = np.where(u > ARC - _BLEND, u - 2 * math.pi, -math.pi / 2)
    return w0 * _quadrant_profile(near0) + w1 * _quadrant_profile(near1) + (1 - w0 - w1) * mid


@dataclass(frozen=True)
class CircleSymbol:
    """Degree-0 homogeneous symbol from its values on the unit circle."""

    profile: Callable = default_circle_profile
    name: str = "default"

    def on_circle(self, theta):
        theta = np.asarray(theta, dtype=float)
        # shift into [-pi/2, 3pi/2)
        t = np.mod(theta + math.pi / 2, 2 * math.pi) - math.pi / 2
        quad = t <= 0
        out = np.empty(t.shape, dtype=float)
        out[quad] = _quadrant_profile(t[quad])
        out[~quad] = self.profile(t[~quad])
        return out

    @cached_property
    def regulated_value(self) -> float:
        """Disc average of m about 0, i.e. the mean of the circle profile.

        Periodic trapezoid rule, doubled until two levels agree (the profile
        is smooth and periodic, so convergence is geometric).
        """
        n, prev = 256, None
        while n <= 2 ** 22:
            th = -math.pi / 2 + 2 * math.pi * np.arange(n) / n
            val = float(np.mean(self.on_circle(th)))
            if prev is not None and abs(val - prev) < 1e-14:
                return val
            prev, n = val, 2 * n
        return prev

    def __call__(self, s, t):
        s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
        out = self.on_circle(np.arctan2(t, s))
        out = np.where((s == 0) & (t == 0), self.regulated_value, out)
        return out if out.ndim else float(out)


def cz_m(extension_choice=None) -> SymbolFunction:
    """m(s, t) = s / (s - t) on {s > 0, t < 0}, homogeneous of degree 0.

    ``extension_choice`` is ``None``/``"default"`` or a callable profile on the
    complementary arc, taking angles in (0, 3 pi / 2).
    """
    if extension_choice is None or extension_choice == "default":
        sym = CircleSymbol()
    elif callable(extension_choice):
        sym = CircleSymbol(extension_choice, getattr(extension_choice, "__name__", "custom"))
    else:
        raise ValueError(f"unknown extension choice {extension_choice!r}")
    return SymbolFunction(2, sym, f"cz-m:{sym.name}", True)


def cz_m_r(r: float, quadrature=(48, 256), extension_choice=None) -> SymbolFunction:
    """Disc average m_r(s) = (1 / pi r^2) int_{|s - t| <= r} m(t) dt.

    Polar rule about the centre: Gauss-Legendre in the radius, trapezoid in
    the angle. ``quadrature = (radial nodes, angular nodes)``.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    m = cz_m(extension_choice)
    n_rho, n_th = quadrature
    x, w = np.polynomial.legendre.leggauss(int(n_rho))
    rho = 0.5 * r * (x + 1.0)
    w_rho = 0.5 * r * w * rho  # includes the Jacobian rho
    th = 2 * math.pi * np.arange(int(n_th)) / int(n_th)
    dx = rho[:, None] * np.cos(th)[None, :]
    dy = rho[:, None] * np.sin(th)[None, :]
    weights = w_rho[:, None] * (2 * math.pi / n_th) / (math.pi * r * r)

    def m_r(s1, s2):
        return float(np.sum(weights * m(s1 + dx, s2 + dy)))

    return SymbolFunction(2, m_r, f"cz-m-r:{r:g}")


def lifted_cz_slice(lambdas, extension_choice=None) -> np.ndarray:
    """m~(l_i, 0, l_j) = m(l_i, -l_j) on the lambda set (index 0 is lambda = 0)."""
    lam = _check_lambdas(lambdas)
    m = cz_m(extension_choice)
    return np.asarray(m(lam[:, None], -lam[None, :]), dtype=float)


# ---------------------------------------------------------------------------
# descriptors


def parse_symbol(descriptor: str):
    """Resolve a CLI descriptor.

    ``bht-h``, ``mollified-H``, ``hj:<j>``, ``cz-m``, ``cz-m-r:<r>`` give a
    :class:`SymbolFunction`; ``davies:<rule>:<N>`` gives the lambda sequence's
    symbol ``davies_phi``.
    """
    d = descriptor.strip()
    head, _, rest = d.partition(":")
    if d == "bht-h":
        return bht_h()
    if d == "mollified-H":
        return mollified_H()
    if head == "hj":
        return H_j_indicator(int(rest))
    if d == "cz-m":
        return cz_m()
    if head == "cz-m-r":
        return cz_m_r(float(rest))
    if head == "davies":
        rule, _, n = rest.rpartition(":")
        return davies_phi(davies_sequence(int(n), rule or "2^i"))
    raise ValueError(f"unknown symbol descriptor {descriptor!r}")
