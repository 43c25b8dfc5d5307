"""Multilinear Schur and Fourier multipliers on finite index sets.

Schur multipliers act on kernels,

    M_phi(A_1, ..., A_n)(t_0, t_n) = sum phi(t_0, ..., t_n) A_1(t_0, t_1) ... A_n(t_{n-1}, t_n),

and Fourier multipliers act on the group algebra of a finite group,

    T_phi(lambda(f_1), ..., lambda(f_n)) = sum phi(t) f_1(t_1) ... f_n(t_n) lambda(t_1 ... t_n).

:class:`SchurMap` and :class:`FourierMap` wrap both as matrix-valued
multilinear maps with closed-form partial adjoints for the norm estimator.
"""
from __future__ import annotations

import itertools
import string

import numpy as np

from .groups import FiniteGroup, conditional_expectation, lambda_matrix, quotient_index
from .linalg import as_matrix, complex_gaussian, normalized_norm, schatten_norm
from .symbols import MAX_ENTRIES, SymbolFunction, SymbolTensor

_LETTERS = string.ascii_lowercase


def _check_symbol_group(phi: SymbolTensor, G: FiniteGroup):
    if phi.axis_size != G.order:
        raise ValueError(f"symbol axis {phi.axis_size} does not match group order {G.order}")


def tilde_lift(phi: SymbolTensor, G: FiniteGroup) -> SymbolTensor:
    """phi~(s_0, ..., s_n) = phi(s_0 s_1^-1, ..., s_{n-1} s_n^-1)."""
    _check_symbol_group(phi, G)
    n, d = phi.arity, G.order
    if d ** (n + 1) > MAX_ENTRIES:
        raise ValueError("lifted symbol too large")
    grids = np.indices((d,) * (n + 1), sparse=True)
    Q = quotient_index(G)
    args = tuple(Q[grids[k], grids[k + 1]] for k in range(n))
    return SymbolTensor(phi.values[args])


def lift_on_points(fn: SymbolFunction, points) -> SymbolTensor:
    """phi~(x_0, ..., x_n) = phi(x_0 - x_1, ..., x_{n-1} - x_n) on ``points^(n+1)``.

    The additive form of :func:`tilde_lift`, for Z or a lattice in R.
    """
    pts = np.asarray(points)
    n = fn.arity
    if pts.size ** (n + 1) > MAX_ENTRIES:
        raise ValueError("lifted symbol too large")
    grids = np.meshgrid(*([pts] * (n + 1)), indexing="ij")
    diffs = [grids[k] - grids[k + 1] for k in range(n)]
    vals = np.asarray(fn(*diffs), dtype=np.complex128)
    return SymbolTensor(np.broadcast_to(vals, grids[0].shape).copy(), pts)


def _schur_subscripts(n: int) -> tuple[str, list[str], str]:
    idx = _LETTERS[: n + 1]
    return idx, [idx[k] + idx[k + 1] for k in range(n)], idx[0] + idx[n]


def schur_apply(phi: SymbolTensor, *mats) -> np.ndarray:
    """Evaluate the multilinear Schur multiplier of ``phi`` (arity n + 1) on n kernels."""
    n = phi.arity - 1
    if n < 1:
        raise ValueError("a Schur symbol needs arity >= 2")
    if len(mats) != n:
        raise ValueError(f"symbol of arity {phi.arity} takes {n} matrices, got {len(mats)}")
    d = phi.axis_size
    As = [as_matrix(A, f"A{k + 1}") for k, A in enumerate(mats)]
    for k, A in enumerate(As):
        if A.shape != (d, d):
            raise ValueError(f"A{k + 1} has shape {A.shape}, expected ({d}, {d})")
    sym, ins, out = _schur_subscripts(n)
    return np.einsum(f"{sym},{','.join(ins)}->{out}", phi.values, *As)


def amplify_schur(phi: SymbolTensor, N: int) -> SymbolTensor:
    """Symbol on (X x {1..N})^{n+1}, constant along the amplification coordinate.

    The combined index of ``(s, i)`` is ``i * |X| + s``, matching
    ``np.kron(alpha, v)`` for ``alpha`` in M_N and ``v`` a kernel on X.
    """
    if N < 1:
        raise ValueError("amplification level must be >= 1")
    d, k = phi.axis_size, phi.arity
    if N * d > 4096:
        raise ValueError(f"amplified index set {N * d} exceeds 4096")
    if (N * d) ** k > MAX_ENTRIES:
        raise ValueError("amplified symbol too large")
    shape = []
    for _ in range(k):
        shape += [1, d]
    vals = np.broadcast_to(phi.values.reshape(shape), tuple([N, d] * k))
    return SymbolTensor(vals.reshape((N * d,) * k).copy())


def slice_middle(phitilde: SymbolTensor, j) -> SymbolTensor:
    """Linear symbol (s, t) -> phi~(s, j, t); ``j`` is an index or a point label."""
    if phitilde.arity != 3:
        raise ValueError("slice_middle needs a symbol of arity 3")
    jj = phitilde.index_of(j)
    return SymbolTensor(phitilde.values[:, jj, :].copy(), phitilde.points)


def rank_one_lift(b, c, j: int, size: int | None = None):
    """Bilinear inputs realising the slice at j on the rank-one kernel b c*.

    ``B = b e_j^T`` and ``C = e_j c^*``, so that
    ``M_{phi~}(B, C) = M_{phi~(., j, .)}(b c^*)``; both are rank one with
    every Schatten norm equal to 1 when ``b``, ``c`` are unit vectors.
    """
    b = np.asarray(b, dtype=np.complex128).ravel()
    c = np.asarray(c, dtype=np.complex128).ravel()
    d = b.size if size is None else int(size)
    if b.size != d or c.size != d:
        raise ValueError("b and c must have the window size")
    if not 0 <= j < d:
        raise ValueError(f"slice index {j} out of range")
    B = np.zeros((d, d), dtype=np.complex128)
    C = np.zeros((d, d), dtype=np.complex128)
    B[:, j] = b
    C[j, :] = c.conj()
    return B, C


def _product_index(G: FiniteGroup, n: int) -> np.ndarray:
    """P[t_1, ..., t_n] = t_1 t_2 ... t_n."""
    d = G.order
    P = np.arange(d)
    for _ in range(n - 1):
        P = G.table[P[..., None], np.arange(d)]
    return P


def fourier_coefficients(phi: SymbolTensor, G: FiniteGroup, *fs) -> np.ndarray:
    """Coefficients g with T_phi(lambda(f_1), ..., lambda(f_n)) = lambda(g)."""
    _check_symbol_group(phi, G)
    n = phi.arity
    if len(fs) != n:
        raise ValueError(f"symbol of arity {n} takes {n} functions, got {len(fs)}")
    vs = []
    for k, f in enumerate(fs):
        v = np.asarray(f, dtype=np.complex128)
        if v.shape != (G.order,):
            raise ValueError(f"f{k + 1} must have length {G.order}")
        vs.append(v)
    idx = _LETTERS[:n]
    weights = np.einsum(f"{idx},{','.join(idx)}->{idx}", phi.values, *vs)
    out = np.zeros(G.order, dtype=np.complex128)
    np.add.at(out, _product_index(G, n).ravel(), weights.ravel())
    return out


def fourier_apply(phi: SymbolTensor, fs, G: FiniteGroup) -> np.ndarray:
    """The d x d matrix lambda(g) of T_phi(lambda(f_1), ..., lambda(f_n))."""
    return lambda_matrix(G, fourier_coefficients(phi, G, *fs))


def blocks_to_coefficients(G: FiniteGroup, X, N: int) -> np.ndarray:
    """Read the group-algebra coefficients of each d x d block of an element of M_N(LG).

    Block (a, b) is ``X[a d:(a+1) d, b d:(b+1) d]`` and its coefficient f(s)
    is its entry (s, e). Shape of the result: (N, N, d).
    """
    d = G.order
    M = np.asarray(X, dtype=np.complex128)
    if M.shape != (N * d, N * d):
        raise ValueError(f"expected a {N * d}x{N * d} block matrix, got {M.shape}")
    return M.reshape(N, d, N, d)[:, :, :, G.identity].transpose(0, 2, 1)


def coefficients_to_blocks(G: FiniteGroup, F: np.ndarray) -> np.ndarray:
    N, d = F.shape[0], G.order
    Q = quotient_index(G)
    X4 = F[:, :, Q]  # (a, b, x, y)
    return X4.transpose(0, 2, 1, 3).reshape(N * d, N * d)


def fourier_apply_amplified(phi: SymbolTensor, G: FiniteGroup, *Fs) -> np.ndarray:
    """T_phi^(N) on coefficient blocks, (N, N, d) each, returning (N, N, d).

    Elementary tensors alpha_i (x) lambda(f_i) go to
    (alpha_1 ... alpha_n) (x) T_phi(lambda(f_1), ..., lambda(f_n)).
    """
    _check_symbol_group(phi, G)
    n, d = phi.arity, G.order
    if len(Fs) != n:
        raise ValueError(f"expected {n} inputs, got {len(Fs)}")
    blocks = _LETTERS[: n + 1]
    groups = _LETTERS[n + 1: 2 * n + 1]
    ins = [blocks[k] + blocks[k + 1] + groups[k] for k in range(n)]
    W = np.einsum(f"{groups},{','.join(ins)}->{blocks[0]}{blocks[n]}{groups}",
                  phi.values, *Fs)
    N = Fs[0].shape[0]
    out = np.zeros((N, N, d), dtype=np.complex128)
    P = _product_index(G, n).ravel()
    Wf = W.reshape(N, N, -1)
    for u in range(d):
        out[:, :, u] = Wf[:, :, P == u].sum(axis=2)
    return out


def translate_symbol(phi: SymbolTensor, G: FiniteGroup, rs) -> SymbolTensor:
    """psi(s_1, ..., s_n) = phi(r_0 s_1 r_1^-1, ..., r_{n-1} s_n r_n^-1).

    Then T_phi(lambda_{r_0} x_1 lambda_{r_1}^*, ..., lambda_{r_{n-1}} x_n lambda_{r_n}^*)
    = lambda_{r_0} T_psi(x_1, ..., x_n) lambda_{r_n}^*.
    """
    _check_symbol_group(phi, G)
    n, d = phi.arity, G.order
    rs = [int(r) for r in rs]
    if len(rs) != n + 1 or any(not 0 <= r < d for r in rs):
        raise ValueError(f"need {n + 1} group elements")
    s = np.arange(d)
    args = []
    for k in range(n):
        left = G.table[rs[k], s]
        args.append(G.table[left, G.inverse[rs[k + 1]]])
    grids = np.ix_(*args)
    return SymbolTensor(phi.values[grids])


def mollify_symbol(phi: SymbolTensor, G: FiniteGroup, weight) -> SymbolTensor:
    """Coordinate-wise average of translates of phi against a probability weight.

    phi_w(s_1, ..., s_n) = sum_t phi(t_1^-1 s_1 t_2, ..., t_{n-2}^-1 s_{n-2} t_{n-1},
    t_{n-1}^-1 s_{n-1}, s_n t_n^-1) w(t_1) ... w(t_n). For n = 1 this is
    sum_t phi(s t^-1) w(t).
    """
    _check_symbol_group(phi, G)
    w = np.asarray(weight, dtype=float)
    n, d = phi.arity, G.order
    if w.shape != (d,):
        raise ValueError(f"weight must have length {d}")
    if np.any(w < 0):
        raise ValueError("weight must be nonnegative")
    if not np.isclose(w.sum(), 1.0, rtol=0, atol=1e-12):
        raise ValueError(f"weight must sum to 1, got {w.sum()}")
    T, inv = G.table, G.inverse
    s = np.arange(d)
    support = np.flatnonzero(w)
    out = np.zeros((d,) * n, dtype=np.complex128)
    for ts in itertools.product(support, repeat=n):
        args = []
        for k in range(n):  # argument k + 1
            if k == n - 1:
                args.append(T[s, inv[ts[k]]])
            elif k == n - 2:
                args.append(T[inv[ts[k]], s])
            else:
                args.append(T[T[inv[ts[k]], s], ts[k + 1]])
        out += np.prod(w[list(ts)]) * phi.values[np.ix_(*args)]
    return SymbolTensor(out)


# ---------------------------------------------------------------------------
# maps for the norm estimator


class SchurMap:
    """M_phi as a map on n square matrices of the symbol's axis size."""

    def __init__(self, phi: SymbolTensor):
        if phi.arity < 2:
            raise ValueError("a Schur symbol needs arity >= 2")
        self.phi = phi
        self.arity = phi.arity - 1
        d = phi.axis_size
        self.input_shapes = [(d, d)] * self.arity
        self.output_shape = (d, d)

    def __call__(self, *xs):
        return schur_apply(self.phi, *xs)

    def partial(self, i: int, Y, xs) -> np.ndarray:
        """Phi_i with Tr(Y^* M(..., X at slot i, ...)) = Tr(Phi_i^* X)."""
        n = self.arity
        sym, ins, out = _schur_subscripts(n)
        ops = [np.conj(Y), self.phi.values] + [xs[k] for k in range(n) if k != i]
        subs = [out, sym] + [ins[k] for k in range(n) if k != i]
        c = np.einsum(f"{','.join(subs)}->{ins[i]}", *ops)
        return np.conj(c)

    def norm(self, X, p) -> float:
        return schatten_norm(X, p)


class FourierMap:
    """T_phi^(N) on M_N(LG), realised as (N d) x (N d) block matrices.

    Norms use the trace Tr (x) (1/d) Tr. Inputs are read through their
    group-algebra coefficients; :meth:`project` is the trace-preserving
    conditional expectation onto M_N(LG).
    """

    def __init__(self, phi: SymbolTensor, G: FiniteGroup, N: int = 1):
        _check_symbol_group(phi, G)
        self.phi, self.G, self.N = phi, G, int(N)
        self.arity = phi.arity
        D = self.N * G.order
        self.input_shapes = [(D, D)] * self.arity
        self.output_shape = (D, D)

    def coefficients(self, X) -> np.ndarray:
        return blocks_to_coefficients(self.G, X, self.N)

    def __call__(self, *xs):
        Fs = [self.coefficients(x) for x in xs]
        return coefficients_to_blocks(self.G, fourier_apply_amplified(self.phi, self.G, *Fs))

    def partial(self, i: int, Y, xs) -> np.ndarray:
        G, N, n, d = self.G, self.N, self.arity, self.G.order
        Yb = np.asarray(Y).reshape(N, d, N, d).transpose(0, 2, 1, 3)
        # w[a, b, u] = Tr(Y_ab^* lambda_u) = sum_v conj(Y_ab[u v, v])
        w = np.conj(Yb[:, :, G.table, np.arange(d)[None, :]]).sum(axis=3)
        P = _product_index(G, n)
        Wfull = w[:, :, P]  # (N, N, d, ..., d)
        blocks = _LETTERS[: n + 1]
        groups = _LETTERS[n + 1: 2 * n + 1]
        ins = [blocks[k] + blocks[k + 1] + groups[k] for k in range(n)]
        Fs = [self.coefficients(x) for x in xs]
        ops = [Wfull, self.phi.values] + [Fs[k] for k in range(n) if k != i]
        subs = [blocks[0] + blocks[n] + groups, groups] + [ins[k] for k in range(n) if k != i]
        c = np.einsum(f"{','.join(subs)}->{ins[i]}", *ops)
        # Tr((E_ab (x) lambda_s)^* (E_ab (x) lambda_s)) = d
        return coefficients_to_blocks(G, np.conj(c) / d)

    def project(self, i: int, X) -> np.ndarray:
        G, N, d = self.G, self.N, self.G.order
        Xb = np.asarray(X).reshape(N, d, N, d)
        out = np.empty_like(Xb, dtype=np.complex128)
        for a in range(N):
            for b in range(N):
                out[a, :, b, :] = conditional_expectation(G, Xb[a, :, b, :])
        return out.reshape(N * d, N * d)

    def random_input(self, i: int, rng: np.random.Generator) -> np.ndarray:
        F = complex_gaussian((self.N, self.N, self.G.order), rng)
        return coefficients_to_blocks(self.G, F)

    def norm(self, X, p) -> float:
        return normalized_norm(X, p, self.G.order)
