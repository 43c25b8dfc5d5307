import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from multrans.groups import (
    FiniteGroup, LatticeFunction, compression_singular_values, conditional_expectation, convolve, delta,
    direct_product, involution, lambda_coefficients, lambda_element, lambda_matrix, make_cyclic,
    make_dihedral, parse_group, parse_lattice, toeplitz_compression, torus_norm,
)
from multrans.linalg import group_Lp_norm, schatten_norm

from helpers import cgauss

SMALL_GROUPS = [make_cyclic(m) for m in (1, 2, 5, 8)] + [make_dihedral(m) for m in (3, 4, 6)] + [
    direct_product(make_cyclic(2), make_cyclic(3))]


def test_cyclic_tables():
    assert make_cyclic(1).table.tolist() == [[0]]
    assert make_cyclic(2).table.tolist() == [[0, 1], [1, 0]]


def test_dihedral_is_a_group_exhaustively():
    G = make_dihedral(3)
    T = G.table
    assert G.order == 6
    for a, b, c in itertools.product(range(6), repeat=3):
        assert T[T[a, b], c] == T[a, T[b, c]]
    # non-abelian: some pair fails to commute
    assert any(T[a, b] != T[b, a] for a in range(6) for b in range(6))


@pytest.mark.parametrize("m", range(2, 13))
def test_dihedral_element_orders(m):
    G = make_dihedral(m)
    # rotations have orders dividing m, reflections have order 2
    reflections = [s for s in range(2 * m) if s >= m]
    for s in reflections:
        assert G.table[s, s] == G.identity


def test_invalid_tables_rejected():
    with pytest.raises(ValueError):
        FiniteGroup(np.array([[0, 1], [0, 1]]))
    with pytest.raises(ValueError):
        FiniteGroup(np.array([[0, 1, 2], [1, 0, 2], [2, 2, 0]]))
    with pytest.raises(ValueError):
        make_cyclic(0)


def test_parse_group():
    assert parse_group("cyclic:7").order == 7
    assert parse_group("dihedral:4").order == 8
    assert parse_group("product:cyclic:2,cyclic:3").order == 6
    for bad in ("cyclic", "cyclic:x", "torus:3", "product:cyclic:2"):
        with pytest.raises(ValueError):
            parse_group(bad)


@pytest.mark.parametrize("G", SMALL_GROUPS, ids=lambda G: G.name)
def test_lambda_entry_rule(G):
    d = G.order
    f = np.arange(d) + 1j * np.arange(d) ** 2
    L = lambda_matrix(G, f)
    for s in range(d):
        for t in range(d):
            assert L[s, t] == f[G.table[s, G.inverse[t]]]
    assert np.array_equal(lambda_matrix(G, delta(G, G.identity)), np.eye(d))
    for s in range(d):
        P = lambda_element(G, s)
        # left translation: delta_t -> delta_{st}
        assert all(P[G.table[s, t], t] == 1 for t in range(d))


@pytest.mark.parametrize("G", SMALL_GROUPS + [make_dihedral(12)], ids=lambda G: G.name)
def test_lambda_is_star_homomorphism(rng, G):
    d = G.order
    f, g = cgauss(rng, d), cgauss(rng, d)
    # convolution by its defining double sum
    conv = np.zeros(d, dtype=complex)
    for t in range(d):
        for s in range(d):
            conv[t] += f[s] * g[G.table[G.inverse[s], t]]
    assert np.allclose(convolve(G, f, g), conv)
    assert np.allclose(lambda_matrix(G, conv), lambda_matrix(G, f) @ lambda_matrix(G, g))
    assert np.allclose(lambda_matrix(G, involution(G, f)), lambda_matrix(G, f).conj().T)


@pytest.mark.parametrize("G", SMALL_GROUPS, ids=lambda G: G.name)
def test_plancherel(rng, G):
    f = cgauss(rng, G.order)
    assert group_Lp_norm(lambda_matrix(G, f), 2, G.order) == pytest.approx(np.linalg.norm(f), rel=1e-12)


def test_coefficients_and_conditional_expectation(rng):
    G = make_dihedral(4)
    f = cgauss(rng, 8)
    assert np.allclose(lambda_coefficients(G, lambda_matrix(G, f)), f)
    with pytest.raises(ValueError):
        lambda_coefficients(G, cgauss(rng, 8, 8))
    Z = cgauss(rng, 8, 8)
    E = conditional_expectation(G, Z)
    assert np.allclose(conditional_expectation(G, E), E)
    # trace preserving against the group algebra
    for s in range(8):
        L = lambda_element(G, s)
        assert np.trace(L.conj().T @ Z) == pytest.approx(np.trace(L.conj().T @ E))


def test_lattice_function_basics():
    f = parse_lattice("1=1,-1=1")
    assert f.radius == 1 and f(1) == 1 and f(0) == 0 and f(5) == 0
    assert f.is_hermitian()
    assert LatticeFunction.from_dict(f.to_dict()).values.tolist() == f.values.tolist()
    with pytest.raises(ValueError):
        LatticeFunction(np.ones(2))


def test_torus_norm_values():
    d0 = parse_lattice("0=1")
    for p in (0.5, 1, 2, math.inf):
        assert torus_norm(d0, p) == pytest.approx(1.0)
    f = parse_lattice("1=1,-1=1")
    assert torus_norm(f, 2) == pytest.approx(math.sqrt(2), rel=1e-14)
    assert torus_norm(f, 4) == pytest.approx(6 ** 0.25, rel=1e-14)
    assert torus_norm(f, math.inf) == pytest.approx(2.0)
    assert torus_norm(LatticeFunction(np.zeros(3)), 2) == 0.0
    with pytest.raises(ValueError):
        torus_norm(f, 2, quadrature_points=10)


def test_torus_norm_p1_converges():
    # int |2 cos| dtheta / 2pi = 4 / pi
    f = parse_lattice("1=1,-1=1")
    assert torus_norm(f, 1, quadrature_points=4096) == pytest.approx(4 / math.pi, rel=1e-5)


def test_toeplitz_compression_examples():
    assert np.array_equal(toeplitz_compression(parse_lattice("0=1"), 3), np.eye(7))
    S = toeplitz_compression(parse_lattice("1=1"), 2)
    assert np.array_equal(S, np.eye(5, k=-1))
    T = toeplitz_compression(parse_lattice("1=1,-1=1"), 2)
    assert np.array_equal(T, np.eye(5, k=1) + np.eye(5, k=-1))


@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=3), st.integers(0, 12),
       st.sampled_from([1.0, 2.0, 3.0, math.inf]))
def test_compression_contraction(coeffs, M, p):
    vals = np.array(coeffs + [0] * (len(coeffs) - 1))[: 2 * len(coeffs) - 1]
    if vals.size % 2 == 0:
        vals = np.append(vals, 0)
    f = LatticeFunction(vals)
    comp = schatten_norm(toeplitz_compression(f, M), p) * (2 * M + 1) ** (0 if math.isinf(p) else -1 / p)
    # p = inf compares against a fine grid so the grid maximum is close to the supremum
    tor = torus_norm(f, p, quadrature_points=8192)
    assert comp <= (1 + 1e-9) * tor + 1e-6 * (math.isinf(p))


def test_banded_route_matches_dense(rng):
    f = LatticeFunction(np.array([0.5 - 1j, 2.0, 0.5 + 1j]))
    sv_band = compression_singular_values(f, 30)
    sv_dense = np.linalg.svd(toeplitz_compression(f, 30), compute_uv=False)
    assert np.allclose(sv_band, sv_dense, atol=1e-12)
