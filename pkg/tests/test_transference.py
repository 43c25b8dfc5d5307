import math

import numpy as np
import pytest

from multrans.groups import LatticeFunction, lambda_element, make_cyclic, make_dihedral, direct_product
from multrans.linalg import normalized_norm, schatten_norm
from multrans.multipliers import FourierMap
from multrans.normest import EstimatorConfig
from multrans.symbols import SymbolTensor
from multrans.transference import (
    ContractionError, check_intertwining, folner_scan, gap_eventually_decreasing, intertwiner_pi,
    intertwiner_unitary, transfer_inequality_check,
)

from helpers import cgauss

GROUPS = [make_cyclic(1), make_cyclic(2), make_cyclic(5), make_dihedral(3),
          direct_product(make_cyclic(2), make_cyclic(3))]


def _unit(d, a, b):
    E = np.zeros((d, d), dtype=np.complex128)
    E[a, b] = 1
    return E


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_intertwiner_is_unitary_homomorphism(G, rng):
    d = G.order
    U = intertwiner_unitary(G)
    assert np.allclose(U @ U.conj().T, np.eye(d * d))
    assert np.allclose(intertwiner_pi(G, np.eye(d)), np.eye(d * d))
    x, y = cgauss(rng, d, d), cgauss(rng, d, d)
    assert np.allclose(intertwiner_pi(G, x @ y), intertwiner_pi(G, x) @ intertwiner_pi(G, y))
    assert np.allclose(intertwiner_pi(G, x.conj().T), intertwiner_pi(G, x).conj().T)


@pytest.mark.parametrize("G", GROUPS[1:], ids=lambda G: G.name)
def test_matrix_units_map_to_translations(G):
    d = G.order
    for s in range(d):
        for t in range(d):
            q = G.mul(s, G.inv(t))
            expected = np.kron(_unit(d, s, t), lambda_element(G, q))
            assert np.allclose(intertwiner_pi(G, _unit(d, s, t)), expected)


@pytest.mark.parametrize("p", [1, 2, 4, math.inf])
def test_pi_is_isometric(p, rng):
    G = make_dihedral(3)
    x = cgauss(rng, 6, 6)
    assert normalized_norm(intertwiner_pi(G, x), p, 6) == pytest.approx(schatten_norm(x, p), rel=1e-10)


def test_intertwining_constant_symbol(rng):
    G = make_cyclic(3)
    batches = [tuple(cgauss(rng, 3, 3) for _ in range(2)) for _ in range(3)]
    rep = check_intertwining(G, SymbolTensor.constant(1.0, 2, 3), batches)
    assert rep.identity_ok and rep.inputs_tested == 3


def test_intertwining_matrix_unit_example():
    G = make_cyclic(3)
    phi = SymbolTensor(np.arange(9, dtype=float).reshape(3, 3) + 1)
    F = FourierMap(phi, G, 3)
    lhs = F(intertwiner_pi(G, _unit(3, 0, 1)), intertwiner_pi(G, _unit(3, 1, 2)))
    # (0 - 1, 1 - 2) = (2, 2) mod 3
    assert np.allclose(lhs, phi.values[2, 2] * intertwiner_pi(G, _unit(3, 0, 2)))
    assert check_intertwining(G, phi, [(_unit(3, 0, 1), _unit(3, 1, 2))]).max_residual < 1e-12


@pytest.mark.parametrize("G", [make_cyclic(4), make_dihedral(3)], ids=lambda G: G.name)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_intertwining_random(G, n, rng):
    d = G.order
    if d ** (n + 1) > 2000:
        pytest.skip("lifted symbol too large for a unit test")
    phi = SymbolTensor(cgauss(rng, *(d,) * n))
    batches = [tuple(cgauss(rng, d, d) for _ in range(n)) for _ in range(4)]
    rep = check_intertwining(G, phi, batches)
    assert rep.identity_ok, rep.max_residual
    with pytest.raises(ValueError):
        check_intertwining(G, phi, [tuple(cgauss(rng, d, d) for _ in range(n + 1))])


def test_transfer_linear_l2_is_sup_norm():
    G = make_cyclic(3)
    phi = SymbolTensor(np.array([0.5, -2.0, 1j]))
    rep = transfer_inequality_check(G, phi, [2], 2, EstimatorConfig(restarts=4))
    assert rep.est_M == pytest.approx(2.0, rel=1e-6)
    assert rep.est_T == pytest.approx(2.0, rel=1e-6)
    assert rep.lift_gap < 1e-9 and not rep.violation


def test_transfer_bilinear_random(rng):
    G = make_cyclic(4)
    phi = SymbolTensor(cgauss(rng, 4, 4))
    rep = transfer_inequality_check(G, phi, [2, 2], 1, EstimatorConfig(restarts=4))
    assert rep.lift_gap < 1e-9
    assert rep.est_T >= rep.lifted_objective - 1e-12
    assert not rep.violation
    assert rep.to_dict()["group"] == G.name


def test_folner_delta_zero():
    f = LatticeFunction.from_terms({0: 1})
    for p in (1, 2, math.inf):
        rows = folner_scan(f, p, [0, 3, 10])
        assert all(r.compression == pytest.approx(1.0) and abs(r.gap) < 1e-12 for r in rows)


def test_folner_shift_sum_closed_forms():
    f = LatticeFunction.from_terms({1: 1, -1: 1})
    Ms = [1, 5, 20, 100]
    for r in folner_scan(f, 2, Ms):
        assert r.torus == pytest.approx(math.sqrt(2))
        assert r.compression ** 2 == pytest.approx(2 * 2 * r.M / (2 * r.M + 1))
    for r in folner_scan(f, math.inf, Ms):
        assert r.torus == pytest.approx(2.0)
        assert r.compression == pytest.approx(2 * math.cos(math.pi / (2 * r.M + 2)))
    rows = folner_scan(f, 2, Ms)
    assert gap_eventually_decreasing(rows)


def test_folner_rejects_bad_input(monkeypatch):
    f = LatticeFunction.from_terms({1: 1, -1: 1})
    with pytest.raises(ValueError):
        folner_scan(f, 0.5, [3])
    import multrans.transference as tr
    monkeypatch.setattr(tr, "torus_norm", lambda *a, **k: 0.5)
    with pytest.raises(ContractionError):
        tr.folner_scan(f, 2, [3])
    assert len(tr.folner_scan(f, 2, [3], strict=False)) == 1
