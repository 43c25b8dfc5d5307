import math

import numpy as np
import pytest

from multrans.experiments import (
    bht_lower, cz_lower, cz_symbol, lifted_bht_symbol, log_fit, resolve_transfer_symbol, szego,
    transfer_check, trunc_growth, truncation_ratio,
)
from multrans.groups import LatticeFunction, make_cyclic
from multrans.multipliers import SchurMap, slice_middle
from multrans.normest import EstimatorConfig, brute_force_norm
from multrans.symbols import SymbolTensor, mollified_H

FAST = EstimatorConfig(restarts=4)


def test_log_fit_recovers_exact_line():
    xs = [2, 4, 8, 16]
    a, b, res = log_fit(xs, [1 + 0.5 * math.log(x) for x in xs])
    assert (a, b) == (pytest.approx(1), pytest.approx(0.5)) and res < 1e-12


def test_truncation_ratio_small_cases():
    assert truncation_ratio(1) == pytest.approx(1.0)
    # [[0, 1], [1, 1]] has eigenvalues (1 +- sqrt 5)/2
    assert truncation_ratio(2) == pytest.approx(math.sqrt(5) / 2)
    out = trunc_growth([4, 8, 16])
    assert out["increasing"] and len(out["rows"]) == 3
    with pytest.raises(ValueError):
        trunc_growth([1, 4])


def test_lifted_bht_symbol_by_differences():
    H = mollified_H()
    sym = lifted_bht_symbol(2)
    pts = list(range(-2, 3))
    for x0, x1, x2 in [(-2, 0, 2), (1, -1, 0), (0, 0, 0), (2, -2, 1)]:
        idx = tuple(pts.index(v) for v in (x0, x1, x2))
        assert sym.values[idx] == pytest.approx(H(x0 - x1, x1 - x2), abs=1e-12)


def test_bht_lower_small_window_matches_oracle():
    rep = bht_lower([1], 2, 2, FAST)
    row = rep["rows"][0]
    assert row["chain_gap"] < 1e-12
    psi = slice_middle(lifted_bht_symbol(1), 0)
    oracle = brute_force_norm(SchurMap(psi), [1], 1).value
    assert abs(row["linear_estimate"] - oracle) <= 0.01 * oracle
    assert row["bilinear_objective"] >= 1.0


def test_bht_lower_rejects_bad_exponents():
    with pytest.raises(ValueError):
        bht_lower([1], 2, 3)
    with pytest.raises(ValueError):
        bht_lower([1], 1, math.inf)


def test_cz_small_cases():
    sym, dev = cz_symbol(1)
    assert np.allclose(sym, [[0.5, 0], [1, 0.5]]) and dev < 1e-12
    rep = cz_lower([1, 2], config=FAST)
    for row in rep["rows"]:
        oracle = brute_force_norm(_cz_map(row["N"]), [1], 1).value
        assert abs(row["estimate"] - oracle) <= 0.01 * oracle


def _cz_map(N):
    return SchurMap(SymbolTensor(cz_symbol(N)[0].astype(np.complex128)))


def test_szego_rows():
    rep = szego(LatticeFunction.from_terms({1: 1, -1: 1}), [2, math.inf], [5, 50])
    assert len(rep["rows"]) == 4
    assert all(r["gap"] >= -1e-12 for r in rep["rows"])
    assert set(rep["gap_eventually_decreasing"]) == {"2", "inf"}


def test_transfer_symbol_sources(rng):
    G = make_cyclic(3)
    assert resolve_transfer_symbol("ones", G, 2, rng).values.shape == (3, 3)
    assert resolve_transfer_symbol("1,2i,-1", G, 1, rng).values[1] == 2j
    with pytest.raises(ValueError):
        resolve_transfer_symbol("1,2", G, 1, rng)


def test_transfer_check_batch():
    rep = transfer_check("cyclic:3", 2, "random", [2, 2], 1, FAST, batch=2)
    assert len(rep["reports"]) == 2 and rep["violations"] == 0 and rep["max_lift_gap"] < 1e-9
    with pytest.raises(ValueError):
        transfer_check("cyclic:3", 2, "random", [2], 1, FAST)
