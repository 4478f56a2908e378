import math

import numpy as np
import pytest

from vharvest.angular import EulerAngles
from vharvest.harvesting import ModelKind
from vharvest.survey import (Axis, ScanGrid, harvestability_map,
                             model_comparison, optimal_orientations,
                             orientation_scan, orientation_score,
                             pair_from_params, run_grid, spacetime_map)

FIXED = {"a0_omega": 1e-3, "omega_T": 1.0, "d_over_T": 1.0, "tba_over_T": 1.0}


def test_axis_values_and_validation():
    ax = Axis("d_over_T", 1.0, 10.0, 4, "log")
    assert np.allclose(ax.values(), np.geomspace(1.0, 10.0, 4))
    with pytest.raises(ValueError):
        Axis("unknown", 0, 1, 5)
    with pytest.raises(ValueError):
        Axis("d_over_T", 0, 1, 1)
    with pytest.raises(ValueError):
        Axis("d_over_T", 0.0, 1.0, 5, "log")


def test_grid_validation():
    with pytest.raises(ValueError):
        ScanGrid(axes=(Axis("theta", 0, 1, 3), Axis("theta", 0, 1, 3)),
                 fixed={}, model=ModelKind.EM_DIPOLE)
    with pytest.raises(ValueError):
        ScanGrid(axes=(Axis("theta", 0, 1, 3),), fixed={"theta": 1.0},
                 model=ModelKind.EM_DIPOLE)


def test_orientation_scan_fig3_features():
    axis = Axis("theta", 0.0, 2.0 * math.pi, 25)
    res = orientation_scan(FIXED, axis)
    ns = [r.n for r in res.rows]
    # zeros at pi/2 and 3pi/2 (indices 6 and 18 of 25 points on [0, 2pi])
    assert ns[6] == 0.0
    assert ns[18] == 0.0
    assert ns[0] > 0 and ns[12] > 0
    # symmetric under theta -> 2pi - theta
    for i in range(25):
        assert ns[i] == pytest.approx(ns[24 - i], rel=1e-10, abs=1e-30)


def test_orientation_scan_distance_ordering():
    axis = Axis("theta", 0.0, math.pi, 9)
    near = orientation_scan(FIXED, axis)
    far_fixed = dict(FIXED, d_over_T=1.25, tba_over_T=1.25)
    far = orientation_scan(far_fixed, axis)
    for a, b in zip(near.rows, far.rows):
        assert b.n <= a.n + 1e-30


def test_rows_clamp_invariant():
    res = orientation_scan(FIXED, Axis("theta", 0.0, 2.0 * math.pi, 13))
    for row in res.rows:
        assert row.n == max(0.0, row.n2)


def test_grid_determinism_and_threads():
    grid = ScanGrid(axes=(Axis("omega_T", 0.8, 2.0, 3),
                          Axis("d_over_T", 0.5, 2.5, 3)),
                    fixed={"a0_omega": 1e-3, "tba_over_T": 1.0},
                    model=ModelKind.UDW_SCALAR)
    r1 = run_grid(grid, threads=1)
    r2 = run_grid(grid, threads=1)
    r4 = run_grid(grid, threads=4)
    assert r1.rows == r2.rows
    assert r1.rows == r4.rows
    assert len(r1.rows) == 9


def test_spacetime_map_symmetry_in_delay_sign():
    p_plus = pair_params = {"a0_omega": 1e-3, "omega_T": 2.0,
                            "d_over_T": 2.0, "tba_over_T": 1.5}
    p_minus = dict(pair_params, tba_over_T=-1.5)
    from vharvest.harvesting import compute_terms
    t_plus = compute_terms(pair_from_params(p_plus, ModelKind.EM_DIPOLE),
                           include_cross=False)
    t_minus = compute_terms(pair_from_params(p_minus, ModelKind.EM_DIPOLE),
                            include_cross=False)
    assert abs(t_plus.m) == pytest.approx(abs(t_minus.m), rel=1e-12)
    assert t_plus.negativity2 == pytest.approx(t_minus.negativity2, rel=1e-10)


def test_spacetime_map_metadata():
    res = spacetime_map(Axis("d_over_T", 1.0, 3.0, 3),
                        Axis("tba_over_T", 0.0, 2.0, 3), omega_T=2.0)
    assert res.metadata["sigma_over_T"] == pytest.approx(1.0 / math.sqrt(2.0))
    assert len(res.rows) == 9


def test_harvestability_map_channels():
    res = harvestability_map(Axis("omega_T", 1.0, 6.0, 3),
                             Axis("d_over_T", 0.5, 2.0, 3), tba_over_T=1.0)
    lo, hi = res.metadata["lightcone_d"]
    assert hi - lo == pytest.approx(16.0 / math.sqrt(2.0))
    for row in res.rows:
        assert row.harvestable in (True, False)
        assert row.converged


def test_model_comparison_structure():
    res = model_comparison(Axis("d_over_T", 1.0, 3.0, 3), omega_T=2.0,
                           tba_over_T=1.0)
    assert len(res.rows) == 3
    d, em, udw, dv = res.rows[0]
    assert d == 1.0
    assert em.n >= 0 and udw.n >= 0 and dv.n >= 0
    assert res.metadata["models"] == ["em", "udw", "derivative"]


# ----------------------------------------------------------------------------
# optimal orientations
# ----------------------------------------------------------------------------

def test_optimal_orientations_count():
    assert len(optimal_orientations()) == 96


def test_optimal_orientations_first_family_head():
    first = optimal_orientations()[0]
    assert first.psi == pytest.approx(math.pi / 4.0, abs=1e-12)
    assert first.theta == pytest.approx(1.2310, abs=1e-4)
    assert first.phi == pytest.approx(math.pi / 4.0, abs=1e-12)


def test_optimal_orientations_beat_identity():
    identity_score = orientation_score(EulerAngles())
    assert identity_score == pytest.approx(3.0, abs=1e-14)
    for angles in optimal_orientations():
        assert orientation_score(angles) >= identity_score
        # these families sit at the global maximum of the projection sum
        assert orientation_score(angles) == pytest.approx(5.0, abs=1e-12)


def test_pair_from_params_validation():
    with pytest.raises(ValueError):
        pair_from_params({"a0_omega": -1.0}, ModelKind.EM_DIPOLE)
