import cmath
import math

import numpy as np
import pytest

from vharvest.angular import EulerAngles
from vharvest.atoms import radial_overlap
from vharvest.oracle import (negativity_bruteforce, radial_bruteforce,
                             rotation_bruteforce, run_all, sphere_quadrature,
                             time_integral_bruteforce)


def test_run_all_passes():
    reports = run_all()
    assert all(r.passed for r in reports)
    assert len(reports) >= 4
    for r in reports:
        assert r.passed == (r.rel_err <= r.tol)
        assert r.evaluations > 0


def test_mutation_is_detected():
    for name in ("harvesting.EM_LOCAL_COEFF", "atoms.RADIAL_OVERLAP_L0_COEFF"):
        reports = run_all(mutate=name)
        assert any(not r.passed for r in reports), name
    # the constant is restored afterwards
    assert all(r.passed for r in run_all())


def test_unknown_mutation_rejected():
    with pytest.raises(ValueError):
        run_all(mutate="not.a.constant")


def test_time_bruteforce_k0_elementary():
    # separable Gaussian product at k = 0
    oa, ob, t_a, t_b, T = 1.3, 1.3, 0.0, 1.0, 1.0
    val, err, _ = time_integral_bruteforce(oa, ob, 0.0, t_a, t_b, T)
    want = math.pi * T * T * math.exp(-0.25 * T * T * (oa * oa + ob * ob)) \
        * cmath.exp(1j * (oa * t_a + ob * t_b))
    assert abs(val - want) <= 1e-9 * abs(want)
    assert err <= 1e-8 * abs(want)


def test_time_bruteforce_translation_invariant_magnitude():
    v0, _, _ = time_integral_bruteforce(1.0, 1.0, 1.0, 0.0, 1.0, 1.0)
    vs, _, _ = time_integral_bruteforce(1.0, 1.0, 1.0, 4.0, 5.0, 1.0)
    assert abs(vs) == pytest.approx(abs(v0), rel=1e-8)


def test_time_bruteforce_cropped_switchings():
    # the chi overrides exist for the crop comparison; the cropped value at
    # moderate frequencies is indistinguishable from the full one
    T = 1.0
    sigma = T / math.sqrt(2.0)

    def chi_crop(center):
        def chi(t):
            base = np.exp(-((t - center) / T) ** 2)
            return np.where(np.abs(t - center) > 8.0 * sigma, 0.0, base)
        return chi

    full, _, _ = time_integral_bruteforce(1.0, 1.0, 0.7, 0.0, 1.0, T)
    crop, _, _ = time_integral_bruteforce(1.0, 1.0, 0.7, 0.0, 1.0, T,
                                          chi_a=chi_crop(0.0), chi_b=chi_crop(1.0))
    assert abs(full - crop) <= 1e-12 * abs(full)


def test_sphere_quadrature_normalization():
    assert sphere_quadrature([(2, 1, True), (2, 1)]).real == pytest.approx(
        1.0, rel=1e-12)


def test_sphere_quadrature_selection_rule():
    assert abs(sphere_quadrature([(1, 1), (2, 0), (3, 0)])) <= 1e-14


def test_radial_bruteforce_k0():
    val, err, _ = radial_bruteforce(0, 0.0, 0.7)
    assert val == pytest.approx(128.0 * math.sqrt(6.0) / 243.0 * 0.7, rel=1e-11)
    val2, _, _ = radial_bruteforce(2, 0.0, 0.7)
    assert abs(val2) <= 1e-14 * 0.7


def test_radial_bruteforce_matches_closed_moderate():
    a0 = 0.7
    for ak in (0.5, 10.0):
        for l in (0, 2):
            closed = radial_overlap(l, ak / a0, a0)
            brute, err, _ = radial_bruteforce(l, ak / a0, a0)
            assert abs(closed - brute) <= max(1e-10 * abs(closed), 10 * err)


def test_radial_bruteforce_ray_path():
    # a0*k > 20 goes through the rotated-ray evaluation
    a0 = 0.7
    for ak in (60.0, 400.0):
        for l in (0, 2):
            closed = radial_overlap(l, ak / a0, a0)
            brute, err, _ = radial_bruteforce(l, ak / a0, a0)
            assert abs(closed - brute) <= max(1e-10 * abs(closed), 10 * err)
            # the ray evaluation resolves these far below the real-axis floor
            assert abs(closed - brute) <= 1e-10 * abs(closed)


def test_rotation_bruteforce_identity():
    got = rotation_bruteforce(2, 1, EulerAngles(), 0.7, 1.1)
    from vharvest.angular import sph_harm_y
    assert got == pytest.approx(sph_harm_y(2, 1, 0.7, 1.1), rel=1e-14)


def test_negativity_bruteforce_known_value():
    # symmetric case: N = |M| - L when positive
    assert negativity_bruteforce(0.3, 0.3, 0.0, 0.5) == pytest.approx(0.2, abs=1e-14)
    assert negativity_bruteforce(0.5, 0.5, 0.0, 0.1) == pytest.approx(0.0, abs=1e-14)


def test_reports_have_stable_names():
    names = [r.name for r in run_all()]
    assert len(set(names)) == len(names)
    assert "time_kernel_closed_vs_2d" in names
    assert "momentum_kernels_vs_reduction" in names
