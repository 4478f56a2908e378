import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vharvest.specfun import (DampedKernelSpec, QuadratureConvergenceError,
                              QuadratureResult, erfc_complex, faddeeva_w,
                              integrate_damped, scaled_time_kernel,
                              spherical_bessel_j)

SQRT2 = math.sqrt(2.0)


# ----------------------------------------------------------------------------
# independent references (series / continued fraction / asymptotics)
# ----------------------------------------------------------------------------

def erfc_series(z: complex) -> complex:
    # Maclaurin series of erf; good to ~1e-15 for |z| <= 2.5
    term = z
    acc = z
    zz = z * z
    for n in range(1, 120):
        term *= -zz / n
        acc += term / (2 * n + 1)
    return 1.0 - 2.0 / math.sqrt(math.pi) * acc


def erfc_cf(z: complex) -> complex:
    # Laplace continued fraction, Re z > 0
    cf = 0.0 + 0.0j
    for n in range(90, 0, -1):
        cf = (0.5 * n) / (z + cf)
    return cmath.exp(-z * z) / math.sqrt(math.pi) / (z + cf)


def test_faddeeva_at_zero():
    assert faddeeva_w(0.0) == pytest.approx(1.0, abs=1e-15)


def test_faddeeva_at_i():
    # w(i) = e * erfc(1), erfc(1) from the independent series
    ref = math.e * erfc_series(1.0 + 0.0j).real
    assert ref == pytest.approx(0.4275836, abs=1e-7)
    assert faddeeva_w(1j).real == pytest.approx(ref, rel=1e-12)
    assert abs(faddeeva_w(1j).imag) < 1e-15


def faddeeva_cf(z: complex, depth: int = 40) -> complex:
    # Laplace continued fraction for w, accurate for large |z| in the upper
    # half plane: w(z) = (i/sqrt(pi)) / (z - (1/2)/(z - 1/(z - (3/2)/(...))))
    cf = 0.0 + 0.0j
    for n in range(depth, 0, -1):
        cf = (0.5 * n) / (z - cf)
    return 1j / math.sqrt(math.pi) / (z - cf)


def test_faddeeva_asymptotic_large_real():
    # leading asymptotic w(x) ~ i/(sqrt(pi) x), cross-checked against the
    # continued fraction
    x = 1e6
    lead = 1j / (math.sqrt(math.pi) * x)
    w = faddeeva_w(x + 0.0j)
    assert abs(w - lead) <= 1e-9 * abs(lead)
    assert w == pytest.approx(faddeeva_cf(x + 0.0j), rel=1e-13)


def test_faddeeva_lower_half_plane_reflection():
    z = 1.3 - 0.8j
    ref = 2.0 * cmath.exp(-z * z) - faddeeva_w(-z)
    assert faddeeva_w(z) == pytest.approx(ref, rel=1e-13)


def test_faddeeva_lower_half_overflow_raises():
    with pytest.raises(OverflowError):
        faddeeva_w(0.0 - 40.0j)  # exp(-z^2) = exp(1600)


def test_erfc_trivial_and_series():
    assert erfc_complex(0.0) == pytest.approx(1.0, abs=1e-15)
    ref = erfc_series(1.0 + 0j).real
    assert ref == pytest.approx(0.15729920705, abs=1e-11)
    assert erfc_complex(1.0) == pytest.approx(ref, rel=1e-12)


def test_erfc_reflection_spot():
    z = 0.3 + 0.7j
    assert erfc_complex(-z) == pytest.approx(2.0 - erfc_complex(z), rel=1e-13)


def test_erfc_against_continued_fraction():
    for z in (2.8 + 0.4j, 4.0 - 3.0j, 6.0 + 5.0j):
        assert erfc_complex(z) == pytest.approx(erfc_cf(z), rel=1e-12)


def test_erfc_reflection_random(rng):
    # invariant: erfc(z) + erfc(-z) = 2, 1000 samples in |z| <= 20
    for _ in range(1000):
        z = complex(*rng.uniform(-1, 1, 2)) * rng.uniform(0, 20)
        if abs(z.imag) > abs(z.real) and abs(z) > 24:
            continue  # value not representable in doubles
        try:
            s = erfc_complex(z) + erfc_complex(-z)
        except OverflowError:
            continue
        scale = max(1.0, abs(erfc_complex(z)))
        assert abs(s - 2.0) <= 1e-13 * scale


@settings(max_examples=200, deadline=None)
@given(st.complex_numbers(max_magnitude=8.0, allow_nan=False, allow_infinity=False))
def test_erfc_conjugation(z):
    assert erfc_complex(z.conjugate()) == pytest.approx(
        erfc_complex(z).conjugate(), rel=1e-13, abs=1e-300)


# ----------------------------------------------------------------------------
# fused time kernel
# ----------------------------------------------------------------------------

def naive_bracket(k, t_ba, T, omega):
    def E(t):
        return cmath.exp(1j * k * t) * erfc_complex(
            complex(t, T * T * k) / (SQRT2 * T))
    return math.exp(-0.5 * T * T * (omega * omega + k * k)) * (E(t_ba) + E(-t_ba))


def test_kernel_tba_zero_real_part():
    # erfc of a purely imaginary argument has real part 1, so before damping
    # Re[E+E] = 2 independent of k
    for k in (0.3, 1.0, 4.0):
        val = scaled_time_kernel(k, 0.0, 1.0, 0.0)
        assert val.real == pytest.approx(2.0 * math.exp(-0.5 * k * k), rel=1e-13)
        bare = val * math.exp(0.5 * k * k)
        assert bare.real == pytest.approx(2.0, rel=1e-12)


def test_kernel_matches_naive_path():
    # Tk = 5, t_ba/T = 3: still representable directly
    got = scaled_time_kernel(5.0, 3.0, 1.0, 0.7)
    ref = naive_bracket(5.0, 3.0, 1.0, 0.7)
    assert got == pytest.approx(ref, rel=1e-11)


def test_kernel_finite_where_naive_overflows():
    # naive erfc((i T^2 k + t)/(sqrt2 T)) overflows past Tk ~ 38
    with pytest.raises(OverflowError):
        naive_bracket(200.0, 10.0, 1.0, 0.0)
    val = scaled_time_kernel(200.0, 10.0, 1.0, 0.0)
    assert np.isfinite(val.real) and np.isfinite(val.imag)
    assert abs(val) < 1.0


def test_kernel_even_in_tba(rng):
    for _ in range(50):
        k = rng.uniform(0, 30)
        t = rng.uniform(0, 12)
        T = rng.uniform(0.5, 2.0)
        a = scaled_time_kernel(k, t, T, 0.3)
        b = scaled_time_kernel(k, -t, T, 0.3)
        assert a == pytest.approx(b, rel=1e-14)


def test_kernel_fused_equals_unfused_where_representable(rng):
    for _ in range(200):
        k = rng.uniform(0, 25)
        t = rng.uniform(0, 8)
        T = rng.uniform(0.5, 1.5)
        if T * k > 36:
            continue
        got = scaled_time_kernel(k, t, T, 1.0)
        ref = naive_bracket(k, t, T, 1.0)
        if ref != 0:
            assert abs(got - ref) <= 1e-10 * abs(ref)


def test_kernel_rejects_bad_width():
    with pytest.raises(ValueError):
        scaled_time_kernel(1.0, 0.0, -1.0, 0.0)


# ----------------------------------------------------------------------------
# spherical Bessel functions
# ----------------------------------------------------------------------------

def bessel_series_ref(l, x, terms=60):
    dfact = 1.0
    for i in range(1, 2 * l + 2, 2):
        dfact *= i
    acc = 0.0
    term = 1.0
    acc = term
    for m in range(1, terms):
        term *= -0.5 * x * x / (m * (2 * l + 2 * m + 1))
        acc += term
    return x ** l / dfact * acc


def test_bessel_limits():
    assert spherical_bessel_j(0, 0.0) == 1.0
    assert spherical_bessel_j(2, 0.0) == 0.0
    assert spherical_bessel_j(0, math.pi) == pytest.approx(0.0, abs=1e-16)


def test_bessel_j2_series_value():
    ref = bessel_series_ref(2, 1.0)
    assert ref == pytest.approx(0.0620350520, abs=1e-9)
    assert spherical_bessel_j(2, 1.0) == pytest.approx(ref, rel=1e-13)


def bessel_recurrence_ref(l, x):
    # upward recurrence from sin/cos seeds; stable for l < x
    j0 = math.sin(x) / x
    if l == 0:
        return j0
    j1 = math.sin(x) / (x * x) - math.cos(x) / x
    for ll in range(1, l):
        j0, j1 = j1, (2 * ll + 1) / x * j1 - j0
    return j1


def test_bessel_against_series_and_recurrence(rng):
    # references independent of the implementation's series/trig split:
    # the Maclaurin series where it is well conditioned, upward recurrence
    # from the sin/cos seeds where it is stable
    for _ in range(300):
        l = int(rng.integers(0, 5))
        x = rng.uniform(0.0, 6.0)
        ref = bessel_series_ref(l, x, terms=80)
        assert spherical_bessel_j(l, x) == pytest.approx(ref, rel=6e-13, abs=1e-250)
    for _ in range(300):
        l = int(rng.integers(0, 5))
        x = rng.uniform(6.0, 200.0)
        ref = bessel_recurrence_ref(l, x)
        assert spherical_bessel_j(l, x) == pytest.approx(ref, rel=1e-11, abs=1e-18)


def test_bessel_recurrence(rng):
    xs = np.geomspace(0.1, 100.0, 500)
    for l in (1, 2, 3):
        lhs = spherical_bessel_j(l - 1, xs) + spherical_bessel_j(l + 1, xs)
        rhs = (2 * l + 1) / xs * spherical_bessel_j(l, xs)
        scale = np.maximum(np.abs(lhs), np.abs(rhs))
        scale = np.maximum(scale, np.abs(spherical_bessel_j(l, xs)))
        assert np.max(np.abs(lhs - rhs) / scale) < 1e-11


def test_bessel_domain_errors():
    with pytest.raises(ValueError):
        spherical_bessel_j(5, 1.0)
    with pytest.raises(ValueError):
        spherical_bessel_j(1, -0.5)


# ----------------------------------------------------------------------------
# quadrature
# ----------------------------------------------------------------------------

def test_integrate_gaussian_moment():
    spec = DampedKernelSpec(1.0, (), lambda k: np.exp(-k * k))
    res = integrate_damped(spec)
    assert abs(res.value - math.sqrt(math.pi) / 2.0) <= 1e-12
    assert res.abs_error_estimate >= 0
    assert res.evaluations > 0


def test_integrate_k3_gaussian():
    spec = DampedKernelSpec(1.0, (), lambda k: k ** 3 * np.exp(-k * k))
    res = integrate_damped(spec)
    assert res.value == pytest.approx(0.5, abs=1e-13)


def romberg_reference(f, a, b, n_levels=20):
    # fixed-step Romberg with 2^20 intervals at the base level
    n = 2 ** n_levels
    xs = np.linspace(a, b, n + 1)
    fx = f(xs)
    rows = []
    h = (b - a)
    # trapezoid sums at successively halved steps via subsampling
    for lev in range(10):
        step = 2 ** (n_levels - 9 + lev)  # coarse -> fine
        sub = fx[::2 ** (9 - lev)]
        hh = (b - a) / (len(sub) - 1)
        rows.append(hh * (sub.sum() - 0.5 * (sub[0] + sub[-1])))
    # Richardson
    table = [rows]
    for m in range(1, len(rows)):
        prev = table[-1]
        table.append([(4 ** m * prev[i + 1] - prev[i]) / (4 ** m - 1)
                      for i in range(len(prev) - 1)])
    return table[-1][0]


def test_integrate_oscillatory_vs_romberg():
    f = lambda k: np.exp(-k * k) * spherical_bessel_j(0, 10.0 * k)
    spec = DampedKernelSpec(1.0, (2 * math.pi / 10.0,), f)
    res = integrate_damped(spec)
    ref = romberg_reference(f, 0.0, 30.0)
    assert abs(res.value - ref) <= 1e-10


def test_integrate_linearity():
    f1 = lambda k: np.exp(-0.8 * k * k)
    f2 = lambda k: k ** 2 * np.exp(-0.8 * k * k) * np.cos(4.0 * k)
    mk = lambda f: DampedKernelSpec(0.8, (2 * math.pi / 4.0,), f)
    a, b = 1.7, -2.4
    lhs = integrate_damped(mk(lambda k: a * f1(k) + b * f2(k))).value
    rhs = a * integrate_damped(mk(f1)).value + b * integrate_damped(mk(f2)).value
    assert abs(lhs - rhs) <= 1e-12


def test_quadrature_result_validation():
    with pytest.raises(ValueError):
        QuadratureResult(value=1.0, abs_error_estimate=-1.0, evaluations=10)
    with pytest.raises(ValueError):
        QuadratureResult(value=1.0, abs_error_estimate=0.0, evaluations=0)


def test_kernel_spec_validation():
    with pytest.raises(ValueError):
        DampedKernelSpec(-1.0, (), lambda k: k)
    with pytest.raises(ValueError):
        DampedKernelSpec(1.0, (0.0,), lambda k: k)


def test_nonconvergence_carries_best_estimate():
    # a discontinuous comb the panel scheme cannot resolve to 1e-10
    rough = lambda k: np.exp(-k * k) * np.sign(np.sin(1000.0 * k) + 0.1)
    spec = DampedKernelSpec(1.0, (), rough)
    with pytest.raises(QuadratureConvergenceError) as err:
        integrate_damped(spec, rtol=1e-12, atol=1e-300, max_panels=64)
    assert isinstance(err.value.result, QuadratureResult)
    assert err.value.result.abs_error_estimate > 0
