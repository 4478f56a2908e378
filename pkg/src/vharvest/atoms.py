"""Hydrogenlike orbital data: radial wavefunctions, smearing functions,
Gaussian switching and closed-form radial overlap integrals.

Natural units with c = 1 throughout; a0 is the generalized Bohr radius and
the energy gap Omega is an inverse length.  Only the levels that enter the
harvesting calculation are supported: 1s, 2s and 2p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .angular import EulerAngles, rotate_harmonic, sph_harm_y
from .specfun import spherical_bessel_j

__all__ = [
    "AtomSpec",
    "TransitionSpec",
    "SwitchingKind",
    "radial_R",
    "smearing_vector",
    "smearing_scalar",
    "switching",
    "radial_overlap",
    "wavefunction_overlap_log10",
    "RADIAL_OVERLAP_L0_COEFF",
    "RADIAL_OVERLAP_L2_COEFF",
]

# closed forms of integral_0^inf r^3 R21 R10 j_l(kr) dr, u = (a0 k)^2:
#   l=0: c0 * a0 * (9 - 4u) / (4u + 9)^4      c0 = 384 sqrt(6)
#   l=2: c2 * a0 * u / (4u + 9)^4             c2 = 3072 sqrt(6)
RADIAL_OVERLAP_L0_COEFF = 384.0 * math.sqrt(6.0)
RADIAL_OVERLAP_L2_COEFF = 3072.0 * math.sqrt(6.0)


@dataclass(frozen=True)
class TransitionSpec:
    """Ground/excited level pair as (n, l, m) triples."""

    ground: tuple[int, int, int] = (1, 0, 0)
    excited: tuple[int, int, int] = (2, 1, 0)

    def __post_init__(self):
        if self.ground != (1, 0, 0):
            raise ValueError("only the 1s ground state is supported")
        if self.excited not in ((2, 1, 0), (2, 0, 0)):
            raise ValueError("excited state must be 2p_z or 2s")

    @classmethod
    def em_dipole(cls) -> "TransitionSpec":
        return cls(excited=(2, 1, 0))

    @classmethod
    def scalar(cls) -> "TransitionSpec":
        return cls(excited=(2, 0, 0))

    @property
    def is_dipole_allowed(self) -> bool:
        return abs(self.excited[1] - self.ground[1]) == 1


@dataclass(frozen=True)
class SwitchingKind:
    variant: str = "gaussian"
    crop_sigmas: float = 8.0

    def __post_init__(self):
        if self.variant not in ("gaussian", "cropped_gaussian"):
            raise ValueError(f"unknown switching variant {self.variant!r}")
        if not (self.crop_sigmas > 0):
            raise ValueError("crop_sigmas must be positive")


@dataclass(frozen=True)
class AtomSpec:
    """One static hydrogenlike atom with a Gaussian interaction window."""

    a0: float
    omega: float
    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    switching_center: float = 0.0
    switching_width: float = 1.0  # T of exp(-(t - t0)^2 / T^2); sigma = T/sqrt(2)
    orientation: EulerAngles = field(default_factory=EulerAngles)

    def __post_init__(self):
        if not (self.a0 > 0):
            raise ValueError("a0 must be positive")
        if not (self.omega > 0):
            raise ValueError("omega must be positive")
        if not (self.switching_width > 0):
            raise ValueError("switching_width must be positive")

    @property
    def sigma(self) -> float:
        return self.switching_width / math.sqrt(2.0)


def radial_R(n: int, l: int, r, a0: float):
    """Hydrogenlike radial wavefunction R_nl(r) for (1,0), (2,0), (2,1)."""
    if not (a0 > 0):
        raise ValueError("a0 must be positive")
    rr = np.asarray(r, dtype=float)
    rho = rr / a0
    scale = a0 ** -1.5
    if (n, l) == (1, 0):
        out = 2.0 * scale * np.exp(-rho)
    elif (n, l) == (2, 0):
        out = scale / (2.0 * math.sqrt(2.0)) * (2.0 - rho) * np.exp(-0.5 * rho)
    elif (n, l) == (2, 1):
        out = scale / math.sqrt(24.0) * rho * np.exp(-0.5 * rho)
    else:
        raise ValueError(f"unsupported radial level (n={n}, l={l})")
    if np.isscalar(r) or np.asarray(r).ndim == 0:
        return float(out)
    return out


def _direction_angles(x: np.ndarray) -> tuple[float, float]:
    return math.atan2(math.hypot(x[0], x[1]), x[2]), math.atan2(x[1], x[0])


def smearing_vector(atom: AtomSpec, x,
                    transition: TransitionSpec | None = None) -> np.ndarray:
    """Spatial smearing vector F(x) = psi_e*(x) x psi_g(x) of the dipole
    coupling, with the atom's 2p_z orbital expressed in the base frame via
    its Euler orientation.

    For the identity orientation this is the closed form
    cos(th)/(4 pi a0^4 sqrt(2)) e^{-3r/2a0} r^2 (sin th cos ph, sin th sin ph, cos th).
    """
    transition = transition or TransitionSpec.em_dipole()
    if not transition.is_dipole_allowed:
        raise ValueError("smearing_vector requires the dipole-allowed 1s->2p transition")
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise ValueError("x must be a 3-vector")
    r = float(np.linalg.norm(x))
    if r == 0.0:
        return np.zeros(3, dtype=complex)
    theta, phi = _direction_angles(x)
    n_e, l_e, m_e = atom.orientation, 1, 0
    if n_e.is_identity:
        y_e = sph_harm_y(l_e, m_e, theta, phi)
    else:
        y_e = rotate_harmonic(l_e, m_e, atom.orientation, theta, phi)
    radial = radial_R(2, 1, r, atom.a0) * radial_R(1, 0, r, atom.a0)
    return np.conj(y_e) * radial / math.sqrt(4.0 * math.pi) * x.astype(complex)


def smearing_scalar(atom: AtomSpec, x) -> float:
    """Scalar smearing F(x) = psi_2s(x) psi_1s(x) for the monopole couplings:
    (4 pi a0^3 sqrt(2))^-1 e^{-3|x|/2a0} (2 - |x|/a0)."""
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x)) if x.shape == (3,) else float(abs(x))
    a0 = atom.a0
    return math.exp(-1.5 * r / a0) * (2.0 - r / a0) / (4.0 * math.pi * a0 ** 3 * math.sqrt(2.0))


def switching(kind: SwitchingKind, t, atom: AtomSpec):
    """Gaussian switching chi(t) = exp(-(t - t0)^2/T^2); the cropped variant
    is identically zero beyond crop_sigmas * T/sqrt(2) from the center."""
    tt = np.asarray(t, dtype=float)
    arg = (tt - atom.switching_center) / atom.switching_width
    out = np.exp(-arg * arg)
    if kind.variant == "cropped_gaussian":
        cut = kind.crop_sigmas * atom.sigma
        out = np.where(np.abs(tt - atom.switching_center) > cut, 0.0, out)
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return float(out)
    return out


def _radial_overlap_quadrature(l: int, k: float, a0: float) -> float:
    # direct quadrature of r^3 R21 R10 j_l(kr) on [0, 60 a0]
    from .specfun import _adaptive_gk

    def f(r):
        return r ** 3 * radial_R(2, 1, r, a0) * radial_R(1, 0, r, a0) \
            * spherical_bessel_j(l, k * r)

    hi = 60.0 * a0
    pts = {0.0, hi}
    pts.update(np.linspace(0.0, hi, 61))
    if k > 0:
        half = math.pi / k
        n = int(hi / half)
        if n > 1:
            pts.update(np.arange(1, n + 1) * half)
    val, err, _, _ = _adaptive_gk(f, np.array(sorted(p for p in pts if p <= hi)),
                                  1e-15, 1e-12)
    return float(val)


def radial_overlap(l: int, k: float, a0: float) -> float:
    """integral_0^inf r^3 R21(r) R10(r) j_l(kr) dr.

    Rational closed forms in u = (a0 k)^2 for l = 0 and 2 (the two values the
    2p_z harvesting kernels need); other l <= 4 fall back to quadrature.
    """
    if not (a0 > 0):
        raise ValueError("a0 must be positive")
    if k < 0:
        raise ValueError("k must be >= 0")
    u = (a0 * k) ** 2
    den = (4.0 * u + 9.0) ** 4
    if l == 0:
        return RADIAL_OVERLAP_L0_COEFF * a0 * (9.0 - 4.0 * u) / den
    if l == 2:
        return RADIAL_OVERLAP_L2_COEFF * a0 * u / den
    if 0 <= l <= 4:
        return _radial_overlap_quadrature(l, k, a0)
    raise ValueError("radial_overlap supports l = 0..4")


def wavefunction_overlap_log10(d: float, a0: float) -> float:
    """log10 of the two-center 1s-1s overlap <1s(0)|1s(d)>, evaluated in the
    log domain so separations of thousands of Bohr radii do not underflow.

    The closed form is exp(-rho) (1 + rho + rho^2/3) with rho = d/a0;
    normalized to 1 at zero displacement.
    """
    if d < 0:
        raise ValueError("d must be >= 0")
    if not (a0 > 0):
        raise ValueError("a0 must be positive")
    rho = d / a0
    return (-rho + math.log1p(rho * (1.0 + rho / 3.0))) / math.log(10.0)
