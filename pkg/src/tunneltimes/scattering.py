"""Square-barrier scattering amplitudes on the real axis and in the complex plane.

Natural units with hbar = 1 throughout the package. The potential is V on
|x| <= a/2 and zero outside. The decay constant inside the barrier is

    kappa = sqrt(2 m V - k**2),

taken positive real below the barrier top and +i*sqrt(k**2 - 2 m V) above it,
so sinh(kappa*a) continues smoothly into i*sin(|kappa|*a).

The parity amplitudes are

    F+-(k) = exp(-i k a) * [(1 +- e)k - i(1 -+ e)kappa] / [(1 +- e)k + i(1 -+ e)kappa],

with e = exp(-kappa*a). They are unimodular for real k, obey
F+-(-k) = conj(F+-(k)), and recombine into the reflection and transmission
coefficients through R = (F+ + F-) e^{ika}/2 and T = (F+ - F-) e^{ika}/2.
Although kappa itself has branch points at k**2 = 2 m V, the amplitudes are
even in kappa and therefore single-valued in k; any square-root branch gives
the same F+-.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleProximityError, RegimeViolationError
from .special import cosh_w, sinhc_w

# Relative threshold below which an amplitude denominator counts as a pole hit.
POLE_RTOL = 1e-14


@dataclass(frozen=True)
class Barrier:
    """Square barrier of height V and width a for a particle of mass m.

    Attributes
    ----------
    height : float
        Barrier height V >= 0 (energy, natural units).
    width : float
        Barrier width a >= 0.
    mass : float
        Particle mass m > 0.
    """

    height: float
    width: float
    mass: float = 1.0

    def __post_init__(self):
        if self.height < 0.0:
            raise DomainError(f"barrier height must be >= 0, got {self.height}")
        if self.width < 0.0:
            raise DomainError(f"barrier width must be >= 0, got {self.width}")
        if self.mass <= 0.0:
            raise DomainError(f"mass must be > 0, got {self.mass}")

    @property
    def l0_sq(self) -> float:
        """2 m V, the squared wavenumber scale of the barrier top."""
        return 2.0 * self.mass * self.height

    @property
    def kappa0(self) -> float:
        """sqrt(2 m V), the k -> 0 limit of kappa."""
        return math.sqrt(self.l0_sq)

    @classmethod
    def from_two_mv(cls, two_mv: float, width: float, mass: float = 1.0) -> "Barrier":
        """Build a barrier specified by 2 m V (the common figure convention)."""
        return cls(height=two_mv / (2.0 * mass), width=width, mass=mass)


@dataclass(frozen=True)
class ScatteringData:
    """Amplitudes and phases at a single wavenumber.

    theta_plus / theta_minus / theta are principal-value phases for real k and
    NaN for complex k; continuously unwrapped phases along a sweep come from
    :func:`phase_sweep`.
    """

    k: complex
    F_plus: complex
    F_minus: complex
    R: complex
    T: complex
    theta_plus: float
    theta_minus: float
    theta: float


def kappa(k, barrier: Barrier):
    """Interior decay constant sqrt(2 m V - k**2) on the continuation branch.

    Real positive below the barrier top, +i*sqrt(k**2 - 2 m V) above it, and
    the principal square root for complex k. Total on the complex plane.
    """
    k = np.asarray(k)
    out = np.sqrt((barrier.l0_sq - k * k).astype(complex))
    return complex(out) if out.ndim == 0 else out


def _raw_amplitudes(k, barrier: Barrier):
    """Vectorized F+, F-, R, T. k may be real or complex, scalar or array.

    Uses the half-width forms (numerator and denominator of the plain
    exponential expression scaled by e^{kappa a/2}, and by kappa for the odd
    channel): they are even in kappa, so no branch choice enters, and they
    stay regular at the barrier top where the raw expression degrades to 0/0.
    """
    k = np.asarray(k, dtype=complex)
    a = barrier.width
    u = barrier.l0_sq - k * k            # kappa^2
    w_half = u * a * a / 4.0             # (kappa a / 2)^2
    c = cosh_w(w_half)
    s = sinhc_w(w_half)
    ks = u * (a / 2.0) * s               # kappa * sinh(kappa a / 2)
    phase = np.exp(-1j * k * a)

    num_p = k * c - 1j * ks
    den_p = k * c + 1j * ks
    num_m = k * (a / 2.0) * s - 1j * c
    den_m = k * (a / 2.0) * s + 1j * c

    for num, den in ((num_p, den_p), (num_m, den_m)):
        bad = np.abs(den) < POLE_RTOL * np.abs(num)
        if np.any(bad):
            k_bad = np.atleast_1d(k)[np.atleast_1d(bad)][0]
            raise PoleProximityError(
                f"amplitude evaluated at or near a pole, k = {k_bad}"
            )

    F_p = phase * num_p / den_p
    F_m = phase * num_m / den_m
    R = (F_p + F_m) / (2.0 * phase)
    T = (F_p - F_m) / (2.0 * phase)
    return F_p, F_m, R, T


def amplitudes(k, barrier: Barrier) -> ScatteringData:
    """Evaluate F+-, R, T at one wavenumber.

    For real k the returned phases are principal values of arg F+- and arg T;
    use :func:`phase_sweep` when a continuously unwrapped phase is needed.

    Raises
    ------
    PoleProximityError
        If the relative magnitude of an amplitude denominator falls below
        1e-14, i.e. k sits on a resonance pole in the complex plane.
    """
    F_p, F_m, R, T = _raw_amplitudes(k, barrier)
    kc = complex(k)
    if kc.imag == 0.0:
        th_p = float(np.angle(F_p))
        th_m = float(np.angle(F_m))
        th = float(np.angle(T)) if T != 0 else math.nan
    else:
        th_p = th_m = th = math.nan
    return ScatteringData(
        k=kc,
        F_plus=complex(F_p),
        F_minus=complex(F_m),
        R=complex(R),
        T=complex(T),
        theta_plus=th_p,
        theta_minus=th_m,
        theta=th,
    )


def amplitude_grid(k, barrier: Barrier):
    """Array version of :func:`amplitudes`: returns (F+, F-, R, T) arrays."""
    return _raw_amplitudes(k, barrier)


def phase_sweep(k_grid, barrier: Barrier):
    """Continuously unwrapped phases theta+, theta-, theta along a k sweep.

    The sweep must be strictly increasing and strictly positive. Phases are
    anchored at theta+-(0+) = pi, consistent with F+-(0) = -1, and then
    accumulated through principal-value increments arg(F[i+1]/F[i]). The
    transmission phase is anchored through

        theta = pi/2 + (theta+ + theta-)/2 + k a,

    which fixes its branch at the first grid point, and accumulated the same
    way. The grid must be dense enough that no single step advances any phase
    by more than pi.

    Returns
    -------
    (theta_plus, theta_minus, theta) : arrays over k_grid
    """
    k_grid = np.asarray(k_grid, dtype=float)
    if k_grid.ndim != 1 or len(k_grid) < 2:
        raise DomainError("phase sweep needs a 1-D grid with at least 2 points")
    if k_grid[0] <= 0.0 or np.any(np.diff(k_grid) <= 0.0):
        raise DomainError("phase sweep grid must be strictly increasing and > 0")

    F_p, F_m, _, T = _raw_amplitudes(k_grid, barrier)

    def unwrap(vals, anchor):
        steps = np.angle(vals[1:] / vals[:-1])
        th = np.empty(len(vals))
        th[0] = anchor + float(np.angle(vals[0] / np.exp(1j * anchor)))
        th[1:] = th[0] + np.cumsum(steps)
        return th

    th_p = unwrap(F_p, math.pi)
    th_m = unwrap(F_m, math.pi)
    anchor_T = math.pi / 2.0 + 0.5 * (th_p[0] + th_m[0]) + k_grid[0] * barrier.width
    th_T = unwrap(T, anchor_T)
    return th_p, th_m, th_T


def small_a_amplitudes(k, barrier: Barrier):
    """Thin-barrier approximations to (F+, F-), valid for sqrt(mV)*a << 1.

    F+ ~ e^{-ika} (k - i(mV - k^2/2)a) / (k + i(mV - k^2/2)a)
    F- ~ e^{-ika} (a k - 2i) / (a k + 2i)

    These keep the leading term of exp(-kappa*a) ~ 1 - kappa*a in each parity
    channel. The F+ form retains its near-origin pole at k ~ i m V a, which is
    what makes the k -> 0 and a -> 0 limits non-interchangeable, while the F-
    limits commute.

    Raises
    ------
    RegimeViolationError
        If sqrt(m V) * a >= 0.1.
    """
    m, V, a = barrier.mass, barrier.height, barrier.width
    if math.sqrt(m * V) * a >= 0.1:
        raise RegimeViolationError(
            f"sqrt(mV)*a = {math.sqrt(m * V) * a:.3g} is not << 1"
        )
    k = np.asarray(k, dtype=complex)
    phase = np.exp(-1j * k * a)
    g = (m * V - 0.5 * k * k) * a
    F_p = phase * (k - 1j * g) / (k + 1j * g)
    F_m = phase * (a * k - 2j) / (a * k + 2j)
    if F_p.ndim == 0:
        return complex(F_p), complex(F_m)
    return F_p, F_m
