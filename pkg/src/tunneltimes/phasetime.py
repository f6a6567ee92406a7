"""Phase time of the square barrier: closed form and finite-difference route.

The closed form is

    tau_ph(k) = (m/k) * [ l0^4 sinh(2 kappa a) + 2 a kappa k^2 (kappa^2 - k^2) ]
                / [ kappa * ( l0^4 sinh^2(kappa a) + 4 kappa^2 k^2 ) ],

with kappa = sqrt(2mV - k^2) and l0^2 = 2mV. Numerator and denominator share
an overall factor kappa^2 that cancels analytically; evaluated naively the
expression is 0/0 at the barrier top. Using u = kappa^2 = 2mV - k^2 (real for
real k, either sign) it reduces to the manifestly regular, even-in-kappa form

    tau_ph(k) = (m/k) * [ 8 a^3 l0^4 Psi(4 a^2 u) + 2 a (u + 3 k^2) ]
                / [ l0^4 a^2 Sc(a^2 u)^2 + 4 k^2 ],

where Sc(w) = sinh(sqrt(w))/sqrt(w) and Psi(w) = (Sc(w) - 1)/w. This is what
the complex-kappa evaluation produces once the imaginary parts cancel, so no
separate trig form is needed above the barrier and the value is real by
construction.

The independent route differentiates the unwrapped transmission phase:
tau_ph = (m/k) dtheta/dk, computed by Richardson-extrapolated central
differences of principal-value phase increments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .scattering import Barrier, _raw_amplitudes
from .special import psi_w, sinhc_w


@dataclass(frozen=True)
class PhaseTimeSample:
    """Phase time at one wavenumber plus the k -> 0 edge coefficient."""

    k: float
    tau_ph: float
    k_tau_at_zero: float


def phase_time_grid(k, barrier: Barrier):
    """Vectorized closed-form phase time; defined for any real k != 0.

    Odd in k: tau_ph(-k) = -tau_ph(k).
    """
    k = np.asarray(k, dtype=float)
    if np.any(k == 0.0):
        raise DomainError("phase time is singular at k = 0")
    m, a = barrier.mass, barrier.width
    l0_sq = barrier.l0_sq
    u = l0_sq - k * k
    num = 8.0 * a**3 * l0_sq**2 * psi_w(4.0 * a * a * u) + 2.0 * a * (u + 3.0 * k * k)
    s = sinhc_w(a * a * u)
    den = l0_sq**2 * a * a * s * s + 4.0 * k * k
    return (m / k) * num / den


def phase_time(k: float, barrier: Barrier) -> float:
    """Closed-form phase time tau_ph(k) for k > 0.

    Raises DomainError for k <= 0 or for a zero-area barrier (V*a = 0), where
    the k -> 0 normalization below loses its meaning.
    """
    if k <= 0.0:
        raise DomainError(f"phase time needs k > 0, got {k}")
    if barrier.height * barrier.width == 0.0:
        # Free limit: the transmission phase is exactly k*a.
        return barrier.mass * barrier.width / k
    return float(phase_time_grid(k, barrier))


def k_tau_limit(barrier: Barrier) -> float:
    """The finite limit [k * tau_ph(k)] at k = 0.

    Equals (m/kappa0) sinh(2 kappa0 a)/sinh^2(kappa0 a) = 2m/(kappa0 tanh(kappa0 a))
    with kappa0 = sqrt(2mV). Requires V*a > 0.
    """
    if barrier.height * barrier.width == 0.0:
        raise DomainError("k*tau limit needs a barrier with V*a > 0")
    k0 = barrier.kappa0
    return 2.0 * barrier.mass / (k0 * math.tanh(k0 * barrier.width))


def phase_time_sample(k: float, barrier: Barrier) -> PhaseTimeSample:
    return PhaseTimeSample(k=k, tau_ph=phase_time(k, barrier),
                           k_tau_at_zero=k_tau_limit(barrier))


def transmission_phase_slope(k: float, barrier: Barrier, h: float | None = None) -> float:
    """dtheta/dk of the transmission phase by Richardson central differences.

    Phase increments are taken as principal values of arg(T(k+h)/T(k-h)), so
    no global unwrapping is required as long as h * dtheta/dk < pi.
    """
    if k <= 0.0:
        raise DomainError(f"needs k > 0, got {k}")
    if h is None:
        # Deep tunneling makes T the difference of two nearly equal unimodular
        # amplitudes, so its phase carries noise ~ eps/|T|; the step must grow
        # accordingly or the central difference drowns in that noise.
        (_, _, _, t0) = _raw_amplitudes(k, barrier)
        noise = 2.2e-16 / max(float(np.abs(t0)), 1e-12)
        h = max(1e-6, 1e-8 / k, noise ** (1.0 / 3.0))
    h = min(h, 0.49 * k)

    def central(step):
        (_, _, _, t_hi) = _raw_amplitudes(k + step, barrier)
        (_, _, _, t_lo) = _raw_amplitudes(k - step, barrier)
        return float(np.angle(t_hi / t_lo)) / (2.0 * step)

    d1 = central(h)
    d2 = central(h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def phase_time_fd(k: float, barrier: Barrier, h: float | None = None) -> float:
    """Phase time from the numerically differentiated transmission phase."""
    return (barrier.mass / k) * transmission_phase_slope(k, barrier, h)
