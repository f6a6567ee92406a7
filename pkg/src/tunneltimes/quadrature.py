"""Brute-force quadrature oracles for the defining momentum integrals.

These evaluate the packet averages behind the closed forms directly on the
real axis, with the 1/k singularity handled as a principal value, so they are
independent of any residue bookkeeping. Two PV prescriptions are available:

* analytic subtraction (default, epsilon = 0): the residue c of each declared
  simple pole is estimated from a symmetric limit, c/(k - p) is subtracted
  over the whole window, the smooth remainder is integrated adaptively, and
  the exact PV integral of the subtracted term, c * ln((b-p)/(p-a)), is added
  back;
* explicit regulator (epsilon > 0): each 1/(k - p) is smeared into
  (k - p)/((k - p)^2 + eps^2), i.e. the average of the +-i*eps shifted poles,
  and the result converges to the PV linearly in eps, so two epsilons and a
  Richardson step reproduce the subtraction answer.

Panels never exceed half an oscillation period pi/L0 of the exp(ikL0)
factors; each panel is scored by a 10- vs 20-point Gauss-Legendre pair and
bisected until the disagreement fits the local share of the error budget.
Evaluation order is fixed, so results are bit-deterministic for a given
configuration.

The truncation window is an absolute half-width around k0 (always covering a
symmetric neighborhood of 0). Keeping it fixed as L0 grows makes the window
tail fall off like 1/L0, matching the size of the residue terms the closed
forms neglect, so closed-vs-oracle gaps shrink ~ 1/L0 until physics, not
truncation, dominates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ImaginaryResidueError, NonConvergenceError
from .phasetime import phase_time_grid
from .scattering import Barrier, amplitude_grid
from .wavepacket import Packet, f_amp, f_amp_deriv, momentum_density

_X10, _W10 = np.polynomial.legendre.leggauss(10)
_X20, _W20 = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class QuadratureConfig:
    """Controls for the PV quadrature.

    epsilon = 0 selects analytic subtraction; epsilon > 0 the smeared
    regulator. window_half_width is an absolute wavenumber half-width; it is
    never allowed below 20 oscillation wavelengths (40*pi/L0).
    """

    epsilon: float = 0.0
    window_half_width: float = 8.0
    rel_tol: float = 1e-5
    max_panels: int = 100_000

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-2):
            raise DomainError(f"rel_tol must be in (0, 1e-2], got {self.rel_tol}")
        if self.epsilon < 0.0:
            raise DomainError("epsilon must be >= 0")
        if self.max_panels < 16:
            raise DomainError("max_panels too small to do anything")


DEFAULT_CONFIG = QuadratureConfig()


class _Budget:
    __slots__ = ("left",)

    def __init__(self, n: int):
        self.left = n

    def spend(self, n: int = 1):
        self.left -= n
        if self.left < 0:
            raise NonConvergenceError("panel budget exhausted before tolerance")


def _gauss_pair(f_eval, lo: float, hi: float, budget: _Budget):
    """(I10, I20, max gross |f|) Gauss-Legendre estimates of one panel."""
    budget.spend()
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    v10, _ = f_eval(mid + half * _X10)
    v20, g20 = f_eval(mid + half * _X20)
    i10 = half * np.dot(v10, _W10)
    i20 = half * np.dot(v20, _W20)
    return complex(i10), complex(i20), float(np.max(g20))


def _estimate_residue(f, pole: float, d: float) -> complex:
    """Residue of a simple pole from the symmetric limit d*(f(p+d)-f(p-d))/2."""
    vals = f(np.array([pole + d, pole - d]))
    return complex(0.5 * d * (vals[0] - vals[1]))


def pv_integrate(
    integrand,
    poles,
    config: QuadratureConfig = DEFAULT_CONFIG,
    *,
    domain: tuple[float, float],
    oscillation_length: float = 0.0,
    residues=None,
) -> complex:
    """Principal-value integral of a vectorized integrand over a window.

    Parameters
    ----------
    integrand : callable
        Maps an ndarray of real abscissas to complex values. Smooth on the
        domain except for the declared simple poles.
    poles : sequence of float
        Real locations of the simple poles. Poles outside the open domain are
        ignored.
    config : QuadratureConfig
    domain : (lo, hi)
        Integration window.
    oscillation_length : float
        Wavelength scale L of exp(ikL) content; panels are capped at half a
        period pi/L. Zero disables the cap.
    residues : sequence of complex, optional
        Analytic residues; estimated numerically when omitted.

    Raises
    ------
    NonConvergenceError
        If the panel budget is exhausted first.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not hi > lo:
        raise DomainError("empty integration domain")
    inside = [float(p) for p in poles if lo < p < hi]
    if residues is None:
        res: list[complex] = []
        for p in inside:
            gaps = [p - lo, hi - p] + [abs(p - q) for q in inside if q != p]
            if oscillation_length > 0.0:
                gaps.append(math.pi / oscillation_length)
            d = 1e-3 * min(gaps)
            res.append(_estimate_residue(integrand, p, d))
    else:
        res = [complex(residues[list(poles).index(p)]) for p in inside]

    eps = config.epsilon
    if eps > 0.0:

        def f_eval(k):
            vals = np.asarray(integrand(k), dtype=complex)
            for p in inside:
                dk = k - p
                vals = vals * dk * dk / (dk * dk + eps * eps)
            return vals, np.abs(vals)

        analytic = 0.0 + 0.0j
    else:

        def f_eval(k):
            # gross tracks the magnitudes before the pole subtraction
            # cancels them; it sets the rounding floor of the remainder.
            vals = np.asarray(integrand(k), dtype=complex)
            gross = np.abs(vals)
            for p, c in zip(inside, res):
                term = c / (k - p)
                vals = vals - term
                gross = gross + np.abs(term)
            return vals, gross

        analytic = sum(
            c * math.log((hi - p) / (p - lo)) for p, c in zip(inside, res)
        )

    # Breakpoints at the poles keep every Gauss node strictly off them.
    edges = sorted({lo, hi, *inside})
    cap = math.pi / oscillation_length if oscillation_length > 0.0 else math.inf
    panels: list[tuple[float, float]] = []
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, math.ceil((b - a) / cap)) if math.isfinite(cap) else 16
        pts = np.linspace(a, b, n + 1)
        panels.extend(zip(pts[:-1], pts[1:]))

    budget = _Budget(config.max_panels)

    # First pass in bulk to fix the error-budget scale.
    arr = np.asarray(panels)
    mids = 0.5 * (arr[:, 0] + arr[:, 1])
    halves = 0.5 * (arr[:, 1] - arr[:, 0])
    budget.spend(len(panels))
    f10, _ = f_eval((mids[:, None] + halves[:, None] * _X10))
    f20, g20 = f_eval((mids[:, None] + halves[:, None] * _X20))
    v10 = np.dot(f10.reshape(len(panels), 10), _W10) * halves
    v20 = np.dot(f20.reshape(len(panels), 20), _W20) * halves
    fmax = np.max(g20.reshape(len(panels), 20), axis=1)
    scale = float(np.sum(np.abs(v20)))
    if scale == 0.0:
        scale = 1e-300
    width_total = hi - lo
    tol_per_width = config.rel_tol * scale / width_total

    total = 0.0 + 0.0j
    work: list[tuple[float, float, complex, complex, float]] = []
    for (a, b), i10, i20, fm in zip(panels, v10, v20, fmax):
        work.append((a, b, complex(i10), complex(i20), float(fm)))
    # Depth-first, left-to-right: deterministic accumulation order.
    work.reverse()
    while work:
        a, b, i10, i20, fm = work.pop()
        # The sampled-magnitude floor is the rounding level inherent to any
        # quadrature of this panel; without it, near-singular refinement
        # chains and cancellation-noise integrands would split forever.
        floor = 1e-14 * fm * (b - a)
        if (abs(i10 - i20) <= tol_per_width * (b - a) + floor
                or (b - a) < 1e-13 * width_total):
            total += i20
            continue
        m = 0.5 * (a + b)
        l10, l20, lf = _gauss_pair(f_eval, a, m, budget)
        r10, r20, rf = _gauss_pair(f_eval, m, b, budget)
        work.append((m, b, r10, r20, rf))
        work.append((a, m, l10, l20, lf))

    return total + analytic


def _check_real(value: complex, what: str, abs_floor: float = 1e-10) -> float:
    """Return the real part, rejecting any imaginary part above noise.

    The absolute floor covers results that are themselves zero up to rounding
    (sine nodes, free limits), where a relative test is meaningless.
    """
    if abs(value.imag) > 1e-8 * abs(value.real) and abs(value.imag) > abs_floor:
        raise ImaginaryResidueError(
            f"{what} came out complex: {value!r} (|imag| > 1e-8 |real|)"
        )
    return value.real


def _window(packet: Packet, config: QuadratureConfig) -> float:
    return max(config.window_half_width, 40.0 * math.pi / packet.L0)


def oracle_inverse_velocity(
    packet: Packet, barrier: Barrier, config: QuadratureConfig = DEFAULT_CONFIG
) -> float:
    """Direct PV evaluation of the packet-averaged inverse group velocity."""
    k0, m = packet.k0, barrier.mass
    w = _window(packet, config)

    def g(k):
        return (m / (2.0 * math.pi)) * momentum_density(k - k0, packet) / k + 0j

    val = pv_integrate(
        g, [0.0], config, domain=(-(k0 + w), k0 + w),
        oscillation_length=packet.L0,
    )
    return _check_real(val, "inverse-velocity oracle")


def oracle_tunneling_time(
    packet: Packet, barrier: Barrier, config: QuadratureConfig = DEFAULT_CONFIG
) -> float:
    """Direct PV evaluation of the packet-averaged phase time."""
    k0 = packet.k0
    w = _window(packet, config)

    def g(k):
        return (momentum_density(k - k0, packet) / (2.0 * math.pi)
                * phase_time_grid(k, barrier)) + 0j

    val = pv_integrate(
        g, [0.0], config, domain=(-(k0 + w), k0 + w),
        oscillation_length=packet.L0,
    )
    return _check_real(val, "tunneling-time oracle")


def oracle_delay_A(
    packet: Packet, barrier: Barrier, config: QuadratureConfig = DEFAULT_CONFIG
) -> float:
    """Inside-the-barrier delay: averaged phase time minus a * v_inv."""
    return oracle_tunneling_time(packet, barrier, config) - barrier.width * (
        oracle_inverse_velocity(packet, barrier, config)
    )


def oracle_delay_B(
    packet: Packet, barrier: Barrier, config: QuadratureConfig = DEFAULT_CONFIG
) -> float:
    """Direct PV evaluation of the oscillatory outside-the-barrier delay."""
    k0, m, a = packet.k0, barrier.mass, barrier.width
    if barrier.height * barrier.width == 0.0:
        # F+ + F- vanishes identically with no barrier; numerically the
        # integrand would be pure amplified rounding noise.
        return 0.0
    w = _window(packet, config)

    def g(k):
        F_p, F_m, _, _ = amplitude_grid(k, barrier)
        bracket = (f_amp(k - k0, packet, a) * f_amp_deriv(k + k0, packet, a)
                   - f_amp(k + k0, packet, a) * f_amp_deriv(k - k0, packet, a))
        return (0.5j / (2.0 * math.pi)) * (m / k) * (F_p + F_m) * bracket

    val = pv_integrate(
        g, [0.0], config, domain=(-(k0 + w), k0 + w),
        oscillation_length=packet.L0,
    )
    return _check_real(val, "outside-delay oracle")
