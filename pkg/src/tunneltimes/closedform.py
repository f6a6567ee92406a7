"""Closed-form time budget of a packet crossing the square barrier.

All quantities for one (barrier, packet) pair, assembled from shared
subexpressions so the two decompositions

    t_age = t0 + dtau_A + dtau_B        (free age difference + barrier delays)
    t_age = t_tunnel + t_outside        (inside / outside split)

agree to rounding. The building blocks, with x = k0 * L0:

    v_inv     = (m/k0) (1 - sin(x)/x)                     average slowness
    t0        = (L0 + a) v_inv                            no-barrier age difference
    t_tunnel  = tau_ph(k0) - sin(x)/(k0^2 L0) [k tau]_0   packet-averaged phase time
    t_outside = (m/k0) L0 (1 - sinc^2(x/2))               time spent outside
    dtau_A    = t_tunnel  - a  v_inv
    dtau_B    = t_outside - L0 v_inv

The sin(x) term of t_tunnel and the -(m/k0) L0 sinc^2(x/2) deficit of
t_outside are the continuum-edge (k = 0) contributions; they die out for
k0 L0 >> 1 and dominate for k0 L0 ~ 1, which is what makes the tunneling
time depend on the packet size near zero momentum.

The closed forms neglect residue corrections of the scattering amplitudes,
which is legitimate only when m V a L0 is large; validity_check() gates on
that product (threshold 50, making the neglected exp(-m V a L0) < 2e-22).
Outside the gate a ValidityWarning is issued but values are still returned,
so parameter sweeps toward a -> 0 stay usable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError, ValidityWarning
from .phasetime import k_tau_limit, phase_time
from .scattering import Barrier
from .wavepacket import Packet

VALIDITY_THRESHOLD = 50.0


@dataclass(frozen=True)
class TimeBudget:
    """Every closed-form time for one (k0, L0) point, natural units."""

    k0: float
    L0: float
    v_inv: float
    t0: float
    dtau_A: float
    dtau_B: float
    t_tunnel: float
    t_outside: float
    t_age: float
    bp_tunnel_term: float
    bp_outside_term: float
    validity_ratio: float
    valid: bool


def _sinc(x: float) -> float:
    return math.sin(x) / x if x != 0.0 else 1.0


def inverse_velocity(packet: Packet, barrier: Barrier) -> float:
    """Packet-averaged inverse group velocity (m/k0)(1 - sin(k0 L0)/(k0 L0))."""
    k0, L0, m = packet.k0, packet.L0, barrier.mass
    if k0 <= 0.0:
        raise DomainError(f"needs k0 > 0, got {k0}")
    return (m / k0) * (1.0 - _sinc(k0 * L0))


def t_no_barrier(packet: Packet, barrier: Barrier) -> float:
    """Age difference with no barrier: (L0 + a) * v_inv."""
    v = inverse_velocity(packet, barrier)
    return barrier.width * v + packet.L0 * v


def validity_check(packet: Packet, barrier: Barrier) -> tuple[float, bool]:
    """Gate ratio m*V*a*L0 and whether it clears the threshold (inclusive)."""
    ratio = barrier.mass * barrier.height * barrier.width * packet.L0
    return ratio, ratio >= VALIDITY_THRESHOLD


def _core_terms(packet: Packet, barrier: Barrier):
    """(v_inv, bp_tunnel, bp_outside, t_tunnel, t_outside) from shared pieces.

    With no barrier (V*a = 0) the parity amplitudes are exactly +-1, both
    delays vanish identically and the inside/outside times reduce to the free
    values a*v_inv and L0*v_inv; the barrier formulas (which assume total
    reflection at k = 0) do not apply there.
    """
    k0, L0, m = packet.k0, packet.L0, barrier.mass
    if k0 <= 0.0:
        raise DomainError(f"needs k0 > 0, got {k0}")
    x = k0 * L0
    v = (m / k0) * (1.0 - _sinc(x))
    if barrier.height * barrier.width == 0.0:
        t_tun = barrier.width * v
        t_out = L0 * v
        bp_tunnel = t_tun - phase_time(k0, barrier)
        bp_outside = t_out - (m / k0) * L0
        return v, bp_tunnel, bp_outside, t_tun, t_out
    bp_tunnel = -math.sin(x) / (k0 * k0 * L0) * k_tau_limit(barrier)
    half = _sinc(x / 2.0)
    bp_outside = -(m / k0) * L0 * half * half
    t_tun = phase_time(k0, barrier) + bp_tunnel
    t_out = (m / k0) * L0 + bp_outside
    return v, bp_tunnel, bp_outside, t_tun, t_out


def branch_point_terms(packet: Packet, barrier: Barrier) -> tuple[float, float]:
    """Continuum-edge terms: deviations of t_tunnel from tau_ph(k0) and of
    t_outside from (m/k0) L0. Both are <= 0 for k0 L0 in (0, pi)."""
    _, bp_tunnel, bp_outside, _, _ = _core_terms(packet, barrier)
    return bp_tunnel, bp_outside


def tunneling_time(packet: Packet, barrier: Barrier) -> float:
    """tau_ph(k0) plus the continuum-edge term."""
    return _core_terms(packet, barrier)[3]


def time_outside(packet: Packet, barrier: Barrier) -> float:
    """(m/k0) L0 (1 - sinc^2(k0 L0 / 2)); non-negative for all k0 > 0."""
    return _core_terms(packet, barrier)[4]


def delay_A(packet: Packet, barrier: Barrier) -> float:
    """Barrier-induced delay inside the barrier: t_tunnel - a * v_inv.

    Emits ValidityWarning when m*V*a*L0 is below the gate; the value is
    still returned.
    """
    _warn_if_invalid(packet, barrier)
    return tunneling_time(packet, barrier) - barrier.width * inverse_velocity(
        packet, barrier
    )


def delay_B(packet: Packet, barrier: Barrier) -> float:
    """Barrier-induced delay outside the barrier: t_outside - L0 * v_inv."""
    return time_outside(packet, barrier) - packet.L0 * inverse_velocity(
        packet, barrier
    )


def _warn_if_invalid(packet: Packet, barrier: Barrier) -> tuple[float, bool]:
    ratio, ok = validity_check(packet, barrier)
    # Exactly zero barrier area means the exact free reduction, not a
    # breakdown of the neglected-residue approximation; no warning there.
    if not ok and ratio > 0.0:
        warnings.warn(
            f"m*V*a*L0 = {ratio:.3g} < {VALIDITY_THRESHOLD:g}: closed forms "
            "neglect amplitude-pole residues that are not small here",
            ValidityWarning,
            stacklevel=3,
        )
    return ratio, ok


def age_difference(packet: Packet, barrier: Barrier) -> TimeBudget:
    """Full closed-form budget; asserts both decompositions by construction."""
    ratio, ok = _warn_if_invalid(packet, barrier)
    v, bp_tunnel, bp_outside, t_tun, t_out = _core_terms(packet, barrier)
    a_v = barrier.width * v
    l_v = packet.L0 * v
    return TimeBudget(
        k0=packet.k0,
        L0=packet.L0,
        v_inv=v,
        t0=a_v + l_v,
        dtau_A=t_tun - a_v,
        dtau_B=t_out - l_v,
        t_tunnel=t_tun,
        t_outside=t_out,
        t_age=t_tun + t_out,
        bp_tunnel_term=bp_tunnel,
        bp_outside_term=bp_outside,
        validity_ratio=ratio,
        valid=ok,
    )
