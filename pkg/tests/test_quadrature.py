import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import sici

from tunneltimes.closedform import delay_B, inverse_velocity, tunneling_time
from tunneltimes.errors import (
    DomainError,
    ImaginaryResidueError,
    NonConvergenceError,
)
from tunneltimes.quadrature import (
    QuadratureConfig,
    _check_real,
    oracle_delay_B,
    oracle_inverse_velocity,
    oracle_tunneling_time,
    pv_integrate,
)
from tunneltimes.scattering import Barrier
from tunneltimes.wavepacket import Packet


class TestPvIntegrate:
    def test_odd_integrand_vanishes(self):
        val = pv_integrate(lambda k: 1.0 / k + 0j, [0.0],
                           domain=(-2.0, 2.0))
        assert abs(val) < 1e-12

    def test_oscillatory_cauchy_kernel(self):
        # PV int e^{ikL}/k over [-K, K] equals 2i Si(KL); -> i pi as K grows
        L, K = 10.0, 40.0
        val = pv_integrate(lambda k: np.exp(1j * k * L) / k, [0.0],
                           domain=(-K, K), oscillation_length=L)
        expect = 2j * sici(K * L)[0]
        assert val == pytest.approx(expect, abs=1e-6)
        assert abs(val - 1j * math.pi) < 2.5 / (K * L)

    def test_smooth_gaussian(self):
        val = pv_integrate(lambda k: np.exp(-(k * k)) + 0j, [],
                           domain=(-6.0, 6.0))
        expect, _ = quad(lambda k: math.exp(-k * k), -6.0, 6.0)
        assert val.real == pytest.approx(expect, rel=1e-9)
        assert val.imag == 0.0

    def test_asymmetric_window_log_terms(self):
        # PV int 1/k over [-1, e] = 1 exactly
        val = pv_integrate(lambda k: 1.0 / k + 0j, [0.0],
                           domain=(-1.0, math.e))
        assert val.real == pytest.approx(1.0, rel=1e-9)

    def test_explicit_residues_accepted(self):
        val = pv_integrate(lambda k: 3.0 / k + 0j, [0.0], residues=[3.0],
                           domain=(-2.0, 2.0))
        assert abs(val) < 1e-12

    def test_determinism(self, barrier):
        p = Packet(0.7, 150.0)
        v1 = oracle_tunneling_time(p, barrier)
        v2 = oracle_tunneling_time(p, barrier)
        assert v1 == v2

    def test_budget_exhaustion(self):
        cfg = QuadratureConfig(max_panels=20, rel_tol=1e-9)
        with pytest.raises(NonConvergenceError):
            pv_integrate(lambda k: np.exp(40j * k) / (k * k + 1e-6), [],
                         cfg, domain=(-30.0, 30.0), oscillation_length=40.0)

    def test_config_validation(self):
        with pytest.raises(DomainError):
            QuadratureConfig(rel_tol=0.5)
        with pytest.raises(DomainError):
            QuadratureConfig(epsilon=-1.0)

    def test_realness_guard(self):
        with pytest.raises(ImaginaryResidueError):
            _check_real(1.0 + 1e-3j, "test quantity")
        assert _check_real(2.0 + 1e-12j, "test quantity") == 2.0


class TestEpsilonRegulator:
    def test_richardson_matches_subtraction(self, barrier):
        p = Packet(0.7, 150.0)
        base = QuadratureConfig()
        sub = oracle_inverse_velocity(p, barrier, base)
        vals = []
        for eps_scale in (1e-4, 1e-5):
            cfg = QuadratureConfig(epsilon=eps_scale * p.k0,
                                   max_panels=400_000)
            vals.append(oracle_inverse_velocity(p, barrier, cfg))
        e1, e2 = 1e-4 * p.k0, 1e-5 * p.k0
        extrap = (e1 * vals[1] - e2 * vals[0]) / (e1 - e2)
        assert abs(extrap - sub) <= 3.0 * base.rel_tol * abs(sub)


class TestOracles:
    def test_inverse_velocity_reference(self, barrier):
        p = Packet(1.0, 150.0)
        assert oracle_inverse_velocity(p, barrier) == pytest.approx(
            inverse_velocity(p, barrier), rel=1e-3
        )

    def test_inverse_velocity_sine_node(self, barrier):
        k0 = math.pi / 150.0
        p = Packet(k0, 150.0)
        assert oracle_inverse_velocity(p, barrier) == pytest.approx(
            1.0 / k0, rel=1e-3
        )

    def test_window_doubling_stable(self, barrier):
        p = Packet(1.0, 150.0)
        v1 = oracle_inverse_velocity(p, barrier, QuadratureConfig())
        v2 = oracle_inverse_velocity(
            p, barrier, QuadratureConfig(window_half_width=16.0))
        assert abs(v2 - v1) <= QuadratureConfig().rel_tol * abs(v1)

    def test_tunneling_time_resonance_region(self, barrier):
        from tunneltimes.phasetime import phase_time

        p = Packet(1.1, 150.0)
        gap = abs(oracle_tunneling_time(p, barrier)
                  - tunneling_time(p, barrier))
        assert gap <= 0.05 * phase_time(1.1, barrier)

    def test_tunneling_time_branch_regime(self, barrier):
        # at k0 = 0.01 the deviation from tau_ph(k0) is packet-induced; the
        # oracle reproduces the closed-form deviation within 5%
        from tunneltimes.phasetime import phase_time

        p = Packet(0.01, 150.0)
        tau = phase_time(0.01, barrier)
        dev_closed = tunneling_time(p, barrier) - tau
        dev_oracle = oracle_tunneling_time(p, barrier) - tau
        assert abs(dev_oracle - dev_closed) <= 0.05 * abs(dev_closed)

    def test_tunneling_time_free_limit(self):
        # At finite L0 the V -> 0 limit keeps a branch-point residue worth
        # rho'(0)*m/2 unless k0 L0 is a multiple of 2 pi, where the packet
        # weight is flat at k = 0; there the free traversal value is clean.
        b = Barrier(1e-12, 15.0, 1.0)
        k0 = 20.0 * math.pi / 150.0
        p = Packet(k0, 150.0)
        assert oracle_tunneling_time(p, b) == pytest.approx(
            15.0 / k0, rel=1e-3
        )

    def test_tunneling_time_exact_free(self):
        free = Barrier(0.0, 15.0, 1.0)
        p = Packet(0.7, 150.0)
        v = (1.0 / 0.7) * (1.0 - math.sin(0.7 * 150.0) / (0.7 * 150.0))
        assert oracle_tunneling_time(p, free) == pytest.approx(
            15.0 * v, rel=1e-4
        )

    def test_delay_B_reference(self, barrier):
        p = Packet(0.1, 150.0)
        assert abs(oracle_delay_B(p, barrier) - delay_B(p, barrier)) \
            <= 0.05 / 0.1**2

    def test_delay_B_free_limit(self):
        # with no barrier the parity amplitudes are exactly +-1 and the
        # integrand vanishes identically
        free = Barrier(0.0, 15.0, 1.0)
        p = Packet(0.3, 150.0)
        assert abs(oracle_delay_B(p, free)) < 1e-6

    def test_delay_B_two_pi_node(self, barrier):
        k0 = 2.0 * math.pi / 150.0
        p = Packet(k0, 150.0)
        assert abs(oracle_delay_B(p, barrier)) < 1e-4
