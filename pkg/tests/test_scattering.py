import cmath
import math

import numpy as np
import pytest

from tunneltimes.errors import DomainError, PoleProximityError, RegimeViolationError
from tunneltimes.scattering import (
    Barrier,
    amplitude_grid,
    amplitudes,
    kappa,
    phase_sweep,
    small_a_amplitudes,
)


class TestBarrier:
    def test_l0_sq(self, barrier):
        assert barrier.l0_sq == pytest.approx(1.0)
        assert barrier.kappa0 == pytest.approx(1.0)

    def test_from_two_mv(self):
        b = Barrier.from_two_mv(4.0, 2.0, mass=2.0)
        assert b.height == pytest.approx(1.0)
        assert b.l0_sq == pytest.approx(4.0)

    @pytest.mark.parametrize("kwargs", [
        dict(height=-1.0, width=1.0),
        dict(height=1.0, width=-1.0),
        dict(height=1.0, width=1.0, mass=0.0),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            Barrier(**kwargs)


class TestKappa:
    def test_at_zero(self, barrier):
        assert kappa(0.0, barrier) == pytest.approx(1.0)

    def test_branch_point(self, barrier):
        assert abs(kappa(1.0, barrier)) == pytest.approx(0.0, abs=1e-15)

    def test_above_top(self, barrier):
        # i*sqrt(1.2^2 - 1) = i*sqrt(0.44), checked by independent arithmetic
        expect = 1j * math.sqrt(0.44)
        assert kappa(1.2, barrier) == pytest.approx(expect, abs=1e-15)

    def test_continuation_into_sine(self, barrier):
        # sinh(kappa*a) continues to i*sin(|kappa|*a) above the top
        k = 1.2
        kap = kappa(k, barrier)
        assert cmath.sinh(kap * barrier.width) == pytest.approx(
            1j * math.sin(math.sqrt(0.44) * barrier.width), abs=1e-12
        )


class TestAmplitudes:
    def test_total_reflection_at_zero(self, barrier):
        s = amplitudes(1e-9, barrier)
        assert abs(s.F_plus + 1.0) < 1e-6
        assert abs(s.F_minus + 1.0) < 1e-6
        assert abs(s.R + 1.0) < 1e-6
        assert abs(s.T) < 1e-6

    def test_free_amplitudes(self):
        free = Barrier(0.0, 15.0, 1.0)
        s = amplitudes(0.7, free)
        assert s.F_plus == pytest.approx(1.0, abs=1e-14)
        assert s.F_minus == pytest.approx(-1.0, abs=1e-14)
        assert s.R == pytest.approx(0.0, abs=1e-14)
        # T is the coefficient of e^{ik(x-a)}, so free transmission carries
        # the traversal phase e^{ika}; its modulus is 1.
        assert abs(s.T) == pytest.approx(1.0, abs=1e-14)
        assert s.T == pytest.approx(cmath.exp(1j * 0.7 * 15.0), abs=1e-13)

    def test_unit_modulus_single(self, barrier):
        s = amplitudes(0.7, barrier)
        assert abs(abs(s.F_plus) - 1.0) < 1e-12
        assert abs(abs(s.F_minus) - 1.0) < 1e-12

    def test_grid_invariants(self, barrier):
        k = np.linspace(-10.0, 10.0, 2001)
        k = k[k != 0.0]
        F_p, F_m, R, T = amplitude_grid(k, barrier)
        assert np.max(np.abs(np.abs(F_p) - 1.0)) < 1e-12
        assert np.max(np.abs(np.abs(F_m) - 1.0)) < 1e-12
        assert np.max(np.abs(np.abs(R) ** 2 + np.abs(T) ** 2 - 1.0)) < 1e-12
        F_p2, F_m2, _, _ = amplitude_grid(-k, barrier)
        assert np.max(np.abs(F_p2 - np.conj(F_p))) < 1e-12
        assert np.max(np.abs(F_m2 - np.conj(F_m))) < 1e-12

    def test_grid_invariants_random_barriers(self, rng):
        # unimodularity and unitarity are convention-independent; they must
        # survive arbitrary (V, a, m), not just the reference barrier
        k = np.linspace(0.02, 6.0, 400)
        for _ in range(25):
            b = Barrier(float(rng.uniform(0.0, 3.0)),
                        float(rng.uniform(0.0, 8.0)),
                        float(rng.uniform(0.3, 3.0)))
            F_p, F_m, R, T = amplitude_grid(k, b)
            assert np.max(np.abs(np.abs(F_p) - 1.0)) < 1e-11
            assert np.max(np.abs(np.abs(F_m) - 1.0)) < 1e-11
            assert np.max(np.abs(np.abs(R) ** 2 + np.abs(T) ** 2 - 1.0)) < 1e-11

    def test_complex_k_has_nan_phases(self, barrier):
        s = amplitudes(1.0 + 0.2j, barrier)
        assert math.isnan(s.theta_plus)
        assert math.isnan(s.theta)

    def test_pole_proximity_raises(self, barrier):
        from tunneltimes.resonances import find_poles

        pole = find_poles(barrier, (0.9, 1.2, -0.1, 0.0))[0]
        with pytest.raises(PoleProximityError):
            amplitudes(pole.k_pole, barrier)


class TestPhaseSweep:
    def test_anchors_at_pi(self, barrier):
        ks = np.linspace(1e-6, 0.01, 50)
        th_p, th_m, _ = phase_sweep(ks, barrier)
        # theta_pm(0+) = pi; at the first grid point the phase has moved by
        # at most |theta'| * k with |theta'| < 20 for this barrier
        assert th_p[0] == pytest.approx(math.pi, abs=20.0 * ks[0])
        assert th_m[0] == pytest.approx(math.pi, abs=20.0 * ks[0])

    def test_transmission_identity(self, barrier):
        # theta = pi/2 + (theta+ + theta-)/2 + k a, exactly along the sweep
        ks = np.linspace(0.01, 3.0, 4000)
        th_p, th_m, th = phase_sweep(ks, barrier)
        ident = math.pi / 2.0 + 0.5 * (th_p + th_m) + ks * barrier.width
        # deep tunneling leaves |T| ~ 3e-7, so its phase carries ~eps/|T| noise
        assert np.max(np.abs(th - ident)) < 1e-7

    def test_no_jumps(self, barrier):
        ks = np.linspace(0.01, 3.0, 4000)
        _, _, th = phase_sweep(ks, barrier)
        assert np.max(np.abs(np.diff(th))) < 1.0

    def test_rejects_bad_grid(self, barrier):
        with pytest.raises(DomainError):
            phase_sweep(np.array([-1.0, 1.0]), barrier)
        with pytest.raises(DomainError):
            phase_sweep(np.array([0.5]), barrier)


class TestSmallA:
    def test_gate(self, barrier):
        with pytest.raises(RegimeViolationError):
            small_a_amplitudes(0.5, barrier)  # sqrt(mV)*a ~ 10.6

    def test_limit_a_first(self):
        # a -> 0 at fixed k > 0: F+ -> +1
        b = Barrier(0.5, 1e-7, 1.0)
        F_p, _ = small_a_amplitudes(0.5, b)
        assert F_p == pytest.approx(1.0, abs=1e-6)

    def test_limit_k_first(self):
        # k -> 0 at fixed a with a m V >> k: F+ -> -1
        b = Barrier(0.5, 0.01, 1.0)
        F_p, _ = small_a_amplitudes(1e-9, b)
        assert F_p == pytest.approx(-1.0, abs=1e-6)

    def test_f_minus_limits_interchange(self):
        F_m_small_k = small_a_amplitudes(1e-6, Barrier(0.5, 0.01, 1.0))[1]
        F_m_small_a = small_a_amplitudes(1e-6, Barrier(0.5, 1e-6, 1.0))[1]
        assert F_m_small_k == pytest.approx(-1.0, abs=1e-3)
        assert F_m_small_a == pytest.approx(-1.0, abs=1e-3)

    def test_matches_exact_in_regime(self):
        # sqrt(mV)*a = 0.01
        v = 0.5
        a = 0.01 / math.sqrt(v)
        b = Barrier(v, a, 1.0)
        ks = np.linspace(0.001, 1.0, 200)
        F_p_apx, F_m_apx = small_a_amplitudes(ks, b)
        F_p, F_m, _, _ = amplitude_grid(ks, b)
        assert np.max(np.abs(F_p - F_p_apx)) < 1e-3
        assert np.max(np.abs(F_m - F_m_apx)) < 1e-3
