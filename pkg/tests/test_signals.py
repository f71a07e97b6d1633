"""Signal model tests: pulse synthesis, means, eta, channel filtering."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ddcrb as d
from ddcrb.signals import central_difference

from conftest import make_contained_train


class TestGaussianPulse:
    def test_peak_value_is_one(self):
        g, g_deriv = d.gaussian_pulse(10, 0.4, center=4.0, width2=9.0)
        assert g[10] == pytest.approx(1.0, abs=0.0)
        assert g_deriv[10] == pytest.approx(0.0, abs=0.0)

    def test_left_edge_value(self):
        g, _ = d.gaussian_pulse(500, 0.01, center=4.0, width2=9.0)
        assert g[0] == pytest.approx(np.exp(-16.0 / 9.0), rel=1e-15)
        assert g[0] == pytest.approx(0.16901, abs=5e-6)

    def test_deriv_is_analytic_gradient(self):
        g, g_deriv = d.gaussian_pulse(50, 0.1, center=2.0, width2=1.3)
        t = np.arange(51) * 0.1
        np.testing.assert_allclose(g_deriv, -2 * (t - 2.0) / 1.3 * g, rtol=1e-14)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            d.gaussian_pulse(0, 0.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            d.gaussian_pulse(4, -0.1, 1.0, 1.0)

    def test_central_difference_converges_quadratically(self):
        # halving delta must shrink the difference error by >= 3.9x
        errors = []
        for delta in (0.02, 0.01):
            n_p = int(round(8.0 / delta))
            g, g_deriv = d.gaussian_pulse(n_p, delta, center=4.0, width2=9.0)
            fd = central_difference(g, delta)
            errors.append(np.max(np.abs(fd[1:-1] - g_deriv[1:-1])))
        assert errors[0] / errors[1] >= 3.9


class TestSynthesizePulseTrain:
    def test_single_unit_pulse_reproduces_shape(self):
        g, g_deriv = d.gaussian_pulse(12, 0.25, 1.5, 0.2)
        pt = d.PulseTrain(g=g, g_deriv=g_deriv, t_p=3.0, n_pulses=1,
                          b=[1.0 + 0.0j], delta=0.25)
        sig = d.synthesize_pulse_train(pt)
        assert sig.m == 12
        np.testing.assert_array_equal(sig.samples, g[:-1].astype(complex))
        np.testing.assert_array_equal(sig.deriv, g_deriv[:-1].astype(complex))

    def test_two_nonoverlapping_pulses_magnitude(self):
        # hard-zero boundary samples so pulse supports are exactly disjoint
        g = np.array([0.0, 0.3, 1.0, 0.3, 0.0])
        g_deriv = np.array([0.0, 1.0, 0.0, -1.0, 0.0])
        pt = d.PulseTrain(g=g, g_deriv=g_deriv, t_p=2.0, n_pulses=2,
                          b=[1 + 1j, 1 + 1j], delta=0.5)
        sig = d.synthesize_pulse_train(pt)
        expected = np.concatenate([g[:4], g[:4]]) ** 2 * 2.0
        np.testing.assert_allclose(np.abs(sig.samples) ** 2, expected, atol=1e-15)

    def test_sign_flip_preserves_energy(self):
        g = np.array([0.0, 0.3, 1.0, 0.3, 0.0])
        g_deriv = np.array([0.0, 1.0, 0.0, -1.0, 0.0])
        energies = []
        for b in ([1 + 1j, 1 + 1j], [1 + 1j, -1 - 1j]):
            pt = d.PulseTrain(g=g, g_deriv=g_deriv, t_p=2.0, n_pulses=2,
                              b=b, delta=0.5)
            energies.append(np.sum(np.abs(d.synthesize_pulse_train(pt).samples) ** 2))
        assert energies[0] == pytest.approx(energies[1], rel=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(phases=st.lists(st.floats(0, 2 * np.pi), min_size=2, max_size=2))
    def test_energy_invariant_under_pulse_phase_rotation(self, phases):
        g = np.array([0.0, 0.3, 1.0, 0.3, 0.0])
        g_deriv = np.array([0.0, 1.0, 0.0, -1.0, 0.0])
        base = d.PulseTrain(g=g, g_deriv=g_deriv, t_p=2.0, n_pulses=2,
                            b=[0.7 + 0.2j, -1.1 + 0.4j], delta=0.5)
        rotated = d.PulseTrain(g=g, g_deriv=g_deriv, t_p=2.0, n_pulses=2,
                               b=base.b * np.exp(1j * np.asarray(phases)), delta=0.5)
        e0 = np.sum(np.abs(d.synthesize_pulse_train(base).samples) ** 2)
        e1 = np.sum(np.abs(d.synthesize_pulse_train(rotated).samples) ** 2)
        assert e1 == pytest.approx(e0, rel=1e-12)

    def test_pulse_train_invariants(self):
        g = np.zeros(5)
        with pytest.raises(ValueError):
            d.PulseTrain(g=g, g_deriv=g, t_p=1.0, n_pulses=2, b=[1, 1], delta=0.5)
        with pytest.raises(ValueError):
            d.PulseTrain(g=g, g_deriv=g, t_p=2.0, n_pulses=0, b=[], delta=0.5)


class TestTriangleWave:
    def test_m16_slopes(self):
        sig = d.triangle_wave(16)
        np.testing.assert_array_equal(sig.deriv.real, [1.0] * 8 + [-1.0] * 8)
        assert sig.is_real

    def test_minimal_case(self):
        sig = d.triangle_wave(2)
        np.testing.assert_array_equal(sig.deriv.real, [1.0, -1.0])

    def test_slope_energy_equals_m(self):
        sig = d.triangle_wave(16)
        assert np.sum(sig.deriv.real ** 2) == pytest.approx(16.0)

    def test_odd_m_rejected(self):
        with pytest.raises(ValueError):
            d.triangle_wave(15)


class TestMeanVector:
    def _signal(self):
        pt, _, _ = make_contained_train(n_p=8, delta=0.5, b=(1.0 + 0.5j,))
        return d.synthesize_pulse_train(pt)

    def test_zero_shift_reflected_equals_direct(self):
        sig = self._signal()
        sc = d.Scenario(tau0=0.0, f0=0.0, looks_direct=1, looks_reflected=1,
                        sigma_w2=1.0, record_length=12)
        np.testing.assert_allclose(d.mean_vector(sig, sc, "reflected"),
                                   d.mean_vector(sig, sc, "direct"), atol=0)

    def test_support_bookkeeping(self):
        sig = d.SampledSignal([1.0, 2.0], 1.0, [0.0, 0.0])
        sc = d.Scenario(tau0=3.0, f0=0.0, looks_direct=1, looks_reflected=1,
                        sigma_w2=1.0, record_length=8)
        mu = d.mean_vector(sig, sc, "reflected")
        assert np.all(mu[[0, 1, 2, 5, 6, 7]] == 0)
        assert np.all(mu[[3, 4]] != 0)

    def test_phase_factor_whole_turns(self):
        # f0=20, delta=0.01: at n=50 the phase is exp(j*2*pi*10) = 1
        sig = d.SampledSignal(np.ones(60), 0.01, np.zeros(60))
        sc = d.Scenario(tau0=0.0, f0=20.0, looks_direct=1, looks_reflected=1,
                        sigma_w2=1.0, record_length=60)
        mu = d.mean_vector(sig, sc, "reflected")
        assert mu[50] == pytest.approx(1.0 + 0.0j, abs=1e-12)

    def test_record_too_short(self):
        sig = d.SampledSignal([1.0, 2.0], 1.0, [0.0, 0.0])
        sc = d.Scenario(tau0=3.0, f0=0.0, looks_direct=1, looks_reflected=1,
                        sigma_w2=1.0, record_length=4)
        with pytest.raises(ValueError, match="record"):
            d.mean_vector(sig, sc, "reflected")

    def test_off_grid_delay_rejected(self):
        sig = d.SampledSignal([1.0, 2.0], 1.0, [0.0, 0.0])
        sc = d.Scenario(tau0=0.5, f0=0.0, looks_direct=1, looks_reflected=1,
                        sigma_w2=1.0, record_length=8)
        with pytest.raises(ValueError, match="integer"):
            d.mean_vector(sig, sc, "reflected")

    @settings(max_examples=30, deadline=None)
    @given(n0=st.integers(0, 6), f0=st.floats(-3, 3))
    def test_reflected_support_property(self, n0, f0):
        sig = self._signal()
        sc = d.Scenario(tau0=n0 * sig.delta, f0=f0, looks_direct=1,
                        looks_reflected=1, sigma_w2=1.0,
                        record_length=n0 + sig.m + 3)
        mu = d.mean_vector(sig, sc, "reflected")
        mask = np.zeros(sc.record_length, dtype=bool)
        mask[n0:n0 + sig.m] = True
        assert np.all(mu[~mask] == 0)


class TestEta:
    def test_real_signal_zero(self):
        sig = d.triangle_wave(16)
        assert d.eta(sig, 0.7) == 0.0

    def test_proportional_parts_zero(self):
        rng = np.random.default_rng(3)
        base = rng.standard_normal(20)
        dbase = rng.standard_normal(20)
        sig = d.SampledSignal(base * (1 + 2.5j), 0.1, dbase * (1 + 2.5j))
        assert d.eta(sig, 0.3) == pytest.approx(0.0, abs=1e-12)

    def test_linear_phase_signal(self):
        # s = g * exp(j*beta*t) with real g gives eta = -beta * sum t g^2
        beta = 1.0
        g, g_deriv = d.gaussian_pulse(200, 0.05, center=5.0, width2=2.0)
        t = np.arange(201) * 0.05
        samples = g * np.exp(1j * beta * t)
        deriv = (g_deriv + 1j * beta * g) * np.exp(1j * beta * t)
        sig = d.SampledSignal(samples, 0.05, deriv)
        expected = -beta * np.sum(t * g ** 2)
        assert d.eta(sig, 0.0) == pytest.approx(expected, rel=1e-12)


class TestConvolveChannel:
    def test_identity_filter(self):
        sig = d.triangle_wave(8)
        out = d.convolve_channel(sig, [1.0])
        np.testing.assert_allclose(out.samples, sig.samples)

    def test_unit_delay(self):
        sig = d.SampledSignal([1.0, 2.0, 3.0], 1.0, [0.0, 0.0, 0.0])
        out = d.convolve_channel(sig, [0.0, 1.0])
        np.testing.assert_allclose(out.samples, [0.0, 1.0, 2.0, 3.0])

    def test_two_tap_average_of_impulse(self):
        sig = d.SampledSignal([1.0], 1.0, [0.0])
        out = d.convolve_channel(sig, [0.5, 0.5])
        np.testing.assert_allclose(out.samples, [0.5, 0.5])
        assert out.deriv_method is d.DerivMethod.CENTRAL_DIFFERENCE

    def test_empty_filter_rejected(self):
        with pytest.raises(ValueError):
            d.convolve_channel(d.triangle_wave(4), [])

    def test_filtered_signal_feeds_bound_pipeline(self):
        # known-multipath case: convolve with the channel, then reuse every
        # bound on the filtered waveform
        pt, _, _ = make_contained_train(n_p=20, delta=0.2, b=(1.0 - 0.3j,))
        sig = d.convolve_channel(d.synthesize_pulse_train(pt),
                                 [0.8, 0.0, 0.3 - 0.2j])
        sc = d.Scenario(tau0=0.4, f0=0.5, looks_direct=2, looks_reflected=1,
                        sigma_w2=0.5)
        known = d.jcrb_known(sig, sc)
        unknown = d.jcrb_unknown(sig, sc)
        assert 0 < known.tau0 < unknown.tau0
        assert unknown.tau0 == pytest.approx(1.5 * known.tau0, rel=1e-12)
