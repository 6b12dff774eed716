import numpy as np
import pytest

from qnet.exceptions import InvalidParameters
from qnet.protocols import PulseSpec, pulse_average, pulse_fidelity_scan


def lorentzian(delta_p):
    return 1 / (1 + delta_p**2)


class TestPulseSpec:
    def test_spectrum_is_normalized_and_centered(self):
        detunings, weights = PulseSpec.truncated_gaussian(1.0, 20.0).spectrum()
        assert weights.sum() == pytest.approx(1.0)
        assert np.sum(weights * detunings) == pytest.approx(0.0, abs=1e-6)

    def test_spectral_width(self):
        # |f(t)|^2 has standard deviation sigma_t, so <delta_p^2> = 1 / (4 sigma_t^2)
        sigma_t = 2.0
        detunings, weights = PulseSpec.truncated_gaussian(sigma_t, 20 * sigma_t).spectrum()
        assert np.sum(weights * detunings**2) == pytest.approx(1 / (4 * sigma_t**2), rel=2e-2)

    def test_envelope_is_normalized(self):
        times, values = PulseSpec.truncated_gaussian(1.0, 8.0).envelope()
        assert np.sum(values**2) * (times[1] - times[0]) == pytest.approx(1.0)
        assert times[0] == pytest.approx(-4.0)
        assert times[-1] == pytest.approx(4.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {},
            {"sigma_t": 1.0},
            {"sigma_t": -1.0, "duration": 4.0},
            {"sigma_t": 1.0, "duration": 4.0, "detunings": np.array([0.0, 1.0])},
        ],
    )
    def test_invalid_gaussian(self, kwargs):
        with pytest.raises(InvalidParameters):
            PulseSpec(**kwargs)

    @pytest.mark.parametrize(
        ("detunings", "amplitudes"),
        [
            ([-1.0, 0.0, 1.0], [0.0, 0.5, 0.0]),
            ([-1.0, 0.0, 2.0], [0.0, 1.0, 0.0]),
            ([0.0], [1.0]),
            ([0.0, 1.0], [1.0]),
        ],
    )
    def test_invalid_sampled(self, detunings, amplitudes):
        with pytest.raises(InvalidParameters):
            PulseSpec.sampled(detunings, amplitudes)

    def test_sampled_pulse_has_no_envelope(self):
        pulse = PulseSpec.sampled([-1.0, 0.0, 1.0], [0.0, 1.0, 0.0])
        with pytest.raises(InvalidParameters):
            pulse.envelope()


class TestPulseAverage:
    def test_constant_fidelity(self):
        assert pulse_average(lambda delta_p: 0.7, PulseSpec.truncated_gaussian(1.0, 10.0)) == pytest.approx(0.7)

    def test_monochromatic_pulse(self):
        pulse = PulseSpec.sampled([-1.0, 0.0, 1.0], [0.0, 1.0, 0.0])
        assert pulse_average(lorentzian, pulse) == pytest.approx(1.0)

    def test_sampled_gaussian(self):
        detunings = np.linspace(-10, 10, 2001)
        amplitudes = np.exp(-(detunings**2) / 2)
        amplitudes /= np.sqrt(np.sum(amplitudes**2) * (detunings[1] - detunings[0]))
        pulse = PulseSpec.sampled(detunings, amplitudes)
        # |f|^2 is a Gaussian of variance 1/2
        assert pulse_average(lambda delta_p: delta_p**2, pulse) == pytest.approx(0.5, rel=1e-6)

    def test_cache_is_reused(self):
        calls = []

        def fidelity(delta_p):
            calls.append(delta_p)
            return lorentzian(delta_p)

        pulse = PulseSpec.truncated_gaussian(1.0, 10.0)
        cache: dict = {}
        first = pulse_average(fidelity, pulse, cache)
        n_calls = len(calls)
        assert pulse_average(fidelity, pulse, cache) == first
        assert len(calls) == n_calls
        assert len(cache) == n_calls


class TestPulseScan:
    def test_interior_optimum(self):
        # Short pulses are spectrally broad, long ones are cut by the window into a near-rectangular shape
        scan = pulse_fidelity_scan(lorentzian, 40.0, [0.5, 5.0, 500.0])
        assert scan.best_index == 1
        assert scan.best_sigma == 5.0
        assert scan.best_fidelity == pytest.approx(0.99, abs=2e-3)

    def test_empty_grid(self):
        with pytest.raises(InvalidParameters):
            pulse_fidelity_scan(lorentzian, 40.0, [])
