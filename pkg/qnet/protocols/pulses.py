"""
Finite-bandwidth photons: fidelities averaged over the spectrum of the incoming pulse.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import fft

from qnet.conf import settings
from qnet.exceptions import InvalidParameters

logger = logging.getLogger(__name__)

NORMALIZATION_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class PulseSpec:
    """Single-photon wavepacket, either a truncated Gaussian in time or amplitudes sampled on a detuning grid.

    The truncated Gaussian is A exp(-t^2 / (4 sigma_t^2)) for |t| <= duration / 2, with A fixing the time integral of
    its squared modulus to 1. Sampled amplitudes f(delta_p) must be given on a uniform grid and satisfy
    sum |f|^2 d(delta_p) = 1.
    """

    sigma_t: float | None = None
    duration: float | None = None
    detunings: np.ndarray | None = None
    amplitudes: np.ndarray | None = None

    def __post_init__(self):
        gaussian = self.sigma_t is not None or self.duration is not None
        sampled = self.detunings is not None or self.amplitudes is not None
        if gaussian == sampled:
            raise InvalidParameters("a pulse is either a truncated Gaussian (sigma_t, duration) or sampled amplitudes")
        if gaussian:
            if self.sigma_t is None or self.duration is None or self.sigma_t <= 0 or self.duration <= 0:
                raise InvalidParameters(f"sigma_t and duration must be > 0, got {self.sigma_t} and {self.duration}")
        else:
            self._check_sampled()

    @classmethod
    def truncated_gaussian(cls, sigma_t: float, duration: float) -> PulseSpec:
        return cls(sigma_t=sigma_t, duration=duration)

    @classmethod
    def sampled(cls, detunings, amplitudes) -> PulseSpec:
        return cls(detunings=np.asarray(detunings, dtype=float), amplitudes=np.asarray(amplitudes, dtype=complex))

    def _check_sampled(self):
        if self.detunings is None or self.amplitudes is None or self.detunings.shape != self.amplitudes.shape:
            raise InvalidParameters("sampled pulses need detunings and amplitudes of the same shape")
        if self.detunings.size < 2:
            raise InvalidParameters("sampled pulses need at least 2 detunings")
        steps = np.diff(self.detunings)
        if steps[0] <= 0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise InvalidParameters("sampled pulse detunings must form an increasing uniform grid")
        norm = float(np.sum(np.abs(self.amplitudes) ** 2) * steps[0])
        if abs(norm - 1) > NORMALIZATION_ATOL:
            raise InvalidParameters(f"pulse is not normalized, sum |f|^2 d(delta_p) = {norm:.12f}")

    @property
    def is_sampled(self) -> bool:
        return self.detunings is not None

    def envelope(self) -> tuple[np.ndarray, np.ndarray]:
        """Time samples and normalized amplitudes of the truncated Gaussian"""
        if self.is_sampled:
            raise InvalidParameters("sampled pulses are only known in the frequency domain")
        n_samples = settings.QNET_PULSE_SAMPLES
        step = self.duration / n_samples  # type: ignore[operator]
        times = -self.duration / 2 + step * np.arange(n_samples + 1)  # type: ignore[operator]
        values = np.exp(-(times**2) / (4 * self.sigma_t**2))  # type: ignore[operator]
        values /= np.sqrt(np.sum(values**2) * step)
        return times, values

    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """Detunings and quadrature weights |f(delta_p)|^2 d(delta_p), which add up to 1"""
        if self.is_sampled:
            step = self.detunings[1] - self.detunings[0]  # type: ignore[index]
            weights = np.abs(self.amplitudes) ** 2 * step
            return self.detunings, weights / weights.sum()  # type: ignore[return-value]
        times, values = self.envelope()
        size = settings.QNET_PULSE_PADDING * values.size
        transform = fft.fftshift(fft.fft(values, n=size))
        detunings = 2 * np.pi * fft.fftshift(fft.fftfreq(size, d=times[1] - times[0]))
        weights = np.abs(transform) ** 2
        return detunings, weights / weights.sum()


def pulse_average(
    fidelity_fn: Callable[[float], float],
    pulse: PulseSpec,
    cache: dict[float, float] | None = None,
) -> float:
    """sum over the pulse spectrum of |f(delta_p)|^2 F(delta_p) d(delta_p).

    ``cache`` keeps F values between calls sharing the same detuning grid.
    """
    detunings, weights = pulse.spectrum()
    cache = {} if cache is None else cache
    kept = weights > settings.QNET_PULSE_WEIGHT_CUTOFF
    total = 0.0
    for delta_p, weight in zip(detunings[kept], weights[kept]):
        key = float(delta_p)
        if key not in cache:
            cache[key] = float(fidelity_fn(key))
        total += weight * cache[key]
    return float(total / weights[kept].sum())


@dataclass(frozen=True, eq=False)
class PulseScan:
    sigmas: np.ndarray
    fidelities: np.ndarray

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.fidelities))

    @property
    def best_sigma(self) -> float:
        return float(self.sigmas[self.best_index])

    @property
    def best_fidelity(self) -> float:
        return float(self.fidelities[self.best_index])


def pulse_fidelity_scan(fidelity_fn: Callable[[float], float], duration: float, sigma_grid) -> PulseScan:
    """Pulse-averaged fidelity of truncated Gaussians of fixed ``duration``, for every sigma_t of ``sigma_grid``"""
    sigmas = np.asarray(sigma_grid, dtype=float)
    if sigmas.size == 0:
        raise InvalidParameters("sigma_t grid is empty")
    cache: dict[float, float] = {}
    fidelities = np.array(
        [pulse_average(fidelity_fn, PulseSpec.truncated_gaussian(sigma, duration), cache) for sigma in sigmas]
    )
    scan = PulseScan(sigmas, fidelities)
    logger.debug(
        "Pulse scan over %d widths: best sigma_t %.4g, fidelity %.8f", sigmas.size, scan.best_sigma, scan.best_fidelity
    )
    return scan
