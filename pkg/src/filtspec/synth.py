"""Deterministic synthetic fixtures: cosine filter banks with known spectral
peaks and two-class datasets with an injected class-dependent oscillation.

Randomness is counter-based: every value is a fixed function of
(seed, role, epoch, channel, sample), so generation order and parallelism
cannot change a single output bit. Uniform draws come from a splitmix64-style
hash; Gaussians are the Box-Muller transform of two such uniforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .filterspectrum import FilterBank, ScaleSpec
from .variation import Channel, EpochDataset

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

_ROLE_NOISE_A = 0x01
_ROLE_NOISE_B = 0x02
_ROLE_PHASE = 0x03

DEFAULT_CHANNELS = (
    Channel("C3-A2", "EEG"),
    Channel("ROC-A1", "EOG"),
    Channel("EMG-chin", "EMG"),
)


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of the two-class fixture generator."""

    seed: int
    sampling_rate_hz: float = 100.0
    epoch_length_samples: int = 3000
    epochs_per_class: int = 16
    noise_std: float = 1.0
    injected_frequency_hz: float = 10.0
    injected_amplitude: float = 3.0

    def __post_init__(self):
        if not (isinstance(self.seed, int) and 0 <= self.seed <= _MASK64):
            raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not self.sampling_rate_hz > 0:
            raise InvalidInputError("sampling rate must be positive")
        if self.epoch_length_samples < 2:
            raise InvalidInputError("epoch length must be >= 2 samples")
        if self.epochs_per_class < 2:
            raise InvalidInputError("need >= 2 epochs per class")
        if not self.noise_std > 0:
            raise InvalidInputError("noise std must be positive")
        if self.injected_amplitude < 0:
            raise InvalidInputError("injected amplitude must be >= 0")
        if not 0 < self.injected_frequency_hz < self.sampling_rate_hz / 2:
            raise InvalidInputError(
                f"injected frequency {self.injected_frequency_hz} Hz must lie in "
                f"(0, {self.sampling_rate_hz / 2}) Hz"
            )


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer; uint64 array arithmetic wraps by construction
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _mix64_int(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _stream_base(seed: int, role: int, epoch: int, channel: int) -> int:
    h = seed & _MASK64
    for word in (role, epoch, channel):
        h = _mix64_int((h + word * _GOLDEN) & _MASK64)
    return h


def counter_uniforms(seed: int, role: int, epoch: int, channel: int, n: int) -> np.ndarray:
    """n uniforms in [0, 1), one per sample counter, independent of call order."""
    base = np.uint64(_stream_base(seed, role, epoch, channel))
    states = base + np.arange(n, dtype=np.uint64) * np.uint64(_GOLDEN)
    return (_mix64_array(states) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def counter_gaussians(seed: int, epoch: int, channel: int, n: int) -> np.ndarray:
    """Standard normals: z = sqrt(-2 ln(1-u1)) * cos(2 pi u2)."""
    u1 = counter_uniforms(seed, _ROLE_NOISE_A, epoch, channel, n)
    u2 = counter_uniforms(seed, _ROLE_NOISE_B, epoch, channel, n)
    return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)


def gen_sinusoid_filterbank(
    sampling_rate_hz: float,
    scales: list[ScaleSpec],
    n_taps: int,
    target_freqs_hz: list[float],
    n_filters: int = 8,
    model_label: str = "sinusoid-bank",
) -> FilterBank:
    """Bank whose filters are pure cosines at one on-grid target per scale.

    Each target must fall on that scale's DFT grid (within 1e-9 Hz, so grids
    with non-terminating decimal frequencies stay reachable from floats).
    """
    if len(target_freqs_hz) != len(scales):
        raise InvalidInputError(
            f"{len(scales)} scales but {len(target_freqs_hz)} target frequencies"
        )
    if n_filters < 1:
        raise InvalidInputError("need at least one filter per scale")
    weights = []
    for scale, target in zip(scales, target_freqs_hz):
        effective_rate = sampling_rate_hz / scale.downsample_factor
        bin_float = target * n_taps / effective_rate
        bin_index = int(round(bin_float))
        on_grid = bin_index * effective_rate / n_taps
        if abs(on_grid - target) > 1e-9 * max(1.0, abs(target)):
            raise InvalidInputError(
                f"scale {scale.name!r}: target {target} Hz is off-grid "
                f"(nearest bin at {on_grid} Hz)"
            )
        if not 0 <= bin_index <= (n_taps + 1) // 2 - 1:
            raise InvalidInputError(
                f"scale {scale.name!r}: target {target} Hz outside the detectable range"
            )
        taps = np.cos(2.0 * np.pi * bin_index * np.arange(n_taps) / n_taps)
        weights.append(np.tile(taps, (n_filters, 1)))
    return FilterBank(
        sampling_rate_hz=sampling_rate_hz,
        scales=list(scales),
        weights=weights,
        model_label=model_label,
    )


def gen_two_class_dataset(
    config: SynthConfig,
    channels: tuple[Channel, ...] = (Channel("C3-A2", "EEG"),),
) -> EpochDataset:
    """Two-class dataset: class A is white Gaussian noise, class B the same
    noise process plus a sinusoid with a random phase per (epoch, channel).

    Epochs 0..E-1 carry class A, epochs E..2E-1 class B.
    """
    n_epochs = 2 * config.epochs_per_class
    n_samples = config.epoch_length_samples
    t = np.arange(n_samples, dtype=np.float64) / config.sampling_rate_hz
    omega = 2.0 * np.pi * config.injected_frequency_hz

    data = np.empty((n_epochs, len(channels), n_samples), dtype=np.float32)
    for epoch in range(n_epochs):
        for ch in range(len(channels)):
            values = config.noise_std * counter_gaussians(config.seed, epoch, ch, n_samples)
            if epoch >= config.epochs_per_class:
                phase = 2.0 * np.pi * counter_uniforms(config.seed, _ROLE_PHASE, epoch, ch, 1)[0]
                values = values + config.injected_amplitude * np.cos(omega * t + phase)
            data[epoch, ch] = values.astype(np.float32)

    labels = np.repeat([0, 1], config.epochs_per_class)
    return EpochDataset(
        sampling_rate_hz=config.sampling_rate_hz,
        epoch_length_samples=n_samples,
        channels=list(channels),
        classes=["A", "B"],
        data=data,
        labels=labels,
    )


# Paper-shaped fixture banks used by the CLI and the test suite.


def eegnet_like_bank() -> FilterBank:
    """Single-scale bank: 8 filters x 50 taps at 100 Hz, peak at 10 Hz."""
    return gen_sinusoid_filterbank(
        sampling_rate_hz=100.0,
        scales=[ScaleSpec("I", 1)],
        n_taps=50,
        target_freqs_hz=[10.0],
        n_filters=8,
        model_label="eegnet-like",
    )


def msacnn_like_bank(downsample_factors: tuple[int, ...] = (1, 2, 4, 8)) -> FilterBank:
    """Four-scale bank: 8 filters x 15 taps per scale at 100 Hz.

    Scale targets sit at bin 3 of each scale (20, 10, 5, 2.5 Hz for the
    default factors).
    """
    names = ("I", "II", "III", "IV", "V", "VI", "VII", "VIII")
    if len(downsample_factors) > len(names):
        raise InvalidInputError(f"at most {len(names)} scales supported")
    scales = [ScaleSpec(names[i], d) for i, d in enumerate(downsample_factors)]
    targets = [3 * (100.0 / d) / 15 for d in downsample_factors]
    return gen_sinusoid_filterbank(
        sampling_rate_hz=100.0,
        scales=scales,
        n_taps=15,
        target_freqs_hz=targets,
        n_filters=8,
        model_label="msacnn-like",
    )
