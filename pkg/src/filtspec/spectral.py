"""Core spectral primitives: DFT magnitudes, Hann window, Welch density.

All functions are pure and deterministic: identical inputs give bit-identical
outputs regardless of thread count. Accumulations that could depend on
evaluation order (across Welch segments) run in a fixed left-to-right order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidInputError,
    InvalidKindError,
    GridError,
    SegmentationError,
)

POWER_DENSITY = "power_density"
AMPLITUDE_DENSITY = "amplitude_density"

DEFAULT_SEGMENT_LENGTH = 256
DEFAULT_OVERLAP = 0.5


@dataclass(frozen=True)
class Signal:
    """A finite real-valued time series with its sampling rate."""

    samples: np.ndarray
    sampling_rate_hz: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size < 2:
            raise InvalidInputError(
                f"signal must be a 1-d series of length >= 2, got shape {samples.shape}"
            )
        if not self.sampling_rate_hz > 0:
            raise InvalidInputError(f"sampling rate must be positive, got {self.sampling_rate_hz}")
        if not np.all(np.isfinite(samples)):
            raise InvalidInputError("signal contains non-finite samples")

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class PowerSpectrum:
    """One-sided spectrum: ascending frequencies with non-negative values.

    `kind` is either "power_density" (units^2/Hz) or "amplitude_density"
    (its element-wise square root).
    """

    frequencies_hz: np.ndarray
    values: np.ndarray
    kind: str

    def __post_init__(self):
        freqs = np.asarray(self.frequencies_hz, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "frequencies_hz", freqs)
        object.__setattr__(self, "values", values)
        if self.kind not in (POWER_DENSITY, AMPLITUDE_DENSITY):
            raise InvalidKindError(f"unknown spectrum kind {self.kind!r}")
        if freqs.shape != values.shape or freqs.ndim != 1:
            raise InvalidInputError(
                f"frequency/value shape mismatch: {freqs.shape} vs {values.shape}"
            )
        if freqs.size and (freqs[0] < 0 or np.any(np.diff(freqs) <= 0)):
            raise InvalidInputError("frequencies must be non-negative and strictly ascending")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise InvalidInputError("spectrum values must be finite and non-negative")


@dataclass(frozen=True)
class WelchConfig:
    """Welch estimation parameters; None fields resolve to the defaults
    (segment min(256, n), overlap 0.5, periodic Hann window)."""

    segment_length: int | None = None
    overlap_fraction: float = DEFAULT_OVERLAP
    window: np.ndarray | None = None

    def resolve(self, n_samples: int) -> tuple[int, float, np.ndarray]:
        segment = self.segment_length
        if segment is None:
            segment = min(DEFAULT_SEGMENT_LENGTH, n_samples)
        window = self.window
        if window is None:
            window = hann_window(segment)
        return segment, self.overlap_fraction, window


def dft_magnitudes(taps, effective_rate_hz: float) -> tuple[np.ndarray, np.ndarray]:
    """DFT magnitude response of a filter on its positive-frequency bins.

    Returns bins j = 0 .. ceil(L/2)-1 as (frequencies_hz, magnitudes) with
    f_j = j * effective_rate_hz / L. The DC bin is included; for even L the
    Nyquist bin is excluded.
    """
    taps = np.asarray(taps, dtype=np.float64)
    if taps.ndim != 1 or taps.size < 2:
        raise InvalidInputError(f"filter must have length >= 2, got shape {taps.shape}")
    if not np.all(np.isfinite(taps)):
        raise InvalidInputError("filter contains non-finite taps")
    if not effective_rate_hz > 0:
        raise InvalidInputError(f"effective rate must be positive, got {effective_rate_hz}")

    length = taps.size
    n_bins = (length + 1) // 2  # ceil(L/2)
    magnitudes = np.abs(np.fft.fft(taps)[:n_bins])
    frequencies = np.arange(n_bins) * (effective_rate_hz / length)
    return frequencies, magnitudes


def hann_window(length: int) -> np.ndarray:
    """Periodic Hann window w[n] = 0.5 * (1 - cos(2 pi n / length))."""
    if length < 1:
        raise InvalidInputError(f"window length must be >= 1, got {length}")
    n = np.arange(length, dtype=np.float64)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * n / length))


def welch_psd(
    signal: Signal,
    segment_length: int | None = None,
    overlap_fraction: float = DEFAULT_OVERLAP,
    window=None,
) -> PowerSpectrum:
    """One-sided Welch power spectral density estimate.

    Averages modified periodograms over segments advanced by
    hop = floor(segment_length * (1 - overlap_fraction)). Each periodogram is
    scaled by 1 / (rate * sum(w^2)) and interior bins are doubled, so the
    integral of the density approximates the signal's mean square. Segments
    are accumulated left to right for bit-reproducibility.
    """
    n = len(signal)
    if segment_length is None:
        segment_length = min(DEFAULT_SEGMENT_LENGTH, n)
    if segment_length < 2:
        raise SegmentationError(f"segment length must be >= 2, got {segment_length}")
    if segment_length > n:
        raise SegmentationError(f"segment length {segment_length} exceeds signal length {n}")
    if not 0.0 <= overlap_fraction < 1.0:
        raise SegmentationError(f"overlap fraction must be in [0, 1), got {overlap_fraction}")

    if window is None:
        window = hann_window(segment_length)
    window = np.asarray(window, dtype=np.float64)
    if window.shape != (segment_length,):
        raise InvalidInputError(
            f"window length {window.shape} does not match segment length {segment_length}"
        )
    if not np.all(np.isfinite(window)):
        raise InvalidInputError("window contains non-finite values")
    window_power = np.sum(window * window)
    if window_power == 0.0:
        raise InvalidInputError("window has zero power")

    hop = int(np.floor(segment_length * (1.0 - overlap_fraction)))
    if hop < 1:
        raise SegmentationError(
            f"overlap {overlap_fraction} leaves no hop for segment length {segment_length}"
        )
    n_segments = (n - segment_length) // hop + 1
    if n_segments < 1:
        raise SegmentationError("no complete segment fits the signal")

    rate = signal.sampling_rate_hz
    scale = 1.0 / (rate * window_power)
    n_bins = segment_length // 2 + 1

    acc = np.zeros(n_bins, dtype=np.float64)
    for k in range(n_segments):
        segment = signal.samples[k * hop : k * hop + segment_length]
        transformed = np.fft.rfft(segment * window)
        periodogram = (transformed.real**2 + transformed.imag**2) * scale
        periodogram[1:] *= 2.0
        if segment_length % 2 == 0:
            periodogram[-1] *= 0.5  # Nyquist bin is not mirrored
        acc += periodogram
    acc /= n_segments

    frequencies = np.arange(n_bins) * (rate / segment_length)
    return PowerSpectrum(frequencies, acc, POWER_DENSITY)


def spectral_density(psd: PowerSpectrum) -> PowerSpectrum:
    """Amplitude spectral density: element-wise square root of a PSD."""
    if psd.kind != POWER_DENSITY:
        raise InvalidKindError(f"expected a {POWER_DENSITY} spectrum, got {psd.kind!r}")
    return PowerSpectrum(psd.frequencies_hz, np.sqrt(psd.values), AMPLITUDE_DENSITY)


def resample_linear(source_freqs, source_values, target_freqs) -> np.ndarray:
    """Piecewise-linear interpolation onto a target grid; no extrapolation.

    Exact at shared grid points. Raises GridError when any target frequency
    lies outside [min(source), max(source)].
    """
    source_freqs = np.asarray(source_freqs, dtype=np.float64)
    source_values = np.asarray(source_values, dtype=np.float64)
    target_freqs = np.asarray(target_freqs, dtype=np.float64)
    if source_freqs.ndim != 1 or source_freqs.size < 2:
        raise InvalidInputError("source grid must contain at least 2 points")
    if source_freqs.shape != source_values.shape:
        raise InvalidInputError("source grid and values must have equal length")
    if np.any(np.diff(source_freqs) <= 0):
        raise InvalidInputError("source grid must be strictly ascending")
    if target_freqs.size and (
        target_freqs.min() < source_freqs[0] or target_freqs.max() > source_freqs[-1]
    ):
        raise GridError(
            f"target range [{target_freqs.min()}, {target_freqs.max()}] exceeds source range "
            f"[{source_freqs[0]}, {source_freqs[-1]}]; extrapolation is not supported"
        )
    return np.interp(target_freqs, source_freqs, source_values)
