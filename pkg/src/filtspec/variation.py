"""Between-class spectral variation: how much the class-mean spectral
densities of a channel spread apart, relative to the spread within classes.

Per channel and frequency bin:
    sigma_B = std over classes of the class-mean densities
    sigma_W = mean over classes of the per-class densities' std
    bcv     = sigma_B / sigma_W        (bins with sigma_W = 0 flagged invalid)

Standard deviations are population ones by default (sample std available via
`sample_std=True`). Within-class reductions accumulate in fixed epoch-index
order; across-class reductions use exactly-rounded summation so relabeling
classes cannot change a single bit of the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, InvalidInputError
from .spectral import PowerSpectrum, Signal, WelchConfig, spectral_density, welch_psd

MODALITIES = ("EEG", "EOG", "EMG", "other")


@dataclass(frozen=True)
class Channel:
    name: str
    modality: str = "other"

    def __post_init__(self):
        if not self.name:
            raise InvalidInputError("channel name may not be empty")
        if self.modality not in MODALITIES:
            raise InvalidInputError(
                f"channel {self.name!r}: modality must be one of {MODALITIES}, got {self.modality!r}"
            )


@dataclass
class EpochDataset:
    """Labelled fixed-length epochs: (epochs x channels x samples) float32."""

    sampling_rate_hz: float
    epoch_length_samples: int
    channels: list[Channel]
    classes: list[str]
    data: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float32)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if not self.sampling_rate_hz > 0:
            raise InvalidInputError(f"sampling rate must be positive, got {self.sampling_rate_hz}")
        if not self.classes:
            raise InvalidInputError("dataset declares no classes")
        if len(set(self.classes)) != len(self.classes):
            raise InvalidInputError("class labels must be unique")
        if not self.channels:
            raise InvalidInputError("dataset declares no channels")
        names = [c.name for c in self.channels]
        if len(set(names)) != len(names):
            raise InvalidInputError("channel names must be unique")
        expected = (len(self.labels), len(self.channels), self.epoch_length_samples)
        if self.data.shape != expected:
            raise InvalidInputError(f"data shape {self.data.shape} != expected {expected}")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= len(self.classes)):
            raise InvalidInputError("labels must index the declared classes")
        if not np.all(np.isfinite(self.data)):
            raise InvalidInputError("dataset contains non-finite samples")

    @property
    def n_epochs(self) -> int:
        return self.data.shape[0]

    def class_epoch_indices(self, class_index: int) -> np.ndarray:
        return np.flatnonzero(self.labels == class_index)

    def require_min_epochs_per_class(self, minimum: int = 2) -> None:
        for c, label in enumerate(self.classes):
            count = int(np.sum(self.labels == c))
            if count < minimum:
                raise InsufficientDataError(
                    f"class {label!r} has {count} epochs; at least {minimum} required"
                )


@dataclass
class ClassSpectralStats:
    """Per-class mean density and within-class std on the Welch grid."""

    channel: Channel
    frequencies_hz: np.ndarray
    class_labels: list[str]
    means: np.ndarray  # (classes x bins)
    within_std: np.ndarray  # (classes x bins)
    counts: np.ndarray  # epochs per class

    def __post_init__(self):
        self.frequencies_hz = np.asarray(self.frequencies_hz, dtype=np.float64)
        self.means = np.asarray(self.means, dtype=np.float64)
        self.within_std = np.asarray(self.within_std, dtype=np.float64)
        self.counts = np.asarray(self.counts, dtype=np.int64)
        shape = (len(self.class_labels), self.frequencies_hz.size)
        if self.means.shape != shape or self.within_std.shape != shape:
            raise InvalidInputError(
                f"stats shapes {self.means.shape}/{self.within_std.shape} != expected {shape}"
            )
        if not (np.all(np.isfinite(self.means)) and np.all(np.isfinite(self.within_std))):
            raise InvalidInputError("class statistics contain non-finite values")
        if np.any(self.within_std < 0):
            raise InvalidInputError("within-class std must be non-negative")


@dataclass
class BCVSpectrum:
    """Between-class variation of one channel on the Welch grid.

    `ratio` is NaN on bins flagged invalid (within-class std of zero).
    """

    channel: Channel
    frequencies_hz: np.ndarray
    between_std: np.ndarray
    within_std: np.ndarray
    ratio: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        self.frequencies_hz = np.asarray(self.frequencies_hz, dtype=np.float64)
        for name in ("between_std", "within_std", "ratio"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        self.valid = np.asarray(self.valid, dtype=bool)
        n = self.frequencies_hz.size
        for name in ("between_std", "within_std", "ratio", "valid"):
            if getattr(self, name).shape != (n,):
                raise InvalidInputError(f"{name} length does not match the frequency grid")
        if not np.all(np.isfinite(self.ratio[self.valid])):
            raise InvalidInputError("ratio must be finite on valid bins")


def per_sample_density(
    dataset: EpochDataset,
    channel: int,
    epoch: int,
    welch_config: WelchConfig | None = None,
) -> PowerSpectrum:
    """Amplitude spectral density of one epoch of one channel."""
    if not 0 <= channel < len(dataset.channels):
        raise InvalidInputError(f"channel index {channel} out of range")
    if not 0 <= epoch < dataset.n_epochs:
        raise InvalidInputError(f"epoch index {epoch} out of range")
    config = welch_config or WelchConfig()
    segment, overlap, window = config.resolve(dataset.epoch_length_samples)
    signal = Signal(dataset.data[epoch, channel].astype(np.float64), dataset.sampling_rate_hz)
    return spectral_density(welch_psd(signal, segment, overlap, window))


def class_statistics(
    dataset: EpochDataset,
    channel: int,
    welch_config: WelchConfig | None = None,
    sample_std: bool = False,
) -> ClassSpectralStats:
    """Mean and std of the per-epoch spectral densities, per class and bin.

    Epochs are accumulated in ascending epoch-index order; the std is the
    two-pass population one unless `sample_std` is set.
    """
    config = welch_config or WelchConfig()
    frequencies = None
    means = []
    stds = []
    counts = []
    for c in range(len(dataset.classes)):
        indices = dataset.class_epoch_indices(c)
        if indices.size < 2:
            raise InsufficientDataError(
                f"class {dataset.classes[c]!r} has {indices.size} epochs; at least 2 required"
            )
        densities = []
        for e in indices:
            density = per_sample_density(dataset, channel, int(e), config)
            if frequencies is None:
                frequencies = density.frequencies_hz
            densities.append(density.values)

        # shifted mean: identical epochs yield exactly zero deviations
        pivot = densities[0]
        acc = np.zeros_like(pivot)
        for values in densities:
            acc += values - pivot
        mean = pivot + acc / indices.size

        sq = np.zeros_like(mean)
        for values in densities:
            delta = values - mean
            sq += delta * delta
        divisor = indices.size - 1 if sample_std else indices.size
        stds.append(np.sqrt(sq / divisor))
        means.append(mean)
        counts.append(indices.size)

    return ClassSpectralStats(
        channel=dataset.channels[channel],
        frequencies_hz=frequencies,
        class_labels=list(dataset.classes),
        means=np.stack(means),
        within_std=np.stack(stds),
        counts=np.array(counts),
    )


def between_class_variation(stats: ClassSpectralStats, sample_std: bool = False) -> BCVSpectrum:
    """Ratio of between-class to within-class spectral variation per bin.

    Across-class sums are exactly rounded (math.fsum), so the result does not
    depend on the order in which classes are listed.
    """
    n_classes = len(stats.class_labels)
    if n_classes < 2:
        raise InsufficientDataError(f"need at least 2 classes, got {n_classes}")

    n_bins = stats.frequencies_hz.size
    divisor = n_classes - 1 if sample_std else n_classes
    between = np.empty(n_bins, dtype=np.float64)
    within = np.empty(n_bins, dtype=np.float64)
    for k in range(n_bins):
        column = stats.means[:, k]
        center = math.fsum(column) / n_classes
        between[k] = math.sqrt(math.fsum((m - center) ** 2 for m in column) / divisor)
        within[k] = math.fsum(stats.within_std[:, k]) / n_classes

    valid = within > 0.0
    ratio = np.full(n_bins, np.nan, dtype=np.float64)
    np.divide(between, within, out=ratio, where=valid)
    return BCVSpectrum(
        channel=stats.channel,
        frequencies_hz=stats.frequencies_hz,
        between_std=between,
        within_std=within,
        ratio=ratio,
        valid=valid,
    )
