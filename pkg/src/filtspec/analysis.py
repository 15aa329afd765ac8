"""Band-restricted comparison of a filter spectrum against per-channel
between-class variation, plus rank agreement with external accuracies.

The correlation runs on the filter-spectrum grid restricted to the band (the
coarser grid of the two); the BCV curve is linearly resampled onto it. Band
edges are inclusive on both ends.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateDataError,
    GridError,
    InsufficientDataError,
    InvalidInputError,
)
from .filterspectrum import FilterSpectrum
from .spectral import resample_linear
from .variation import BCVSpectrum


@dataclass(frozen=True)
class BandDefinition:
    """A named frequency band, inclusive at both edges."""

    name: str
    low_hz: float
    high_hz: float

    def __post_init__(self):
        if not (0 <= self.low_hz < self.high_hz):
            raise InvalidInputError(
                f"band {self.name!r}: need 0 <= low < high, got [{self.low_hz}, {self.high_hz}]"
            )


DELTA = BandDefinition("delta", 0.5, 4.0)
THETA = BandDefinition("theta", 4.0, 8.0)
ALPHA = BandDefinition("alpha", 8.0, 12.0)
BETA = BandDefinition("beta", 12.0, 30.0)
GAMMA = BandDefinition("gamma", 30.0, 45.0)
EEG_BANDS = (DELTA, THETA, ALPHA, BETA, GAMMA)

# Composite of delta, theta and alpha; also the rescaling reference band.
LOWER_BAND = BandDefinition("lower", 0.5, 12.0)


@dataclass(frozen=True)
class ChannelCorrelation:
    channel: str
    modality: str
    r: float
    n_points: int
    valid: bool = True


@dataclass
class CorrelationReport:
    band: BandDefinition
    model_label: str = ""
    dataset_label: str = ""
    entries: list[ChannelCorrelation] = field(default_factory=list)


def band_mask(frequencies_hz, band: BandDefinition) -> np.ndarray:
    """Indices of the grid points inside the band (edges included).

    Accepts a plain ascending frequency array or anything exposing
    `values_hz` (e.g. a FrequencyGrid).
    """
    if hasattr(frequencies_hz, "values_hz"):
        frequencies_hz = frequencies_hz.values_hz
    frequencies = np.asarray(frequencies_hz, dtype=np.float64)
    mask = np.flatnonzero((frequencies >= band.low_hz) & (frequencies <= band.high_hz))
    if mask.size == 0:
        raise GridError(
            f"band {band.name!r} [{band.low_hz}, {band.high_hz}] Hz contains no grid point"
        )
    return mask


def rescale_by_band_std(values, frequencies_hz, band: BandDefinition = LOWER_BAND) -> np.ndarray:
    """Divide all values by the population std of the in-band values.

    Used for plotting overlays; correlation is affine-invariant and works on
    the raw curves.
    """
    values = np.asarray(values, dtype=np.float64)
    mask = band_mask(frequencies_hz, band)
    if mask.size < 2:
        raise InsufficientDataError(
            f"band {band.name!r} covers {mask.size} grid point(s); need at least 2 to rescale"
        )
    in_band = values[mask]
    std = float(np.sqrt(np.mean((in_band - np.mean(in_band)) ** 2)))
    if std == 0.0:
        raise DegenerateDataError(f"zero variance inside band {band.name!r}; cannot rescale")
    return values / std


def pearson(x, y) -> float:
    """Product-moment correlation of two equal-length nonconstant vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidInputError(f"inputs must be 1-d and equal length, got {x.shape} vs {y.shape}")
    if x.size < 3:
        raise InsufficientDataError(f"need at least 3 points, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidInputError("inputs contain non-finite values")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.sum(dx * dx))
    syy = float(np.sum(dy * dy))
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateDataError("correlation undefined for a constant input")
    r = float(np.sum(dx * dy)) / np.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def channel_correlations(
    filter_spectrum: FilterSpectrum,
    bcvs: list[BCVSpectrum],
    band: BandDefinition = LOWER_BAND,
    dataset_label: str = "",
) -> CorrelationReport:
    """Per-channel Pearson r between filter spectrum and BCV inside the band.

    The BCV is resampled onto the band-restricted filter-spectrum grid.
    Channels whose BCV carries invalid bins inside the band (or on bins the
    interpolation needs) are flagged with r = NaN rather than dropped.
    """
    grid = filter_spectrum.grid.values_hz
    mask = band_mask(grid, band)
    if mask.size < 3:
        raise InsufficientDataError(
            f"band {band.name!r} covers only {mask.size} filter-spectrum point(s); need >= 3"
        )
    target = grid[mask]
    amplitudes = filter_spectrum.amplitudes[mask]

    report = CorrelationReport(
        band=band,
        model_label=filter_spectrum.model_label,
        dataset_label=dataset_label,
    )
    for bcv in bcvs:
        in_band = (bcv.frequencies_hz >= band.low_hz) & (bcv.frequencies_hz <= band.high_hz)
        try:
            resampled = resample_linear(bcv.frequencies_hz, bcv.ratio, target)
        except GridError as exc:
            raise GridError(f"channel {bcv.channel.name!r}: {exc}") from exc
        flagged = bool(np.any(~bcv.valid[in_band])) or not np.all(np.isfinite(resampled))
        if flagged:
            entry = ChannelCorrelation(
                channel=bcv.channel.name,
                modality=bcv.channel.modality,
                r=float("nan"),
                n_points=int(target.size),
                valid=False,
            )
        else:
            entry = ChannelCorrelation(
                channel=bcv.channel.name,
                modality=bcv.channel.modality,
                r=pearson(amplitudes, resampled),
                n_points=int(target.size),
            )
        report.entries.append(entry)
    return report


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks starting at 1; tied values share the average of their ranks."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    i = 0
    ordered = values[order]
    while i < values.size:
        j = i
        while j + 1 < values.size and ordered[j + 1] == ordered[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def rank_agreement(report: CorrelationReport, per_channel_accuracy: dict[str, float]) -> float:
    """Spearman rank correlation between channel r-values and accuracies."""
    pairs = [
        (entry.r, per_channel_accuracy[entry.channel])
        for entry in report.entries
        if entry.valid and entry.channel in per_channel_accuracy
    ]
    if len(pairs) < 3:
        raise InsufficientDataError(
            f"need at least 3 channels present in both inputs, got {len(pairs)}"
        )
    rs = np.array([p[0] for p in pairs], dtype=np.float64)
    accs = np.array([p[1] for p in pairs], dtype=np.float64)
    return pearson(_average_ranks(rs), _average_ranks(accs))
