"""Scale-based frequency grids, unification, and filter spectrum retrieval.

A multi-scale convolution sees each scale at a decimated effective rate, so
the per-scale DFT grids overlap. Grid entries carry their frequency as an
exact rational fraction of the sampling rate (j / (d * L)); duplicate
detection and grid transport are done on those rationals, never with float
tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConsistencyError, InvalidInputError
from .spectral import dft_magnitudes


@dataclass(frozen=True)
class ScaleSpec:
    """One temporal-convolution scale: a name and its decimation factor."""

    name: str
    downsample_factor: int

    def __post_init__(self):
        if not (isinstance(self.downsample_factor, int) and self.downsample_factor >= 1):
            raise InvalidInputError(
                f"downsample factor must be a positive integer, got {self.downsample_factor!r}"
            )

    def effective_rate_hz(self, sampling_rate_hz: float) -> float:
        return sampling_rate_hz / self.downsample_factor


@dataclass
class FilterBank:
    """First-layer convolution weights, one (n_filters x n_taps) matrix per scale."""

    sampling_rate_hz: float
    scales: list[ScaleSpec]
    weights: list[np.ndarray]
    model_label: str = ""
    digest: str = ""

    def __post_init__(self):
        if not self.sampling_rate_hz > 0:
            raise InvalidInputError(f"sampling rate must be positive, got {self.sampling_rate_hz}")
        if not self.scales:
            raise InvalidInputError("filter bank needs at least one scale")
        if len(self.scales) != len(self.weights):
            raise ConsistencyError(
                f"{len(self.scales)} scales declared but {len(self.weights)} weight matrices given"
            )
        factors = [s.downsample_factor for s in self.scales]
        if len(set(factors)) != len(factors):
            raise InvalidInputError(f"downsample factors must be unique, got {factors}")
        self.weights = [np.asarray(w, dtype=np.float64) for w in self.weights]
        taps = None
        for scale, w in zip(self.scales, self.weights):
            if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 2:
                raise ConsistencyError(
                    f"scale {scale.name!r}: weights must be (n_filters x n_taps>=2), got {w.shape}"
                )
            if taps is None:
                taps = w.shape[1]
            elif w.shape[1] != taps:
                raise ConsistencyError(
                    f"scale {scale.name!r}: tap count {w.shape[1]} differs from {taps}"
                )
            if not np.all(np.isfinite(w)):
                raise InvalidInputError(f"scale {scale.name!r}: weights contain non-finite values")

    @property
    def n_taps(self) -> int:
        return self.weights[0].shape[1]


@dataclass(frozen=True)
class GridEntry:
    """One grid frequency: exact ratio of the sampling rate plus its Hz value.

    Scale-based entries record which (scale, bin) they came from.
    """

    ratio: Fraction
    value_hz: float
    scale_index: int | None = None
    bin_index: int | None = None


@dataclass
class FrequencyGrid:
    """Ordered list of grid entries, either scale-major or unified (ascending)."""

    sampling_rate_hz: float
    entries: list[GridEntry]
    unified: bool

    def __post_init__(self):
        if not self.entries:
            raise InvalidInputError("frequency grid may not be empty")
        if self.unified:
            ratios = [e.ratio for e in self.entries]
            if any(b <= a for a, b in zip(ratios, ratios[1:])):
                raise ConsistencyError("unified grid must be strictly ascending without duplicates")
        for e in self.entries:
            expected = float(e.ratio.numerator * self.sampling_rate_hz / e.ratio.denominator)
            if abs(e.value_hz - expected) > 1e-9 * max(1.0, abs(expected)):
                raise ConsistencyError(
                    f"grid entry {e.ratio} inconsistent: {e.value_hz} Hz vs {expected} Hz"
                )

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def ratios(self) -> list[Fraction]:
        return [e.ratio for e in self.entries]

    @property
    def values_hz(self) -> np.ndarray:
        return np.array([e.value_hz for e in self.entries], dtype=np.float64)


@dataclass
class UnificationMatrix:
    """Row-normalised assignment of scale-based bins to unified bins.

    Column j holds a single nonzero 1/D_i at the row i whose unified frequency
    equals scale-based frequency j exactly; D_i counts the bins merged into
    row i. `matrix` is the dense float form used to unify amplitudes.
    """

    column_rows: np.ndarray  # unified row index for each scale-based column
    row_counts: np.ndarray  # diagonal normaliser entries D_i
    matrix: np.ndarray = field(init=False)

    def __post_init__(self):
        self.column_rows = np.asarray(self.column_rows, dtype=np.intp)
        self.row_counts = np.asarray(self.row_counts, dtype=np.int64)
        if np.any(self.row_counts < 1):
            raise ConsistencyError("every unified row must receive at least one scale-based bin")
        counts = np.bincount(self.column_rows, minlength=self.n_rows)
        if not np.array_equal(counts, self.row_counts):
            raise ConsistencyError("row counts do not match column assignments")
        dense = np.zeros((self.n_rows, self.n_cols), dtype=np.float64)
        for j, i in enumerate(self.column_rows):
            dense[i, j] = 1.0 / self.row_counts[i]
        self.matrix = dense

    @property
    def n_rows(self) -> int:
        return self.row_counts.size

    @property
    def n_cols(self) -> int:
        return self.column_rows.size

    def apply(self, values) -> np.ndarray:
        """Average scale-based values into unified bins (fixed column order)."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (self.n_cols,):
            raise InvalidInputError(
                f"expected {self.n_cols} scale-based values, got shape {values.shape}"
            )
        out = np.zeros(self.n_rows, dtype=np.float64)
        for j in range(self.n_cols):
            out[self.column_rows[j]] += values[j]
        out /= self.row_counts
        return out

    def transport(self, ratios: list[Fraction]) -> list[Fraction]:
        """Apply the matrix to rational frequencies in exact arithmetic."""
        if len(ratios) != self.n_cols:
            raise InvalidInputError(f"expected {self.n_cols} ratios, got {len(ratios)}")
        sums = [Fraction(0)] * self.n_rows
        for j, ratio in enumerate(ratios):
            sums[self.column_rows[j]] += ratio
        return [s / Fraction(int(d)) for s, d in zip(sums, self.row_counts)]


@dataclass
class FilterSpectrum:
    """Unified amplitude spectrum of a filter bank."""

    grid: FrequencyGrid
    amplitudes: np.ndarray
    model_label: str = ""
    digest: str = ""

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.float64)
        if self.amplitudes.shape != (len(self.grid),):
            raise ConsistencyError(
                f"{len(self.grid)} grid frequencies but {self.amplitudes.shape} amplitudes"
            )
        if not np.all(np.isfinite(self.amplitudes)) or np.any(self.amplitudes < 0):
            raise InvalidInputError("amplitudes must be finite and non-negative")

    @property
    def provenance(self) -> str:
        return f"{self.model_label}@{self.digest}" if self.digest else self.model_label


def scale_frequencies(bank: FilterBank) -> FrequencyGrid:
    """Scale-major grid of all per-scale DFT bin frequencies.

    For scale s with decimation d and L taps, bin j (0 .. ceil(L/2)-1) sits at
    j * (rate/d) / L, i.e. ratio j / (d * L) of the sampling rate.
    """
    length = bank.n_taps
    n_bins = (length + 1) // 2
    rate = bank.sampling_rate_hz
    entries = []
    for s, scale in enumerate(bank.scales):
        d = scale.downsample_factor
        for j in range(n_bins):
            ratio = Fraction(j, d * length)
            entries.append(
                GridEntry(
                    ratio=ratio,
                    value_hz=j * rate / (d * length),
                    scale_index=s,
                    bin_index=j,
                )
            )
    return FrequencyGrid(rate, entries, unified=False)


def unique_frequencies(scale_grid: FrequencyGrid) -> FrequencyGrid:
    """Unified grid: scale-based frequencies sorted ascending, duplicates
    removed by exact rational equality."""
    seen: dict[Fraction, GridEntry] = {}
    for e in scale_grid.entries:
        if e.ratio not in seen:
            seen[e.ratio] = GridEntry(ratio=e.ratio, value_hz=e.value_hz)
    ordered = [seen[r] for r in sorted(seen)]
    return FrequencyGrid(scale_grid.sampling_rate_hz, ordered, unified=True)


def build_unification_matrix(
    scale_grid: FrequencyGrid, unified_grid: FrequencyGrid
) -> UnificationMatrix:
    """Assignment matrix mapping every scale-based bin onto its unified bin.

    Assignment is 1 exactly where the rational frequencies agree; each row is
    then divided by its bin count, so rows average and columns stay single-entry.
    """
    row_of = {e.ratio: i for i, e in enumerate(unified_grid.entries)}
    column_rows = np.empty(len(scale_grid), dtype=np.intp)
    for j, e in enumerate(scale_grid.entries):
        i = row_of.get(e.ratio)
        if i is None:
            raise ConsistencyError(
                f"scale-based frequency {e.ratio} (scale {e.scale_index}, bin {e.bin_index}) "
                "is absent from the unified grid"
            )
        column_rows[j] = i
    row_counts = np.bincount(column_rows, minlength=len(unified_grid))
    if np.any(row_counts < 1):
        raise ConsistencyError("unified grid contains frequencies never produced by any scale")
    return UnificationMatrix(column_rows, row_counts)


def retrieve_filter_spectrum(bank: FilterBank) -> FilterSpectrum:
    """Unified amplitude spectrum of a trained filter bank.

    Per scale: DFT magnitude of every filter at that scale's effective rate,
    averaged over filters in index order. The per-scale averages are laid out
    scale-major and merged onto the unified grid by the assignment matrix.
    For a single scale the unification is the identity.
    """
    scale_grid = scale_frequencies(bank)
    unified_grid = unique_frequencies(scale_grid)
    unifier = build_unification_matrix(scale_grid, unified_grid)

    per_scale = []
    for scale, weights in zip(bank.scales, bank.weights):
        rate = scale.effective_rate_hz(bank.sampling_rate_hz)
        n_filters = weights.shape[0]
        acc = None
        for f in range(n_filters):
            _, magnitudes = dft_magnitudes(weights[f], rate)
            acc = magnitudes if acc is None else acc + magnitudes
        per_scale.append(acc / n_filters)
    scale_major = np.concatenate(per_scale)

    amplitudes = unifier.apply(scale_major)
    return FilterSpectrum(
        grid=unified_grid,
        amplitudes=amplitudes,
        model_label=bank.model_label,
        digest=bank.digest,
    )
