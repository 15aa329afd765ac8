"""Interchange formats: weights files, dataset manifests + raw float32
payloads, accuracy tables, and the CSV report writers.

All writers are canonical: the same inputs always produce byte-identical
files (LF endings, UTF-8, fixed key order, shortest-repr floats in JSON and
9 significant digits in CSV).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import CorrelationReport
from .errors import FormatError
from .filterspectrum import FilterBank, FilterSpectrum, ScaleSpec
from .variation import MODALITIES, BCVSpectrum, Channel, EpochDataset

WEIGHTS_FORMAT_VERSION = 1
DATASET_FORMAT_VERSION = 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = (1 << 64) - 1


def fnv1a_64(data: bytes) -> str:
    """64-bit FNV-1a over the payload bytes, hex-encoded (corruption check,
    not a security primitive)."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _U64
    return format(h, "016x")


def _fmt(value: float) -> str:
    return format(float(value), ".9g")


def _expect(mapping, key: str, kind, location: str):
    if not isinstance(mapping, dict):
        raise FormatError(f"expected an object, got {type(mapping).__name__}", location)
    if key not in mapping:
        raise FormatError(f"missing required field {key!r}", location)
    value = mapping[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise FormatError(f"field {key!r} must be a number", location)
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise FormatError(f"field {key!r} must be an integer", location)
        return value
    if not isinstance(value, kind):
        raise FormatError(f"field {key!r} must be {kind.__name__}", location)
    return value


def _read_json(path: Path) -> dict:
    if not path.exists():
        raise FormatError("file not found", str(path))
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"unreadable: {exc}", str(path)) from exc
    try:
        parsed = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}", str(path)) from exc
    if not isinstance(parsed, dict):
        raise FormatError("top level must be an object", str(path))
    return parsed


# --- weights files (<name>.weights.json) -----------------------------------


def load_weights(path) -> FilterBank:
    """Parse and validate a weights file into a FilterBank.

    Records the FNV-1a digest of the file bytes for provenance.
    """
    path = Path(path)
    obj = _read_json(path)
    where = str(path)

    version = _expect(obj, "format_version", int, where)
    if version != WEIGHTS_FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {version}", where)
    model_label = _expect(obj, "model_label", str, where)
    rate = _expect(obj, "sampling_rate_hz", float, where)
    if not rate > 0:
        raise FormatError(f"sampling_rate_hz must be positive, got {rate}", where)
    scales_obj = _expect(obj, "scales", list, where)
    if not scales_obj:
        raise FormatError("scales list is empty", where)

    scales: list[ScaleSpec] = []
    weights: list[np.ndarray] = []
    shared_taps = None
    for s, entry in enumerate(scales_obj):
        loc = f"{where}: scales[{s}]"
        name = _expect(entry, "name", str, loc)
        factor = _expect(entry, "downsample_factor", int, loc)
        if factor < 1:
            raise FormatError(f"downsample_factor must be >= 1, got {factor}", loc)
        n_filters = _expect(entry, "n_filters", int, loc)
        n_taps = _expect(entry, "n_taps", int, loc)
        if n_filters < 1:
            raise FormatError(f"n_filters must be >= 1, got {n_filters}", loc)
        if n_taps < 2:
            raise FormatError(f"n_taps must be >= 2, got {n_taps}", loc)
        if shared_taps is None:
            shared_taps = n_taps
        elif n_taps != shared_taps:
            raise FormatError(
                f"n_taps {n_taps} differs from the first scale's {shared_taps}", loc
            )
        rows = _expect(entry, "filters", list, loc)
        if len(rows) != n_filters:
            raise FormatError(
                f"dimension mismatch: {len(rows)} filter rows, n_filters declares {n_filters}",
                loc,
            )
        matrix = []
        for f, row in enumerate(rows):
            row_loc = f"{loc}.filters[{f}]"
            if not isinstance(row, list):
                raise FormatError("filter row must be a list", row_loc)
            if len(row) != n_taps:
                raise FormatError(
                    f"dimension mismatch: {len(row)} taps, n_taps declares {n_taps}", row_loc
                )
            for t, value in enumerate(row):
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise FormatError("tap values must be numbers", f"{row_loc}[{t}]")
                if not np.isfinite(value):
                    raise FormatError(f"non-finite tap value {value!r}", f"{row_loc}[{t}]")
            matrix.append([float(v) for v in row])
        if any(sc.name == name for sc in scales):
            raise FormatError(f"duplicate scale name {name!r}", loc)
        if any(sc.downsample_factor == factor for sc in scales):
            raise FormatError(f"duplicate downsample_factor {factor}", loc)
        scales.append(ScaleSpec(name=name, downsample_factor=factor))
        weights.append(np.array(matrix, dtype=np.float64))

    return FilterBank(
        sampling_rate_hz=rate,
        scales=scales,
        weights=weights,
        model_label=model_label,
        digest=fnv1a_64(path.read_bytes()),
    )


def save_weights(bank: FilterBank, path) -> Path:
    """Write a FilterBank in canonical form; returns the path written."""
    path = Path(path)
    obj = {
        "format_version": WEIGHTS_FORMAT_VERSION,
        "model_label": bank.model_label,
        "sampling_rate_hz": float(bank.sampling_rate_hz),
        "scales": [
            {
                "name": scale.name,
                "downsample_factor": scale.downsample_factor,
                "n_filters": int(matrix.shape[0]),
                "n_taps": int(matrix.shape[1]),
                "filters": [[float(v) for v in row] for row in matrix],
            }
            for scale, matrix in zip(bank.scales, bank.weights)
        ],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8", newline="\n")
    return path


# --- datasets (<name>.manifest.json + <name>.f32) ---------------------------


def load_dataset(manifest_path) -> EpochDataset:
    """Load a dataset manifest and its raw little-endian float32 payload.

    The payload is validated for size, digest, and finiteness; labels must
    index the declared classes and every class needs at least 2 epochs.
    """
    manifest_path = Path(manifest_path)
    obj = _read_json(manifest_path)
    where = str(manifest_path)

    version = _expect(obj, "format_version", int, where)
    if version != DATASET_FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {version}", where)
    rate = _expect(obj, "sampling_rate_hz", float, where)
    epoch_len = _expect(obj, "epoch_length_samples", int, where)
    epoch_count = _expect(obj, "epoch_count", int, where)
    if epoch_len < 2:
        raise FormatError(f"epoch_length_samples must be >= 2, got {epoch_len}", where)
    if epoch_count < 1:
        raise FormatError(f"epoch_count must be >= 1, got {epoch_count}", where)

    channels = []
    for c, entry in enumerate(_expect(obj, "channels", list, where)):
        loc = f"{where}: channels[{c}]"
        name = _expect(entry, "name", str, loc)
        modality = _expect(entry, "modality", str, loc)
        if modality not in MODALITIES:
            raise FormatError(f"unknown modality {modality!r}", loc)
        channels.append(Channel(name=name, modality=modality))
    if not channels:
        raise FormatError("channels list is empty", where)

    classes = _expect(obj, "classes", list, where)
    if not classes or not all(isinstance(c, str) for c in classes):
        raise FormatError("classes must be a non-empty list of strings", where)
    if len(set(classes)) != len(classes):
        raise FormatError("duplicate class labels", where)

    labels = _expect(obj, "labels", list, where)
    if len(labels) != epoch_count:
        raise FormatError(f"{len(labels)} labels for {epoch_count} epochs", f"{where}: labels")
    for e, label in enumerate(labels):
        if isinstance(label, bool) or not isinstance(label, int):
            raise FormatError("labels must be integers", f"{where}: labels[{e}]")
        if not 0 <= label < len(classes):
            raise FormatError(
                f"label {label} out of range for {len(classes)} classes",
                f"{where}: labels[{e}]",
            )

    payload = _expect(obj, "payload", dict, where)
    rel_path = _expect(payload, "path", str, f"{where}: payload")
    digest = _expect(payload, "digest", str, f"{where}: payload")
    payload_path = manifest_path.parent / rel_path
    if not payload_path.exists():
        raise FormatError("payload file not found", str(payload_path))
    raw = payload_path.read_bytes()

    expected_size = epoch_count * len(channels) * epoch_len * 4
    if len(raw) != expected_size:
        raise FormatError(
            f"size mismatch: payload is {len(raw)} bytes, expected {expected_size}",
            str(payload_path),
        )
    actual_digest = fnv1a_64(raw)
    if actual_digest != digest:
        raise FormatError(
            f"digest mismatch: payload hashes to {actual_digest}, manifest says {digest}",
            str(payload_path),
        )

    data = np.frombuffer(raw, dtype="<f4").reshape(epoch_count, len(channels), epoch_len)
    if not np.all(np.isfinite(data)):
        raise FormatError("payload contains non-finite samples", str(payload_path))
    if not rate > 0:
        raise FormatError(f"sampling_rate_hz must be positive, got {rate}", where)

    dataset = EpochDataset(
        sampling_rate_hz=rate,
        epoch_length_samples=epoch_len,
        channels=channels,
        classes=list(classes),
        data=data.copy(),
        labels=np.array(labels, dtype=np.int64),
    )
    try:
        dataset.require_min_epochs_per_class(2)
    except Exception as exc:
        raise FormatError(str(exc), where) from exc
    return dataset


def save_dataset(dataset: EpochDataset, manifest_path) -> tuple[Path, Path]:
    """Write manifest + payload; payload path is derived from the manifest
    name (<stem>.f32 next to it). Returns (manifest_path, payload_path)."""
    manifest_path = Path(manifest_path)
    stem = manifest_path.name
    if stem.endswith(".manifest.json"):
        stem = stem[: -len(".manifest.json")]
    else:
        stem = manifest_path.stem
    payload_path = manifest_path.parent / f"{stem}.f32"

    raw = np.ascontiguousarray(dataset.data, dtype="<f4").tobytes()
    obj = {
        "format_version": DATASET_FORMAT_VERSION,
        "sampling_rate_hz": float(dataset.sampling_rate_hz),
        "epoch_length_samples": int(dataset.epoch_length_samples),
        "channels": [{"name": c.name, "modality": c.modality} for c in dataset.channels],
        "classes": list(dataset.classes),
        "epoch_count": int(dataset.n_epochs),
        "payload": {"path": payload_path.name, "digest": fnv1a_64(raw)},
        "labels": [int(v) for v in dataset.labels],
    }
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    payload_path.write_bytes(raw)
    manifest_path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8", newline="\n")
    return manifest_path, payload_path


# --- accuracy tables (.csv) --------------------------------------------------


def load_accuracies(path) -> dict[str, float]:
    """Two-column CSV `channel,accuracy` with accuracies in [0, 1]."""
    path = Path(path)
    if not path.exists():
        raise FormatError("file not found", str(path))
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise FormatError("empty file", str(path))
    header = [part.strip() for part in lines[0].split(",")]
    if header != ["channel", "accuracy"]:
        raise FormatError(f"expected header 'channel,accuracy', got {lines[0]!r}", str(path))

    out: dict[str, float] = {}
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        loc = f"{path}: line {i}"
        parts = [part.strip() for part in line.split(",")]
        if len(parts) != 2:
            raise FormatError(f"expected 2 columns, got {len(parts)}", loc)
        channel, acc_text = parts
        if not channel:
            raise FormatError("empty channel name", loc)
        if channel in out:
            raise FormatError(f"duplicate channel {channel!r}", loc)
        try:
            accuracy = float(acc_text)
        except ValueError as exc:
            raise FormatError(f"accuracy {acc_text!r} is not a number", loc) from exc
        if not np.isfinite(accuracy) or not 0.0 <= accuracy <= 1.0:
            raise FormatError(f"accuracy {accuracy} outside [0, 1]", loc)
        out[channel] = accuracy
    return out


# --- report tables ------------------------------------------------------------


@dataclass
class ReportTables:
    """Everything write_report can emit; unused tables stay None/empty."""

    spectrum: FilterSpectrum | None = None
    spectrum_sources: list[str] | None = None
    bcvs: list[BCVSpectrum] = field(default_factory=list)
    correlations: CorrelationReport | None = None
    rank_agreement_rho: float | None = None


def channel_file_token(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", name)


def write_report(tables: ReportTables, out_dir) -> list[Path]:
    """Write the CSV tables to out_dir; byte-deterministic for equal inputs."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise FormatError(f"cannot create output directory: {exc}", str(out_dir)) from exc
    written: list[Path] = []

    if tables.spectrum is not None:
        lines = ["frequency_hz,amplitude,sources"]
        sources = tables.spectrum_sources
        if sources is not None and len(sources) != len(tables.spectrum.grid):
            raise FormatError("spectrum_sources length does not match the grid", "spectrum")
        for i, (freq, amp) in enumerate(
            zip(tables.spectrum.grid.values_hz, tables.spectrum.amplitudes)
        ):
            source = sources[i] if sources is not None else ""
            lines.append(f"{_fmt(freq)},{_fmt(amp)},{source}")
        written.append(_write_lines(out_dir / "spectrum.csv", lines))

    for bcv in tables.bcvs:
        lines = ["channel,frequency_hz,sigma_between,sigma_within,ratio,valid"]
        for k in range(bcv.frequencies_hz.size):
            lines.append(
                ",".join(
                    (
                        bcv.channel.name,
                        _fmt(bcv.frequencies_hz[k]),
                        _fmt(bcv.between_std[k]),
                        _fmt(bcv.within_std[k]),
                        _fmt(bcv.ratio[k]),
                        "1" if bcv.valid[k] else "0",
                    )
                )
            )
        token = channel_file_token(bcv.channel.name)
        written.append(_write_lines(out_dir / f"bcv_{token}.csv", lines))

    if tables.correlations is not None:
        lines = ["channel,modality,r,n_points"]
        for entry in sorted(tables.correlations.entries, key=lambda e: e.channel):
            lines.append(f"{entry.channel},{entry.modality},{_fmt(entry.r)},{entry.n_points}")
        if tables.rank_agreement_rho is not None:
            lines.append(f"# rank_agreement_spearman,{_fmt(tables.rank_agreement_rho)}")
        written.append(_write_lines(out_dir / "correlations.csv", lines))

    return written


def _write_lines(path: Path, lines: list[str]) -> Path:
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise FormatError(f"unwritable: {exc}", str(path)) from exc
    return path
