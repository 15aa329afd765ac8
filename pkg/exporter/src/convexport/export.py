"""Checkpoint-to-weights-file export.

The weights interchange format is a JSON object:

    {
      "format_version": 1,
      "model_label": "...",
      "sampling_rate_hz": 100.0,
      "scales": [
        {"name": "I", "downsample_factor": 1,
         "n_filters": 8, "n_taps": 50, "filters": [[...], ...]},
        ...
      ]
    }

One weight tensor is resolved per declared scale by explicit name patterns;
nothing is guessed, because silently exporting the wrong layer is the worst
failure mode. Values are converted to float32 and written as their shortest
decimal representation, so a loader reading them back recovers every bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fnmatch import fnmatchcase
from pathlib import Path

import numpy as np

MODEL_KINDS = ("eegnet", "msa-cnn", "generic")

ROMAN = ("I", "II", "III", "IV", "V", "VI", "VII", "VIII")

# Defaults follow the reference fixture naming; override with explicit
# patterns when a checkpoint uses different layer names.
DEFAULT_PATTERNS = {
    "eegnet": ("*conv1.weight", "*conv_temporal.weight", "*firstconv.weight"),
    "msa-cnn": ("*msm1*.weight",),
}
DEFAULT_FACTORS = {
    "eegnet": (1,),
    "msa-cnn": (1, 2, 4, 8),
}


class ExportError(Exception):
    """Structured export failure (bad checkpoint, pattern, or shape)."""


@dataclass(frozen=True)
class ExportSpec:
    """What to pull out of a checkpoint and how to interpret it."""

    checkpoint_path: Path
    model_kind: str
    sampling_rate_hz: float
    layer_patterns: tuple[str, ...] | None = None
    downsample_factors: tuple[int, ...] | None = None
    time_axis: int | None = None  # generic mode only, on the squeezed 2-d shape
    model_label: str = ""

    def __post_init__(self):
        if self.model_kind not in MODEL_KINDS:
            raise ExportError(f"unknown model kind {self.model_kind!r}; expected {MODEL_KINDS}")
        if not self.sampling_rate_hz > 0:
            raise ExportError(f"sampling rate must be positive, got {self.sampling_rate_hz}")
        if self.model_kind == "generic":
            if not self.layer_patterns:
                raise ExportError("generic mode requires explicit --layer patterns")
            if not self.downsample_factors:
                raise ExportError("generic mode requires explicit --downsample factors")
            if self.time_axis not in (0, 1):
                raise ExportError("generic mode requires --time-axis 0 or 1")
        factors = self.resolved_factors()
        if len(set(factors)) != len(factors) or any(f < 1 for f in factors):
            raise ExportError(f"downsample factors must be unique positive integers, got {factors}")
        if len(factors) > len(ROMAN):
            raise ExportError(f"at most {len(ROMAN)} scales supported, got {len(factors)}")

    def resolved_patterns(self) -> tuple[str, ...]:
        if self.layer_patterns:
            return self.layer_patterns
        return DEFAULT_PATTERNS[self.model_kind]

    def resolved_factors(self) -> tuple[int, ...]:
        if self.downsample_factors:
            return tuple(self.downsample_factors)
        return DEFAULT_FACTORS[self.model_kind]


def load_checkpoint(path) -> dict[str, np.ndarray]:
    """Read a checkpoint into {tensor name: array}; never modifies the file.

    `.npz` archives load natively; anything else is treated as a PyTorch
    state dict (requires torch). Common `state_dict` wrappers are unwrapped.
    """
    path = Path(path)
    if not path.exists():
        raise ExportError(f"checkpoint not found: {path}")
    if path.suffix == ".npz":
        with np.load(path) as archive:
            return {name: np.asarray(archive[name]) for name in archive.files}
    try:
        import torch
    except ImportError as exc:
        raise ExportError(
            f"{path.suffix!r} checkpoints need torch, which is not installed"
        ) from exc
    try:
        obj = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise ExportError(f"failed to load checkpoint {path}: {exc}") from exc
    for wrapper in ("state_dict", "model_state_dict"):
        if isinstance(obj, dict) and wrapper in obj and isinstance(obj[wrapper], dict):
            obj = obj[wrapper]
    if not isinstance(obj, dict):
        raise ExportError(f"checkpoint {path} does not contain a tensor dictionary")
    tensors = {}
    for name, value in obj.items():
        if hasattr(value, "detach"):
            tensors[str(name)] = value.detach().cpu().numpy()
        elif isinstance(value, np.ndarray):
            tensors[str(name)] = value
    if not tensors:
        raise ExportError(f"checkpoint {path} contains no tensors")
    return tensors


def _squeeze_to_matrix(name: str, tensor: np.ndarray, time_axis: int | None) -> np.ndarray:
    squeezed = np.squeeze(tensor)
    if squeezed.ndim == 1:
        squeezed = squeezed[None, :]
    if squeezed.ndim != 2:
        raise ExportError(
            f"tensor {name!r} has shape {tensor.shape}; expected two non-singleton axes "
            f"(filters x taps), got {squeezed.ndim} after squeezing"
        )
    if time_axis == 0:
        squeezed = squeezed.T
    return squeezed


def resolve_layers(
    tensors: dict[str, np.ndarray], spec: ExportSpec
) -> list[tuple[str, np.ndarray]]:
    """Match tensors to scales; exactly one tensor per declared scale.

    Generic mode pairs each pattern positionally with a downsample factor;
    the named model kinds match all patterns together and order the hits
    lexicographically by tensor name.
    """
    patterns = spec.resolved_patterns()
    factors = spec.resolved_factors()

    if spec.model_kind == "generic":
        if len(patterns) != len(factors):
            raise ExportError(
                f"{len(patterns)} layer patterns for {len(factors)} downsample factors"
            )
        resolved = []
        for pattern in patterns:
            hits = sorted(n for n in tensors if fnmatchcase(n, pattern))
            if not hits:
                raise ExportError(
                    f"no tensor matches pattern {pattern!r}; available: {sorted(tensors)}"
                )
            if len(hits) > 1:
                raise ExportError(f"pattern {pattern!r} is ambiguous; matches {hits}")
            resolved.append((hits[0], tensors[hits[0]]))
        return resolved

    hits = sorted(n for n in tensors if any(fnmatchcase(n, p) for p in patterns))
    if not hits:
        raise ExportError(
            f"no tensor matches patterns {list(patterns)}; available: {sorted(tensors)}"
        )
    if len(hits) != len(factors):
        raise ExportError(
            f"{spec.model_kind} expects {len(factors)} scale tensor(s), "
            f"patterns matched {len(hits)}: {hits}"
        )
    return [(name, tensors[name]) for name in hits]


def export_weights(spec: ExportSpec, out_path) -> Path:
    """Extract the first-layer temporal convolutions and write a weights file."""
    tensors = load_checkpoint(spec.checkpoint_path)
    factors = spec.resolved_factors()
    time_axis = spec.time_axis if spec.model_kind == "generic" else 1

    scales = []
    n_taps = None
    for (name, tensor), factor, scale_name in zip(
        resolve_layers(tensors, spec), factors, ROMAN
    ):
        matrix = _squeeze_to_matrix(name, tensor, time_axis).astype(np.float32)
        if not np.all(np.isfinite(matrix)):
            raise ExportError(f"tensor {name!r} contains non-finite values")
        if matrix.shape[1] < 2:
            raise ExportError(f"tensor {name!r} has {matrix.shape[1]} taps; need >= 2")
        if n_taps is None:
            n_taps = matrix.shape[1]
        elif matrix.shape[1] != n_taps:
            raise ExportError(
                f"tensor {name!r} has {matrix.shape[1]} taps but earlier scales have {n_taps}"
            )
        scales.append(
            {
                "name": scale_name,
                "downsample_factor": int(factor),
                "n_filters": int(matrix.shape[0]),
                "n_taps": int(matrix.shape[1]),
                "filters": [[float(v) for v in row] for row in matrix],
            }
        )

    label = spec.model_label or Path(spec.checkpoint_path).stem
    obj = {
        "format_version": 1,
        "model_label": label,
        "sampling_rate_hz": float(spec.sampling_rate_hz),
        "scales": scales,
    }
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8", newline="\n")
    return out_path
