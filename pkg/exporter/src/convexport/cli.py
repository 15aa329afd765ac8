"""export-weights: checkpoint -> weights interchange file.

Exit statuses: 0 success, 1 usage error, 2 export/input error, 3 internal.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .export import MODEL_KINDS, ExportError, ExportSpec, export_weights


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="export-weights",
        description=(
            "Extract first-layer temporal convolution weights from a model "
            "checkpoint (.npz archive or PyTorch state dict) and write them "
            "as a format_version 1 .weights.json file."
        ),
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--checkpoint", required=True, help="checkpoint path (.npz, .pt, .pth)")
    parser.add_argument("--model", required=True, choices=MODEL_KINDS, help="model kind")
    parser.add_argument("--rate", required=True, type=float, help="sampling rate in Hz")
    parser.add_argument("--out", required=True, help="output .weights.json path")
    parser.add_argument(
        "--layer",
        action="append",
        default=None,
        metavar="PATTERN",
        help="tensor name pattern (repeatable; generic mode pairs patterns "
        "with --downsample factors positionally)",
    )
    parser.add_argument(
        "--downsample",
        default=None,
        help="comma-separated per-scale downsample factors",
    )
    parser.add_argument(
        "--time-axis",
        type=int,
        choices=(0, 1),
        default=None,
        help="temporal axis of the squeezed 2-d tensor (generic mode only)",
    )
    parser.add_argument("--label", default="", help="model label (default: checkpoint stem)")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        factors = None
        if args.downsample is not None:
            factors = tuple(int(part) for part in args.downsample.split(",") if part != "")
        spec = ExportSpec(
            checkpoint_path=Path(args.checkpoint),
            model_kind=args.model,
            sampling_rate_hz=args.rate,
            layer_patterns=tuple(args.layer) if args.layer else None,
            downsample_factors=factors,
            time_axis=args.time_axis,
            model_label=args.label,
        )
        path = export_weights(spec, args.out)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
