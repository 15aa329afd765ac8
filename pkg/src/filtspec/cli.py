"""Command-line pipeline: fixture synthesis, filter-spectrum retrieval,
between-class variation, and correlation reporting.

Exit statuses: 0 success, 1 usage error, 2 invalid input, 3 internal error.
All outputs are byte-deterministic for identical inputs, including across
`--threads` settings (workers only parallelize independent channels and the
merge order is fixed).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import svgplot
from .analysis import (
    EEG_BANDS,
    LOWER_BAND,
    BandDefinition,
    channel_correlations,
    rank_agreement,
)
from .errors import FormatError, InvalidInputError, ToolError
from .filterspectrum import (
    FilterBank,
    ScaleSpec,
    build_unification_matrix,
    retrieve_filter_spectrum,
    scale_frequencies,
    unique_frequencies,
)
from .formats import (
    ReportTables,
    channel_file_token,
    load_accuracies,
    load_dataset,
    load_weights,
    save_dataset,
    save_weights,
    write_report,
)
from .spectral import WelchConfig
from .synth import (
    DEFAULT_CHANNELS,
    SynthConfig,
    eegnet_like_bank,
    gen_two_class_dataset,
    msacnn_like_bank,
)
from .variation import between_class_variation, class_statistics


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _parse_downsample(text: str) -> list[int]:
    try:
        factors = [int(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise UsageError(f"--downsample expects integers, got {text!r}") from exc
    if not factors or any(f < 1 for f in factors):
        raise UsageError(f"--downsample expects positive integers, got {text!r}")
    return factors


def _parse_band(text: str) -> BandDefinition:
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"--band expects LOW:HIGH, got {text!r}")
    try:
        low, high = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise UsageError(f"--band expects numbers, got {text!r}") from exc
    try:
        return BandDefinition("custom", low, high)
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from exc


def _override_downsample(bank: FilterBank, factors: list[int]) -> FilterBank:
    if len(factors) != len(bank.scales):
        raise InvalidInputError(
            f"--downsample lists {len(factors)} factors for {len(bank.scales)} scales"
        )
    scales = [ScaleSpec(s.name, d) for s, d in zip(bank.scales, factors)]
    return FilterBank(
        sampling_rate_hz=bank.sampling_rate_hz,
        scales=scales,
        weights=bank.weights,
        model_label=bank.model_label,
        digest=bank.digest,
    )


def _welch_config(args) -> WelchConfig:
    return WelchConfig(
        segment_length=args.welch_segment,
        overlap_fraction=args.welch_overlap,
    )


def _map_channels(fn, n_channels: int, threads: int) -> list:
    if threads < 1:
        raise UsageError(f"--threads must be >= 1, got {threads}")
    if threads == 1:
        return [fn(c) for c in range(n_channels)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_channels)))


def _write_text(path: Path, text: str) -> Path:
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise FormatError(f"unwritable: {exc}", str(path)) from exc
    return path


def _compute_bcvs(dataset, config: WelchConfig, threads: int) -> list:
    def one(channel: int):
        return between_class_variation(class_statistics(dataset, channel, config))

    return _map_channels(one, len(dataset.channels), threads)


def _plot_scaled(values: np.ndarray, frequencies: np.ndarray) -> np.ndarray:
    """Rescale a curve by the std of its finite values in the lower band;
    falls back to the raw curve when that std is zero (plot-only behavior)."""
    in_band = (frequencies >= LOWER_BAND.low_hz) & (frequencies <= LOWER_BAND.high_hz)
    selected = values[in_band]
    selected = selected[np.isfinite(selected)]
    if selected.size < 2:
        return values
    std = float(np.sqrt(np.mean((selected - np.mean(selected)) ** 2)))
    return values / std if std > 0 else values


def _spectrum_sources(bank: FilterBank) -> list[str]:
    scale_grid = scale_frequencies(bank)
    unified = unique_frequencies(scale_grid)
    matrix = build_unification_matrix(scale_grid, unified)
    sources: list[list[str]] = [[] for _ in range(len(unified))]
    for j, entry in enumerate(scale_grid.entries):
        sources[matrix.column_rows[j]].append(bank.scales[entry.scale_index].name)
    return ["+".join(names) for names in sources]


def _announce(paths) -> None:
    for path in paths:
        print(path)


def cmd_filter_spectrum(args) -> int:
    bank = load_weights(args.weights)
    if args.downsample is not None:
        bank = _override_downsample(bank, args.downsample)
    spectrum = retrieve_filter_spectrum(bank)
    tables = ReportTables(spectrum=spectrum, spectrum_sources=_spectrum_sources(bank))
    written = write_report(tables, args.out)
    if args.plot:
        freqs = spectrum.grid.values_hz
        svg = svgplot.line_plot(
            title=f"Filter spectrum: {bank.model_label or 'unlabelled'}",
            xlabel="frequency (Hz)",
            ylabel="rescaled amplitude",
            curves=[svgplot.Curve(x=list(freqs), y=list(_plot_scaled(spectrum.amplitudes, freqs)))],
            bands=EEG_BANDS,
        )
        written.append(_write_text(Path(args.out) / "spectrum.svg", svg))
    _announce(written)
    return 0


def cmd_bcv(args) -> int:
    dataset = load_dataset(args.manifest)
    bcvs = _compute_bcvs(dataset, _welch_config(args), args.threads)
    written = write_report(ReportTables(bcvs=bcvs), args.out)
    if args.plot:
        for bcv in bcvs:
            freqs = bcv.frequencies_hz
            svg = svgplot.line_plot(
                title=f"Between-class variation: {bcv.channel.name}",
                xlabel="frequency (Hz)",
                ylabel="rescaled ratio",
                curves=[
                    svgplot.Curve(
                        x=list(freqs),
                        y=list(_plot_scaled(bcv.ratio, freqs)),
                        dashed=True,
                    )
                ],
                bands=EEG_BANDS,
            )
            token = channel_file_token(bcv.channel.name)
            written.append(_write_text(Path(args.out) / f"bcv_{token}.svg", svg))
    _announce(written)
    return 0


def cmd_correlate(args) -> int:
    bank = load_weights(args.weights)
    if args.downsample is not None:
        bank = _override_downsample(bank, args.downsample)
    dataset = load_dataset(args.manifest)
    spectrum = retrieve_filter_spectrum(bank)
    bcvs = _compute_bcvs(dataset, _welch_config(args), args.threads)
    dataset_label = Path(args.manifest).name.removesuffix(".manifest.json")
    band = args.band if args.band is not None else LOWER_BAND
    report = channel_correlations(spectrum, bcvs, band, dataset_label=dataset_label)
    rho = None
    if args.accuracies is not None:
        rho = rank_agreement(report, load_accuracies(args.accuracies))
    written = write_report(
        ReportTables(correlations=report, rank_agreement_rho=rho), args.out
    )
    if args.plot:
        bars = [
            (
                entry.channel,
                0.0 if not entry.valid else entry.r,
                svgplot.MODALITY_COLORS.get(entry.modality, svgplot.MODALITY_COLORS["other"]),
            )
            for entry in report.entries
        ]
        svg = svgplot.bar_chart(
            title=f"Spectrum/BCV correlation: band {band.low_hz:g}-{band.high_hz:g} Hz",
            ylabel="Pearson r",
            bars=bars,
        )
        written.append(_write_text(Path(args.out) / "correlations.svg", svg))
    _announce(written)
    return 0


def cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.kind == "eegnet-like":
        written = [save_weights(eegnet_like_bank(), out / "eegnet_like.weights.json")]
    elif args.kind == "msacnn-like":
        factors = tuple(args.downsample) if args.downsample is not None else (1, 2, 4, 8)
        written = [save_weights(msacnn_like_bank(factors), out / "msacnn_like.weights.json")]
    else:  # two-class (argparse restricts choices)
        config = SynthConfig(seed=args.seed)
        dataset = gen_two_class_dataset(config, DEFAULT_CHANNELS)
        written = list(save_dataset(dataset, out / "two_class.manifest.json"))
    _announce(written)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="filtspec",
        description=(
            "Explain spectral processing of convolutional EEG classifiers: retrieve "
            "first-layer filter spectra, measure between-class spectral variation, "
            "and correlate the two per channel."
        ),
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add_common(p, plot=True, threads=False, welch=False, band=False, downsample=False):
        p.add_argument("--out", default=".", help="output directory")
        if plot:
            p.add_argument("--plot", action="store_true", help="also write SVG figures")
        if threads:
            p.add_argument("--threads", type=int, default=1, help="worker threads over channels")
        if welch:
            p.add_argument(
                "--welch-segment",
                type=int,
                default=None,
                help="Welch segment length; min(256, epoch length) when omitted",
            )
            p.add_argument("--welch-overlap", type=float, default=0.5, help="segment overlap fraction")
        if band:
            p.add_argument(
                "--band",
                type=_parse_band,
                default=None,
                help="correlation band LOW:HIGH in Hz; the lower EEG bands 0.5:12 when omitted",
            )
        if downsample:
            p.add_argument(
                "--downsample",
                type=_parse_downsample,
                default=None,
                help="comma-separated per-scale downsample factors overriding the file",
            )

    p_spec = sub.add_parser(
        "filter-spectrum",
        help="unified filter amplitude spectrum of a weights file",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p_spec.add_argument("weights", help="path to a .weights.json file")
    add_common(p_spec, downsample=True)
    p_spec.set_defaults(func=cmd_filter_spectrum)

    p_bcv = sub.add_parser(
        "bcv",
        help="per-channel between-class spectral variation of a dataset",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p_bcv.add_argument("manifest", help="path to a .manifest.json dataset")
    add_common(p_bcv, threads=True, welch=True)
    p_bcv.set_defaults(func=cmd_bcv)

    p_corr = sub.add_parser(
        "correlate",
        help="band-restricted correlation of filter spectrum vs. BCV per channel",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p_corr.add_argument("weights", help="path to a .weights.json file")
    p_corr.add_argument("manifest", help="path to a .manifest.json dataset")
    p_corr.add_argument(
        "--accuracies",
        default=None,
        help="optional channel,accuracy CSV; adds a Spearman rank-agreement footer",
    )
    add_common(p_corr, threads=True, welch=True, band=True, downsample=True)
    p_corr.set_defaults(func=cmd_correlate)

    p_synth = sub.add_parser(
        "synth",
        help="write deterministic fixture files",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p_synth.add_argument(
        "kind",
        choices=("eegnet-like", "msacnn-like", "two-class"),
        help="fixture kind",
    )
    p_synth.add_argument("--seed", type=int, default=0, help="seed for the two-class dataset")
    add_common(p_synth, plot=False, downsample=True)
    p_synth.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ToolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
