"""Command-line interface.

Subcommands: fit, assign, analyze, sweep, synth, report.  Every command is
deterministic given its flags; JSON carries full precision, tables print 4
decimals, and ``--format svg`` draws the three-circle information diagram.

Exit codes: 0 success, 1 runtime/data error, 2 usage error (including an
infeasible cluster count).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InfeasibleError, ModmiError
from .infotheory import InfoQuantities
from .ingestion import load_manifest, read_feature_matrix, write_feature_matrix, write_labels
from .pipeline import AnalysisConfig, InfoReport, analyze, sweep_clusters
from .quantizer import assign, fit, load_codebook, save_codebook
from .synthetic import exhaustive_stream, gen_gaussian_mixture, xor_pmf

TABLE_COLUMNS_3 = ["H(T)", "H(S)", "H(V)", "I(T;V)", "I(T;S)", "I(V;S)", "I(V;T;S)"]
TABLE_COLUMNS_2 = ["H(T)", "H(S)", "I(T;S)"]


def _fmt(value: float) -> str:
    text = f"{value:.4f}"
    return "0.0000" if text == "-0.0000" else text


def _table_values(q: InfoQuantities) -> list[float]:
    if q.arity == 3:
        return [q.h_t, q.h_s, q.h_v, q.i_tv, q.i_ts, q.i_vs, q.i_vts]
    return [q.h_t, q.h_s, q.i_ts]


def render_table(report: InfoReport) -> str:
    columns = TABLE_COLUMNS_3 if report.quantities.arity == 3 else TABLE_COLUMNS_2
    values = " ".join(_fmt(v) for v in _table_values(report.quantities))
    return " ".join(columns) + "\n" + values + "\n"


def render_sweep_table(reports: list[InfoReport]) -> str:
    columns = TABLE_COLUMNS_3 if reports[0].quantities.arity == 3 else TABLE_COLUMNS_2
    lines = ["k " + " ".join(columns)]
    for report in reports:
        row = " ".join(_fmt(v) for v in _table_values(report.quantities))
        lines.append(f"{report.config.clusters} {row}")
    return "\n".join(lines) + "\n"


# Fixed layout for the three-circle diagram: circle centers and the anchor
# point of each of the seven region labels.
_CIRCLES = {"V": (250.0, 215.0), "S": (390.0, 215.0), "T": (320.0, 330.0)}
_RADIUS = 118.0
_REGION_XY = {
    "V|T,S": (205.0, 185.0),
    "S|V,T": (435.0, 185.0),
    "T|V,S": (320.0, 390.0),
    "V;S|T": (320.0, 185.0),
    "V;T|S": (255.0, 295.0),
    "T;S|V": (385.0, 295.0),
    "V;T;S": (320.0, 255.0),
}


def render_diagram_svg(q: InfoQuantities, title: str = "") -> str:
    """Information diagram: three circles, seven region values."""
    if q.arity != 3:
        raise ModmiError("the information diagram needs a three-stream report")
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="640" height="470" '
        'viewBox="0 0 640 470">',
        '<rect width="640" height="470" fill="white"/>',
        f'<text x="320" y="34" text-anchor="middle" font-size="18" '
        f'font-family="sans-serif">{title or "Information diagram"}</text>',
    ]
    fills = {"V": "#e41a1c", "S": "#377eb8", "T": "#4daf4a"}
    for name, (cx, cy) in _CIRCLES.items():
        parts.append(
            f'<circle cx="{cx:g}" cy="{cy:g}" r="{_RADIUS:g}" fill="{fills[name]}" '
            f'fill-opacity="0.18" stroke="{fills[name]}" stroke-width="2"/>'
        )
    entropies = {"V": q.h_v, "S": q.h_s, "T": q.h_t}
    label_xy = {"V": (140.0, 105.0), "S": (500.0, 105.0), "T": (320.0, 462.0)}
    for name, (x, y) in label_xy.items():
        parts.append(
            f'<text x="{x:g}" y="{y:g}" text-anchor="middle" font-size="16" '
            f'font-family="sans-serif" fill="{fills[name]}">H({name}) = '
            f"{_fmt(entropies[name])}</text>"
        )
    for region, (x, y) in _REGION_XY.items():
        parts.append(
            f'<text x="{x:g}" y="{y:g}" text-anchor="middle" font-size="13" '
            f'font-family="sans-serif">{_fmt(q.regions[region])}</text>'
        )
    parts.append(
        f'<text x="320" y="442" text-anchor="middle" font-size="12" font-family="sans-serif">'
        f"log base {q.log_base}; center is I(V;T;S)</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config_from_args(args) -> AnalysisConfig:
    return AnalysisConfig(
        target_rate_hz=args.rate,
        clusters=args.clusters,
        seed=args.seed,
        tol=args.tol,
        max_iter=args.max_iter,
        normalize=args.normalize,
        log_base=args.base,
    )


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--clusters", type=int, default=2000, help="clusters per continuous stream")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (pcg64)")
    p.add_argument("--rate", type=float, default=None, help="target frame rate in Hz (default: manifest's)")
    p.add_argument("--base", choices=["2", "e", "10"], default="2", help="log base")
    p.add_argument("--tol", type=float, default=1e-4, help="relative distortion improvement to stop at")
    p.add_argument("--max-iter", type=int, default=300, help="max K-means iterations")
    p.add_argument("--normalize", action="store_true", help="z-normalize features per dimension")


def _render_report(report: InfoReport, fmt: str, out: str | None, title: str = "") -> None:
    if fmt == "json":
        _emit(report.to_json(), out)
    elif fmt == "table":
        _emit(render_table(report), out)
    else:
        _emit(render_diagram_svg(report.quantities, title), out)


def cmd_fit(args) -> int:
    features = read_feature_matrix(args.features)
    cb = fit(
        features,
        args.clusters,
        seed=args.seed,
        tol=args.tol,
        max_iter=args.max_iter,
        normalize=args.normalize,
    )
    save_codebook(cb, args.out)
    print(f"k={cb.k} iterations={cb.iterations_run} distortion={cb.final_distortion:.6g}")
    return 0


def cmd_assign(args) -> int:
    cb = load_codebook(args.codebook)
    features = read_feature_matrix(args.features)
    labels = assign(cb, features)
    write_labels(labels, args.out)
    print(f"wrote {labels.rows} labels over alphabet {labels.alphabet_size}")
    return 0


def cmd_analyze(args) -> int:
    report = analyze(load_manifest(args.manifest), _config_from_args(args))
    _render_report(report, args.format, args.out, title=Path(args.manifest).stem)
    return 0


def _parse_ks(text: str, parser: argparse.ArgumentParser) -> list[int]:
    try:
        ks = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        parser.error(f"--ks must be comma-separated integers, got {text!r}")
    if not ks:
        parser.error("--ks must name at least one cluster count")
    return ks


def cmd_sweep(args, parser) -> int:
    ks = _parse_ks(args.ks, parser)
    reports = sweep_clusters(load_manifest(args.manifest), _config_from_args(args), ks)
    if args.format == "json":
        text = "[\n" + ",\n".join(r.to_json().rstrip("\n") for r in reports) + "\n]\n"
        _emit(text, args.out)
    else:
        _emit(render_sweep_table(reports), args.out)
    return 0


def cmd_report(args) -> int:
    report = InfoReport.from_json(Path(args.report).read_text())
    _render_report(report, args.format, args.out, title=Path(args.report).stem)
    return 0


def cmd_synth(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.generator == "xor":
        streams = exhaustive_stream(xor_pmf(), copies=args.copies, tags=["v", "t", "s"])
        entries = []
        for stream in streams:
            path = out_dir / f"{stream.modality_tag}.lbl"
            write_labels(stream, path)
            entries.append(
                {
                    "name": stream.modality_tag,
                    "path": path.name,
                    "kind": "labels",
                    "sample_rate_hz": stream.sample_rate_hz,
                }
            )
        manifest = {"target_rate_hz": 25.0, "streams": entries}
    else:  # blobs
        centers = np.zeros((args.centers, args.dims))
        centers[:, 0] = args.spacing * np.arange(args.centers)
        features, components = gen_gaussian_mixture(
            centers, args.stddev, args.n_per_center, args.seed
        )
        write_feature_matrix(features, out_dir / "s.fmx")
        write_labels(components, out_dir / "t.lbl")
        manifest = {
            "target_rate_hz": 25.0,
            "streams": [
                {
                    "name": "s",
                    "path": "s.fmx",
                    "kind": "features",
                    "sample_rate_hz": 25.0,
                    "clusters": args.centers,
                },
                {"name": "t", "path": "t.lbl", "kind": "labels", "sample_rate_hz": 25.0},
            ],
        }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out_dir / 'manifest.json'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modmi",
        description="Entropy / mutual-information analysis of aligned multimodal streams",
    )
    parser.add_argument("--version", action="version", version=f"modmi {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="train a K-means codebook on an FMX1 feature file")
    p.add_argument("features", help="FMX1 feature file")
    _add_config_flags(p)
    p.add_argument("--out", required=True, help="output KMC1 codebook path")

    p = sub.add_parser("assign", help="label features with an existing codebook")
    p.add_argument("codebook", help="KMC1 codebook file")
    p.add_argument("features", help="FMX1 feature file")
    p.add_argument("--out", required=True, help="output LBL1 labels path")

    p = sub.add_parser("analyze", help="full analysis of a stream manifest")
    p.add_argument("manifest", help="manifest JSON path")
    _add_config_flags(p)
    p.add_argument("--format", choices=["json", "table", "svg"], default="json")
    p.add_argument("--out", default=None, help="output path (default: stdout)")

    p = sub.add_parser("sweep", help="analyze under several cluster counts")
    p.add_argument("manifest", help="manifest JSON path")
    p.add_argument("--ks", required=True, help="comma-separated cluster counts, e.g. 100,200")
    _add_config_flags(p)
    p.add_argument("--format", choices=["json", "table"], default="table")
    p.add_argument("--out", default=None)

    p = sub.add_parser("report", help="re-render a saved JSON report")
    p.add_argument("report", help="InfoReport JSON path")
    p.add_argument("--format", choices=["json", "table", "svg"], default="table")
    p.add_argument("--out", default=None)

    p = sub.add_parser("synth", help="generate synthetic demo datasets")
    p.add_argument("generator", choices=["xor", "blobs"])
    p.add_argument("--out-dir", required=True)
    p.add_argument("--copies", type=int, default=1, help="xor: copies of the 4-frame block")
    p.add_argument("--centers", type=int, default=3, help="blobs: number of components")
    p.add_argument("--dims", type=int, default=16, help="blobs: feature dimensions")
    p.add_argument("--n-per-center", type=int, default=1000)
    p.add_argument("--stddev", type=float, default=1.0)
    p.add_argument("--spacing", type=float, default=100.0, help="blobs: distance between centers")
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "fit": cmd_fit,
        "assign": cmd_assign,
        "analyze": cmd_analyze,
        "report": cmd_report,
        "synth": cmd_synth,
    }
    try:
        if args.command == "sweep":
            return cmd_sweep(args, parser)
        return handlers[args.command](args)
    except InfeasibleError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ModmiError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
