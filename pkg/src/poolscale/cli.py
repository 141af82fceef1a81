"""Command-line pipeline: validate inputs, generate synthetic pools, run the
full frontier + fit analysis, and emit CSV/JSON/SVG reports.

All outputs are plain text (CSV, JSON, SVG) and deterministic given the
inputs: files are written atomically (temp then rename), and any failure
removes the files created by the current invocation before exiting nonzero
with a machine-readable error JSON on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from poolscale.core_data import LossMatrix, load_loss_matrix, write_matrix_csv, write_metadata_csv
from poolscale.diversity import pairwise_frontiers_and_fits
from poolscale.enumeration import enumerate_pruned
from poolscale.fitting import FitConfig, ScalingFit, fit_scaling_law
from poolscale.oracle import build_min_vector, oracle_loss
from poolscale.pareto import Frontier, FrontierPoint, pareto_front
from poolscale.svgplot import emit_svg_plot
from poolscale.synth import SynthConfig, generative_equation, synth_pool

FRONTIER_HEADER = ["k", "total_params_billions", "oracle_loss_nats_per_token", "ensemble_key"]


class _Writer:
    """Atomic file writer that can roll back everything it created."""

    def __init__(self):
        self.created: list[Path] = []

    def write_text(self, path: Path, text: str) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
        self.created.append(path)

    def rollback(self) -> None:
        for path in self.created:
            try:
                path.unlink()
            except OSError:
                pass


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def frontier_csv(frontier: Frontier) -> str:
    lines = [",".join(FRONTIER_HEADER)]
    for p in frontier:
        lines.append(
            f"{len(p.ensemble_key)},{_fmt(p.total_params_billions)},{_fmt(p.loss)},"
            + "+".join(p.ensemble_key)
        )
    return "\n".join(lines) + "\n"


def read_frontier_csv(path: Path) -> Frontier:
    points = []
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != FRONTIER_HEADER:
            raise ValueError(f"bad frontier header {header!r}")
        for row in reader:
            if not row:
                continue
            points.append(FrontierPoint(float(row[1]), float(row[2]), tuple(row[3].split("+"))))
    return Frontier(tuple(points))


def fit_json(fit: ScalingFit | None, skip_reason: str | None = None) -> str:
    payload = fit.to_dict() if fit is not None else {"skipped": skip_reason}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def read_fit_json(path: Path) -> ScalingFit | None:
    payload = json.loads(path.read_text(encoding="utf-8"))
    if "skipped" in payload:
        return None
    return ScalingFit(**payload)


def _singleton_frontier(matrix: LossMatrix, dominance: str) -> tuple[Frontier, Frontier]:
    points = []
    for mid in matrix.model_ids:
        ev = oracle_loss(matrix, build_min_vector(matrix, {mid}))
        points.append(FrontierPoint(ev.total_params_billions, ev.oracle_loss, (mid,)))
    return Frontier(tuple(sorted(points))), pareto_front(points, dominance=dominance)


def _try_fit(frontier: Frontier, config: FitConfig) -> tuple[ScalingFit | None, str | None]:
    try:
        return fit_scaling_law(frontier, config), None
    except ValueError as exc:
        return None, str(exc)


def cmd_validate(args, writer: _Writer) -> int:
    matrix = load_loss_matrix(args.metadata, args.matrix)
    print(
        json.dumps(
            {
                "models": len(matrix.models),
                "texts": len(matrix.texts),
                "cells": len(matrix.models) * len(matrix.texts),
                "n_bar": matrix.n_bar,
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_synth(args, writer: _Writer) -> int:
    config = SynthConfig(
        n_families=args.n_families,
        models_per_family=args.models_per_family,
        params_grid_billions=tuple(float(p) for p in args.params_grid.split(",")),
        n_texts=args.n_texts,
        base_floor=args.base_floor,
        family_signature_strength=args.signature_strength,
        noise_sigma=args.noise_sigma,
        seed=args.seed,
    )
    matrix = synth_pool(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_metadata_csv(matrix, out / "metadata.csv")
    write_matrix_csv(matrix, out / "matrix.csv")
    writer.created.extend([out / "metadata.csv", out / "matrix.csv"])
    writer.write_text(
        out / "generator.json",
        json.dumps({"equation": generative_equation(config), "config": config.__dict__}, sort_keys=True, indent=2)
        + "\n",
    )
    return 0


def cmd_run(args, writer: _Writer) -> int:
    matrix = load_loss_matrix(args.metadata, args.matrix)
    out = Path(args.out)
    config = FitConfig()
    mode = args.mode
    plot_series = []

    if mode in ("single", "all"):
        _, single_frontier = _singleton_frontier(matrix, args.dominance)
        fit, reason = _try_fit(single_frontier, config)
        writer.write_text(out / "single_frontier.csv", frontier_csv(single_frontier))
        writer.write_text(out / "single_fit.json", fit_json(fit, reason))
        plot_series.append(("single model", single_frontier, fit))

    if mode in ("ensemble", "all"):
        k_max = args.k_max if args.k_max is not None else len(matrix.models)
        result = enumerate_pruned(matrix, k_max, dominance=args.dominance)
        stats = "".join(
            json.dumps({"k": g.k, "candidates": g.explored_count, "pareto": len(g.frontier)}) + "\n"
            for g in result.generations
        )
        writer.write_text(out / "generations.jsonl", stats)
        fit, reason = _try_fit(result.merged, config)
        writer.write_text(out / "ensemble_frontier.csv", frontier_csv(result.merged))
        writer.write_text(out / "ensemble_fit.json", fit_json(fit, reason))
        plot_series.append(("model ensemble", result.merged, fit))

    if plot_series:
        writer.write_text(out / "scaling_plot.svg", emit_svg_plot(plot_series))

    if mode in ("pairs", "all") and len(matrix.models) >= 2:
        homo, hetero = pairwise_frontiers_and_fits(matrix, config, dominance=args.dominance)
        lines = ["side,raw_pairs,pareto_pairs,L_inf,A,alpha"]
        for side in (homo, hetero):
            if side.fit is not None:
                lines.append(
                    f"{side.label},{side.raw_pairs},{len(side.frontier)},"
                    f"{_fmt(side.fit.L_inf)},{_fmt(side.fit.A)},{_fmt(side.fit.alpha)}"
                )
            else:
                lines.append(f"{side.label},{side.raw_pairs},{len(side.frontier)},skipped,skipped,skipped")
        writer.write_text(out / "pairs_report.csv", "\n".join(lines) + "\n")
        writer.write_text(out / "homogeneous_frontier.csv", frontier_csv(homo.frontier))
        writer.write_text(out / "heterogeneous_frontier.csv", frontier_csv(hetero.frontier))
        writer.write_text(
            out / "pairs_plot.svg",
            emit_svg_plot(
                [("same-family pairs", homo.frontier, homo.fit), ("cross-family pairs", hetero.frontier, hetero.fit)],
                title="Pairwise oracle loss vs total parameters",
            ),
        )
    return 0


def cmd_fit(args, writer: _Writer) -> int:
    frontier = read_frontier_csv(Path(args.frontier))
    fit = fit_scaling_law(frontier, FitConfig())
    text = fit_json(fit)
    if args.out:
        writer.write_text(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_pairs(args, writer: _Writer) -> int:
    matrix = load_loss_matrix(args.metadata, args.matrix)
    homo, hetero = pairwise_frontiers_and_fits(matrix, FitConfig(), dominance=args.dominance)
    lines = ["side,raw_pairs,pareto_pairs,L_inf,A,alpha"]
    for side in (homo, hetero):
        if side.fit is not None:
            lines.append(
                f"{side.label},{side.raw_pairs},{len(side.frontier)},"
                f"{_fmt(side.fit.L_inf)},{_fmt(side.fit.A)},{_fmt(side.fit.alpha)}"
            )
        else:
            lines.append(f"{side.label},{side.raw_pairs},{len(side.frontier)},skipped,skipped,skipped")
    text = "\n".join(lines) + "\n"
    if args.out:
        writer.write_text(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_plot(args, writer: _Writer) -> int:
    if len(args.label) != len(args.frontier):
        raise ValueError("each --frontier needs a matching --label")
    fits = list(args.fit or [])
    fits += ["none"] * (len(args.frontier) - len(fits))
    series = []
    for label, fpath, fitpath in zip(args.label, args.frontier, fits):
        fit = read_fit_json(Path(fitpath)) if fitpath != "none" else None
        series.append((label, read_frontier_csv(Path(fpath)), fit))
    writer.write_text(Path(args.out), emit_svg_plot(series))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poolscale", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_inputs(p):
        p.add_argument("--metadata", required=True, help="model metadata CSV")
        p.add_argument("--matrix", required=True, help="loss matrix CSV")

    p = sub.add_parser("validate", help="load and validate a loss matrix")
    add_inputs(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="generate a synthetic pool")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-families", type=int, default=3)
    p.add_argument("--models-per-family", type=int, default=4)
    p.add_argument("--params-grid", default="0.5,1.0,2.0,4.0")
    p.add_argument("--n-texts", type=int, default=60)
    p.add_argument("--base-floor", type=float, default=1.0)
    p.add_argument("--signature-strength", type=float, default=0.0)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="full pipeline: frontiers, fits, pairs, plots")
    add_inputs(p)
    p.add_argument("--out", required=True)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--mode", choices=["single", "ensemble", "pairs", "all"], default="all")
    p.add_argument("--dominance", choices=["weak", "strict"], default="weak")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("fit", help="fit the scaling law to a frontier CSV")
    p.add_argument("--frontier", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("pairs", help="same-family vs cross-family pair report")
    add_inputs(p)
    p.add_argument("--out", default=None)
    p.add_argument("--dominance", choices=["weak", "strict"], default="weak")
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("plot", help="render frontier CSVs (+ optional fits) to SVG")
    p.add_argument("--frontier", action="append", required=True)
    p.add_argument("--fit", action="append", help="fit JSON per frontier, or 'none'")
    p.add_argument("--label", action="append", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    writer = _Writer()
    try:
        return args.func(args, writer)
    except (ValueError, OSError) as exc:
        writer.rollback()
        sys.stderr.write(json.dumps({"error": str(exc)}, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
