"""Command-line front end.

Subcommands cover the full pipeline on files: simulate score streams and
volume dumps, score dumped predictions, scan for ranking stabilization,
materialize pruned subsets, and render reports. Chart subcommands write
``<prefix>.csv`` and ``<prefix>.svg`` side by side.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .dynamics import DadWindow, snapshot, stability_scan
from .errors import EngineError
from .formats import (
    append_scores,
    ingest_scores,
    score_volumes,
    write_manifest,
    write_volume,
)
from .pruning import STRATEGIES, prune, rank
from .report import read_l_curve_csv, rank_listing, render_datamap, render_l_curve
from .simulate import (
    DEFAULT_TAU0,
    SimSampleSpec,
    converging_ensemble,
    planted_ensemble,
    simulate_mask_sequence,
    simulate_trajectories,
    random_blob_mask,
)


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(part) for part in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dims {text!r}; expected e.g. 32x32 or 16x16x16")
    if len(dims) not in (2, 3) or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError(f"dims must be 2 or 3 positive axes, got {text!r}")
    return dims


def _ensemble(args) -> list[SimSampleSpec]:
    if args.converging:
        return converging_ensemble(
            args.n, args.seed, eta=args.eta, onset_max=args.onset_max, tau0=args.tau0
        )
    return planted_ensemble(
        args.n, args.seed, eta=args.eta, onset_max=args.onset_max, tau0=args.tau0
    )


def _cmd_simulate_stream(args) -> int:
    records = simulate_trajectories(_ensemble(args), args.epochs, args.seed)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    n = append_scores(args.out, records)
    print(f"wrote {n} score lines to {args.out}")
    return 0


def _cmd_simulate_volumes(args) -> int:
    out = Path(args.out)
    truth_dir = out / "truth"
    truth_dir.mkdir(parents=True, exist_ok=True)
    specs = _ensemble(args)
    for i, spec in enumerate(specs):
        truth = random_blob_mask(args.dims, seed=args.seed + i)
        write_volume(truth_dir / f"{spec.sample_id}.ddt1", truth)
        volumes = simulate_mask_sequence(truth, spec, args.epochs, args.seed)
        for e, vol in enumerate(volumes, start=1):
            epoch_dir = out / f"epoch_{e:04d}"
            epoch_dir.mkdir(exist_ok=True)
            write_volume(epoch_dir / f"{spec.sample_id}.ddt1", vol)
    print(f"wrote truth + {args.epochs} epoch dirs for {len(specs)} samples under {out}")
    return 0


def _cmd_score(args) -> int:
    records = score_volumes(args.pred, args.truth, args.epoch, tuple(args.extra))
    n = append_scores(args.out, records)
    print(f"appended {n} score lines for epoch {args.epoch} to {args.out}")
    return 0


def _cmd_prune(args) -> int:
    store = ingest_scores(args.stream)
    for w in store.warnings:
        print(f"warning: {w}", file=sys.stderr)
    epoch = args.epoch if args.epoch is not None else store.epochs[-1]
    snap = snapshot(store, epoch, DadWindow(args.window))
    manifest = prune(rank(snap), args.strategy, args.p, seed=args.seed)
    write_manifest(args.out, manifest)
    print(
        f"{args.strategy} prune at p={args.p}: kept {len(manifest.kept)} "
        f"of {manifest.sample_count} (epoch {epoch}) -> {args.out}"
    )
    return 0


def _cmd_stop_scan(args) -> int:
    store = ingest_scores(args.stream)
    for w in store.warnings:
        print(f"warning: {w}", file=sys.stderr)
    result = stability_scan(
        store,
        DadWindow(args.window),
        cadence=args.cadence,
        signed=args.signed,
        threshold=args.threshold,
    )
    if args.csv:
        csv_text, _ = render_l_curve(result.points, args.threshold)
        Path(args.csv).write_text(csv_text, encoding="utf-8")
        print(f"wrote L-curve CSV to {args.csv}")
    if result.stop_epoch is not None:
        print(f"stop: ranking stabilized at epoch {result.stop_epoch} "
              f"(L max {result.l_max:.6g})")
        if args.signal_file:
            Path(args.signal_file).write_text(f"{result.stop_epoch}\n", encoding="utf-8")
            print(f"signal file written to {args.signal_file}")
    else:
        print(f"no stop: L has not fallen below {args.threshold:g} of its max "
              f"over {len(result.points)} snapshots")
    return 0


def _write_pair(prefix: str, csv_text: str, svg_text: str) -> None:
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)
    Path(prefix + ".csv").write_text(csv_text, encoding="utf-8")
    Path(prefix + ".svg").write_text(svg_text, encoding="utf-8")
    print(f"wrote {prefix}.csv and {prefix}.svg")


def _cmd_report_datamap(args) -> int:
    store = ingest_scores(args.stream)
    epoch = args.epoch if args.epoch is not None else store.epochs[-1]
    snap = snapshot(store, epoch, DadWindow(args.window))
    csv_text, svg_text = render_datamap(snap, args.p)
    _write_pair(args.prefix, csv_text, svg_text)
    return 0


def _cmd_report_lcurve(args) -> int:
    if args.from_csv:
        points = read_l_curve_csv(Path(args.from_csv).read_text(encoding="utf-8"))
        csv_text, svg_text = render_l_curve(points, args.threshold)
    else:
        store = ingest_scores(args.stream)
        result = stability_scan(
            store, DadWindow(args.window), cadence=args.cadence, threshold=args.threshold
        )
        csv_text, svg_text = render_l_curve(result.points, args.threshold)
    _write_pair(args.prefix, csv_text, svg_text)
    return 0


def _cmd_report_listing(args) -> int:
    store = ingest_scores(args.stream)
    epoch = args.epoch if args.epoch is not None else store.epochs[-1]
    snap = snapshot(store, epoch, DadWindow(args.window))
    text = rank_listing(rank(snap), args.k)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote listing to {args.out}")
    else:
        print(text, end="")
    return 0


def _add_sim_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=100, help="ensemble size")
    p.add_argument("--epochs", type=int, required=True, help="epochs to simulate")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--eta", type=float, default=0.02, help="noise amplitude")
    p.add_argument("--onset-max", type=int, default=30, help="max onset delay")
    p.add_argument("--tau0", type=float, default=DEFAULT_TAU0, help="base time constant")
    p.add_argument("--converging", action="store_true",
                   help="pin all plateaus to 1.0 (score-collapse ensemble)")


def _add_window_option(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", type=int, default=10, help="trailing window length")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segprune",
        description="Rank, prune and report on segmentation training dynamics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate synthetic inputs")
    sim_sub = sim.add_subparsers(dest="what", required=True)
    ss = sim_sub.add_parser("stream", help="emit a score stream")
    _add_sim_options(ss)
    ss.add_argument("--out", required=True, help="score stream path (appended)")
    ss.set_defaults(func=_cmd_simulate_stream)
    sv = sim_sub.add_parser("volumes", help="emit truth + per-epoch prediction dumps")
    _add_sim_options(sv)
    sv.add_argument("--dims", type=_parse_dims, default=(32, 32), help="e.g. 32x32 or 16x16x16")
    sv.add_argument("--out", required=True, help="output directory")
    sv.set_defaults(func=_cmd_simulate_volumes)

    sc = sub.add_parser("score", help="dice dumped predictions against truths")
    sc.add_argument("--pred", required=True, help="prediction volume directory")
    sc.add_argument("--truth", required=True, help="ground-truth volume directory")
    sc.add_argument("--epoch", type=int, required=True)
    sc.add_argument("--extra", action="append", default=[], choices=["el2n", "el2nx"],
                    help="additional metrics (repeatable)")
    sc.add_argument("--out", required=True, help="score stream path (appended)")
    sc.set_defaults(func=_cmd_score)

    pr = sub.add_parser("prune", help="rank a stream and materialize a subset")
    pr.add_argument("--stream", required=True)
    pr.add_argument("--epoch", type=int, default=None, help="scoring epoch (default: last)")
    _add_window_option(pr)
    pr.add_argument("--strategy", required=True, choices=STRATEGIES)
    pr.add_argument("--p", type=float, required=True, help="fraction to prune")
    pr.add_argument("--seed", type=int, default=None, help="required for random strategy")
    pr.add_argument("--out", required=True, help="manifest path")
    pr.set_defaults(func=_cmd_prune)

    st = sub.add_parser("stop-scan", help="compute the moving-distance curve and stop rule")
    st.add_argument("--stream", required=True)
    _add_window_option(st)
    st.add_argument("--cadence", type=int, default=None, help="epochs between snapshots")
    st.add_argument("--threshold", type=float, default=0.01, help="stop fraction of peak")
    st.add_argument("--signed", action="store_true", help="sum signed deltas instead of absolute")
    st.add_argument("--csv", default=None, help="write the L-curve CSV here")
    st.add_argument("--signal-file", default=None,
                    help="write this sentinel file when the stop rule fires")
    st.set_defaults(func=_cmd_stop_scan)

    rep = sub.add_parser("report", help="render CSV+SVG reports")
    rep_sub = rep.add_subparsers(dest="what", required=True)
    dm = rep_sub.add_parser("datamap", help="confidence/variability scatter")
    dm.add_argument("--stream", required=True)
    dm.add_argument("--epoch", type=int, default=None, help="snapshot epoch (default: last)")
    _add_window_option(dm)
    dm.add_argument("--p", type=float, required=True, help="band fraction")
    dm.add_argument("--prefix", required=True, help="writes <prefix>.csv and <prefix>.svg")
    dm.set_defaults(func=_cmd_report_datamap)
    lc = rep_sub.add_parser("lcurve", help="moving-distance curve")
    group = lc.add_mutually_exclusive_group(required=True)
    group.add_argument("--stream")
    group.add_argument("--from-csv", help="re-render a previously written L-curve CSV")
    _add_window_option(lc)
    lc.add_argument("--cadence", type=int, default=None)
    lc.add_argument("--threshold", type=float, default=0.01)
    lc.add_argument("--prefix", required=True)
    lc.set_defaults(func=_cmd_report_lcurve)
    li = rep_sub.add_parser("listing", help="hardest/easiest samples as text")
    li.add_argument("--stream", required=True)
    li.add_argument("--epoch", type=int, default=None)
    _add_window_option(li)
    li.add_argument("--k", type=int, default=9)
    li.add_argument("--out", default=None, help="write here instead of stdout")
    li.set_defaults(func=_cmd_report_listing)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
