"""Command-line entry point: run, sweep, analyze, presets."""
from __future__ import annotations

import argparse
import itertools
import logging
import sys
from pathlib import Path

from . import __version__
from .config import (ConfigError, Scenario, build_params, dump_scenario, flatten_params, get_preset,
                     load_scenario, presets)
from .denoise import tv_denoise
from .export import (export_results, fmt, read_manifest, read_metrics, read_profiles, write_manifest,
                     write_ratios, write_rows, write_trajectory)
from .influence import Influence, InfluenceSchedule, ScheduleError
from .metrics import SeriesStats, ensemble_ratio
from .projection import project_trajectory
from .rng import SeedSpec, derive_substream
from .simulation import run_ensemble

log = logging.getLogger("collmind")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3
DEFAULT_RATIO_METRICS = ("news_target", "news_target_tier1", "news_target_tier2", "news_target_tier3",
                         "comment_target", "kd_general_comment")


def _scenario_from_args(args) -> Scenario:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        sc = load_scenario(args.config)
    elif args.preset:
        sc = get_preset(args.preset)
    else:
        sc = get_preset("baseline")
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.replicas is not None:
        if args.replicas < 1:
            raise ConfigError("--replicas must be >= 1")
        changes["replicas"] = args.replicas
    if args.snapshot_every is not None:
        if args.snapshot_every < 0:
            raise ConfigError("--snapshot-every must be >= 0")
        changes["snapshot_every"] = args.snapshot_every
    return sc.replace(**changes)


def _execute(sc: Scenario, out: Path, jobs: int) -> None:
    res = run_ensemble(sc.params, sc.schedule, sc.replicas, sc.seed, jobs=jobs, snapshot_every=sc.snapshot_every)
    export_results(res, sc, out)
    log.info("wrote %s", out)


def cmd_run(args) -> int:
    sc = _scenario_from_args(args)
    _execute(sc, Path(args.out), args.jobs)
    return EXIT_OK


def _floats(text: str | None) -> list:
    if not text:
        return [None]
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad number list {text!r}") from None


def _label(v) -> str:
    return f"{v:g}".replace(".", "p")


def cmd_sweep(args) -> int:
    base = _scenario_from_args(args)
    kind = args.kind or (base.schedule.entries[0].kind if base.schedule.entries else None)
    strengths = _floats(args.strength)
    if strengths != [None] and kind is None:
        raise ConfigError("--strength needs a scenario with an influence (or --kind)")
    cells = []
    for lf, lm, s in itertools.product(_floats(args.lambda_f), _floats(args.lambda_m), strengths):
        flat = flatten_params(base.params)
        parts = []
        if lf is not None:
            flat["lambda_f"] = lf
            parts.append(f"lf{_label(lf)}")
        if lm is not None:
            flat["lambda_m"] = lm
            parts.append(f"lm{_label(lm)}")
        entries = list(base.schedule.entries)
        if s is not None:
            try:
                entries = [Influence(e.kind, e.start, e.end, s, e.target_topic, e.target_tier) if e.kind == kind else e
                           for e in entries]
            except ScheduleError as exc:
                raise ConfigError(str(exc)) from exc
            parts.append(f"s{_label(s)}")
        params = build_params(flat)
        schedule = InfluenceSchedule(tuple(entries))
        try:
            schedule.validate(params.horizon, params.n_topics, params.n_tiers)
        except ScheduleError as exc:
            raise ConfigError(str(exc)) from exc
        name = "_".join(parts) or "base"
        cells.append((name, base.replace(name=f"{base.name}_{name}", params=params, schedule=schedule)))
    out = Path(args.out)
    for name, sc in cells:
        _execute(sc, out / name, args.jobs)
    return EXIT_OK


def _load_run(path: Path):
    manifest = path / "manifest.ini"
    if not manifest.exists():
        raise ConfigError(f"{path} is not a run directory (no manifest.ini)")
    stats = {name: SeriesStats(m, s, n) for name, (m, s, n) in read_metrics(path / "metrics.csv").items()}
    return stats, read_manifest(manifest)


def cmd_analyze(args) -> int:
    inf_dir, base_dir, out = Path(args.influenced), Path(args.baseline), Path(args.out)
    inf, inf_manifest = _load_run(inf_dir)
    base, _ = _load_run(base_dir)
    names = args.metrics.split(",") if args.metrics else [m for m in DEFAULT_RATIO_METRICS if m in inf]
    for m in names:
        if m not in inf or m not in base:
            raise ConfigError(f"metric {m!r} missing from one of the runs")
    out.mkdir(parents=True, exist_ok=True)
    files = []

    ratios = {}
    for m in names:
        try:
            ratio, band = ensemble_ratio(inf[m], base[m], standard_error=not args.spread)
        except ValueError as exc:
            raise ConfigError(f"{m}: runs are not comparable ({exc})") from exc
        ratios[m] = (ratio, band, tv_denoise(ratio, args.denoise) if args.denoise > 0 else ratio)
    files.append(out / "ratios.csv")
    write_ratios(files[-1], ratios)

    rows = []
    if "sim_target_top" in inf and "sim_target_top" in base:
        top = inf["sim_target_top"].mean - base["sim_target_top"].mean
        bot = inf["sim_target_bottom"].mean - base["sim_target_bottom"].mean
        rows = [(t, fmt(a), fmt(b)) for t, (a, b) in enumerate(zip(top, bot))]
    files.append(out / "quantile_diff.csv")
    write_rows(files[-1], ("step", "top_diff", "bottom_diff"), rows)

    trajectories = None
    if args.project:
        seed = int(inf_manifest["run"].get("master_seed", "0")) if inf_manifest.has_section("run") else 0
        stream = derive_substream(SeedSpec(seed, 0, "analysis"))
        pts = project_trajectory([read_profiles(inf_dir / "profiles.csv"), read_profiles(base_dir / "profiles.csv")],
                                 stream, smooth_window=args.smooth_window, perplexity=args.perplexity)
        trajectories = {"influenced": pts[0], "baseline": pts[1]}
    files.append(out / "trajectory.csv")
    write_trajectory(files[-1], trajectories)
    write_manifest(out, None, files, {"influenced": inf_dir, "baseline": base_dir, "denoise_lambda": args.denoise,
                                      "band": "spread" if args.spread else "standard_error"})
    return EXIT_OK


def cmd_presets(args) -> int:
    table = presets()
    if args.show:
        sc = get_preset(args.show)
        sys.stdout.write(dump_scenario(sc))
        return EXIT_OK
    width = max(map(len, table))
    for name, sc in table.items():
        print(f"{name:<{width}}  {sc.description}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="collmind", description="Collective-mind ensemble simulations.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_flags(sp):
        sp.add_argument("--config", help="scenario INI file")
        sp.add_argument("--preset", help="shipped scenario name (see `presets`)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--replicas", type=int)
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")
        sp.add_argument("--snapshot-every", type=int, help="community snapshot cadence for replica 0 (0 = off)")
        sp.add_argument("--out", required=True, help="output directory")

    sp = sub.add_parser("run", help="run one scenario ensemble")
    scenario_flags(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="grid over filter strength x memory strength x influence strength")
    scenario_flags(sp)
    sp.add_argument("--lambda-f", help="comma-separated filter strengths")
    sp.add_argument("--lambda-m", help="comma-separated memory strengths")
    sp.add_argument("--strength", help="comma-separated influence strengths")
    sp.add_argument("--kind", help="influence kind the strength grid applies to (default: first entry)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("analyze", help="ratios, similarity differences, denoising and projection")
    sp.add_argument("--influenced", required=True)
    sp.add_argument("--baseline", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--metrics", help="comma-separated metric names")
    sp.add_argument("--denoise", type=float, default=0.4, help="TV penalty (0 disables)")
    sp.add_argument("--spread", action="store_true", help="band from replica spread instead of standard error")
    sp.add_argument("--project", action="store_true", help="also embed both mean comment profiles in 2-D")
    sp.add_argument("--smooth-window", type=int, default=25)
    sp.add_argument("--perplexity", type=float, default=30.0)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("presets", help="list shipped scenarios")
    sp.add_argument("--show", metavar="NAME", help="print one preset as INI")
    sp.set_defaults(func=cmd_presets)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ScheduleError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
