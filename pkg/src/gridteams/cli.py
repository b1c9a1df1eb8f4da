"""Command line interface.

Subcommand groups:
  scenario   validate / gen / report
  serve      networked session server (HTTP + WebSocket + TCP)
  simulate   headless batch runs with scripted agents
  summaries  per-agent summary table from a session log
  metrics    derived metrics and CSV exports from a session log
  rubric     weights / score / compare for testbed evaluation
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "handler"):
        parser.print_help()
        return 2
    return args.handler(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridteams", description=__doc__)
    parser.add_argument("--version", action="version", version=f"gridteams {__version__}")
    sub = parser.add_subparsers(dest="command")

    # scenario ---------------------------------------------------------------
    scenario = sub.add_parser("scenario", help="author, validate, and inspect scenarios")
    scenario_sub = scenario.add_subparsers(dest="subcommand")

    validate_p = scenario_sub.add_parser("validate", help="check a scenario file")
    validate_p.add_argument("file")
    validate_p.add_argument("--lenient", action="store_true", help="warn on unknown keys")
    validate_p.set_defaults(handler=cmd_scenario_validate)

    gen_p = scenario_sub.add_parser("gen", help="generate a scenario")
    gen_p.add_argument("--rooms", required=True, metavar="RxC")
    gen_p.add_argument("--colors", required=True, type=int)
    gen_p.add_argument("--seq", required=True, type=int)
    gen_p.add_argument("--density", required=True, type=int)
    gen_p.add_argument("--decoy", type=float, default=0.0)
    gen_p.add_argument("--seed", type=int, default=0)
    gen_p.add_argument("--slots", type=int, default=4)
    gen_p.add_argument("--name")
    gen_p.add_argument("--time-limit", type=int, default=600)
    gen_p.add_argument("-o", "--out", required=True)
    gen_p.set_defaults(handler=cmd_scenario_gen)

    report_p = scenario_sub.add_parser("report", help="difficulty knob report")
    report_p.add_argument("file")
    report_p.set_defaults(handler=cmd_scenario_report)

    # serve -------------------------------------------------------------------
    serve_p = sub.add_parser("serve", help="run the session server")
    serve_p.add_argument("--scenario", help="open one session from this file at startup")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.add_argument("--tcp-port", type=int, help="raw TCP transport port (default: port+1)")
    serve_p.add_argument("--seed", type=int)
    serve_p.add_argument("--session-id")
    serve_p.add_argument("--pacing", choices=("realtime", "lockstep"), default="realtime")
    serve_p.add_argument("--log-dir", help="session log directory (or $GRIDTEAMS_LOG_DIR)")
    serve_p.add_argument("--static", help="directory of web client assets to serve at /ui")
    serve_p.set_defaults(handler=cmd_serve)

    # simulate ------------------------------------------------------------
    sim_p = sub.add_parser("simulate", help="headless batch trials with scripted agents")
    sim_p.add_argument("--scenario", required=True)
    sim_p.add_argument(
        "--agents",
        required=True,
        help="policy spec: slot=policy[,slot=policy...]; 'all=greedy' covers every slot; "
        "policies: greedy|random|pair_scout|pair_carrier",
    )
    sim_p.add_argument("--trials", type=int, default=1)
    sim_p.add_argument("--seed", type=int, default=0, help="base seed; trial t uses seed+t")
    sim_p.add_argument("--out", default="runs")
    sim_p.set_defaults(handler=cmd_simulate)

    # telemetry ------------------------------------------------------------
    summaries_p = sub.add_parser("summaries", help="per-agent summaries from a log")
    summaries_p.add_argument("log")
    summaries_p.set_defaults(handler=cmd_summaries)

    metrics_p = sub.add_parser("metrics", help="derived metrics and CSV export from a log")
    metrics_p.add_argument("log")
    metrics_p.add_argument("--out", help="directory for events/summaries/metrics/surveys CSVs")
    metrics_p.set_defaults(handler=cmd_metrics)

    # rubric ----------------------------------------------------------------
    rubric = sub.add_parser("rubric", help="testbed evaluation toolkit")
    rubric_sub = rubric.add_subparsers(dest="subcommand")

    weights_p = rubric_sub.add_parser("weights", help="derive criterion weights")
    weights_p.add_argument("features", help="features.csv")
    weights_p.add_argument("--agg", choices=("mean", "sum"), default="mean")
    weights_p.add_argument("--overrides", help="overrides.csv")
    weights_p.add_argument(
        "--z-file",
        help="use these z-scores instead of computing them from the feature table",
    )
    weights_p.add_argument("-o", "--out", required=True, help="weights.json destination")
    weights_p.set_defaults(handler=cmd_rubric_weights)

    score_p = rubric_sub.add_parser("score", help="weighted totals for rating sheets")
    score_p.add_argument("weights", help="weights.json")
    score_p.add_argument("ratings", help="ratings.csv")
    score_p.add_argument("--stated", help="stated_totals.csv to audit against")
    score_p.add_argument("-o", "--out", help="report.csv destination")
    score_p.set_defaults(handler=cmd_rubric_score)

    compare_p = rubric_sub.add_parser("compare", help="flag rating discrepancies")
    compare_p.add_argument("ratings", help="ratings.csv")
    compare_p.add_argument("--evaluators", nargs=2, metavar=("A", "B"), required=True)
    compare_p.add_argument("--threshold", type=int, default=2)
    compare_p.add_argument("--testbed", help="restrict to one testbed")
    compare_p.set_defaults(handler=cmd_rubric_compare)

    return parser


# -- scenario handlers --------------------------------------------------------


def cmd_scenario_validate(args) -> int:
    from .scenario import ScenarioParseError, load, validate

    try:
        scenario = load(args.file, strict=not args.lenient)
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    report = validate(scenario)
    print(report.render())
    return 0 if report.ok else 1


def cmd_scenario_gen(args) -> int:
    from .scenario import GenerationError, generate, save, validate

    params = {
        "rooms": args.rooms,
        "colors": args.colors,
        "seq": args.seq,
        "density": args.density,
        "decoy": args.decoy,
        "slots": args.slots,
        "time_limit_ticks": args.time_limit,
    }
    if args.name:
        params["name"] = args.name
    try:
        scenario = generate(params, args.seed)
    except GenerationError as exc:
        print(f"infeasible parameters: {exc}", file=sys.stderr)
        return 2
    report = validate(scenario)
    save(scenario, args.out)
    print(f"wrote {args.out} ({'ok' if report.ok else 'INVALID'})")
    if not report.ok:
        print(report.render(), file=sys.stderr)
        return 1
    return 0


def cmd_scenario_report(args) -> int:
    from .scenario import load, render_difficulty_report

    print(render_difficulty_report(load(args.file)))
    return 0


# -- serve / simulate ---------------------------------------------------------


def cmd_serve(args) -> int:
    from .net.http import run_server
    from .scenario import load

    scenario = load(args.scenario) if args.scenario else None
    run_server(
        host=args.host,
        port=args.port,
        tcp_port=args.tcp_port,
        log_dir=args.log_dir,
        static_dir=args.static,
        scenario=scenario,
        seed=args.seed,
        session_id=args.session_id,
        pacing=args.pacing,
    )
    return 0


def cmd_simulate(args) -> int:
    from .agents import BatchSpec, HeadlessError, parse_assignments, run_batch
    from .scenario import load, validate

    scenario = load(args.scenario)
    report = validate(scenario)
    if not report.ok:
        print(report.render(), file=sys.stderr)
        return 1
    try:
        assignments = parse_assignments(args.agents, [s.name for s in scenario.slots])
        outcomes = run_batch(
            BatchSpec(
                scenario=scenario,
                assignments=assignments,
                trials=args.trials,
                base_seed=args.seed,
                out_dir=args.out,
            )
        )
    except (ValueError, HeadlessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    completed = 0
    for outcome in outcomes:
        r = outcome.result
        completed += r.completion
        print(
            f"trial {outcome.trial} seed {outcome.seed}: "
            f"{'completed' if r.completion else 'timeout'} "
            f"duration={r.duration_ticks} score={r.final_score} "
            f"faults={outcome.policy_faults} log={outcome.log_path}"
        )
    print(f"{completed}/{len(outcomes)} trials completed")
    return 0


# -- telemetry handlers -------------------------------------------------------


def cmd_summaries(args) -> int:
    from .telemetry import agent_summaries, read_log

    summaries = agent_summaries(read_log(args.log))
    header = (
        f"{'player':>6} {'role':<12} {'correct':>7} {'incorrect':>9} "
        f"{'idle':>6} {'rooms':>5} {'dist':>5} {'msgs':>5}"
    )
    print(header)
    for s in summaries:
        print(
            f"{s.player_id:>6} {s.role_id:<12} {s.correct_drops:>7} {s.incorrect_drops:>9} "
            f"{s.idle_ticks:>6} {s.rooms_entered:>5} {s.distance_cells:>5} "
            f"{sum(s.messages_sent.values()):>5}"
        )
    return 0


def cmd_metrics(args) -> int:
    from .telemetry import derived_metrics, export_table, read_log

    records = read_log(args.log)
    metrics = derived_metrics(records)
    print(json.dumps(metrics.to_json_obj(), indent=2, sort_keys=True))
    if args.out:
        out = Path(args.out)
        for table in ("events", "summaries", "metrics", "surveys"):
            path = export_table(records, table, out / f"{table}.csv")
            print(f"wrote {path}")
    return 0


# -- rubric handlers ----------------------------------------------------------


def cmd_rubric_weights(args) -> int:
    from .rubric import (
        apply_overrides,
        criterion_weight_scores,
        load_features,
        load_overrides,
        load_zscores,
        save_weights,
        weights_from_z,
        zscores,
    )

    rows = load_features(args.features)
    group_scores = criterion_weight_scores(rows, aggregation=args.agg)
    z = load_zscores(args.z_file) if args.z_file else zscores(group_scores)
    derived = weights_from_z(z)
    overrides = load_overrides(args.overrides) if args.overrides else {}
    weights = apply_overrides(group_scores, z, derived, overrides)
    save_weights(weights, args.out)
    final = weights.final
    print(f"wrote {args.out}")
    for criterion, weight in final.items():
        marker = " (override)" if criterion in weights.overrides else ""
        print(f"  {criterion}: {weight}{marker}")
    return 0


def cmd_rubric_score(args) -> int:
    from .rubric import (
        audit_totals,
        load_ratings,
        load_stated_totals,
        load_weights,
        weighted_total,
        write_score_report,
    )

    weights = load_weights(args.weights)
    sheets = load_ratings(args.ratings)
    reports = [weighted_total(weights, sheet) for sheet in sheets]
    stated = load_stated_totals(args.stated) if args.stated else {}
    audits = audit_totals(weights, sheets, stated)
    for report, audit in zip(reports, audits):
        line = f"{report.testbed} [{report.evaluator}]: {report.total}/{report.max_possible}"
        if audit.mismatch:
            line += f"  MISMATCH: stated total {audit.stated} != recomputed {audit.recomputed}"
        print(line)
    if args.out:
        write_score_report(reports, args.out)
        print(f"wrote {args.out}")
    return 1 if any(a.mismatch for a in audits) else 0


def cmd_rubric_compare(args) -> int:
    from .rubric import load_ratings, rater_discrepancies

    sheets = load_ratings(args.ratings)
    a_name, b_name = args.evaluators
    by_testbed: dict[str, dict[str, object]] = {}
    for sheet in sheets:
        by_testbed.setdefault(sheet.testbed, {})[sheet.evaluator] = sheet
    flagged_any = False
    for testbed, evals in sorted(by_testbed.items()):
        if args.testbed and testbed != args.testbed:
            continue
        if a_name not in evals or b_name not in evals:
            continue
        flags = rater_discrepancies(evals[a_name], evals[b_name], threshold=args.threshold)
        for d in flags:
            flagged_any = True
            print(f"{testbed}: {d.criterion} differs by {d.difference} ({d.a} vs {d.b})")
    if not flagged_any:
        print("no discrepancies above the threshold")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
