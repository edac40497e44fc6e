"""Batch command line: replay scenarios, sweep parameters, synthesize, serve.

Exit codes: 0 success, 2 malformed scenario or invalid arguments, 3 server
bind failure. All commands are deterministic given files, flags and seeds;
`--deterministic` additionally suppresses wall-clock metadata in output
headers so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import metrics, scenario as scenario_mod
from .errors import ReachIntentError, ScenarioFormatError
from .geometry import SamplePattern
from .hmm import HmmParams
from .scenario import Scenario, builtin_scenarios, load_scenario, synthesize
from .session import Session, SessionConfig

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_BIND_FAILURE = 3

SWEEPABLE = ("alpha", "beta", "gamma", "delta", "m")

PLANE_NORMAL = (0.0, 0.0, 1.0)  # tabletop plane for the circle pattern


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=None)
    parser.add_argument("--beta", type=float, default=None)
    parser.add_argument("--gamma", type=float, default=None)
    parser.add_argument("--delta", type=float, default=None)
    parser.add_argument("--m", type=int, default=None)
    parser.add_argument("--pattern", choices=("sphere", "circle"), default="sphere")
    parser.add_argument("--epsilon-motion", type=float, default=None)
    parser.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
    parser.add_argument("--deterministic", action="store_true",
                        help="suppress wall-clock metadata in output headers")
    parser.add_argument("--format", choices=("csv", "jsonl"), default="csv")


def _resolve_scenario(name_or_path: str) -> Scenario:
    builtins = builtin_scenarios()
    if name_or_path in builtins:
        return builtins[name_or_path]
    path = Path(name_or_path)
    if not path.exists():
        raise ScenarioFormatError(f"no builtin or file named {name_or_path!r}")
    return load_scenario(path)


def _apply_overrides(sc: Scenario, args) -> tuple[Scenario, SessionConfig]:
    params = HmmParams()
    changes = {
        name: getattr(args, name)
        for name in ("alpha", "beta", "gamma", "delta", "m")
        if getattr(args, name) is not None
    }
    if changes:
        params = params.updated(**changes)
    pattern = (
        SamplePattern.sphere()
        if args.pattern == "sphere"
        else SamplePattern.circle(PLANE_NORMAL)
    )
    config_kwargs = {"params": params, "pattern": pattern}
    if args.epsilon_motion is not None:
        config_kwargs["epsilon_motion"] = args.epsilon_motion
    if args.seed is not None:
        sc = replace(sc, seed=args.seed)
    return sc, SessionConfig(**config_kwargs)


def _config_metadata(sc: Scenario, config: SessionConfig) -> dict:
    params = config.params
    return {
        "scenario": sc.name,
        "seed": sc.seed,
        "alpha": params.alpha,
        "beta": params.beta,
        "gamma": params.gamma,
        "delta": params.delta,
        "m": params.m,
        "pattern": config.pattern.kind,
        "epsilon_motion": config.epsilon_motion,
    }


def run_replay(sc: Scenario, config: SessionConfig, observations=None) -> list[metrics.TraceRecord]:
    """Feed a scenario (or a pre-synthesized stream) through a fresh session."""
    if observations is None:
        observations = synthesize(sc)
    session = Session(config, sc.goals)
    for obs in observations:
        session.observe(obs)
    return metrics.to_records(session.export_trace())


def _write(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def cmd_replay(args) -> int:
    try:
        sc = _resolve_scenario(args.scenario)
        sc, config = _apply_overrides(sc, args)
        observations = None
        if args.observations:
            observations = scenario_mod.read_observations(args.observations)
        records = run_replay(sc, config, observations)
    except (ReachIntentError, OSError) as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    goal_ids = sc.goals.ids()
    meta = _config_metadata(sc, config)
    if args.format == "csv":
        text = metrics.trace_csv(records, goal_ids, meta, args.deterministic)
    else:
        text = metrics.trace_jsonl(records, goal_ids, meta, args.deterministic)
    _write(text, args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.parameter not in SWEEPABLE:
        print(f"unknown sweep parameter {args.parameter!r}; choose from {SWEEPABLE}",
              file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        values = [float(v) for v in args.values.split(",") if v.strip() != ""]
    except ValueError as exc:
        print(f"bad sweep values: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    if not values:
        print("sweep needs at least one value", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        sc = _resolve_scenario(args.scenario)
        sc, base_config = _apply_overrides(sc, args)
        observations = synthesize(sc)
        segment_starts = metrics.first_segment_starts(sc.segment_table())
        rows = []
        for value in values:
            cast = int(value) if args.parameter == "m" else value
            params = base_config.params.updated(**{args.parameter: cast})
            config = replace(base_config, params=params)
            session = Session(config, sc.goals)
            for obs in observations:
                session.observe(obs)
            records = metrics.to_records(session.export_trace())
            rows.append(metrics.sweep_metrics(records, args.parameter, value, segment_starts))
    except (ReachIntentError, OSError) as exc:
        print(f"sweep failed: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    meta = _config_metadata(sc, base_config)
    meta["sweep"] = args.parameter
    _write(metrics.sweep_csv(rows, sc.goals.ids(), meta, args.deterministic), args.output)
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        sc = _resolve_scenario(args.scenario)
        if args.seed is not None:
            sc = replace(sc, seed=args.seed)
        observations = synthesize(sc)
        scenario_mod.write_observations(observations, args.output)
    except (ReachIntentError, OSError) as exc:
        print(f"synth failed: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    return EXIT_OK


def cmd_serve(args) -> int:
    from . import server  # deferred: aiohttp is only needed here

    host, _, port = args.bind.rpartition(":")
    try:
        server.run_server(host or "127.0.0.1", int(port), static_dir=args.static)
    except OSError as exc:
        print(f"bind failed on {args.bind}: {exc}", file=sys.stderr)
        return EXIT_BIND_FAILURE
    except ValueError as exc:
        print(f"bad bind address {args.bind!r}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reachintent",
        description="Goal-intention estimation: replay, sweep, synthesize, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    replay = sub.add_parser("replay", help="run a scenario and write the estimate trace")
    replay.add_argument("scenario", help="builtin name or scenario file path")
    replay.add_argument("--observations", default=None,
                        help="replay a pre-synthesized observation stream instead")
    replay.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    _add_common_options(replay)
    replay.set_defaults(func=cmd_replay)

    sweep = sub.add_parser("sweep", help="replay once per parameter value and summarize")
    sweep.add_argument("scenario")
    sweep.add_argument("--parameter", required=True)
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.add_argument("--output", "-o", default=None)
    _add_common_options(sweep)
    sweep.set_defaults(func=cmd_sweep)

    synth = sub.add_parser("synth", help="write a scenario's observation stream")
    synth.add_argument("scenario")
    synth.add_argument("--output", "-o", required=True)
    synth.add_argument("--seed", type=int, default=None)
    synth.set_defaults(func=cmd_synth)

    serve = sub.add_parser("serve", help="run the streaming playground server")
    serve.add_argument("--bind", default="127.0.0.1:8750", help="host:port")
    serve.add_argument("--static", default=None, help="directory of playground assets")
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
