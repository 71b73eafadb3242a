"""Operator command line: run episodes, replay traces, serve the control API.

Exit codes for `run` map the episode's final status: 0 completed, 3 step
limit, 4 error, 5 aborted, 6 awaiting user; argparse usage errors exit 2.
`replay --verify` exits 1 on any step mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime
from pathlib import Path

from deskagent import fixtures
from deskagent.agent.adapters import ApiAdapter, Instruction, ScriptedAdapter
from deskagent.agent.episode import EpisodeLimits, ToolRegistry, run_episode
from deskagent.agent.prompt import default_template, format_datetime
from deskagent.agent.replay import NotReplayable, replay_trace
from deskagent.agent.trace import save_trace
from deskagent.backends.live import LiveDesktop
from deskagent.backends.simulated import SimulatedDesktop, parse_scene
from deskagent.clock import counter_clock, wall_clock
from deskagent.errors import BackendUnavailable
from deskagent.screen import (
    DisplayGeometry,
    default_resolution,
    format_resolution,
    parse_resolution,
)
from deskagent.service.config import load_config
from deskagent.service.manager import SessionManager, SessionNotFound, SessionStateError
from deskagent.service.http import create_app
from deskagent.tools.computer import ComputerTool, ScreenshotStore
from deskagent.tools.editor import EditorTool
from deskagent.tools.shell import BashTool

EXIT_CODES = {
    "completed": 0,
    "step_limit": 3,
    "error": 4,
    "aborted": 5,
    "awaiting_user": 6,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deskagent",
        description="Computer-use agent runtime: run, replay, serve, annotate.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    run = sub.add_parser("run", help="run one episode and record its trace")
    run.add_argument("instruction", help="the task, in natural language")
    run.add_argument("--backend", choices=("simulated", "live"), default="simulated")
    run.add_argument(
        "--scene",
        default="demo_scene",
        help="scene fixture: a path or a packaged fixture name (simulated backend)",
    )
    run.add_argument(
        "--adapter",
        default="scripted:demo_script",
        help="scripted:<script path or fixture> or api:<endpoint url>",
    )
    run.add_argument("--max-steps", type=int, default=40)
    run.add_argument("--history-cap", type=int, default=10)
    run.add_argument(
        "--resolution",
        default=None,
        help=(
            "model resolution WxH; defaults to the platform suggestion "
            f"({format_resolution(default_resolution(sys.platform))} here, "
            "1366x768 on Windows, 1344x756 on macOS) or the scene resolution "
            "for simulated runs"
        ),
    )
    run.add_argument("--out", default="traces", help="directory that receives the trace")
    run.add_argument("--episode-id", default=None)
    run.add_argument("--jail", default=None, help="editor jail root (default: <out>/jail)")

    replay = sub.add_parser("replay", help="re-execute a recorded trace")
    replay.add_argument("trace", help="trace directory")
    replay.add_argument(
        "--verify",
        action="store_true",
        help="compare results, events, and screenshot bytes per step",
    )

    serve = sub.add_parser("serve", help="run the session service")
    serve.add_argument("--bind", default=None, help="host:port (default from config)")
    serve.add_argument("--config", default=None, help="JSON config file")

    list_cmd = sub.add_parser("list", help="list recorded sessions")
    list_cmd.add_argument("--data-dir", default="deskagent-data")
    list_cmd.add_argument("--status", default=None)
    list_cmd.add_argument("--outcome", default=None, choices=("Success", "Failed"))

    annotate = sub.add_parser("annotate", help="record a review outcome for a session")
    annotate.add_argument("session_id")
    annotate.add_argument("outcome", choices=("Success", "Failed"))
    annotate.add_argument("--category", choices=("PE", "AE", "CE"), default=None)
    annotate.add_argument("--note", default=None)
    annotate.add_argument("--data-dir", default="deskagent-data")

    fixtures_cmd = sub.add_parser("fixtures", help="inspect packaged fixtures")
    fixtures_sub = fixtures_cmd.add_subparsers(dest="fixtures_command", required=True)
    fixtures_sub.add_parser("list", help="names of packaged fixtures")
    show = fixtures_sub.add_parser("show", help="print one fixture")
    show.add_argument("name")
    export = fixtures_sub.add_parser("export", help="copy a fixture to a file")
    export.add_argument("name")
    export.add_argument("dest")

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    episode_id = args.episode_id or f"run-{datetime.now():%Y%m%d-%H%M%S}"
    out_dir = Path(args.out) / episode_id

    if args.backend == "simulated":
        try:
            scene_text = fixtures.resolve_fixture_text(args.scene)
            scene = parse_scene(scene_text)
        except (FileNotFoundError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        backend = SimulatedDesktop(scene)
        model_resolution = (
            parse_resolution(args.resolution) if args.resolution else scene.resolution
        )
        geometry = DisplayGeometry(model_resolution, scene.resolution)
        event_log = backend.event_log
    else:
        try:
            backend = LiveDesktop()
        except BackendUnavailable as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        scene_text = None
        model_resolution = parse_resolution(
            args.resolution or format_resolution(default_resolution(sys.platform))
        )
        geometry = DisplayGeometry(model_resolution, backend.physical_resolution)
        event_log = None

    kind, _, ref = args.adapter.partition(":")
    scripted = None
    if kind == "scripted":
        try:
            script_text = fixtures.resolve_fixture_text(ref or "demo_script")
        except FileNotFoundError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        out_dir.mkdir(parents=True, exist_ok=True)
        script_path = out_dir / "script.jsonl"
        script_path.write_text(script_text, encoding="utf-8")
        scripted = ScriptedAdapter.from_jsonl(script_path)
        adapter = scripted
    elif kind == "api":
        if not ref:
            print("error: api adapter needs an endpoint url", file=sys.stderr)
            return 2
        adapter = ApiAdapter(
            endpoint=ref,
            prompt_template=default_template(),
            prompt_config={
                "screen_resolution": format_resolution(geometry.model_resolution),
                "datetime": format_datetime(datetime.now()),
            },
        )
    else:
        print(f"error: unknown adapter kind {kind!r}", file=sys.stderr)
        return 2

    deterministic = args.backend == "simulated" and scripted is not None
    clock = counter_clock() if deterministic else wall_clock

    out_dir.mkdir(parents=True, exist_ok=True)
    jail = Path(args.jail) if args.jail else out_dir / "jail"
    jail.mkdir(parents=True, exist_ok=True)
    store = ScreenshotStore(directory=out_dir)
    bash_tool = BashTool()
    tools = ToolRegistry(
        {
            "computer": ComputerTool(backend, geometry, store=store, clock=clock),
            "str_replace_editor": EditorTool(root_jail=jail),
            "bash": bash_tool,
        }
    )

    config = {
        "backend": args.backend,
        "adapter": kind,
        "model_resolution": format_resolution(geometry.model_resolution),
        "physical_resolution": format_resolution(geometry.physical_resolution),
        "deterministic": deterministic,
    }
    if scene_text is not None:
        config["scene_text"] = scene_text

    try:
        trace = run_episode(
            adapter,
            tools,
            Instruction(text=args.instruction),
            EpisodeLimits(max_steps=args.max_steps, history_cap=args.history_cap),
            store=store,
            episode_id=episode_id,
            clock=clock,
            backend_event_log=event_log,
            config=config,
        )
    finally:
        bash_tool.close()
    if args.backend == "simulated":
        trace.config["final_counters"] = dict(backend.scene.counters)
    save_trace(trace, out_dir)
    print(f"trace: {out_dir}")
    print(f"final_status: {trace.final_status}")
    return EXIT_CODES.get(trace.final_status, 4)


def _cmd_replay(args: argparse.Namespace) -> int:
    trace_dir = Path(args.trace)
    if not (trace_dir / "manifest.json").exists():
        print(f"error: {trace_dir} is not a trace directory", file=sys.stderr)
        return 2
    try:
        report, backend = replay_trace(trace_dir, verify=args.verify)
    except NotReplayable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: corrupt trace: {exc}", file=sys.stderr)
        return 2
    if args.verify:
        for step in report.steps:
            print(f"step {step.step}: {'PASS' if step.ok else 'FAIL'}")
            for mismatch in step.mismatches:
                print(f"  - {mismatch}")
        for mismatch in report.final_mismatches:
            print(f"final state: FAIL - {mismatch}")
        print(f"replay: {'PASS' if report.ok else 'FAIL'}")
        return 0 if report.ok else 1
    print(f"replayed {len(report.steps)} steps")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    config = load_config(args.config)
    if args.bind:
        config.bind = args.bind
    manager = SessionManager(config)
    app = create_app(manager)
    host, port = config.bind_host_port
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    except SystemExit:
        raise
    finally:
        manager.shutdown()
    return 0


def _cmd_list(args: argparse.Namespace) -> int:
    config = load_config(None)
    config.data_dir = args.data_dir
    manager = SessionManager(config)
    records = manager.list_records(status=args.status, outcome=args.outcome)
    for record in records:
        outcome = record.outcome or "-"
        category = record.error_category or "-"
        print(
            f"{record.session_id}  {record.status:<18} {outcome:<8} {category:<3} "
            f"{record.instruction[:60]}"
        )
    if not records:
        print("(no sessions)")
    return 0


def _cmd_annotate(args: argparse.Namespace) -> int:
    config = load_config(None)
    config.data_dir = args.data_dir
    manager = SessionManager(config)
    try:
        record = manager.annotate(
            args.session_id, args.outcome, error_category=args.category, note=args.note
        )
    except SessionNotFound:
        print(f"error: no session {args.session_id!r}", file=sys.stderr)
        return 2
    except SessionStateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(record.to_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_fixtures(args: argparse.Namespace) -> int:
    if args.fixtures_command == "list":
        for name in fixtures.list_fixtures():
            print(name)
        return 0
    try:
        content = fixtures.read_fixture(args.name)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.fixtures_command == "show":
        print(content, end="")
        return 0
    Path(args.dest).write_text(content, encoding="utf-8")
    print(f"wrote {args.dest}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "replay": _cmd_replay,
        "serve": _cmd_serve,
        "list": _cmd_list,
        "annotate": _cmd_annotate,
        "fixtures": _cmd_fixtures,
    }
    return handlers[args.subcommand](args)


if __name__ == "__main__":
    sys.exit(main())
