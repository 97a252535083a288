"""Command line front end.

Subcommands: fields, solve, slice, play, sweep, histogram, serve.
SEG_LOG sets the log level (DEBUG/INFO/WARNING/ERROR).  A JSON config file
(--config) supplies defaults; explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig
from .grid import Grid2D, ScalarField, dump_field, load_field, write_pgm
from .scene import SceneDescription, signed_distance

log = logging.getLogger("seg")


def _setup_logging() -> None:
    level = os.environ.get("SEG_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_scene(path: str) -> SceneDescription:
    try:
        return SceneDescription.load(path)
    except json.JSONDecodeError as err:
        raise SystemExit(f"error: {path}: invalid JSON at line {err.lineno} "
                         f"column {err.colno}: {err.msg}")
    except FileNotFoundError:
        raise SystemExit(f"error: scene file not found: {path}")
    except (ValueError, KeyError, TypeError) as err:
        raise SystemExit(f"error: {path}: {err}")


def _parse_cell(text: str) -> tuple[int, int]:
    try:
        i, j = (int(v) for v in text.split(","))
        return (i, j)
    except ValueError:
        raise SystemExit(f"error: expected a cell as I,J, got {text!r}")


def _parse_cells(text: str) -> list[tuple[int, int]]:
    return [_parse_cell(part) for part in text.split(";") if part]


def _config_from(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if getattr(args, "config", None) else RunConfig()
    overrides = {}
    for key in ("m", "f_p", "f_e", "horizon", "dt", "stop_tol", "k_max", "seed",
                "workers", "mcts_iterations", "mcts_epsilon", "mcts_alpha",
                "mcts_tau", "aux_mode", "allow_large"):
        if hasattr(args, key):
            overrides[key] = getattr(args, key)
    return cfg.override(**overrides)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_fields(args) -> int:
    from .visibility import vantage_fields

    cfg = _config_from(args)
    scene = _load_scene(args.scene)
    grid = Grid2D(cfg.m)
    phi = signed_distance(scene, grid)
    vantage = _parse_cell(args.vantage)
    try:
        fields = vantage_fields(phi, vantage, cfg.aux_mode)
    except ValueError as err:
        raise SystemExit(f"error: {err}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    named = {
        "occluder": phi,
        "visibility": fields.visibility,
        "grazing": fields.grazing,
        "auxiliary": fields.auxiliary,
        "auxiliary_visibility": fields.auxiliary_visibility,
        "shadow": fields.shadow,
    }
    extra = {"vantage": list(vantage), "scene_hash": scene.scene_hash()}
    for name, field in named.items():
        dump_field(field, out / name, name, extra=extra)
        write_pgm(field.values, out / f"{name}.pgm", mode="sign")
    log.info("wrote %d fields to %s", len(named), out)
    print(f"fields: wrote {', '.join(named)} to {out}")
    return 0


def cmd_solve(args) -> int:
    from . import hji

    cfg = _config_from(args)
    scene = _load_scene(args.scene)
    scene = SceneDescription.from_json({**scene.to_json(), "f_p": cfg.f_p, "f_e": cfg.f_e})
    grid = Grid2D(cfg.m)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if args.fix_pursuer is not None:
        if cfg.f_p != 0:
            raise SystemExit("error: --fix-pursuer requires --fp 0 (stationary reduction)")
        pursuer = _parse_cell(args.fix_pursuer)
        sol = hji.solve_stationary(scene, grid, pursuer, dt=cfg.dt,
                                   stop_tol=cfg.stop_tol,
                                   max_time=cfg.horizon if args.cap_horizon else None,
                                   aux_mode=cfg.aux_mode)
        dump_field(sol.field, out / "value2d", "value2d", extra={
            "f_p": 0.0, "f_e": scene.f_e, "dt": sol.dt, "iterations": sol.iterations,
            "pursuer": list(pursuer), "scene_hash": scene.scene_hash()})
        write_pgm(sol.field.values, out / "value2d.pgm", mode="linear")
        (out / "convergence.json").write_text(json.dumps(sol.l1_log) + "\n")
        print(f"solve: stationary value settled after {sol.iterations} steps, "
              f"final L1 delta {sol.l1_log[-1]:.3e}")
        return 0

    try:
        vf = hji.solve_value_function(scene, grid, cfg.horizon, dt=cfg.dt,
                                      stop_tol=cfg.stop_tol,
                                      allow_large=cfg.allow_large,
                                      aux_mode=cfg.aux_mode)
    except ValueError as err:
        raise SystemExit(f"error: {err}")
    hji.dump_value(vf, out / "value")
    (out / "convergence.json").write_text(json.dumps(vf.l1_log) + "\n")
    print(f"solve: {vf.iterations} steps to t={vf.elapsed:.4f} "
          f"(target {vf.horizon}), final L1 delta {vf.l1_log[-1]:.3e}")
    return 0


def cmd_slice(args) -> int:
    from .hji import load_value

    values, meta = load_value(args.value)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    m = int(meta["m"])
    if args.fix_pursuer:
        i, j = _parse_cell(args.fix_pursuer)
        plane, tag = values[i, j, :, :], f"pursuer_{i}_{j}"
    elif args.fix_evader:
        k, l = _parse_cell(args.fix_evader)
        plane, tag = values[:, :, k, l], f"evader_{k}_{l}"
    else:
        raise SystemExit("error: one of --fix-pursuer / --fix-evader is required")
    field = ScalarField(Grid2D(m), plane)
    dump_field(field, out / f"slice_{tag}", f"slice_{tag}", extra=meta)
    write_pgm(np.minimum(plane, meta["T"]), out / f"slice_{tag}.pgm", mode="linear")
    print(f"slice: wrote slice_{tag} (m={m})")
    return 0


def cmd_play(args) -> int:
    cfg = _config_from(args)
    scene = _load_scene(args.scene)
    grid = Grid2D(cfg.m)

    if args.hji_value:
        return _play_value_trajectory(args, cfg, scene)

    from .engine import make_controller, run_game
    from .strategies import GameContext, GameState

    ctx = GameContext(scene, grid, dt=cfg.dt, aux_mode=cfg.aux_mode)
    controller = make_controller(args.controller)
    if controller.spec.get("kind") == "mcts":
        controller.spec.update({"epsilon": cfg.mcts_epsilon, "alpha": cfg.mcts_alpha,
                                "tau": cfg.mcts_tau, "k_max": cfg.k_max})
    start = GameState(tuple(_parse_cells(args.pursuers)),
                      tuple(_parse_cells(args.evaders)))
    try:
        record = run_game(ctx, start, controller, cfg.k_max, seed=cfg.seed)
    except ValueError as err:
        raise SystemExit(f"error: {err}")
    text = record.dumps()
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    log.info("game over: %s after %d turns", record.outcome, record.length)
    return 0


def _play_value_trajectory(args, cfg, scene) -> int:
    """Continuous feedback playback from a solved value dump."""
    from .hji import play_hji_trajectory, restore_value

    try:
        vf = restore_value(scene, args.hji_value, aux_mode=cfg.aux_mode)
    except (ValueError, FileNotFoundError) as err:
        raise SystemExit(f"error: {err}")
    pursuers = _parse_cells(args.pursuers)
    evaders = _parse_cells(args.evaders)
    if len(pursuers) != 1 or len(evaders) != 1:
        raise SystemExit("error: value playback covers one pursuer and one evader")
    start_p = vf.grid.center_of(pursuers[0])
    start_e = vf.grid.center_of(evaders[0])
    try:
        traj = play_hji_trajectory(vf, start_p, start_e, dt=cfg.dt)
    except ValueError as err:
        raise SystemExit(f"error: {err}")
    text = json.dumps({"times": traj.times, "pursuer": traj.pursuer,
                       "evader": traj.evader, "outcome": traj.outcome},
                      sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def cmd_sweep(args) -> int:
    from .engine import run_match_statistics

    cfg = _config_from(args)
    scene = _load_scene(args.scene)
    fixed = _parse_cells(args.fixed_evaders) if args.fixed_evaders else ()
    try:
        result = run_match_statistics(
            scene, cfg.m, args.controller, _parse_cells(args.pursuers),
            k_max=cfg.k_max, master_seed=cfg.seed, fixed_evaders=fixed,
            dt=cfg.dt, workers=cfg.workers, aux_mode=cfg.aux_mode)
    except ValueError as err:
        raise SystemExit(f"error: {err}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result.write_csv(out / "games.csv")
    (out / "summary.json").write_text(
        json.dumps(result.summary(), sort_keys=True, indent=2) + "\n")
    field = result.length_field()
    dump_field(field, out / "lengths", "lengths", extra={"controller": result.controller})
    write_pgm(field.values, out / "lengths.pgm", mode="linear")
    s = result.summary()
    print(f"sweep: {s['n_games']} games, win {s['win_pct']:.2f}%, "
          f"mean time {s['mean_time']:.4f} ({s['mean_turns']:.1f} turns)")
    return 0


def cmd_histogram(args) -> int:
    from .engine import leaf_depth_histogram

    records = []
    with open(args.trace) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    hist = leaf_depth_histogram(records, dt=args.dt, block=args.block)
    Path(args.out).write_text(json.dumps(hist, sort_keys=True, indent=2) + "\n")
    print(f"histogram: {hist['total']} leaves across {len(hist['counts'])} blocks")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(frontend_dir=args.frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seg",
        description="surveillance-evasion game laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, grid=True):
        p.add_argument("--config", help="JSON config file with defaults")
        if grid:
            p.add_argument("--m", type=int, default=None, help="grid resolution (default 64)")

    p = sub.add_parser("fields", help="dump per-vantage visibility fields + PGM renders")
    common(p)
    p.add_argument("--scene", required=True)
    p.add_argument("--vantage", required=True, help="vantage cell I,J")
    p.add_argument("--aux-mode", dest="aux_mode", choices=["visibility", "occluder"],
                   default=None, help="grazing companion field (default visibility)")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_fields)

    p = sub.add_parser("solve", help="march the joint value function")
    common(p)
    p.add_argument("--scene", required=True)
    p.add_argument("--fp", dest="f_p", type=float, default=None, help="pursuer speed")
    p.add_argument("--fe", dest="f_e", type=float, default=None, help="evader speed")
    p.add_argument("--T", dest="horizon", type=float, default=None, help="horizon (default 10)")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--stop-tol", dest="stop_tol", type=float, default=None)
    p.add_argument("--fix-pursuer", default=None,
                   help="cell I,J: solve the stationary 2-D reduction (needs --fp 0)")
    p.add_argument("--cap-horizon", action="store_true",
                   help="stop the stationary solve at --T even if not settled")
    p.add_argument("--allow-large", dest="allow_large", action="store_const", const=True,
                   default=None, help="permit 4-D solves above the resolution cap")
    p.add_argument("--aux-mode", dest="aux_mode", choices=["visibility", "occluder"],
                   default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("slice", help="cut a 2-D plane out of a value dump")
    p.add_argument("--value", required=True, help="value dump base path")
    p.add_argument("--fix-pursuer", default=None, help="cell I,J")
    p.add_argument("--fix-evader", default=None, help="cell K,L")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_slice)

    p = sub.add_parser("play", help="run one discrete game and print the record")
    common(p)
    p.add_argument("--scene", required=True)
    p.add_argument("--controller", default="blend",
                   help="distance|shadow|blend|stationary|mcts:<eval>:<iters>")
    p.add_argument("--pursuers", required=True, help="cells I,J;I,J;...")
    p.add_argument("--evaders", required=True, help="cells K,L;...")
    p.add_argument("--k-max", dest="k_max", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--mcts-epsilon", dest="mcts_epsilon", type=float, default=None)
    p.add_argument("--mcts-alpha", dest="mcts_alpha", type=float, default=None)
    p.add_argument("--mcts-tau", dest="mcts_tau", type=float, default=None)
    p.add_argument("--hji-value", default=None,
                   help="value dump base path: play the continuous feedback "
                        "trajectory instead of the discrete game")
    p.add_argument("--out", default=None, help="write the record here instead of stdout")
    p.set_defaults(fn=cmd_play)

    p = sub.add_parser("sweep", help="one game per free evader start, aggregated")
    common(p)
    p.add_argument("--scene", required=True)
    p.add_argument("--controller", default="blend")
    p.add_argument("--pursuers", required=True, help="cells I,J;...")
    p.add_argument("--fixed-evaders", dest="fixed_evaders", default=None,
                   help="extra evader cells held fixed while one start sweeps")
    p.add_argument("--k-max", dest="k_max", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--workers", type=int, default=None, help="parallel processes")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("histogram", help="bin search-leaf depths from a trace file")
    p.add_argument("--trace", required=True, help="JSON-lines trace from mcts_search")
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--block", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_histogram)

    p = sub.add_parser("serve", help="run the session server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--frontend", default=None, help="static dir to serve at /")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
