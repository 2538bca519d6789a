"""Command-line interface: dataset synthesis, training, evaluation, batch
simulation, trial reports, and the live gateway.

Errors exit nonzero with a machine-readable {"error": ...} object on stderr.
The GLOVELINK_CONFIG environment variable (or --config) may point to a JSON
file with "control" and "sim" sections mirroring the config dataclasses.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields

import numpy as np

from .analytics import Trajectory, summarize
from .geometry import Pose
from .gesture import TrainConfig, evaluate, train
from .handmodel import (DEFAULT_TRAIN_COUNTS, GestureLabel, synth_dataset)
from .pipeline import run_trace
from .sessionio import (HandSample, SimState, read_dataset_csv, read_model,
                        read_trace, write_dataset_csv, write_model, write_trace)
from .simpsm import SimConfig
from .teleop import ControlConfig

__all__ = ["main"]


def _load_configs(path: str | None) -> tuple[ControlConfig, SimConfig]:
    if path is None:
        path = os.environ.get("GLOVELINK_CONFIG")
    if not path:
        return ControlConfig(), SimConfig()
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    ctl_keys = {f.name for f in fields(ControlConfig)}
    sim_keys = {f.name for f in fields(SimConfig)}
    ctl = {k: v for k, v in data.get("control", {}).items() if k in ctl_keys}
    sim = {k: v for k, v in data.get("sim", {}).items() if k in sim_keys}
    return ControlConfig(**ctl), SimConfig(**sim)


def _parse_counts(text: str | None) -> dict[GestureLabel, int]:
    if not text:
        return dict(DEFAULT_TRAIN_COUNTS)
    if text.strip().startswith("{"):
        raw = json.loads(text)
        return {GestureLabel[k.upper()]: int(v) for k, v in raw.items()}
    parts = [int(p) for p in text.split(",")]
    if len(parts) != 5:
        raise ValueError("--counts needs 5 comma-separated integers or JSON")
    return {label: parts[i] for i, label in enumerate(GestureLabel)}


def cmd_synth_data(args) -> int:
    counts = _parse_counts(args.counts)
    samples = synth_dataset(counts, seed=args.seed)
    if args.split and args.split > 0:
        n_test = int(round(len(samples) * args.split))
        test, training = samples[:n_test], samples[n_test:]
        write_dataset_csv(args.out, training)
        test_path = args.test_out or _with_suffix(args.out, "-test")
        write_dataset_csv(test_path, test)
        print(json.dumps({"train_rows": len(training), "test_rows": len(test),
                          "train": str(args.out), "test": str(test_path)}))
    else:
        write_dataset_csv(args.out, samples)
        print(json.dumps({"rows": len(samples), "out": str(args.out)}))
    return 0


def _with_suffix(path: str, suffix: str) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}{suffix}{ext}"


def cmd_train(args) -> int:
    data = read_dataset_csv(args.data)
    cfg = TrainConfig(max_epochs=args.epochs, seed=args.seed,
                      learning_rate=args.lr, batch_size=args.batch_size)
    model = train(data, cfg)
    write_model(args.out, model)
    report = evaluate(model, data, timing_trials=1000)
    print(json.dumps({"model": str(args.out), "epochs_run": model.n_epochs_,
                      "train_eval": report.to_dict()}))
    return 0


def cmd_eval(args) -> int:
    model = read_model(args.model)
    data = read_dataset_csv(args.data)
    report = evaluate(model, data)
    print(json.dumps(report.to_dict()))
    return 0


def cmd_simulate(args) -> int:
    control_cfg, sim_cfg = _load_configs(args.config)
    if args.latency is not None:
        from dataclasses import replace
        sim_cfg = replace(sim_cfg, latency=args.latency)
    records, _ = read_trace(args.trace)
    model = read_model(args.model) if args.model else None
    out = run_trace(records, control_cfg, sim_cfg, model=model,
                    auto_track=not args.no_auto_track)
    write_trace(args.out, out, config={"latency": sim_cfg.latency,
                                       "eta": control_cfg.eta})
    print(json.dumps({"records": len(out), "out": str(args.out)}))
    return 0


def _trial_trajectories(records):
    hands = [r for r in records if isinstance(r, HandSample)]
    sims = [r for r in records if isinstance(r, SimState)]
    if len(hands) < 3 or len(sims) < 3:
        raise ValueError("trial needs at least 3 hand samples and 3 sim states")
    hand_traj = Trajectory([h.t for h in hands], [h.hand_pose for h in hands])
    sim_traj = Trajectory([s.t for s in sims], [s.pose for s in sims])
    return hand_traj, sim_traj


def cmd_report(args) -> int:
    control_cfg, _ = _load_configs(args.config)
    records, _ = read_trace(args.trial)
    hand_traj, sim_traj = _trial_trajectories(records)
    summary = summarize(hand_traj, sim_traj, control_cfg)
    print(json.dumps(summary.to_dict()))
    if args.csv:
        import csv as _csv
        new = not os.path.exists(args.csv)
        with open(args.csv, "a", encoding="utf-8", newline="\n") as f:
            w = _csv.writer(f, lineterminator="\n")
            if new:
                w.writerow(["user", "avg_duration_s", "trans_avg_m",
                            "trans_std_m", "rot_avg_rad", "rot_std_rad"])
            w.writerow([args.user, summary.duration, summary.trans_mean,
                        summary.trans_std, summary.rot_mean, summary.rot_std])
    return 0


def cmd_serve(args) -> int:
    from .gateway import run_server
    control_cfg, sim_cfg = _load_configs(args.config)
    model = read_model(args.model) if args.model else None
    run_server(args.host, args.port, control_cfg, sim_cfg, model=model,
               auto_track=args.auto_track)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="glovelink")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth-data", help="generate a gesture dataset CSV")
    sp.add_argument("--out", required=True)
    sp.add_argument("--counts", help="5 comma-separated counts or JSON by name")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--split", type=float, default=0.0,
                    help="fraction held out into a separate test CSV")
    sp.add_argument("--test-out")
    sp.set_defaults(func=cmd_synth_data)

    sp = sub.add_parser("train", help="train the gesture MLP")
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--epochs", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--lr", type=float, default=0.01)
    sp.add_argument("--batch-size", type=int, default=64)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("eval", help="evaluate a model on a dataset")
    sp.add_argument("--model", required=True)
    sp.add_argument("--data", required=True)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("simulate", help="batch replay a trace through the stack")
    sp.add_argument("--trace", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--latency", type=float)
    sp.add_argument("--model")
    sp.add_argument("--config")
    sp.add_argument("--no-auto-track", action="store_true")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("report", help="summarize a recorded trial")
    sp.add_argument("--trial", required=True)
    sp.add_argument("--csv", help="append a table row to this CSV")
    sp.add_argument("--user", default="-")
    sp.add_argument("--config")
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("serve", help="run the live gateway")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8765)
    sp.add_argument("--model")
    sp.add_argument("--config")
    sp.add_argument("--auto-track", action="store_true")
    sp.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (KeyboardInterrupt, BrokenPipeError):
        return 130
    except Exception as e:
        print(json.dumps({"error": f"{type(e).__name__}: {e}"}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
