from __future__ import annotations

import argparse
from pathlib import Path
from typing import List

from rknet.compiler import compile_step, depth_stats, describe_layout, write_compiled

from .common import (
    add_problem_args,
    build_config,
    build_model,
    handles_errors,
    join_negative_values,
    resolve_tableau,
)


@handles_errors
def cmd_compile(argv: List[str]) -> int:
    """Compile one RK step around a model RHS into a network document"""
    p = argparse.ArgumentParser(prog="rknet compile")
    add_problem_args(p, steps=False)
    p.add_argument("--emit", default="", help="Write the network document here (metadata goes to <stem>.meta.json)")
    p.add_argument("--describe", action="store_true", help="Print the lane layout of every layer")
    ns = p.parse_args(join_negative_values(argv))
    cfg = build_config("compile", ns)

    tableau = resolve_tableau(cfg.tableau)
    model = build_model(cfg)
    step = compile_step(tableau, model.net, cfg.dt, cfg.passthrough)
    stats = depth_stats(step)

    print(f"[compile] tableau: {tableau.name}  stages: {tableau.s}  model: {model.name}  dt: {cfg.dt!r}")
    print(f"depth: {stats.depth}")
    print(f"max_width: {stats.max_width}")
    print(f"neurons: {stats.neuron_count}")
    print(f"weight_nonzeros: {stats.weight_nonzeros}")

    if ns.describe:
        print(describe_layout(step))

    if ns.emit:
        net_path, meta_path = write_compiled(step, Path(ns.emit).expanduser())
        print(f"[compile] wrote network: {net_path}")
        print(f"[compile] wrote metadata: {meta_path}")
    return 0
