from __future__ import annotations

import argparse
from typing import List

from rknet.oracle import integrate_network, integrate_oracle

from .common import (
    add_problem_args,
    build_config,
    build_model,
    handles_errors,
    initial_state,
    join_negative_values,
    resolve_tableau,
    step_network,
    write_text_output,
)


@handles_errors
def cmd_integrate(argv: List[str]) -> int:
    """Integrate a model with the compiled network or the oracle, writing a CSV trajectory"""
    p = argparse.ArgumentParser(prog="rknet integrate")
    add_problem_args(p)
    p.add_argument("--evaluator", choices=("network", "oracle"), default="network", help="Default: network")
    p.add_argument("--network", default="", help="Use a network document from `compile --emit` (network evaluator)")
    p.add_argument("--out", default="", help="CSV output path (default: stdout)")
    cfg = build_config("integrate", p.parse_args(join_negative_values(argv)))

    tableau = resolve_tableau(cfg.tableau)
    model = build_model(cfg)
    u0 = initial_state(cfg, model)

    if cfg.evaluator == "oracle":
        traj = integrate_oracle(tableau, model.fn, cfg.t0, u0, cfg.dt, cfg.steps)
    else:
        traj = integrate_network(step_network(cfg, tableau, model), cfg.t0, u0, cfg.steps)

    write_text_output(traj.to_csv(), cfg.out)
    if cfg.out is not None:
        print(f"[integrate] wrote {len(traj.times)} rows: {cfg.out}")
    return 0
