from __future__ import annotations

import argparse
import math
from typing import List

import numpy as np

from rknet.errors import ConfigError, EquivalenceError
from rknet.oracle import Trajectory, integrate_network, integrate_oracle

from .common import (
    add_problem_args,
    build_config,
    build_model,
    handles_errors,
    initial_state,
    join_negative_values,
    resolve_tableau,
    step_network,
)


def trajectory_differences(a: Trajectory, b: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Per-component max absolute and max relative difference over all rows."""
    if a.states.shape != b.states.shape:
        raise ConfigError(f"trajectories have shapes {a.states.shape} and {b.states.shape}")
    diff = np.abs(a.states - b.states)
    scale = np.maximum(np.abs(a.states), np.abs(b.states))
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(diff == 0.0, 0.0, diff / scale)
    return diff.max(axis=0), rel.max(axis=0)


@handles_errors
def cmd_compare(argv: List[str]) -> int:
    """Run compiled network and oracle side by side and report their differences"""
    p = argparse.ArgumentParser(prog="rknet compare")
    add_problem_args(p)
    p.add_argument("--network", default="", help="Compare a network document from `compile --emit`")
    p.add_argument("--threshold", type=float, default=1e-12, help="Max relative difference allowed (default: 1e-12)")
    ns = p.parse_args(join_negative_values(argv))
    cfg = build_config("compare", ns)
    if not math.isfinite(ns.threshold) or ns.threshold < 0.0:
        raise ConfigError(f"--threshold must be a non-negative number, got {ns.threshold!r}")

    tableau = resolve_tableau(cfg.tableau)
    model = build_model(cfg)
    u0 = initial_state(cfg, model)
    step = step_network(cfg, tableau, model)

    by_network = integrate_network(step, cfg.t0, u0, cfg.steps)
    by_oracle = integrate_oracle(tableau, model.fn, cfg.t0, u0, step.dt, cfg.steps)
    max_abs, max_rel = trajectory_differences(by_network, by_oracle)

    print(f"[compare] tableau: {tableau.name}  model: {model.name}  dt: {step.dt!r}  steps: {cfg.steps}")
    print("component,max_abs_diff,max_rel_diff")
    for k, (da, dr) in enumerate(zip(max_abs, max_rel)):
        print(f"u{k + 1},{float(da)!r},{float(dr)!r}")

    worst = float(max_rel.max())
    if worst > ns.threshold:
        raise EquivalenceError(f"max relative difference {worst!r} exceeds threshold {ns.threshold!r}")
    print(f"[compare] ok: max relative difference {worst!r} <= {ns.threshold!r}")
    return 0
