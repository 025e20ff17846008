from __future__ import annotations

import argparse
import csv
import io
import math
from typing import List

from rknet.compiler import compile_step
from rknet.errors import ConfigError
from rknet.oracle import ConvergenceRow, Trajectory, convergence_study, integrate_network, integrate_oracle

from .common import (
    add_problem_args,
    build_config,
    build_model,
    handles_errors,
    initial_state,
    join_negative_values,
    parse_reals,
    resolve_tableau,
    write_text_output,
)


def rows_to_csv(rows: List[ConvergenceRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dt", "endpoint_error", "observed_order"])
    for row in rows:
        order = "" if row.observed_order is None else repr(row.observed_order)
        w.writerow([repr(row.dt), repr(row.endpoint_error), order])
    return buf.getvalue()


@handles_errors
def cmd_order(argv: List[str]) -> int:
    """Estimate the observed convergence order against the model's exact solution"""
    p = argparse.ArgumentParser(prog="rknet order")
    add_problem_args(p, steps=False)
    p.add_argument("--dts", default="", help="Comma-separated dt values (overrides --dt/--levels)")
    p.add_argument("--levels", type=int, default=4, help="Number of dt values, halving from --dt (default: 4)")
    p.add_argument("--t-end", dest="t_end", type=float, default=1.0, help="Final time (default: 1)")
    p.add_argument("--evaluator", choices=("network", "oracle"), default="network", help="Default: network")
    p.add_argument("--out", default="", help="CSV output path (default: stdout)")
    ns = p.parse_args(join_negative_values(argv))
    cfg = build_config("order", ns)

    if ns.dts:
        dts = list(parse_reals(ns.dts, "--dts"))
    else:
        dts = [cfg.dt / 2**k for k in range(ns.levels)]
    if len(dts) < 2:
        raise ConfigError("need at least two dt values for an order estimate")
    if not math.isfinite(ns.t_end) or ns.t_end <= cfg.t0:
        raise ConfigError(f"--t-end must be after --t0, got {ns.t_end!r}")

    tableau = resolve_tableau(cfg.tableau)
    model = build_model(cfg)
    u0 = initial_state(cfg, model)
    if model.exact is None:
        raise ConfigError(f"model {model.name} has no exact solution")

    def run(dt: float, n_steps: int) -> Trajectory:
        if cfg.evaluator == "oracle":
            return integrate_oracle(tableau, model.fn, cfg.t0, u0, dt, n_steps)
        return integrate_network(compile_step(tableau, model.net, dt, cfg.passthrough), cfg.t0, u0, n_steps)

    rows = convergence_study(dts, cfg.t0, ns.t_end, u0, model.exact, run)
    write_text_output(rows_to_csv(rows), cfg.out)
    if cfg.out is not None:
        print(f"[order] wrote {len(rows)} rows: {cfg.out}")
    return 0
