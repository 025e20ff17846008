"""Flags and helpers shared by the commands."""

from __future__ import annotations

import argparse
import functools
import logging
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import numpy as np

from rknet.compiler import CompiledStep, compile_step, load_compiled
from rknet.errors import ConfigError, RknetError
from rknet.models import DecayParams, MdsParams, RhsModel, decay_model, mds_model, zero_model
from rknet.subnets import PassthroughMode
from rknet.tableau import ButcherTableau, available_tableaus, builtin, parse_tableau

MODELS = ("mds", "decay", "zero")


@dataclass(frozen=True)
class RunConfig:
    command: str
    tableau: str
    model: str
    mds: MdsParams
    decay: DecayParams
    dim: int
    dt: float
    steps: int
    t0: float
    u0: Optional[Tuple[float, ...]]
    passthrough: PassthroughMode
    evaluator: str = "network"
    network: Optional[Path] = None
    out: Optional[Path] = None


def configure_logging(verbose: int) -> None:
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def handles_errors(fn: Callable[[List[str]], int]) -> Callable[[List[str]], int]:
    """Turn library errors into ``error: ...`` on stderr and the matching exit code."""

    @functools.wraps(fn)
    def wrapper(argv: List[str]) -> int:
        try:
            return fn(argv)
        except RknetError as e:
            print(f"error: {e}", file=sys.stderr)
            return e.exit_code

    return wrapper


_NEGATIVE_VALUE = re.compile(r"^-(\d|\.\d)")


def join_negative_values(argv: List[str]) -> List[str]:
    """Rewrite ``--flag -1,0`` as ``--flag=-1,0``.

    argparse only takes a leading ``-`` as a value when the whole token looks
    like a plain negative number, which rules out ``-1,0`` and ``-1e200``.
    """
    out: List[str] = []
    for arg in argv:
        prev = out[-1] if out else ""
        if _NEGATIVE_VALUE.match(arg) and prev.startswith("--") and "=" not in prev:
            out[-1] = f"{prev}={arg}"
        else:
            out.append(arg)
    return out


def parse_reals(text: str, what: str) -> Tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as e:
        raise ConfigError(f"{what}: expected comma-separated numbers, got {text!r}") from e
    if not values:
        raise ConfigError(f"{what}: no values given")
    if not all(math.isfinite(v) for v in values):
        raise ConfigError(f"{what}: values must be finite")
    return values


def add_problem_args(p: argparse.ArgumentParser, *, steps: bool = True) -> None:
    p.add_argument("--tableau", default="rk4", help=f"Builtin name ({', '.join(available_tableaus())}) or tableau JSON path")
    p.add_argument("--model", choices=MODELS, default="mds", help="Right-hand side (default: mds)")
    p.add_argument("--m", type=float, default=1.0, help="Mass (mds)")
    p.add_argument("--d", type=float, default=0.0, help="Damping (mds)")
    p.add_argument("--c", type=float, default=1.0, help="Stiffness (mds)")
    p.add_argument("--lam", type=float, default=-1.0, help="Decay rate (decay)")
    p.add_argument("--dim", type=int, default=1, help="State dimension (zero)")
    p.add_argument("--dt", type=float, default=0.1, help="Timestep (default: 0.1)")
    if steps:
        p.add_argument("--steps", type=int, default=10, help="Number of steps (default: 10)")
    p.add_argument("--t0", type=float, default=0.0, help="Initial time (default: 0)")
    p.add_argument("--u0", default="", help="Initial state, comma-separated (default depends on model)")
    p.add_argument(
        "--passthrough", choices=[m.value for m in PassthroughMode], default="linear",
        help="Identity lanes: linear or relu-pair (default: linear)",
    )
    p.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")


def build_config(command: str, ns: argparse.Namespace) -> RunConfig:
    configure_logging(ns.verbose)
    if not math.isfinite(ns.dt) or ns.dt <= 0.0:
        raise ConfigError(f"--dt must be positive and finite, got {ns.dt!r}")
    steps = getattr(ns, "steps", 1)
    if steps < 1:
        raise ConfigError(f"--steps must be at least 1, got {steps}")
    if not math.isfinite(ns.t0):
        raise ConfigError("--t0 must be finite")
    network = getattr(ns, "network", None)
    out = getattr(ns, "out", None)
    return RunConfig(
        command=command,
        tableau=ns.tableau,
        model=ns.model,
        mds=MdsParams(ns.m, ns.d, ns.c),
        decay=DecayParams(ns.lam),
        dim=ns.dim,
        dt=ns.dt,
        steps=steps,
        t0=ns.t0,
        u0=parse_reals(ns.u0, "--u0") if ns.u0 else None,
        passthrough=PassthroughMode.from_flag(ns.passthrough),
        evaluator=getattr(ns, "evaluator", "network"),
        network=Path(network).expanduser() if network else None,
        out=Path(out).expanduser() if out else None,
    )


def resolve_tableau(name_or_path: str) -> ButcherTableau:
    path = Path(name_or_path).expanduser()
    if path.suffix == ".json" or path.exists():
        if not path.is_file():
            raise ConfigError(f"tableau file not found: {path}")
        return parse_tableau(path.read_text(encoding="utf-8"))
    return builtin(name_or_path)


def build_model(cfg: RunConfig) -> RhsModel:
    if cfg.model == "mds":
        return mds_model(cfg.mds.validate())
    if cfg.model == "decay":
        return decay_model(cfg.decay.validate())
    return zero_model(cfg.dim)


def initial_state(cfg: RunConfig, model: RhsModel) -> np.ndarray:
    u0 = cfg.u0 if cfg.u0 is not None else model.default_u0
    if len(u0) != model.state_dim:
        raise ConfigError(f"--u0 has {len(u0)} components, model {model.name} has state dimension {model.state_dim}")
    return np.array(u0, dtype=np.float64)


def step_network(cfg: RunConfig, tableau: ButcherTableau, model: RhsModel) -> CompiledStep:
    """The compiled step: loaded from ``--network`` when given, compiled otherwise."""
    if cfg.network is None:
        return compile_step(tableau, model.net, cfg.dt, cfg.passthrough)
    step = load_compiled(cfg.network)
    if (step.tableau_name, step.stages) != (tableau.name, tableau.s):
        raise ConfigError(
            f"network {cfg.network} was compiled for tableau {step.tableau_name} (s={step.stages}), "
            f"--tableau gives {tableau.name} (s={tableau.s})"
        )
    if step.state_dim != model.state_dim:
        raise ConfigError(
            f"network {cfg.network} has state dimension {step.state_dim}, model {model.name} has {model.state_dim}"
        )
    if step.dt != cfg.dt:
        logging.getLogger(__name__).warning("using dt=%r from %s instead of --dt %r", step.dt, cfg.network, cfg.dt)
    return step


def write_text_output(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
