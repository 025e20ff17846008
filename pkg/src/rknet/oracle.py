"""Reference explicit Runge-Kutta integrator on callable right-hand sides.

``rk_step`` adds its terms in exactly the order the compiled network does:
stage arguments start from ``u`` and add ``(dt * a_ij) * r^j`` for ``j``
ascending, the update starts from ``u`` and adds ``(dt * b_i) * r^i`` for ``i``
ascending, and stage times are ``time + c_i * dt``. With shared coefficients
the two evaluators agree bit for bit.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Sequence, TextIO

import numpy as np

from .compiler import CompiledStep
from .errors import ConfigError, IntegrationError, ShapeError
from .graph import eval_network
from .models import RhsFunction
from .tableau import ButcherTableau

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def write_csv(self, out: TextIO) -> None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t"] + [f"u{k + 1}" for k in range(self.states.shape[1])])
        for t, row in zip(self.times, self.states):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in row])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def save_csv(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as f:
            self.write_csv(f)
        return path


def _check_dt(dt: float) -> None:
    if not math.isfinite(dt) or dt == 0.0:
        raise ConfigError(f"dt must be finite and nonzero, got {dt!r}")


def rk_step(t: ButcherTableau, rhs: RhsFunction, time: float, u: Sequence[float] | np.ndarray, dt: float) -> np.ndarray:
    _check_dt(dt)
    u = np.asarray(u, dtype=np.float64)
    stages: List[np.ndarray] = []
    for i in range(t.s):
        arg = u.copy()
        for j, a_ij in enumerate(t.a[i]):
            arg = arg + (dt * a_ij) * stages[j]
        r = np.asarray(rhs(arg, time + t.c[i] * dt), dtype=np.float64)
        if r.shape != u.shape:
            raise ShapeError(f"right-hand side returned shape {r.shape}, state has shape {u.shape}")
        if not np.all(np.isfinite(r)):
            raise IntegrationError("right-hand side returned non-finite values", stage=i + 1)
        stages.append(r)

    out = u.copy()
    for i, b_i in enumerate(t.b):
        out = out + (dt * b_i) * stages[i]
    if not np.all(np.isfinite(out)):
        raise IntegrationError("state update is not finite")
    return out


def _time_grid(t0: float, dt: float, n_steps: int) -> np.ndarray:
    return np.array([t0 + k * dt for k in range(n_steps + 1)], dtype=np.float64)


def integrate_oracle(
    t: ButcherTableau,
    rhs: RhsFunction,
    t0: float,
    u0: Sequence[float] | np.ndarray,
    dt: float,
    n_steps: int,
) -> Trajectory:
    if n_steps < 1:
        raise ConfigError(f"n_steps must be at least 1, got {n_steps}")
    if not dt > 0.0:
        raise ConfigError(f"dt must be positive for a trajectory, got {dt!r}")
    times = _time_grid(t0, dt, n_steps)
    u = np.asarray(u0, dtype=np.float64)
    states = np.empty((n_steps + 1, u.shape[0]), dtype=np.float64)
    states[0] = u
    for k in range(n_steps):
        try:
            u = rk_step(t, rhs, float(times[k]), u, dt)
        except IntegrationError as e:
            raise e.at_step(k + 1) from e
        states[k + 1] = u
    logger.debug("oracle %s: %d steps of dt=%r from t0=%r", t.name, n_steps, dt, t0)
    return Trajectory(times, states)


def integrate_network(step: CompiledStep, t0: float, u0: Sequence[float] | np.ndarray, n_steps: int) -> Trajectory:
    u = np.asarray(u0, dtype=np.float64)
    if u.ndim != 1 or u.shape[0] != step.state_dim:
        raise ShapeError(f"initial state has {u.shape[0] if u.ndim == 1 else u.shape} components, network expects {step.state_dim}")
    if n_steps < 0:
        raise ConfigError(f"n_steps must not be negative, got {n_steps}")
    times = _time_grid(t0, step.dt, n_steps)
    states = np.empty((n_steps + 1, u.shape[0]), dtype=np.float64)
    states[0] = u
    for k in range(n_steps):
        u = eval_network(step.net, np.append(u, times[k]))
        if not np.all(np.isfinite(u)):
            raise IntegrationError("network produced a non-finite state", step=k + 1)
        states[k + 1] = u
    logger.debug("network %s: %d steps of dt=%r from t0=%r", step.tableau_name, n_steps, step.dt, t0)
    return Trajectory(times, states)


# ----------------------------
# Convergence studies
# ----------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    dt: float
    endpoint_error: float
    observed_order: Optional[float]


def endpoint_error(traj: Trajectory, exact: np.ndarray) -> float:
    return float(np.max(np.abs(traj.final_state - exact)))


def observed_orders(dts: Sequence[float], errors: Sequence[float]) -> List[Optional[float]]:
    """Order estimates between consecutive levels; ``None`` for the first level or a zero error."""
    out: List[Optional[float]] = [None]
    for k in range(1, len(errors)):
        prev, cur = errors[k - 1], errors[k]
        if prev <= 0.0 or cur <= 0.0:
            out.append(None)
            continue
        out.append(math.log(prev / cur) / math.log(dts[k - 1] / dts[k]))
    return out


def convergence_study(
    dts: Sequence[float],
    t0: float,
    t_end: float,
    u0: Sequence[float] | np.ndarray,
    exact: Callable[[float, np.ndarray, float], np.ndarray],
    integrate: Callable[[float, int], Trajectory],
) -> List[ConvergenceRow]:
    """Endpoint errors for each ``dt``; ``integrate(dt, n_steps)`` runs one level."""
    if len(dts) < 2:
        raise ConfigError("an order estimate needs at least two dt values")
    u0 = np.asarray(u0, dtype=np.float64)
    errors: List[float] = []
    for dt in dts:
        if not dt > 0.0:
            raise ConfigError(f"dt values must be positive, got {dt!r}")
        n_steps = round((t_end - t0) / dt)
        if n_steps < 1 or not math.isclose(n_steps * dt, t_end - t0, rel_tol=1e-9):
            raise ConfigError(f"dt={dt!r} does not divide the interval [{t0!r}, {t_end!r}]")
        traj = integrate(dt, n_steps)
        errors.append(endpoint_error(traj, exact(t0, u0, float(traj.times[-1]))))
    orders = observed_orders(dts, errors)
    return [ConvergenceRow(dt, e, p) for dt, e, p in zip(dts, errors, orders)]
