"""Built-in right-hand sides, each as a network and as a plain callable.

Every RHS network takes ``(state..., t)`` and returns the state derivative.
The callables add the same products in the same order as the network's
single affine layer, so both forms agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import ConfigError
from .graph import NetworkGraph, linear_layer

RhsFunction = Callable[[np.ndarray, float], np.ndarray]
ExactSolution = Callable[[float, np.ndarray, float], np.ndarray]

CRITICAL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class MdsParams:
    m: float = 1.0
    d: float = 0.0
    c: float = 1.0

    def validate(self) -> "MdsParams":
        if not all(math.isfinite(v) for v in (self.m, self.d, self.c)):
            raise ConfigError(f"mass-damper-stiffness parameters must be finite: {self}")
        if self.m <= 0.0 or self.c <= 0.0 or self.d < 0.0:
            raise ConfigError(f"need m > 0, c > 0 and d >= 0, got m={self.m}, d={self.d}, c={self.c}")
        return self


@dataclass(frozen=True)
class DecayParams:
    lam: float = -1.0

    def validate(self) -> "DecayParams":
        if not math.isfinite(self.lam):
            raise ConfigError(f"decay rate must be finite, got {self.lam!r}")
        return self


@dataclass(frozen=True)
class RhsModel:
    """A right-hand side in both forms: network for compiling, callable for the oracle."""

    name: str
    state_dim: int
    net: NetworkGraph
    fn: RhsFunction
    default_u0: Tuple[float, ...]
    exact: Optional[ExactSolution] = None


# ----------------------------
# Mass-damper-stiffness
# ----------------------------

def mds_rhs_net(p: MdsParams) -> NetworkGraph:
    p.validate()
    kx, kv = -(p.c / p.m), -(p.d / p.m)
    return NetworkGraph(3, (linear_layer([[0.0, 1.0, 0.0], [kx, kv, 0.0]], [0.0, 0.0]),))


def mds_rhs(p: MdsParams) -> RhsFunction:
    p.validate()
    kx, kv = -(p.c / p.m), -(p.d / p.m)

    def rhs(u: np.ndarray, t: float) -> np.ndarray:
        x, v = float(u[0]), float(u[1])
        return np.array([v, kx * x + kv * v], dtype=np.float64)

    return rhs


def mds_exact(p: MdsParams, x0: float, v0: float, t: float) -> Tuple[float, float]:
    """Closed-form ``(x(t), v(t))`` of ``m x'' + d x' + c x = 0``."""
    p.validate()
    if t == 0.0:
        return x0, v0

    m, d, c = p.m, p.d, p.c
    disc = d * d - 4.0 * m * c
    if abs(disc) <= CRITICAL_TOLERANCE * max(d * d, 4.0 * m * c):
        lam = -d / (2.0 * m)
        slope = v0 - lam * x0
        e = math.exp(lam * t)
        x = (x0 + slope * t) * e
        return x, (slope + lam * (x0 + slope * t)) * e

    if disc < 0.0:
        alpha = -d / (2.0 * m)
        omega = math.sqrt(-disc) / (2.0 * m)
        b = (v0 - alpha * x0) / omega
        e = math.exp(alpha * t)
        cs, sn = math.cos(omega * t), math.sin(omega * t)
        x = e * (x0 * cs + b * sn)
        v = e * ((alpha * x0 + omega * b) * cs + (alpha * b - omega * x0) * sn)
        return x, v

    root = math.sqrt(disc)
    r1 = (-d + root) / (2.0 * m)
    r2 = (-d - root) / (2.0 * m)
    c1 = (v0 - r2 * x0) / (r1 - r2)
    c2 = (r1 * x0 - v0) / (r1 - r2)
    e1, e2 = math.exp(r1 * t), math.exp(r2 * t)
    return c1 * e1 + c2 * e2, r1 * c1 * e1 + r2 * c2 * e2


def mds_model(p: MdsParams) -> RhsModel:
    def exact(t0: float, u0: np.ndarray, t: float) -> np.ndarray:
        return np.array(mds_exact(p, float(u0[0]), float(u0[1]), t - t0), dtype=np.float64)

    return RhsModel("mds", 2, mds_rhs_net(p), mds_rhs(p), (1.0, 0.0), exact)


# ----------------------------
# Scalar decay u' = lam * u
# ----------------------------

def decay_rhs_net(p: DecayParams) -> NetworkGraph:
    p.validate()
    return NetworkGraph(2, (linear_layer([[p.lam, 0.0]], [0.0]),))


def decay_rhs(p: DecayParams) -> RhsFunction:
    p.validate()
    lam = p.lam

    def rhs(u: np.ndarray, t: float) -> np.ndarray:
        return np.array([lam * float(u[0])], dtype=np.float64)

    return rhs


def decay_exact(p: DecayParams, u0: float, t: float) -> float:
    p.validate()
    return u0 * math.exp(p.lam * t)


def decay_model(p: DecayParams) -> RhsModel:
    def exact(t0: float, u0: np.ndarray, t: float) -> np.ndarray:
        return np.array([decay_exact(p, float(u0[0]), t - t0)], dtype=np.float64)

    return RhsModel("decay", 1, decay_rhs_net(p), decay_rhs(p), (1.0,), exact)


# ----------------------------
# Zero right-hand side
# ----------------------------

def zero_rhs_net(dim: int) -> NetworkGraph:
    if dim < 1:
        raise ConfigError(f"state dimension must be positive, got {dim}")
    return NetworkGraph(dim + 1, (linear_layer(np.zeros((dim, dim + 1)), np.zeros(dim)),))


def zero_model(dim: int = 1) -> RhsModel:
    def rhs(u: np.ndarray, t: float) -> np.ndarray:
        return np.zeros(dim, dtype=np.float64)

    def exact(t0: float, u0: np.ndarray, t: float) -> np.ndarray:
        return np.array(u0, dtype=np.float64)

    return RhsModel("zero", dim, zero_rhs_net(dim), rhs, (1.0,) * dim, exact)
