"""Compile an explicit Runge-Kutta step around an RHS network.

For a scheme with ``s`` stages and an RHS network of depth ``d_r`` the step
network is built stage by stage:

1. an affine *argument layer* forwards ``u, t, r^1 .. r^{i-1}`` and appends the
   stage argument ``u + dt * sum_j a_ij r^j`` and the stage time
   ``t + c_i * dt``;
2. the RHS network runs on the stage argument while identity lanes carry
   everything else for ``d_r`` layers, which leaves ``r^i`` next to the lanes.

   In relu-pair mode every carry layer is a ReLU pair split and the next
   affine layer recombines the pairs with weights ``(+1, -1)``, so the depth
   does not change.

A final affine layer forms ``u + dt * sum_i b_i r^i``. The depth is therefore
``s * (d_r + 1) + 1``. Within every layer the lanes are ordered
``[u | t | r^1 | ... | r^{i-1} | active RHS]``.

``dt`` is baked into the weights (``dt * a_ij``, ``dt * b_i``) and biases
(``c_i * dt``); the oracle multiplies the same coefficients in the same order.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np

from .errors import ConfigError, ParseError, ShapeError, ValidationError
from .graph import (
    DepthStats,
    Layer,
    NetworkGraph,
    deserialize,
    ensure_valid,
    graph_stats,
    linear_layer,
    parallel,
    serialize,
)
from .subnets import PassthroughMode, fold_pair_inputs, identity_subnet, pair_carry_subnet
from .tableau import ButcherTableau, validate_tableau

logger = logging.getLogger(__name__)

Lane = Tuple[str, int, int]


@dataclass(frozen=True)
class LaneLayout:
    """Named neuron index ranges ``(name, start, stop)`` for every layer."""

    state_dim: int
    layers: Tuple[Tuple[Lane, ...], ...]

    def lanes(self, layer: int) -> Dict[str, Tuple[int, int]]:
        return {name: (start, stop) for name, start, stop in self.layers[layer]}

    def check(self, net: NetworkGraph) -> List[str]:
        problems: List[str] = []
        if len(self.layers) != net.depth:
            return [f"layout describes {len(self.layers)} layers, network has {net.depth}"]
        for l, (lanes, width) in enumerate(zip(self.layers, net.widths)):
            pos = 0
            for name, start, stop in lanes:
                if start != pos or stop <= start:
                    problems.append(f"layer {l}: lane {name} [{start}, {stop}) is not contiguous at {pos}")
                pos = stop
            if pos != width:
                problems.append(f"layer {l}: lanes cover {pos} neurons, layer has {width}")
        return problems

    def to_dict(self) -> List[Dict[str, List[int]]]:
        return [{name: [start, stop] for name, start, stop in lanes} for lanes in self.layers]

    @classmethod
    def from_dict(cls, state_dim: int, raw: Any) -> "LaneLayout":
        if not isinstance(raw, list):
            raise ParseError("lane_layout: expected an array of layers")
        layers = []
        for l, entry in enumerate(raw):
            if not isinstance(entry, dict):
                raise ParseError(f"lane_layout[{l}]: expected an object")
            try:
                layers.append(tuple((str(k), int(v[0]), int(v[1])) for k, v in entry.items()))
            except (TypeError, ValueError, IndexError) as e:
                raise ParseError(f"lane_layout[{l}]: expected [start, stop] pairs") from e
        return cls(state_dim, tuple(layers))


@dataclass(frozen=True)
class CompiledStep:
    net: NetworkGraph
    layout: LaneLayout
    tableau_name: str
    stages: int
    dt: float
    rhs_depth: int
    passthrough_mode: PassthroughMode

    @property
    def state_dim(self) -> int:
        return self.layout.state_dim


# ----------------------------
# Construction
# ----------------------------

def _carried_lanes(n: int, completed: int, scale: int) -> List[Lane]:
    lanes: List[Lane] = [("u", 0, n * scale), ("t", n * scale, (n + 1) * scale)]
    pos = (n + 1) * scale
    for j in range(completed):
        lanes.append((f"r{j + 1}", pos, pos + n * scale))
        pos += n * scale
    return lanes


def _argument_layer(t: ButcherTableau, i: int, n: int, dt: float) -> Layer:
    """Forward ``u, t, r^1..r^i`` and append stage ``i + 1``'s argument and time."""
    width_in = n + 1 + i * n
    w = np.zeros((width_in + n + 1, width_in), dtype=np.float64)
    bias = np.zeros(width_in + n + 1, dtype=np.float64)
    w[:width_in, :width_in] = np.eye(width_in)
    for k in range(n):
        row = width_in + k
        w[row, k] = 1.0
        for j in range(i):
            w[row, n + 1 + j * n + k] = dt * t.a[i][j]
    w[width_in + n, n] = 1.0
    bias[width_in + n] = t.c[i] * dt
    return linear_layer(w, bias)


def _combination_layer(t: ButcherTableau, n: int, dt: float, emit_time: bool) -> Layer:
    width_in = n + 1 + t.s * n
    rows = n + 1 if emit_time else n
    w = np.zeros((rows, width_in), dtype=np.float64)
    bias = np.zeros(rows, dtype=np.float64)
    for k in range(n):
        w[k, k] = 1.0
        for i in range(t.s):
            w[k, n + 1 + i * n + k] = dt * t.b[i]
    if emit_time:
        w[n, n] = 1.0
        bias[n] = dt
    return linear_layer(w, bias)


def _affine_after(layer: Layer, paired: int) -> Layer:
    return fold_pair_inputs(layer, paired) if paired else layer


def _build_step(
    t: ButcherTableau, rhs: NetworkGraph, dt: float, mode: PassthroughMode, emit_time: bool
) -> Tuple[List[Layer], List[Tuple[Lane, ...]]]:
    n = rhs.output_dim
    layers: List[Layer] = []
    layout: List[Tuple[Lane, ...]] = []

    # leading inputs of the next affine layer that arrive as ReLU pairs
    paired = 0

    for i in range(t.s):
        width_in = n + 1 + i * n
        active = f"rhs{i + 1}"

        layers.append(_affine_after(_argument_layer(t, i, n, dt), paired))
        layout.append(tuple(_carried_lanes(n, i, 1) + [(active, width_in, width_in + n + 1)]))

        if mode is PassthroughMode.RELU_PAIR:
            carry = pair_carry_subnet(width_in, rhs.depth)
            paired = width_in
        else:
            carry = identity_subnet(width_in, rhs.depth, mode)
        block = parallel(carry, rhs)
        for l, layer in enumerate(block.layers):
            carried_width = carry.layers[l].width
            scale = carried_width // width_in
            lanes = _carried_lanes(n, i, scale) + [(active, carried_width, layer.width)]
            layers.append(layer)
            layout.append(tuple(lanes))

    layers.append(_affine_after(_combination_layer(t, n, dt, emit_time), paired))
    final: List[Lane] = [("u", 0, n)] + ([("t", n, n + 1)] if emit_time else [])
    layout.append(tuple(final))
    return layers, layout


def _check_inputs(t: ButcherTableau, rhs: NetworkGraph, dt: float) -> int:
    report = validate_tableau(t)
    if not report.ok:
        raise ValidationError(f"invalid tableau {t.name!r}", report.violations)
    ensure_valid(rhs)
    n = rhs.output_dim
    if rhs.input_dim != n + 1:
        raise ShapeError(
            f"RHS network must take (state, t): {n} outputs need {n + 1} inputs, got {rhs.input_dim}"
        )
    if not math.isfinite(dt) or dt == 0.0:
        raise ConfigError(f"dt must be finite and nonzero, got {dt!r}")
    return n


def compile_step(
    t: ButcherTableau,
    rhs: NetworkGraph,
    dt: float,
    mode: PassthroughMode = PassthroughMode.LINEAR_LANE,
) -> CompiledStep:
    """One timestep as a network: input ``(u^n, t^n)``, output ``u^{n+1}``."""
    n = _check_inputs(t, rhs, dt)
    layers, lanes = _build_step(t, rhs, dt, mode, emit_time=False)
    net = NetworkGraph(n + 1, tuple(layers))
    layout = LaneLayout(n, tuple(lanes))

    problems = layout.check(net) + validate_network_depth(net, t.s, rhs.depth)
    if problems:
        raise ValidationError("compiled step violates its layout", problems)

    logger.info(
        "compiled %s step: s=%d dt=%r rhs_depth=%d passthrough=%s depth=%d",
        t.name, t.s, dt, rhs.depth, mode.value, net.depth,
    )
    return CompiledStep(net, layout, t.name, t.s, dt, rhs.depth, mode)


def validate_network_depth(net: NetworkGraph, stages: int, rhs_depth: int) -> List[str]:
    expected = stages * (rhs_depth + 1) + 1
    if net.depth != expected:
        return [f"depth {net.depth} differs from s*(d_r+1)+1 = {expected}"]
    return []


def compile_multi(
    t: ButcherTableau,
    rhs: NetworkGraph,
    dt: float,
    n_steps: int,
    mode: PassthroughMode = PassthroughMode.LINEAR_LANE,
) -> NetworkGraph:
    """``n_steps`` chained steps; the time lane advances by ``dt`` per step and is dropped at the end."""
    n = _check_inputs(t, rhs, dt)
    if n_steps < 1:
        raise ConfigError(f"n_steps must be at least 1, got {n_steps}")

    layers: List[Layer] = []
    if n_steps > 1:
        advancing, _ = _build_step(t, rhs, dt, mode, emit_time=True)
        for _ in range(n_steps - 1):
            layers.extend(advancing)
    last, _ = _build_step(t, rhs, dt, mode, emit_time=False)
    layers.extend(last)

    logger.info("compiled %d chained %s steps: depth=%d", n_steps, t.name, len(layers))
    return NetworkGraph(n + 1, tuple(layers))


def depth_stats(c: CompiledStep) -> DepthStats:
    stats = graph_stats(c.net)
    problems = validate_network_depth(c.net, c.stages, c.rhs_depth)
    if problems:
        raise ValidationError("compiled step has unexpected depth", problems)
    return stats


def describe_layout(c: CompiledStep) -> str:
    """Plain-text table of the lanes in each layer of a compiled step."""
    lines = [f"{c.tableau_name}: s={c.stages} d_r={c.rhs_depth} passthrough={c.passthrough_mode.value}"]
    for l, lanes in enumerate(c.layout.layers):
        width = c.net.layers[l].width
        cells = " | ".join(f"{name}[{start}:{stop}]" for name, start, stop in lanes)
        lines.append(f"  layer {l:>3}  width {width:>3}  {cells}")
    return "\n".join(lines)


# ----------------------------
# Documents
# ----------------------------

def metadata_path(net_path: Path) -> Path:
    return net_path.with_name(net_path.stem + ".meta.json")


def compiled_metadata(c: CompiledStep) -> Dict[str, Any]:
    return {
        "tableau_name": c.tableau_name,
        "stages": c.stages,
        "dt": c.dt,
        "state_dim": c.state_dim,
        "rhs_depth": c.rhs_depth,
        "passthrough_mode": c.passthrough_mode.value,
        "lane_layout": c.layout.to_dict(),
    }


def write_compiled(c: CompiledStep, path: Path) -> Tuple[Path, Path]:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize(c.net), encoding="utf-8")
    meta = metadata_path(path)
    meta.write_text(json.dumps(compiled_metadata(c), indent=2) + "\n", encoding="utf-8")
    return path, meta


def load_compiled(path: Path) -> CompiledStep:
    net = deserialize(path.read_text(encoding="utf-8"))
    meta_file = metadata_path(path)
    if not meta_file.exists():
        raise ConfigError(f"missing metadata sidecar {meta_file}")
    try:
        meta = json.loads(meta_file.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed metadata at line {e.lineno} column {e.colno}: {e.msg}") from e
    if not isinstance(meta, dict):
        raise ParseError("metadata document must be an object")
    for key in ("tableau_name", "stages", "dt", "state_dim", "rhs_depth", "passthrough_mode", "lane_layout"):
        if key not in meta:
            raise ParseError(f"metadata is missing {key!r}")

    state_dim = int(meta["state_dim"])
    layout = LaneLayout.from_dict(state_dim, meta["lane_layout"])
    step = CompiledStep(
        net=net,
        layout=layout,
        tableau_name=str(meta["tableau_name"]),
        stages=int(meta["stages"]),
        dt=float(meta["dt"]),
        rhs_depth=int(meta["rhs_depth"]),
        passthrough_mode=PassthroughMode.from_flag(str(meta["passthrough_mode"])),
    )
    problems = []
    if net.input_dim != state_dim + 1 or net.output_dim != state_dim:
        problems.append(f"network maps {net.input_dim} -> {net.output_dim}, metadata says state_dim={state_dim}")
    problems += layout.check(net)
    if problems:
        raise ValidationError(f"compiled network {path} does not match its metadata", problems)
    return step
