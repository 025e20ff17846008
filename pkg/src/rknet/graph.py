"""Dense layered networks: data model, forward evaluation, composition, documents.

A network is an ordered list of layers. Layer ``l`` maps the previous width
``M`` to its own width ``K``::

    out[k] = act[k]( sum_m W[k, m] * x[m] + bias[k] )

The inner sum always runs left to right over ``m`` ascending, starting from
0.0. The oracle integrator uses the same order, which is what makes network
and oracle agree bit for bit.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from .errors import DepthMismatchError, ParseError, ShapeError, ValidationError

logger = logging.getLogger(__name__)


class ActivationKind(Enum):
    """Per-neuron activation. The value is the tag used in network documents."""

    HEAVISIDE = "HS"
    LOGISTIC = "LG"
    RELU = "ReLU"
    HYPTAN = "HTAN"
    CONSTANT = "CO"
    LINEAR = "LI"

    @classmethod
    def from_tag(cls, tag: str) -> "ActivationKind":
        for kind in cls:
            if kind.value == tag:
                return kind
        raise ValueError(f"unknown activation {tag!r}")

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self is ActivationKind.LINEAR:
            return x
        if self is ActivationKind.RELU:
            # np.maximum propagates NaN
            return np.maximum(x, 0.0)
        if self is ActivationKind.HEAVISIDE:
            # HS(0) = 1
            return np.where(np.isnan(x), np.nan, np.where(x >= 0.0, 1.0, 0.0))
        if self is ActivationKind.CONSTANT:
            return np.ones_like(x)
        if self is ActivationKind.HYPTAN:
            return np.tanh(x)
        with np.errstate(over="ignore"):
            return 1.0 / (1.0 + np.exp(-x))


def activate(kind: ActivationKind, x: float) -> float:
    return float(kind.apply(np.array([x], dtype=np.float64))[0])


def _frozen_array(values: Any, ndim: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ShapeError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Layer:
    weights: np.ndarray
    bias: np.ndarray
    activations: Tuple[ActivationKind, ...]
    _groups: Tuple[Tuple[ActivationKind, np.ndarray], ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        weights = _frozen_array(self.weights, 2, "weights")
        bias = _frozen_array(self.bias, 1, "bias")
        acts = tuple(self.activations)
        k, m = weights.shape
        if k < 1 or m < 1:
            raise ShapeError(f"layer weights must be at least 1x1, got {k}x{m}")
        if bias.shape[0] != k or len(acts) != k:
            raise ShapeError(
                f"layer has {k} weight rows but {bias.shape[0]} biases and {len(acts)} activations"
            )
        groups = []
        for kind in ActivationKind:
            idx = np.array([i for i, a in enumerate(acts) if a is kind], dtype=np.intp)
            if idx.size:
                groups.append((kind, idx))
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)
        object.__setattr__(self, "activations", acts)
        object.__setattr__(self, "_groups", tuple(groups))

    @property
    def width(self) -> int:
        return int(self.weights.shape[0])

    @property
    def input_width(self) -> int:
        return int(self.weights.shape[1])


@dataclass(frozen=True, eq=False)
class NetworkGraph:
    input_dim: int
    layers: Tuple[Layer, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "layers", tuple(self.layers))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def output_dim(self) -> int:
        return self.layers[-1].width

    @property
    def widths(self) -> List[int]:
        return [layer.width for layer in self.layers]


@dataclass(frozen=True)
class DepthStats:
    depth: int
    max_width: int
    neuron_count: int
    weight_nonzeros: int


def linear_layer(weights: Any, bias: Any) -> Layer:
    w = np.asarray(weights, dtype=np.float64)
    return Layer(w, bias, (ActivationKind.LINEAR,) * w.shape[0])


# ----------------------------
# Evaluation
# ----------------------------

def eval_layer(layer: Layer, values: Sequence[float] | np.ndarray, index: int = 0) -> np.ndarray:
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != layer.input_width:
        raise ShapeError(
            f"layer {index}: expected input width {layer.input_width}, got {x.shape[0] if x.ndim == 1 else x.shape}"
        )
    w = layer.weights
    acc = np.zeros(layer.width, dtype=np.float64)
    for m in range(layer.input_width):
        acc += w[:, m] * x[m]
    z = acc + layer.bias
    out = np.empty_like(z)
    for kind, idx in layer._groups:
        out[idx] = kind.apply(z[idx])
    return out


def eval_network(net: NetworkGraph, values: Sequence[float] | np.ndarray) -> np.ndarray:
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != net.input_dim:
        raise ShapeError(f"network expects input width {net.input_dim}, got {x.shape}")
    for index, layer in enumerate(net.layers):
        x = eval_layer(layer, x, index)
    return x


# ----------------------------
# Validation
# ----------------------------

def validate_network(net: NetworkGraph) -> List[str]:
    problems: List[str] = []
    if net.input_dim < 1:
        problems.append(f"input_dim must be positive, got {net.input_dim}")
    if not net.layers:
        problems.append("network has no layers")
        return problems

    expected = net.input_dim
    for l, layer in enumerate(net.layers):
        if layer.input_width != expected:
            problems.append(f"layer {l}: expects input width {layer.input_width}, previous width is {expected}")
        expected = layer.width

        bad_rows = np.flatnonzero(~np.isfinite(layer.weights).all(axis=1))
        for k in bad_rows:
            problems.append(f"layer {l} neuron {int(k)}: non-finite weight")
        for k in np.flatnonzero(~np.isfinite(layer.bias)):
            problems.append(f"layer {l} neuron {int(k)}: non-finite bias")
    return problems


def ensure_valid(net: NetworkGraph) -> NetworkGraph:
    problems = validate_network(net)
    if problems:
        raise ValidationError("invalid network", problems)
    return net


def graph_stats(net: NetworkGraph) -> DepthStats:
    widths = net.widths
    return DepthStats(
        depth=net.depth,
        max_width=max(widths) if widths else 0,
        neuron_count=sum(widths),
        weight_nonzeros=int(sum(np.count_nonzero(layer.weights) for layer in net.layers)),
    )


# ----------------------------
# Composition
# ----------------------------

def sequential(first: NetworkGraph, second: NetworkGraph) -> NetworkGraph:
    if first.output_dim != second.input_dim:
        raise ShapeError(
            f"cannot chain networks: first outputs width {first.output_dim}, second expects {second.input_dim}"
        )
    return NetworkGraph(first.input_dim, first.layers + second.layers)


def _stack_layers(upper: Layer, lower: Layer) -> Layer:
    k1, m1 = upper.weights.shape
    k2, m2 = lower.weights.shape
    w = np.zeros((k1 + k2, m1 + m2), dtype=np.float64)
    w[:k1, :m1] = upper.weights
    w[k1:, m1:] = lower.weights
    return Layer(w, np.concatenate([upper.bias, lower.bias]), upper.activations + lower.activations)


def parallel(a: NetworkGraph, b: NetworkGraph) -> NetworkGraph:
    """Run ``a`` and ``b`` side by side; ``a`` takes the lower input and output indices."""
    if a.depth != b.depth:
        raise DepthMismatchError(
            f"parallel branches have depths {a.depth} and {b.depth}; pad the shallower one with pad_to_depth"
        )
    layers = tuple(_stack_layers(la, lb) for la, lb in zip(a.layers, b.layers))
    return NetworkGraph(a.input_dim + b.input_dim, layers)


def with_perturbed_weight(net: NetworkGraph, layer: int, row: int, col: int, rel: float) -> NetworkGraph:
    """Copy of ``net`` with one weight multiplied by ``1 + rel``."""
    target = net.layers[layer]
    w = target.weights.copy()
    w[row, col] = w[row, col] * (1.0 + rel)
    layers = list(net.layers)
    layers[layer] = Layer(w, target.bias, target.activations)
    return NetworkGraph(net.input_dim, tuple(layers))


# ----------------------------
# Documents
# ----------------------------

def network_to_dict(net: NetworkGraph) -> Dict[str, Any]:
    return {
        "input_dim": net.input_dim,
        "layers": [
            {
                "weights": layer.weights.tolist(),
                "bias": layer.bias.tolist(),
                "activations": [a.value for a in layer.activations],
            }
            for layer in net.layers
        ],
    }


def serialize(net: NetworkGraph) -> str:
    # json writes floats with repr(), the shortest string that round-trips
    ensure_valid(net)
    return json.dumps(network_to_dict(net), indent=2) + "\n"


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _number_list(value: Any, where: str) -> List[float]:
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected an array")
    return [_number(v, f"{where}[{i}]") for i, v in enumerate(value)]


def network_from_dict(doc: Any) -> NetworkGraph:
    if not isinstance(doc, dict):
        raise ParseError("network document must be an object")
    for key in ("input_dim", "layers"):
        if key not in doc:
            raise ParseError(f"network document is missing {key!r}")
    input_dim = doc["input_dim"]
    if isinstance(input_dim, bool) or not isinstance(input_dim, int):
        raise ParseError(f"input_dim: expected an integer, got {input_dim!r}")
    if not isinstance(doc["layers"], list):
        raise ParseError("layers: expected an array")

    layers: List[Layer] = []
    for l, raw in enumerate(doc["layers"]):
        where = f"layers[{l}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: expected an object")
        for key in ("weights", "bias", "activations"):
            if key not in raw:
                raise ParseError(f"{where}: missing {key!r}")
        if not isinstance(raw["weights"], list):
            raise ParseError(f"{where}.weights: expected an array of rows")
        rows = [_number_list(row, f"{where}.weights[{k}]") for k, row in enumerate(raw["weights"])]
        bias = _number_list(raw["bias"], f"{where}.bias")
        if not isinstance(raw["activations"], list):
            raise ParseError(f"{where}.activations: expected an array")
        try:
            acts = tuple(ActivationKind.from_tag(str(a)) for a in raw["activations"])
        except ValueError as e:
            raise ParseError(f"{where}.activations: {e}") from e
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValidationError("invalid network", [f"layer {l}: weights must be a non-empty rectangular matrix"])
        try:
            layers.append(Layer(np.array(rows, dtype=np.float64), bias, acts))
        except ShapeError as e:
            raise ValidationError("invalid network", [f"layer {l}: {e}"]) from e

    net = ensure_valid(NetworkGraph(input_dim, tuple(layers)))
    logger.debug("loaded network: input_dim=%d widths=%s", net.input_dim, net.widths)
    return net


def deserialize(text: str) -> NetworkGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed network document at line {e.lineno} column {e.colno}: {e.msg}") from e
    return network_from_dict(doc)


def same_values(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> bool:
    """Element-wise equality of two real vectors; +0.0 and -0.0 compare equal."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    return x.shape == y.shape and bool(np.all((x == y) | (np.isnan(x) & np.isnan(y))))


__all__ = [
    "ActivationKind",
    "DepthStats",
    "Layer",
    "NetworkGraph",
    "activate",
    "deserialize",
    "ensure_valid",
    "eval_layer",
    "eval_network",
    "graph_stats",
    "linear_layer",
    "network_from_dict",
    "network_to_dict",
    "parallel",
    "same_values",
    "sequential",
    "serialize",
    "validate_network",
    "with_perturbed_weight",
]
