"""Primitive networks: identity lanes, constants and affine maps.

Two ways to carry a value unchanged through a layer:

- ``LINEAR_LANE``: one LI neuron per value.
- ``RELU_PAIR``: two ReLU neurons per value, ``ReLU(x)`` and ``ReLU(-x)``,
  recombined by the next layer with weights ``(+1, -1)``. With no offset
  this is exact for every finite binary64 ``x``.

The one-neuron constructions that need a huge threshold constant
(``HS(x - x_inf)``, ``ReLU(x - x_inf) + x_inf * HS(x - x_inf)``) are not
provided.
"""

from __future__ import annotations

from enum import Enum
from typing import Any, List

import numpy as np

from .errors import ConfigError, ShapeError
from .graph import ActivationKind, Layer, NetworkGraph, linear_layer, sequential


class PassthroughMode(Enum):
    LINEAR_LANE = "linear"
    RELU_PAIR = "relu-pair"

    @classmethod
    def from_flag(cls, flag: str) -> "PassthroughMode":
        for mode in cls:
            if mode.value == flag:
                return mode
        raise ConfigError(f"unknown passthrough mode {flag!r}; choose linear or relu-pair")


class ConstantMode(Enum):
    CO = "co"
    HS_PAIR = "hs-pair"


def _relu_split(dim: int, from_pairs: bool) -> Layer:
    # neuron 2k carries ReLU(x_k), neuron 2k+1 carries ReLU(-x_k)
    width_in = 2 * dim if from_pairs else dim
    w = np.zeros((2 * dim, width_in), dtype=np.float64)
    for k in range(dim):
        if from_pairs:
            w[2 * k, 2 * k], w[2 * k, 2 * k + 1] = 1.0, -1.0
            w[2 * k + 1, 2 * k], w[2 * k + 1, 2 * k + 1] = -1.0, 1.0
        else:
            w[2 * k, k] = 1.0
            w[2 * k + 1, k] = -1.0
    return Layer(w, np.zeros(2 * dim), (ActivationKind.RELU,) * (2 * dim))


def _pair_merge(dim: int) -> Layer:
    w = np.zeros((dim, 2 * dim), dtype=np.float64)
    for k in range(dim):
        w[k, 2 * k], w[k, 2 * k + 1] = 1.0, -1.0
    return linear_layer(w, np.zeros(dim))


def identity_subnet(dim: int, depth: int, mode: PassthroughMode = PassthroughMode.LINEAR_LANE) -> NetworkGraph:
    """Network of ``depth`` layers returning its ``dim`` inputs unchanged.

    In ``RELU_PAIR`` mode every layer but the last holds the ReLU pairs and the
    last one recombines them, so a depth-1 request degenerates to one LI layer.
    The compiler avoids that with :func:`pair_carry_subnet`.
    """
    if dim < 1 or depth < 1:
        raise ConfigError(f"identity subnet needs dim >= 1 and depth >= 1, got dim={dim}, depth={depth}")

    if mode is PassthroughMode.LINEAR_LANE or depth == 1:
        eye = linear_layer(np.eye(dim), np.zeros(dim))
        return NetworkGraph(dim, (eye,) * depth)

    layers: List[Layer] = [_relu_split(dim, from_pairs=False)]
    for _ in range(depth - 2):
        layers.append(_relu_split(dim, from_pairs=True))
    layers.append(_pair_merge(dim))
    return NetworkGraph(dim, tuple(layers))


def pair_carry_subnet(dim: int, depth: int) -> NetworkGraph:
    """``depth`` layers of ReLU pairs with no recombining layer of their own.

    The output is the pair encoding of the input (width ``2 * dim``); the
    layer that consumes it undoes the split with :func:`fold_pair_inputs`.
    """
    if dim < 1 or depth < 1:
        raise ConfigError(f"pair carry needs dim >= 1 and depth >= 1, got dim={dim}, depth={depth}")
    layers = [_relu_split(dim, from_pairs=False)]
    layers += [_relu_split(dim, from_pairs=True) for _ in range(depth - 1)]
    return NetworkGraph(dim, tuple(layers))


def fold_pair_inputs(layer: Layer, paired: int) -> Layer:
    """Rewrite ``layer`` so its first ``paired`` inputs arrive as ReLU pairs.

    Column ``k`` becomes columns ``2k`` (weight ``w``) and ``2k + 1`` (weight
    ``-w``); the remaining inputs keep their columns after the pairs. One
    neuron of each pair is zero, so the sum differs at most in the sign of zero.
    """
    w = layer.weights
    if not 0 < paired <= w.shape[1]:
        raise ShapeError(f"cannot fold {paired} paired inputs into a layer with {w.shape[1]} inputs")
    folded = np.zeros((w.shape[0], w.shape[1] + paired), dtype=np.float64)
    folded[:, 0 : 2 * paired : 2] = w[:, :paired]
    # 0.0 - w keeps +0.0 where w is zero
    folded[:, 1 : 2 * paired : 2] = 0.0 - w[:, :paired]
    folded[:, 2 * paired :] = w[:, paired:]
    return Layer(folded, layer.bias, layer.activations)


def constant_subnet(value: float, mode: ConstantMode = ConstantMode.CO, input_dim: int = 1) -> NetworkGraph:
    """Two-layer network whose output is ``value`` whatever the input.

    ``HS_PAIR`` builds ``HS(x + eps) + HS(-x)`` with ``eps = 0``. Both
    Heavisides fire at ``x = 0`` (HS(0) = 1), so that single input yields
    ``2 * value``. ``CO`` has no such defect and is the one to use.
    """
    if not np.isfinite(value):
        raise ConfigError(f"constant value must be finite, got {value!r}")

    if mode is ConstantMode.CO:
        first = Layer(np.zeros((1, input_dim)), np.zeros(1), (ActivationKind.CONSTANT,))
        return NetworkGraph(input_dim, (first, linear_layer([[value]], [0.0])))

    w = np.zeros((2, input_dim), dtype=np.float64)
    w[0, 0], w[1, 0] = 1.0, -1.0
    first = Layer(w, np.zeros(2), (ActivationKind.HEAVISIDE,) * 2)
    return NetworkGraph(input_dim, (first, linear_layer([[value, value]], [0.0])))


def affine_subnet(weights: Any, bias: Any) -> NetworkGraph:
    w = np.asarray(weights, dtype=np.float64)
    b = np.asarray(bias, dtype=np.float64)
    if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
        raise ShapeError(f"affine subnet: weights {w.shape} do not match bias {b.shape}")
    return NetworkGraph(int(w.shape[1]), (linear_layer(w, b),))


def pad_to_depth(
    net: NetworkGraph, target_depth: int, mode: PassthroughMode = PassthroughMode.LINEAR_LANE
) -> NetworkGraph:
    if target_depth < net.depth:
        raise ConfigError(f"cannot pad a depth-{net.depth} network to depth {target_depth}")
    if target_depth == net.depth:
        return net
    return sequential(net, identity_subnet(net.output_dim, target_depth - net.depth, mode))
