import numpy as np
import pytest

from rknet.errors import ConfigError, ShapeError
from rknet.graph import ActivationKind, Layer, NetworkGraph, eval_network, linear_layer, same_values, sequential
from rknet.subnets import (
    ConstantMode,
    PassthroughMode,
    affine_subnet,
    constant_subnet,
    fold_pair_inputs,
    identity_subnet,
    pad_to_depth,
    pair_carry_subnet,
)

LINEAR, PAIR = PassthroughMode.LINEAR_LANE, PassthroughMode.RELU_PAIR
SPECIAL = [0.0, -0.0, 1.0, -1.0, 1e-300, -1e-300, 1e300, -1e300, 5e-324, -1.7976931348623157e308]


def finite_binary64_sample(rng, size):
    bits = rng.integers(0, 2**64, size=4 * size, dtype=np.uint64)
    values = bits.view(np.float64)
    return values[np.isfinite(values)][:size]


def test_identity_examples():
    assert eval_network(identity_subnet(1, 1, LINEAR), [7.25]).tolist() == [7.25]
    assert eval_network(identity_subnet(1, 3, PAIR), [-1e300]).tolist() == [-1e300]
    assert eval_network(identity_subnet(2, 2, PAIR), [0.0, -0.0]).tolist() == [0.0, 0.0]


@pytest.mark.parametrize("mode", [LINEAR, PAIR])
@pytest.mark.parametrize("depth", [1, 2, 3, 4])
def test_identity_is_exact_on_binary64(mode, depth):
    rng = np.random.default_rng(depth)
    x = np.concatenate([SPECIAL, finite_binary64_sample(rng, 1000)])
    net = identity_subnet(10, depth, mode)
    assert net.depth == depth
    for chunk in x.reshape(-1, 10):
        assert np.array_equal(eval_network(net, chunk), chunk)


def test_relu_pair_layout():
    net = identity_subnet(3, 3, PAIR)
    assert net.widths == [6, 6, 3]
    assert net.layers[0].activations == (ActivationKind.RELU,) * 6
    assert net.layers[-1].activations == (ActivationKind.LINEAR,) * 3
    assert identity_subnet(3, 1, PAIR).widths == [3]


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_pair_carry_recombined_by_next_layer(depth):
    carry = pair_carry_subnet(3, depth)
    assert carry.widths == [6] * depth
    assert all(layer.activations == (ActivationKind.RELU,) * 6 for layer in carry.layers)

    affine = linear_layer([[2.0, -3.0, 0.5], [0.0, 1.0, -1.0]], [1.0, 0.0])
    folded = sequential(carry, NetworkGraph(6, (fold_pair_inputs(affine, 3),)))
    direct = NetworkGraph(3, (affine,))
    rng = np.random.default_rng(depth)
    for x in [*rng.uniform(-10, 10, size=(100, 3)), np.array([-1e300, 0.0, 5e-324])]:
        assert same_values(eval_network(folded, x), eval_network(direct, x))


def test_fold_pair_inputs_layout():
    layer = linear_layer([[1.0, 0.0, 4.0]], [0.5])
    folded = fold_pair_inputs(layer, 2)
    assert folded.weights.tolist() == [[1.0, -1.0, 0.0, 0.0, 4.0]]
    assert not np.signbit(folded.weights[0, 3])
    assert folded.bias.tolist() == [0.5]
    with pytest.raises(ShapeError):
        fold_pair_inputs(layer, 4)
    with pytest.raises(ConfigError):
        pair_carry_subnet(2, 0)


def test_identity_rejects_bad_sizes():
    with pytest.raises(ConfigError):
        identity_subnet(0, 1)
    with pytest.raises(ConfigError):
        identity_subnet(1, 0)


def test_constant_co_ignores_input():
    net = constant_subnet(1.0, ConstantMode.CO)
    assert eval_network(net, [123.0]).tolist() == [1.0]
    assert eval_network(constant_subnet(-2.5), [0.0]).tolist() == [-2.5]
    rng = np.random.default_rng(7)
    outs = {eval_network(net, [x]).tobytes() for x in rng.normal(scale=1e6, size=50)}
    assert len(outs) == 1


def test_constant_hs_pair_doubles_at_zero():
    net = constant_subnet(1.0, ConstantMode.HS_PAIR)
    assert eval_network(net, [0.0]).tolist() == [2.0]
    assert eval_network(net, [0.5]).tolist() == [1.0]
    assert eval_network(net, [-0.5]).tolist() == [1.0]


def test_constant_rejects_non_finite():
    with pytest.raises(ConfigError):
        constant_subnet(float("nan"))


def test_affine_examples():
    assert eval_network(affine_subnet([[1, 0], [0, 1]], [0, 0]), [3.0, -4.0]).tolist() == [3.0, -4.0]
    assert eval_network(affine_subnet([[0, 1], [-1, 0]], [0, 0]), [1.0, 0.0]).tolist() == [0.0, -1.0]
    assert eval_network(affine_subnet([[0.5]], [1.0]), [4.0]).tolist() == [3.0]
    with pytest.raises(ShapeError):
        affine_subnet([[1.0, 2.0]], [0.0, 0.0])


@pytest.mark.parametrize("mode", [LINEAR, PAIR])
def test_pad_to_depth_keeps_outputs(mode):
    rng = np.random.default_rng(11)
    net = NetworkGraph(
        2, (Layer(rng.normal(size=(3, 2)), rng.normal(size=3), (ActivationKind.HYPTAN,) * 3),)
    )
    padded = pad_to_depth(net, 3, mode)
    assert padded.depth == 3
    for x in rng.uniform(-5, 5, size=(100, 2)):
        assert np.array_equal(eval_network(padded, x), eval_network(net, x))


def test_pad_to_own_depth_and_too_shallow():
    net = identity_subnet(2, 2)
    assert pad_to_depth(net, 2) is net
    with pytest.raises(ConfigError):
        pad_to_depth(net, 0)
    with pytest.raises(ConfigError):
        pad_to_depth(net, 1)


def test_passthrough_mode_flags():
    assert PassthroughMode.from_flag("linear") is LINEAR
    assert PassthroughMode.from_flag("relu-pair") is PAIR
    with pytest.raises(ConfigError):
        PassthroughMode.from_flag("sigmoid")
