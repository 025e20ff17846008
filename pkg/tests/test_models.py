import math

import numpy as np
import pytest

from rknet.errors import ConfigError
from rknet.graph import eval_network, same_values
from rknet.models import (
    DecayParams,
    MdsParams,
    decay_exact,
    decay_model,
    decay_rhs_net,
    mds_exact,
    mds_model,
    mds_rhs,
    mds_rhs_net,
    zero_model,
)

PARAM_SETS = {
    "undamped": MdsParams(1.0, 0.0, 1.0),
    "underdamped": MdsParams(1.0, 0.3, 1.0),
    "critical": MdsParams(1.0, 2.0, 1.0),
    "overdamped": MdsParams(2.0, 9.0, 8.0),
    "stiff": MdsParams(2.0, 0.4, 8.0),
}


def test_mds_net_examples():
    assert eval_network(mds_rhs_net(MdsParams(1, 0, 1)), [1.0, 0.0, 0.0]).tolist() == [0.0, -1.0]
    out = eval_network(mds_rhs_net(MdsParams(2.0, 0.4, 8.0)), [1.0, 1.0, 5.0])
    assert out[0] == 1.0
    assert out[1] == pytest.approx(-4.2, rel=1e-15)
    for p in PARAM_SETS.values():
        assert eval_network(mds_rhs_net(p), [0.0, 0.0, 3.0]).tolist() == [0.0, 0.0]


def test_mds_net_shape():
    net = mds_rhs_net(MdsParams())
    assert net.depth == 1 and net.input_dim == 3 and net.output_dim == 2
    assert np.all(net.layers[0].weights[:, 2] == 0.0)


@pytest.mark.parametrize("p", [MdsParams(0.0, 0.0, 1.0), MdsParams(1.0, -0.1, 1.0), MdsParams(1.0, 0.0, 0.0), MdsParams(float("inf"), 0, 1)])
def test_mds_rejects_bad_params(p):
    with pytest.raises(ConfigError):
        mds_rhs_net(p)


@pytest.mark.parametrize("name", sorted(PARAM_SETS))
def test_mds_callable_matches_net(name):
    p = PARAM_SETS[name]
    net, fn = mds_rhs_net(p), mds_rhs(p)
    rng = np.random.default_rng(17)
    for x in rng.uniform(-10, 10, size=(1000, 3)):
        assert same_values(eval_network(net, x), fn(x[:2], x[2]))


def test_mds_exact_undamped():
    x, v = mds_exact(PARAM_SETS["undamped"], 1.0, 0.0, math.pi)
    assert abs(x + 1.0) <= 1e-12 and abs(v) <= 1e-12


def test_mds_exact_initial_condition():
    for p in PARAM_SETS.values():
        assert mds_exact(p, 0.7, -1.3, 0.0) == (0.7, -1.3)


def test_mds_exact_critical():
    x, v = mds_exact(PARAM_SETS["critical"], 1.0, 0.0, 1.0)
    assert abs(x - 2.0 / math.e) <= 1e-12
    assert abs(v + 1.0 / math.e) <= 1e-12


@pytest.mark.parametrize("name", sorted(PARAM_SETS))
def test_mds_exact_solves_the_ode(name):
    p = PARAM_SETS[name]
    h = 1e-6
    for t in (0.3, 1.0, 2.5, 4.0):
        x, v = mds_exact(p, 1.0, 0.5, t)
        xp, vp = mds_exact(p, 1.0, 0.5, t + h)
        xm, vm = mds_exact(p, 1.0, 0.5, t - h)
        assert (xp - xm) / (2 * h) == pytest.approx(v, rel=1e-6, abs=1e-9)
        accel = -(p.d / p.m) * v - (p.c / p.m) * x
        assert (vp - vm) / (2 * h) == pytest.approx(accel, rel=1e-6, abs=1e-9)


def test_mds_exact_branches_agree_near_critical():
    critical = MdsParams(1.0, 2.0, 1.0)
    under = MdsParams(1.0, 2.0 * (1 - 1e-9), 1.0)
    for t in np.linspace(0.5, 10.0, 20):
        xc, vc = mds_exact(critical, 1.0, 0.0, float(t))
        xu, vu = mds_exact(under, 1.0, 0.0, float(t))
        assert xu == pytest.approx(xc, rel=1e-6)
        assert vu == pytest.approx(vc, rel=1e-6)


def test_decay_examples():
    p = DecayParams(-1.0)
    assert decay_exact(p, 1.0, 1.0) == math.exp(-1.0)
    assert decay_exact(DecayParams(0.0), 3.25, 17.0) == 3.25
    assert eval_network(decay_rhs_net(p), [2.0, 7.0]).tolist() == [-2.0]


def test_decay_rejects_non_finite_rate():
    with pytest.raises(ConfigError):
        decay_rhs_net(DecayParams(float("nan")))


def test_models_pair_net_and_callable():
    rng = np.random.default_rng(23)
    for model in (mds_model(PARAM_SETS["stiff"]), decay_model(DecayParams(-1.0)), zero_model(3)):
        assert model.net.input_dim == model.state_dim + 1
        assert len(model.default_u0) == model.state_dim
        for _ in range(50):
            u = rng.uniform(-10, 10, size=model.state_dim)
            t = float(rng.uniform(0, 5))
            assert same_values(eval_network(model.net, np.append(u, t)), model.fn(u, t))
        u0 = np.array(model.default_u0)
        assert same_values(model.exact(0.0, u0, 0.0), u0)
