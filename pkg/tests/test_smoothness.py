import math

import numpy as np
import pytest

from bjortho.operators import OperatorSpec, op_bj_direct, op_norm
from bjortho.oracle import GridSpec, pencil_grid_min, sphere_mesh
from bjortho.smoothness import (Hyperspace, hyperspace_distance, hyperspace_sup, james_split,
                                necessary_smoothness_probe, orthogonal_direction,
                                pointwise_transfer_check, right_additivity_probe,
                                sample_hyperspaces, sufficient_smoothness)
from bjortho.spaces import INF, SpaceSpec, norms

L2 = SpaceSpec(2, 2)
I2 = OperatorSpec.identity(L2)
D21 = OperatorSpec(np.diag([2.0, 1.0]), L2, L2)


def test_hyperspace_rejects_zero():
    with pytest.raises(ValueError):
        Hyperspace([0.0, 0.0])
    assert Hyperspace([1.0, 1.0]).contains(L2, [1.0, -1.0])


@pytest.mark.parametrize("f,expected", [((1, 0), 1.0), ((1, 1), 1 / math.sqrt(2)), ((0, 1), 0.0)])
def test_distance_examples(f, expected):
    assert hyperspace_distance(L2, (1, 0), Hyperspace(f)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, INF])
def test_distance_matches_kernel_mesh(p):
    S = SpaceSpec(p, 2)
    rng = np.random.default_rng(5)
    for _ in range(5):
        x0 = rng.standard_normal(2)
        f = rng.standard_normal(2)
        k = np.array([-f[1], f[0]])
        _, mesh = pencil_grid_min(S, x0, k, GridSpec(-50, 50, 100_001, 3))
        assert hyperspace_distance(S, x0, Hyperspace(f)) == pytest.approx(mesh, rel=1e-6)


def test_hyperspace_sup_examples():
    s = hyperspace_sup(D21, Hyperspace([1.0, 0.0]))
    assert s.exact and s.value == pytest.approx(1.0, abs=1e-14)
    I3 = OperatorSpec.identity(SpaceSpec(2, 3))
    assert hyperspace_sup(I3, Hyperspace([0.3, -1.0, 2.0])).value == pytest.approx(1.0)
    T = OperatorSpec(np.diag([2.0, 1.0, 1.0]), SpaceSpec(2, 3), SpaceSpec(2, 3))
    f = np.array([1.0, 1.0, 0.0])
    s = hyperspace_sup(T, Hyperspace(f))
    K = np.array([[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]]).T
    K[:, 0] /= math.sqrt(2)
    gram = K.T @ T.matrix.T @ T.matrix @ K
    assert s.value == pytest.approx(math.sqrt(np.linalg.eigvalsh(gram)[-1]), rel=1e-12)
    assert s.value == pytest.approx(math.sqrt(2.5), rel=1e-12)


@pytest.mark.parametrize("p", [1.0, 1.5, INF])
def test_hyperspace_sup_against_mesh(p):
    S = SpaceSpec(p, 3)
    T = OperatorSpec(np.random.default_rng(9).standard_normal((3, 3)), S, S)
    f = np.array([1.0, -0.5, 0.25])
    s = hyperspace_sup(T, Hyperspace(f))
    mesh = sphere_mesh(S, 5e-3)
    slab = mesh[np.abs(mesh @ f) <= 5e-3]
    brute = float(norms(S, slab @ T.matrix.T).max())
    assert s.value >= brute * (1 - 1e-2)
    assert s.value <= op_norm(T).value * (1 + 1e-12)
    assert Hyperspace(f).contains(S, s.witness, tol=1e-9)


def test_sample_hyperspaces_distances():
    x0 = np.array([1.0, 0.0, 0.0])
    S = SpaceSpec(1.5, 3)
    for delta, H in sample_hyperspaces(S, x0, per_delta=2, seed=1):
        assert hyperspace_distance(S, x0, H) > delta


def test_sufficient_examples():
    r = sufficient_smoothness(D21)
    assert r.mt_singleton and r.image_smooth and r.sufficient_verdict
    assert all(s < 2.0 for _, _, s in r.hyperspace_trace)
    r = sufficient_smoothness(I2)
    assert not r.mt_singleton and r.sufficient_verdict is False
    T = OperatorSpec(np.diag([2.0, 1.0]), L2, SpaceSpec(1, 2))
    assert sufficient_smoothness(T).sufficient_verdict is False
    T = OperatorSpec(np.diag([2.0, 0.0]), L2, SpaceSpec(1, 2))
    r = sufficient_smoothness(T)
    assert r.mt_singleton and r.image_smooth is False and r.sufficient_verdict is False


def test_necessary_probe_identity_certificate():
    r = necessary_smoothness_probe(I2)
    assert r.necessary_verdict == "NON-SMOOTH-CERTIFIED"
    j = r.james_decomposition
    assert np.linalg.matrix_rank(j["A1"].matrix) == 1
    assert j["split_residual"] == 0.0
    assert op_bj_direct(I2, j["A1"]).holds and op_bj_direct(I2, j["A2"]).holds
    s = op_bj_direct(I2, j["A1"] + j["A2"])
    assert not s.holds and s.min_value == pytest.approx(0.0, abs=1e-9)


def test_necessary_probe_other_outcomes():
    assert necessary_smoothness_probe(D21).necessary_verdict == \
        "INCONCLUSIVE-CONSISTENT-WITH-SMOOTH"
    one = OperatorSpec.identity(SpaceSpec(2, 1))
    assert necessary_smoothness_probe(one).necessary_verdict == "VACUOUS-SMOOTH"


def test_sufficient_and_necessary_never_conflict():
    for k in range(10):
        rng = np.random.default_rng([61, k])
        T = OperatorSpec(rng.standard_normal((2, 2)), L2, L2)
        if sufficient_smoothness(T).sufficient_verdict:
            assert necessary_smoothness_probe(T).necessary_verdict != "NON-SMOOTH-CERTIFIED"


def test_james_split_algebra():
    T = OperatorSpec(np.random.default_rng(4).standard_normal((3, 3)), SpaceSpec(2, 3),
                     SpaceSpec(2, 3))
    x0 = np.array([1.0, 0.0, 0.0])
    A1, A2 = james_split(T, x0, np.array([1.0, 0.5, -2.0]))
    assert np.array_equal(A1.matrix + A2.matrix, T.matrix) or \
        np.abs(A1.matrix + A2.matrix - T.matrix).max() <= 4 * np.finfo(float).eps
    assert np.linalg.matrix_rank(A1.matrix) <= 1


def test_orthogonal_direction_gives_orthogonality():
    rng = np.random.default_rng(2)
    for p in (1.5, 2.0, 3.0):
        S = SpaceSpec(p, 3)
        T = OperatorSpec(np.diag([3.0, 1.0, 0.5]), S, S)
        A = orthogonal_direction(T, OperatorSpec(rng.standard_normal((3, 3)), S, S))
        assert op_bj_direct(T, A).holds


def test_right_additivity():
    r = right_additivity_probe(D21, trials=30, seed=3, smooth=True)
    assert r.passes == r.trials == 30 and not r.falsifications
    A1 = orthogonal_direction(D21, OperatorSpec(np.ones((2, 2)), L2, L2))
    r = right_additivity_probe(D21, pairs=[(A1, -1.0 * A1)])
    assert r.passes == 1
    cert = necessary_smoothness_probe(I2).james_decomposition
    r = right_additivity_probe(I2, pairs=[(cert["A1"], cert["A2"])])
    assert r.failures == 1 and r.passes == 0


def test_pointwise_transfer_examples():
    e2e1 = OperatorSpec([[0.0, 0.0], [1.0, 0.0]], L2, L2)
    r = pointwise_transfer_check(D21, e2e1)
    assert r.status == "AGREE" and r.pointwise.holds and r.operator.holds
    r = pointwise_transfer_check(D21, D21)
    assert r.status == "AGREE" and not r.pointwise.holds and not r.operator.holds
    e1e2 = OperatorSpec([[0.0, 1.0], [0.0, 0.0]], L2, L2)
    r = pointwise_transfer_check(D21, e1e2)
    assert r.status == "AGREE" and r.operator.holds
    assert pointwise_transfer_check(I2, D21).status == "PRECONDITION-FAILED"


def test_pointwise_transfer_random_never_falsified():
    for k in range(20):
        rng = np.random.default_rng([71, k])
        p = (1.5, 2.0, 3.0)[k % 3]
        S = SpaceSpec(p, 2)
        T = OperatorSpec(rng.standard_normal((2, 2)), S, S)
        A = OperatorSpec(rng.standard_normal((2, 2)), S, S)
        if k % 2:
            A = orthogonal_direction(T, A)
        assert not pointwise_transfer_check(T, A).falsified
