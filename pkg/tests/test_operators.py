import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bjortho.operators import (ComplexityError, OperatorSpec, attainment_set, family_entries,
                               op_bj_direct, op_norm, op_strong_bj, power_iteration,
                               truncation_defect, zero_in_approx_spectrum)
from bjortho.oracle import op_norm_bruteforce
from bjortho.spaces import INF, SpaceSpec, norm

PS = [1.0, 1.5, 2.0, 3.0, INF]
L2 = SpaceSpec(2, 2)
LINF = SpaceSpec(INF, 2)


def dense(M, p, q):
    M = np.asarray(M, dtype=float)
    return OperatorSpec(M, SpaceSpec(p, M.shape[1]), SpaceSpec(q, M.shape[0]))


def test_construction_errors():
    with pytest.raises(ValueError):
        OperatorSpec(np.eye(2), SpaceSpec(2, 3), SpaceSpec(2, 2))
    with pytest.raises(ValueError):
        OperatorSpec([[np.nan, 0], [0, 1]], L2, L2)
    with pytest.raises(ValueError):
        OperatorSpec.family("example23_T", 1)
    with pytest.raises(ValueError):
        OperatorSpec.family("table", 3, [1.0, 2.0])
    with pytest.raises(ValueError):
        family_entries("example99_T", 5)


def test_family_entries_match_formulas():
    n = np.arange(1, 11)
    np.testing.assert_array_equal(family_entries("example23_T", 10), 1 - 1 / (n + 1))
    np.testing.assert_array_equal(family_entries("example23_A", 10), 1 / (n + 1))
    t = family_entries("example25_T", 10)
    a = family_entries("example25_A", 10)
    assert t[0] == 0.5 and a[0] == 0.5
    np.testing.assert_array_equal(t[1:], 1 - 1 / n[1:] ** 4.0)
    np.testing.assert_array_equal(a[1:], (1 / n[1:] ** 2.0) * (1 / n[1:] ** 2.0 - 1))


def test_apply_and_algebra():
    T = OperatorSpec.family("example23_T", 4)
    e3 = np.eye(4)[2]
    np.testing.assert_array_equal(T(e3), 0.75 * e3)
    I = OperatorSpec.identity(SpaceSpec(2, 3))
    x = np.array([1.0, -2.0, 0.5])
    np.testing.assert_array_equal(I(x), x)
    rng = np.random.default_rng(0)
    A = dense(rng.standard_normal((3, 3)), 2, 2)
    B = dense(rng.standard_normal((3, 3)), 2, 2)
    np.testing.assert_allclose(A.pencil(B, 0.3)(x), A(x) + 0.3 * B(x), rtol=0, atol=1e-15)
    np.testing.assert_allclose((A - B).matrix, A.matrix - B.matrix)
    np.testing.assert_allclose((2.0 * A).matrix, 2 * A.matrix)
    rt = OperatorSpec.from_dict(A.to_dict())
    np.testing.assert_array_equal(rt.matrix, A.matrix)
    fam = OperatorSpec.from_dict(T.to_dict())
    assert fam.family_id == "example23_T" and fam.N == 4


@pytest.mark.parametrize("N", [2, 5, 100, 1000])
def test_family_norms(N):
    assert op_norm(OperatorSpec.family("example25_T", N)).value == 1 - 1 / N**4
    assert op_norm(OperatorSpec.family("example23_T", N)).value == 1 - 1 / (N + 1)


def test_norm_examples():
    assert op_norm(OperatorSpec.identity(SpaceSpec(2, 4))).value == pytest.approx(1, abs=1e-14)
    assert op_norm(dense(np.zeros((2, 2)), 2, 2)).value == 0.0
    c = op_norm(dense(np.diag([2.0, 1.0]), 2, 2))
    assert c.value == pytest.approx(2.0, abs=1e-14) and c.guaranteed
    # max column sum for l_1 -> l_1, max row sum for l_inf -> l_inf
    M = np.array([[1.0, -2.0], [3.0, 0.5]])
    assert op_norm(dense(M, 1, 1)).value == 4.0
    assert op_norm(dense(M, INF, INF)).value == 3.5
    # l_inf -> l_1: best sign vector; (1, 1) gives |3| + |7|, (1, -1) gives |-1| + |-1|
    assert op_norm(dense([[1.0, 2.0], [3.0, 4.0]], INF, 1)).value == 10.0
    assert op_norm(dense([[1.0, 1.0], [1.0, -1.0]], INF, 1)).value == 2.0


def test_power_iteration_matches_svd():
    M = np.random.default_rng(3).standard_normal((5, 4))
    sigma, v, res, _ = power_iteration(M, tol=1e-13)
    assert sigma == pytest.approx(np.linalg.svd(M, compute_uv=False)[0], rel=1e-11)
    assert np.linalg.norm(v) == pytest.approx(1)
    c = op_norm(dense(M, 2, 2), method="power")
    assert c.value == pytest.approx(sigma, rel=1e-11)


def test_linf_domain_refused_without_opt_in():
    M = np.random.default_rng(1).standard_normal((3, 21))
    with pytest.raises(ComplexityError):
        op_norm(dense(M, INF, 2))
    c = op_norm(dense(M, INF, 2), heuristic=True)
    assert not c.guaranteed and c.value > 0


@pytest.mark.parametrize("p", PS)
@pytest.mark.parametrize("q", PS)
def test_certificate_soundness_and_bruteforce(p, q):
    rng = np.random.default_rng([int(10 * p) if p != INF else 0, int(10 * q) if q != INF else 0])
    for dim in (2, 3):
        T = dense(rng.standard_normal((dim, dim)), p, q)
        c = op_norm(T)
        assert abs(norm(T.domain, c.witness) - 1) <= 1e-12
        image = norm(T.codomain, T(c.witness))
        assert image <= c.value * (1 + 1e-12)
        assert c.value - image <= c.err + 1e-12 * c.value
        brute = op_norm_bruteforce(T, resolution=2e-3 if dim == 3 else 1e-3)
        assert brute <= c.value * (1 + 1e-9)
        assert brute >= c.value * (1 - 5e-3)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), p=st.sampled_from(PS), q=st.sampled_from(PS))
def test_triangle_inequality(seed, p, q):
    rng = np.random.default_rng(seed)
    T = dense(rng.standard_normal((3, 3)), p, q)
    S = dense(rng.standard_normal((3, 3)), p, q)
    a, b, c = op_norm(T), op_norm(S), op_norm(T + S)
    assert c.value <= a.value + b.value + a.err + b.err + c.err + 1e-12


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), p=st.sampled_from(PS), q=st.sampled_from(PS))
def test_pencil_midpoint_convexity(seed, p, q):
    rng = np.random.default_rng(seed)
    T = dense(rng.standard_normal((2, 3)), p, q)
    A = dense(rng.standard_normal((2, 3)), p, q)
    lams = rng.uniform(-3, 3, size=2)
    g = [op_norm(T.pencil(A, t)) for t in (lams[0], lams.mean(), lams[1])]
    slack = sum(c.err for c in g) + 1e-12 * max(c.value for c in g)
    assert g[1].value <= 0.5 * (g[0].value + g[2].value) + slack


def test_attainment_examples():
    a = attainment_set(dense(np.diag([2.0, 1.0]), 2, 2))
    assert a.exact and a.is_sign_pair
    np.testing.assert_allclose(np.abs(a.points[0]), [1, 0], atol=1e-12)
    a = attainment_set(OperatorSpec.identity(L2))
    assert a.exact and a.kind == "subspace" and len(a.points) == 2
    a = attainment_set(OperatorSpec.family("example23_T", 7))
    assert a.exact and a.is_sign_pair
    np.testing.assert_array_equal(np.abs(a.points[0]), np.eye(7)[6])


@pytest.mark.parametrize("p", PS)
def test_attainment_points_attain(p):
    T = dense(np.random.default_rng(2).standard_normal((3, 3)), p, p)
    a = attainment_set(T)
    nt = op_norm(T).value
    for x in a.points:
        assert abs(norm(T.codomain, T(x)) - nt) <= 1e-8 * nt


def test_op_bj_examples():
    I = OperatorSpec.identity(L2)
    A = dense(np.diag([1.0, -1.0]), 2, 2)
    assert op_bj_direct(I, A).holds
    assert not op_bj_direct(A, A).holds
    T25 = OperatorSpec.family("example25_T", 1000)
    A25 = OperatorSpec.family("example25_A", 1000)
    v = op_bj_direct(T25, A25)
    assert not v.holds
    assert truncation_defect(T25, A25).delta <= 2e-6


def test_op_strong_examples():
    I = OperatorSpec.identity(L2)
    A = dense(np.diag([1.0, -1.0]), 2, 2)
    assert op_strong_bj(I, A).holds
    T = dense(np.diag([1.0, 0.0]), INF, INF)
    B = dense(np.diag([0.0, 1.0]), INF, INF)
    assert op_bj_direct(T, B).holds
    assert not op_strong_bj(T, B).holds


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), p=st.sampled_from([1.0, 2.0, INF]))
def test_strong_implies_direct(seed, p):
    rng = np.random.default_rng(seed)
    T = dense(rng.standard_normal((2, 2)), p, p)
    A = dense(rng.standard_normal((2, 2)), p, p)
    T = T.pencil(A, op_bj_direct(T, A).minimizer)
    if op_strong_bj(T, A).holds:
        assert op_bj_direct(T, A).holds


def test_zero_in_approx_spectrum():
    r = zero_in_approx_spectrum(dense(np.diag([1.0, 2.0]), 2, 2))
    assert not r.member and r.inf_estimate == pytest.approx(1.0)
    r = zero_in_approx_spectrum(dense([[1.0, 2.0], [2.0, 4.0]], 2, 2))
    assert r.member and r.inf_estimate == pytest.approx(0.0, abs=1e-12)
    r = zero_in_approx_spectrum(OperatorSpec.family("example23_A", 50))
    assert r.member and r.limit_inf == 0.0 and r.inf_estimate == pytest.approx(1 / 51)
    r = zero_in_approx_spectrum(OperatorSpec.family("example25_T", 50))
    assert not r.member
    r = zero_in_approx_spectrum(dense([[2.0, 1.0], [0.0, 1.0]], 1.5, 3))
    assert not r.member and r.inf_estimate > 0.1
    r = zero_in_approx_spectrum(dense([[1.0, 1.0], [1.0, 1.0]], 1, INF))
    assert r.member


def test_truncation_defect():
    T = OperatorSpec.family("example23_T", 10)
    A = OperatorSpec.family("example23_A", 10)
    d = truncation_defect(T, A)
    assert d.delta == pytest.approx(31 / 143, abs=1e-15)
    assert truncation_defect(T, A, N=100).delta == pytest.approx(0.028933961357300779, abs=1e-15)
    zero = OperatorSpec(diagonal=np.zeros(10))
    assert truncation_defect(T, zero).delta == 0.0
    with pytest.raises(ValueError):
        truncation_defect(T, dense(np.eye(10), 2, 2))
