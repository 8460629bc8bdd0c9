"""Smoothness of operators: hyperspace suprema, sufficient and necessary checks.

A hyperspace is the kernel of a nonzero functional f, and the distance from
x0 to it is ``|f(x0)| / ||f||_*``.  The necessary-condition probe builds the
rank-one split ``T = A1 + A2`` with ``A1 = (Tx0) (x) f``; when T is
orthogonal to both pieces but obviously not to their sum, right-additivity
of orthogonality fails at T, which certifies that T is not smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import minimize

from .operators import OperatorSpec, attainment_set, op_bj_direct, op_norm
from .spaces import (SpaceSpec, check_point, dual_norm, is_smooth_point, lp_norm, norm,
                     support_functional)
from .vec_ortho import DEFAULT_TOL, Verdict, is_bj_orthogonal

DELTA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))
MAX_SLICE_DIM = 12


@dataclass(frozen=True)
class Hyperspace:
    """``ker f`` for a nonzero functional ``f``."""

    f: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        if not np.any(f):
            raise ValueError("a hyperspace needs a nonzero functional")
        object.__setattr__(self, "f", f)

    def contains(self, space: SpaceSpec, x, tol: float = 1e-12) -> bool:
        return abs(self.f @ x) <= tol * dual_norm(space, self.f) * norm(space, x)


def hyperspace_distance(space: SpaceSpec, x0, H: Hyperspace) -> float:
    """``d(x0, ker f) = |f(x0)| / ||f||_*``."""
    x0 = check_point(space, x0)
    return abs(float(H.f @ x0)) / dual_norm(space, H.f)


@dataclass(frozen=True)
class SliceSup:
    value: float
    witness: np.ndarray
    exact: bool


def _slice_vertices_l1(g: np.ndarray) -> np.ndarray:
    n = len(g)
    rows = [np.eye(n)[i] for i in range(n) if g[i] == 0]
    nz = np.flatnonzero(g)
    for a in range(len(nz)):
        for b in range(a + 1, len(nz)):
            i, j = nz[a], nz[b]
            v = np.zeros(n)
            v[i], v[j] = g[j], -g[i]
            rows.append(v / (abs(g[i]) + abs(g[j])))
    return np.array(rows)


def _slice_vertices_linf(g: np.ndarray) -> np.ndarray:
    n = len(g)
    if n > MAX_SLICE_DIM:
        raise ValueError("cube slice has too many candidate vertices")
    rows = []
    for k in range(n):
        others = [i for i in range(n) if i != k]
        for s in product((1.0, -1.0), repeat=n - 1):
            v = np.zeros(n)
            v[others] = s
            if g[k] == 0:
                if abs(g @ v) <= 1e-14 * np.abs(g).sum():
                    for sk in (1.0, -1.0):
                        w = v.copy()
                        w[k] = sk
                        rows.append(w)
                continue
            v[k] = -(g[others] @ np.asarray(s)) / g[k]
            if abs(v[k]) <= 1.0 + 1e-14:
                rows.append(v)
    return np.array(rows)


def hyperspace_sup(T: OperatorSpec, H: Hyperspace, tol: float = DEFAULT_TOL,
                   seed: int = 0) -> SliceSup:
    """``sup {||Tx|| : x in ker f, ||x|| = 1}``.

    Exact for l_2 -> l_2 (restricted SVD) and for polyhedral domains, where
    the slice of the ball is a polytope whose vertices are enumerated.
    Other cases use multistart local ascent and are not exact.
    """
    X, Y = T.domain, T.codomain
    if X.dim < 2:
        raise ValueError("hyperspaces need dim >= 2")
    wx = X.w
    M = T.scaled_matrix()
    g = H.f / wx  # functional in plain coordinates
    if X.p == 2.0 and Y.p == 2.0:
        K = null_space(g[None, :])
        _, s, vt = np.linalg.svd(M @ K)
        u = K @ vt[0]
        return SliceSup(float(s[0]), u / wx, True)
    if X.p == 1.0 or X.is_inf:
        V = _slice_vertices_l1(g) if X.p == 1.0 else _slice_vertices_linf(g)
        vals = lp_norm(V @ M.T, Y.p, axis=1)
        k = int(np.argmax(vals))
        return SliceSup(float(vals[k]), V[k] / wx, True)
    K = null_space(g[None, :])
    rng = np.random.default_rng(seed)

    def neg(c):
        u = K @ c
        d = lp_norm(u, X.p)
        return -float(lp_norm(M @ u, Y.p) / d) if d > 0 else 0.0

    best, arg = -math.inf, None
    starts = [np.eye(K.shape[1])[i] for i in range(K.shape[1])]
    starts += [rng.standard_normal(K.shape[1]) for _ in range(8)]
    for c0 in starts:
        r = minimize(neg, c0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14})
        if -r.fun > best:
            best, arg = -float(r.fun), r.x
    u = K @ arg
    u = u / lp_norm(u, X.p)
    return SliceSup(best, u / wx, False)


# ----------------------------------------------------------------- reports


@dataclass
class SmoothnessReport:
    mt_singleton: bool
    x0: np.ndarray | None
    image_smooth: bool | None = None
    hyperspace_trace: list = field(default_factory=list)
    sufficient_verdict: bool | None = None
    necessary_verdict: str | None = None
    right_additivity: tuple | None = None
    james_decomposition: dict | None = None
    flags: tuple = ()
    notes: list = field(default_factory=list)


def _functional_at_distance(space: SpaceSpec, phi: np.ndarray, r: np.ndarray,
                            target: float) -> np.ndarray:
    """``f = t phi + r`` with ``d(x0, ker f) = target`` (phi norms x0, r(x0) = 0).

    The distance ``t / ||t phi + r||_*`` increases with t toward 1, so t is
    found by bisection.
    """
    if not np.any(r):
        return phi

    def dist(t):
        return t / dual_norm(space, t * phi + r)

    lo, hi = 0.0, 1.0
    while dist(hi) < target:
        hi *= 2.0
        if hi > 1e12:
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if dist(mid) < target:
            lo = mid
        else:
            hi = mid
    return hi * phi + r


def sample_hyperspaces(space: SpaceSpec, x0, per_delta: int = 4, seed: int = 0,
                       grid=DELTA_GRID):
    """Yield ``(delta, H)`` with ``d(x0, H)`` just above each delta on the grid."""
    x0 = check_point(space, x0)
    x0 = x0 / norm(space, x0)
    rng = np.random.default_rng(seed)
    phi = support_functional(space, x0)
    for delta in grid:
        for _ in range(per_delta):
            g = rng.standard_normal(space.dim)
            r = g - (g @ x0) * phi
            target = min(delta + 0.5 * (1.0 - delta) * rng.random(), 1.0)
            yield delta, Hyperspace(_functional_at_distance(space, phi, r, target))


def sufficient_smoothness(T: OperatorSpec, tol: float = DEFAULT_TOL,
                          hyperspace_samples: int = 4, seed: int = 0) -> SmoothnessReport:
    """Check (i) M_T = {+-x0}, (ii) Tx0 smooth, (iii) sampled hyperspace condition.

    In finite dimension (iii) follows from (i) by compactness; it is still
    sampled over the delta grid so that the trace documents it.
    """
    att = attainment_set(T)
    nt = att.value
    rep = SmoothnessReport(att.is_sign_pair, att.points[0] if att.points else None)
    if not att.exact:
        rep.flags += ("HEURISTIC",)
    if not rep.mt_singleton:
        rep.sufficient_verdict = False
        rep.notes.append("attainment set is not a single sign pair")
        return rep
    x0 = rep.x0
    Tx0 = T.apply(x0)
    rep.image_smooth = bool(is_smooth_point(T.codomain, Tx0 / norm(T.codomain, Tx0)))
    ok3 = True
    if T.domain.dim >= 2:
        for delta, H in sample_hyperspaces(T.domain, x0, hyperspace_samples, seed):
            s = hyperspace_sup(T, H, tol, seed)
            d = hyperspace_distance(T.domain, x0, H)
            rep.hyperspace_trace.append((delta, d, s.value))
            if not s.exact and "HEURISTIC" not in rep.flags:
                rep.flags += ("HEURISTIC",)
            if not s.value < nt - tol * nt:
                ok3 = False
    rep.notes.append("hyperspace condition is sampled on the delta grid")
    rep.sufficient_verdict = bool(rep.mt_singleton and rep.image_smooth and ok3)
    return rep


def james_split(T: OperatorSpec, x0, f) -> tuple[OperatorSpec, OperatorSpec]:
    """``A1 = (Tx0) (x) f`` and ``A2 = T - A1`` (f(x0) = 1)."""
    A1 = OperatorSpec(np.outer(T.apply(x0), f), T.domain, T.codomain)
    A2 = OperatorSpec(T.matrix - A1.matrix, T.domain, T.codomain)
    return A1, A2


def necessary_smoothness_probe(T: OperatorSpec, tol: float = DEFAULT_TOL, trials: int = 4,
                               seed: int = 0) -> SmoothnessReport:
    """Search for a constructive right-additivity failure at T.

    For hyperspaces H at positive distance from x0 with ``sup ||T|_H|| = ||T||``
    the split ``T = A1 + A2`` with ``ker f = H`` is tested; a success
    certifies non-smoothness.  Without one the outcome is inconclusive.
    """
    att = attainment_set(T)
    nt = att.value
    rep = SmoothnessReport(att.is_sign_pair, att.points[0] if att.points else None)
    X = T.domain
    if X.dim == 1:
        rep.necessary_verdict = "VACUOUS-SMOOTH"
        return rep
    x0 = rep.x0
    phi = support_functional(X, x0 / norm(X, x0))
    cands = [(None, Hyperspace(phi))]
    cands += list(sample_hyperspaces(X, x0, trials, seed))
    for delta, H in cands:
        fx0 = float(H.f @ x0)
        if abs(fx0) <= tol * dual_norm(X, H.f) * norm(X, x0):
            continue
        s = hyperspace_sup(T, H, tol, seed)
        rep.hyperspace_trace.append((delta, hyperspace_distance(X, x0, H), s.value))
        if s.value < nt - tol * nt:
            continue
        A1, A2 = james_split(T, x0, H.f / fx0)
        v1, v2 = op_bj_direct(T, A1, tol), op_bj_direct(T, A2, tol)
        if v1.holds and v2.holds:
            vs = op_bj_direct(T, A1 + A2, tol)
            rep.james_decomposition = {"A1": A1, "A2": A2, "T_A1": v1, "T_A2": v2,
                                       "T_sum": vs,
                                       "split_residual": float(np.abs(A1.matrix + A2.matrix
                                                                      - T.matrix).max())}
            rep.necessary_verdict = "NON-SMOOTH-CERTIFIED"
            return rep
    if not rep.mt_singleton:
        rep.necessary_verdict = "NOT-SMOOTH-ATTAINMENT"
        rep.notes.append("a smooth operator attains its norm only at one sign pair")
    else:
        rep.necessary_verdict = "INCONCLUSIVE-CONSISTENT-WITH-SMOOTH"
    return rep


@dataclass
class AdditivityResult:
    passes: int
    failures: int
    trials: int
    falsifications: list = field(default_factory=list)


def orthogonal_direction(T: OperatorSpec, A0: OperatorSpec, x0=None) -> OperatorSpec:
    """``A = A0 - (psi(A0 x0) / ||T||) T`` with psi a support functional at Tx0.

    Then ``psi(Ax0) = 0`` and ``||T + lam A|| >= psi((T + lam A) x0) = ||T||``.
    """
    if x0 is None:
        x0 = attainment_set(T).points[0]
    Y = T.codomain
    Tx0 = T.apply(x0)
    nt = norm(Y, Tx0)
    psi = support_functional(Y, Tx0 / nt)
    return A0 - T * (float(psi @ A0.apply(x0)) / nt)


def right_additivity_probe(T: OperatorSpec, trials: int = 100, tol: float = DEFAULT_TOL,
                           seed: int = 0, pairs=None, smooth: bool | None = None
                           ) -> AdditivityResult:
    """Test ``T _|_B A1, T _|_B A2 => T _|_B (A1 + A2)`` on sampled or given pairs.

    When ``smooth`` is true (e.g. from sufficient_smoothness) a failure is
    recorded as a falsification.
    """
    rng = np.random.default_rng(seed)
    x0 = attainment_set(T).points[0]
    m, n = T.shape
    if pairs is None:
        pairs = []
        for _ in range(trials):
            A1 = orthogonal_direction(T, OperatorSpec(rng.standard_normal((m, n)),
                                                      T.domain, T.codomain), x0)
            A2 = orthogonal_direction(T, OperatorSpec(rng.standard_normal((m, n)),
                                                      T.domain, T.codomain), x0)
            pairs.append((A1, A2))
    res = AdditivityResult(0, 0, len(pairs))
    for k, (A1, A2) in enumerate(pairs):
        if not (op_bj_direct(T, A1, tol).holds and op_bj_direct(T, A2, tol).holds):
            res.trials -= 1
            continue
        if op_bj_direct(T, A1 + A2, tol).holds:
            res.passes += 1
        else:
            res.failures += 1
            if smooth:
                res.falsifications.append(k)
    return res


@dataclass(frozen=True)
class TransferReport:
    status: str
    x0: np.ndarray | None
    pointwise: Verdict | None
    operator: Verdict | None
    hyperspace_spot: bool | None

    @property
    def falsified(self) -> bool:
        return self.status == "FALSIFIED"


def pointwise_transfer_check(T: OperatorSpec, A: OperatorSpec, tol: float = DEFAULT_TOL,
                             samples: int = 2, seed: int = 0) -> TransferReport:
    """Compare ``Tx0 _|_B Ax0`` with ``T _|_B A`` when M_T = {+-x0}."""
    att = attainment_set(T)
    if not att.is_sign_pair:
        return TransferReport("PRECONDITION-FAILED", None, None, None, None)
    x0 = att.points[0]
    nt = att.value
    spot = True
    if T.domain.dim >= 2:
        for _, H in sample_hyperspaces(T.domain, x0, samples, seed, grid=(0.5,)):
            if not hyperspace_sup(T, H, tol, seed).value < nt:
                spot = False
    pw = is_bj_orthogonal(T.codomain, T.apply(x0), A.apply(x0), tol)
    op = op_bj_direct(T, A, tol)
    status = "AGREE" if pw.holds == op.holds else "FALSIFIED"
    return TransferReport(status, x0, pw, op, spot)
