"""Vector-level Birkhoff-James orthogonality decisions.

Every decision reduces to the convex "pencil" t -> ||x + t y||.  For
p in {1, inf} the pencil is piecewise linear and is minimised exactly by
breakpoint enumeration; for p = 2 by projection; otherwise by a bracketed
golden-section search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spaces import INF, SpaceSpec, check_point, lp_norm, norm, norm_derivatives

DEFAULT_TOL = 1e-9
LAMBDA_CAP = 1e12
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

SIDES = ("full", "plus", "minus")


class DivergenceError(RuntimeError):
    """A convex search found unbounded decrease."""


class InternalConsistencyError(RuntimeError):
    """Two independent decision routes disagreed beyond tolerance."""


@dataclass(frozen=True)
class Verdict:
    """Boolean decision with its numeric certificate.

    ``margin`` is signed: non-negative means the relation holds.  Values in
    ``[-tolerance, 0)`` are accepted but carry the ``INDETERMINATE`` flag.
    """

    holds: bool
    margin: float
    minimizer: float | tuple
    min_value: float
    tolerance: float
    method: str
    flags: tuple = ()
    details: dict = field(default_factory=dict, compare=False)

    @property
    def indeterminate(self) -> bool:
        return "INDETERMINATE" in self.flags or "NEAR-BOUNDARY" in self.flags

    @property
    def heuristic(self) -> bool:
        return "HEURISTIC" in self.flags

    def to_dict(self) -> dict:
        return {
            "holds": bool(self.holds),
            "margin": _jsonable(self.margin),
            "minimizer": _jsonable(self.minimizer),
            "min_value": _jsonable(self.min_value),
            "tolerance": _jsonable(self.tolerance),
            "method": self.method,
            "flags": list(self.flags),
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


def _jsonable(v):
    if isinstance(v, (tuple, list)):
        return [_jsonable(a) for a in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(a) for a in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(v, dict):
        return {k: _jsonable(a) for k, a in v.items()}
    return v


def _decide(margin: float, tolerance: float, flags=()) -> tuple[bool, tuple]:
    flags = tuple(flags)
    if margin >= 0:
        return True, flags
    if margin >= -tolerance:
        return True, flags + ("INDETERMINATE",)
    return False, flags


# ---------------------------------------------------------------- 1-d search


@dataclass(frozen=True)
class MinResult:
    minimizer: float
    value: float
    interval: tuple[float, float]
    evaluations: int


def convex_min_1d(evaluator, side: str = "full", tol: float = 1e-10, scale: float = 1.0,
                  flat_tol: float | None = None) -> MinResult:
    """Minimise a convex function of one real variable.

    The bracket is grown by doubling from ``[-scale, scale]`` (or the
    half-line analogue) and then shrunk by golden section to relative width
    ``tol``.  With ``flat_tol`` the returned interval is the sublevel set
    ``{f <= min + flat_tol}`` located by bisection; otherwise it is the
    single minimiser.
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    if side == "minus":
        r = convex_min_1d(lambda t: evaluator(-t), "plus", tol, scale, flat_tol)
        return MinResult(-r.minimizer, r.value, (-r.interval[1], -r.interval[0]), r.evaluations)

    cache: dict[float, float] = {}

    def f(t: float) -> float:
        t = float(t)
        if t not in cache:
            cache[t] = float(evaluator(t))
        return cache[t]

    s = float(scale) if scale > 0 else 1.0
    if side == "full":
        a, c, b = -s, 0.0, s
        while f(a) < f(c):
            b, c = c, a
            a = c - 2.0 * (b - c)
            if abs(a) > LAMBDA_CAP:
                raise DivergenceError("no minimum found on the left")
        while f(b) < f(c):
            a, c = c, b
            b = c + 2.0 * (c - a)
            if abs(b) > LAMBDA_CAP:
                raise DivergenceError("no minimum found on the right")
    else:
        a, c, b = 0.0, s / 2.0, s
        if f(c) < f(a):
            while f(b) < f(c):
                a, c = c, b
                b = 2.0 * b
                if b > LAMBDA_CAP:
                    raise DivergenceError("no minimum found on the half-line")
        else:
            b = c
    lo, hi = a, b
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    for _ in range(400):
        if hi - lo <= tol * (s + abs(lo) + abs(hi)):
            break
        if f(x1) <= f(x2):
            hi, x2 = x2, x1
            x1 = hi - GOLDEN * (hi - lo)
        else:
            lo, x1 = x1, x2
            x2 = lo + GOLDEN * (hi - lo)
    f(0.5 * (lo + hi))
    if side == "plus":
        f(0.0)
    t_best = min(cache, key=lambda t: (cache[t], abs(t)))
    v_best = cache[t_best]
    interval = (t_best, t_best)
    if flat_tol is not None:
        level = v_best + flat_tol
        left_bound = a if side == "full" else 0.0
        interval = (_sublevel_edge(f, t_best, left_bound, level, tol, s),
                    _sublevel_edge(f, t_best, b, level, tol, s))
    return MinResult(t_best, v_best, interval, len(cache))


def _sublevel_edge(f, inside: float, outside: float, level: float, tol: float, s: float) -> float:
    if f(outside) <= level:
        return outside
    for _ in range(200):
        if abs(outside - inside) <= tol * (s + abs(inside)):
            break
        mid = 0.5 * (inside + outside)
        if f(mid) <= level:
            inside = mid
        else:
            outside = mid
    return inside


def max_affine_min(slopes, intercepts) -> tuple[float, float, float]:
    """Exact minimiser set ``[lo, hi]`` and value of ``t -> max_k (s_k t + c_k)``.

    Upper envelope by the convex-hull trick.  Requires both a negative and a
    positive slope (true for +-(u + t v) with v != 0).
    """
    m = np.asarray(slopes, dtype=float)
    c = np.asarray(intercepts, dtype=float)
    order = np.lexsort((c, m))
    m, c = m[order], c[order]
    keep = np.ones(len(m), dtype=bool)
    keep[:-1] = m[:-1] != m[1:]  # equal slopes: the last (largest c) survives
    m, c = m[keep], c[keep]
    if m[0] >= 0 or m[-1] <= 0:
        raise DivergenceError("max of affine functions is unbounded below")
    hull_m: list[float] = []
    hull_c: list[float] = []
    for mk, ck in zip(m, c):
        while len(hull_m) >= 2:
            m1, c1, m2, c2 = hull_m[-2], hull_c[-2], hull_m[-1], hull_c[-1]
            # drop line 2 if line k overtakes line 1 no later than line 2 does
            if (ck - c1) * (m2 - m1) >= (c2 - c1) * (mk - m1):
                hull_m.pop()
                hull_c.pop()
            else:
                break
        hull_m.append(mk)
        hull_c.append(ck)
    hm = np.array(hull_m)
    hc = np.array(hull_c)
    k = int(np.argmax(hm >= 0))
    if hm[k] == 0.0:
        lo = (hc[k - 1] - hc[k]) / (hm[k] - hm[k - 1])
        hi = (hc[k + 1] - hc[k]) / (hm[k] - hm[k + 1])
        return float(lo), float(hi), float(hc[k])
    t = (hc[k - 1] - hc[k]) / (hm[k] - hm[k - 1])
    val = max(hm[k] * t + hc[k], hm[k - 1] * t + hc[k - 1])
    return float(t), float(t), float(val)


# ----------------------------------------------------------------- pencils


@dataclass(frozen=True)
class PencilMin:
    minimizer: float
    interval: tuple[float, float]
    value: float
    method: str

    @property
    def flat(self) -> bool:
        return self.interval[1] > self.interval[0]


def _clip(lo: float, hi: float, side: str) -> tuple[float, float]:
    if side == "plus":
        return max(lo, 0.0), max(hi, 0.0)
    if side == "minus":
        return min(lo, 0.0), min(hi, 0.0)
    return lo, hi


def _midpoint(lo: float, hi: float) -> float:
    if math.isinf(lo) or math.isinf(hi):
        return 0.0
    return 0.5 * (lo + hi)


def pencil_min(space: SpaceSpec, x, y, side: str = "full") -> PencilMin:
    """Minimise ``t -> ||x + t y||`` over the full line or a half-line."""
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    x = check_point(space, x)
    y = check_point(space, y)
    w = space.w
    u, v = w * x, w * y
    p = space.p
    if not np.any(v):
        lo, hi = {"full": (-INF, INF), "plus": (0.0, INF), "minus": (-INF, 0.0)}[side]
        return PencilMin(0.0, (lo, hi), float(lp_norm(u, p)), "constant")

    def value(t):
        return float(lp_norm(u + t * v, p))

    if p == 1.0:
        lo, hi = _l1_pencil(u, v)
        method = "exact-piecewise"
    elif p == INF:
        lo, hi, _ = max_affine_min(np.concatenate([v, -v]), np.concatenate([u, -u]))
        method = "exact-piecewise"
    elif p == 2.0:
        s = float(np.abs(v).max())
        vn = v / s
        lo = hi = -float(u @ vn) / float(vn @ vn) / s
        method = "projection"
    else:
        r = convex_min_1d(value, side, tol=1e-13,
                          scale=float(lp_norm(u, p)) / float(lp_norm(v, p)) or 1.0)
        return PencilMin(r.minimizer, (r.minimizer, r.minimizer), r.value, "convex-search")
    lo, hi = _clip(lo, hi, side)
    t = _midpoint(lo, hi)
    return PencilMin(t, (lo, hi), value(lo if lo == hi else t), method)


def _l1_pencil(u: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    nz = v != 0
    bps = -u[nz] / v[nz]
    wts = 2.0 * np.abs(v[nz])
    order = np.argsort(bps, kind="stable")
    bps, wts = bps[order], wts[order]
    total = float(np.abs(v).sum())
    slopes = -total + np.cumsum(wts)  # slope just right of each breakpoint
    stol = 1e-12 * total
    k = int(np.argmax(slopes >= -stol))
    if abs(slopes[k]) <= stol:
        return float(bps[k]), float(bps[k + 1])
    return float(bps[k]), float(bps[k])


def pencil_values(space: SpaceSpec, x, y, ts) -> np.ndarray:
    """``||x + t y||`` for an array of ``t`` (vectorised)."""
    x = check_point(space, x)
    y = check_point(space, y)
    ts = np.asarray(ts, dtype=float)
    w = space.w
    return lp_norm((w * x)[None, :] + ts[:, None] * (w * y)[None, :], space.p, axis=1)


# --------------------------------------------------------------- decisions


def _tol_scale(space, y, tol):
    ny = norm(space, y)
    return tol * (ny if ny > 0 else 1.0)


def is_bj_orthogonal(space: SpaceSpec, x, y, tol: float = DEFAULT_TOL) -> Verdict:
    """Decide ``x _|_B y``: ``||x + t y|| >= ||x||`` for every real t.

    Decided from the one-sided derivatives (``D- <= 0 <= D+``) with margin
    ``min(D+, -D-)``; the exact pencil minimum is attached and cross-checked.
    """
    x = check_point(space, x)
    y = check_point(space, y)
    nx = norm(space, x)
    if nx == 0:
        return Verdict(True, 0.0, 0.0, 0.0, tol, "trivial", ("ZERO_X",))
    tolerance = _tol_scale(space, y, tol)
    dp, dm = norm_derivatives(space, x, y)
    margin = min(dp, -dm)
    holds, flags = _decide(margin, tolerance)
    pm = pencil_min(space, x, y, "full")
    if holds and margin > tolerance and pm.value < nx * (1 - 10 * tol) - 10 * tolerance:
        raise InternalConsistencyError(
            f"derivative test says orthogonal but pencil reaches {pm.value} < {nx}")
    return Verdict(holds, margin, pm.interval if pm.flat else pm.minimizer, pm.value, tolerance,
                   "derivative", flags, {"d_plus": dp, "d_minus": dm, "norm_x": nx,
                                         "pencil_method": pm.method})


def _one_sided(space, x, y, tol, side):
    x = check_point(space, x)
    y = check_point(space, y)
    nx = norm(space, x)
    if nx == 0:
        return Verdict(True, 0.0, 0.0, 0.0, tol, "trivial", ("ZERO_X",))
    tolerance = _tol_scale(space, y, tol)
    dp, dm = norm_derivatives(space, x, y)
    margin = dp if side == "plus" else -dm
    holds, flags = _decide(margin, tolerance)
    pm = pencil_min(space, x, y, side)
    if holds and margin > tolerance and pm.value < nx * (1 - 10 * tol) - 10 * tolerance:
        raise InternalConsistencyError(
            f"derivative and half-line minimum disagree on the {side} side")
    if not holds and pm.value >= nx and margin < -10 * tolerance:
        raise InternalConsistencyError(
            f"negative derivative but half-line minimum {pm.value} >= {nx}")
    return Verdict(holds, margin, pm.interval if pm.flat else pm.minimizer, pm.value, tolerance,
                   "derivative", flags, {"d_plus": dp, "d_minus": dm, "norm_x": nx})


def in_positive_part(space: SpaceSpec, x, y, tol: float = DEFAULT_TOL) -> Verdict:
    """``y in x^+``: ``||x + t y|| >= ||x||`` for all t >= 0."""
    return _one_sided(space, x, y, tol, "plus")


def in_negative_part(space: SpaceSpec, x, y, tol: float = DEFAULT_TOL) -> Verdict:
    """``y in x^-``: ``||x + t y|| >= ||x||`` for all t <= 0."""
    return _one_sided(space, x, y, tol, "minus")


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (0.0 <= eps < 1.0):
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    return eps


def _eps_relation(space, x, y, eps, tol, side):
    eps = _check_eps(eps)
    x = check_point(space, x)
    y = check_point(space, y)
    nx = norm(space, x)
    if nx == 0:
        return Verdict(True, 0.0, 0.0, 0.0, tol, "trivial", ("ZERO_X",))
    pm = pencil_min(space, x, y, side)
    threshold = math.sqrt(1.0 - eps * eps) * nx
    tolerance = tol * nx
    margin = pm.value - threshold
    holds, flags = _decide(margin, tolerance)
    return Verdict(holds, margin, pm.interval if pm.flat else pm.minimizer, pm.value, tolerance,
                   pm.method, flags, {"eps": eps, "threshold": threshold})


def in_positive_part_eps(space: SpaceSpec, x, y, eps: float, tol: float = DEFAULT_TOL) -> Verdict:
    """``y in x^{+(eps)}``: ``||x + t y|| >= sqrt(1 - eps^2) ||x||`` for t >= 0."""
    if _check_eps(eps) == 0.0:
        return in_positive_part(space, x, y, tol)
    return _eps_relation(space, x, y, eps, tol, "plus")


def in_negative_part_eps(space: SpaceSpec, x, y, eps: float, tol: float = DEFAULT_TOL) -> Verdict:
    """``y in x^{-(eps)}``: the same bound for t <= 0."""
    if _check_eps(eps) == 0.0:
        return in_negative_part(space, x, y, tol)
    return _eps_relation(space, x, y, eps, tol, "minus")


def is_eps_orthogonal(space: SpaceSpec, x, y, eps: float, tol: float = DEFAULT_TOL) -> Verdict:
    """Approximate orthogonality: the full-line pencil stays above ``sqrt(1-eps^2)||x||``."""
    if _check_eps(eps) == 0.0:
        return is_bj_orthogonal(space, x, y, tol)
    return _eps_relation(space, x, y, eps, tol, "full")


def is_strongly_bj_orthogonal(space: SpaceSpec, x, y, tol: float = DEFAULT_TOL) -> Verdict:
    """Decide ``||x + t y|| > ||x||`` for every t != 0.

    Polyhedral norms: both one-sided derivatives must be strictly nonzero
    (a zero derivative is a flat piece of the pencil).  Strictly convex
    norms: any orthogonal pair with y != 0 is strongly orthogonal.
    """
    x = check_point(space, x)
    y = check_point(space, y)
    if norm(space, y) == 0:
        return Verdict(False, 0.0, (-INF, INF), norm(space, x), tol, "trivial", ("ZERO_Y",))
    if norm(space, x) == 0:
        return Verdict(True, norm(space, y), 0.0, 0.0, tol, "trivial", ("ZERO_X",))
    bj = is_bj_orthogonal(space, x, y, tol)
    if not bj.holds:
        return Verdict(False, bj.margin, bj.minimizer, bj.min_value, bj.tolerance, bj.method,
                       bj.flags, bj.details)
    dp, dm = bj.details["d_plus"], bj.details["d_minus"]
    if space.polyhedral:
        margin = min(dp, -dm)
        holds = margin > bj.tolerance
        return Verdict(holds, margin if holds else -abs(margin), bj.minimizer, bj.min_value,
                       bj.tolerance, "exact-piecewise", (), bj.details)
    flags = ("NEAR-BOUNDARY",) if bj.indeterminate else ()
    return Verdict(True, bj.margin, bj.minimizer, bj.min_value, bj.tolerance,
                   "strict-convexity", flags, bj.details)


def minimal_eps_plus(space: SpaceSpec, x, y) -> float:
    """Smallest eps with ``y in x^{+(eps)}``; 1 means the half-line pencil reaches 0."""
    nx = norm(space, x)
    if nx == 0:
        return 0.0
    m = pencil_min(space, x, y, "plus").value
    return math.sqrt(max(0.0, 1.0 - (m / nx) ** 2))


def minimal_eps_minus(space: SpaceSpec, x, y) -> float:
    nx = norm(space, x)
    if nx == 0:
        return 0.0
    m = pencil_min(space, x, y, "minus").value
    return math.sqrt(max(0.0, 1.0 - (m / nx) ** 2))
