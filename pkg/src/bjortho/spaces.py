"""Norm geometry of finite-dimensional real weighted l_p spaces.

A space ``SpaceSpec(p, dim, weights)`` carries the norm

    ||x|| = || w * x ||_p      (elementwise product),

so for p = 1 it is sum(w_i |x_i|) and for p = inf it is max(w_i |x_i|).
With this scaling convention the dual of (p, w) is exactly (q, 1/w), which
keeps ``dual(dual(S)) == S`` for every p.  Most routines below work in the
scaled coordinates ``u = w * x`` where the norm is a plain l_p norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

INF = math.inf

# relative tolerance used to decide zero coordinates / tied maxima
KINK_TOL = 1e-12


class DimensionError(ValueError):
    """Raised when an array does not match the dimension of its space."""


class UndefinedDerivativeError(ValueError):
    """Raised for one-sided norm derivatives at the origin."""


def _parse_p(p) -> float:
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "oo"):
            return INF
        p = float(p)
    p = float(p)
    if not (p >= 1.0):
        raise ValueError(f"p must be >= 1, got {p}")
    return p


@dataclass(frozen=True)
class SpaceSpec:
    """Weighted l_p^dim over the reals.  ``p`` may be ``math.inf``."""

    p: float
    dim: int
    weights: tuple[float, ...] | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "p", _parse_p(self.p))
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if len(w) != self.dim:
                raise DimensionError("weights length must equal dim")
            if not all(v > 0 and math.isfinite(v) for v in w):
                raise ValueError("weights must be positive and finite")
            if all(v == 1.0 for v in w):
                w = None
            object.__setattr__(self, "weights", w)

    @property
    def w(self) -> np.ndarray:
        if self.weights is None:
            return np.ones(self.dim)
        return np.asarray(self.weights, dtype=float)

    @property
    def is_inf(self) -> bool:
        return self.p == INF

    @property
    def polyhedral(self) -> bool:
        return self.p == 1.0 or self.p == INF

    @property
    def strictly_convex(self) -> bool:
        return 1.0 < self.p < INF

    @property
    def q(self) -> float:
        """Hoelder conjugate exponent."""
        if self.p == 1.0:
            return INF
        if self.p == INF:
            return 1.0
        return self.p / (self.p - 1.0)

    def dual(self) -> "SpaceSpec":
        weights = None if self.weights is None else tuple(1.0 / v for v in self.weights)
        return SpaceSpec(self.q, self.dim, weights)

    def to_dict(self) -> dict:
        d = {"p": "inf" if self.is_inf else (int(self.p) if self.p.is_integer() else self.p),
             "dim": self.dim}
        if self.weights is not None:
            d["weights"] = list(self.weights)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SpaceSpec":
        return cls(d["p"], d["dim"], d.get("weights"))

    def __str__(self):
        p = "inf" if self.is_inf else f"{self.p:g}"
        tag = "" if self.weights is None else "(weighted)"
        return f"l_{p}^{self.dim}{tag}"


def check_point(space: SpaceSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != space.dim:
        raise DimensionError(f"expected a vector of length {space.dim}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("coordinates must be finite")
    return x


def lp_norm(u: np.ndarray, p: float, axis: int = -1) -> np.ndarray | float:
    """Plain (unweighted) l_p norm along ``axis``; overflow-safe for large p."""
    a = np.abs(u)
    if p == INF:
        return a.max(axis=axis)
    if p == 1.0:
        return a.sum(axis=axis)
    m = a.max(axis=axis, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    r = a / safe
    if p == 2.0:
        s = np.sqrt((r * r).sum(axis=axis, keepdims=True))
    else:
        s = (r ** p).sum(axis=axis, keepdims=True) ** (1.0 / p)
    return np.squeeze(m * s, axis=axis)


def norm(space: SpaceSpec, x) -> float:
    """Norm of ``x`` in ``space``.

    >>> norm(SpaceSpec(2, 3), [3, 4, 0])
    5.0
    """
    x = check_point(space, x)
    return float(lp_norm(space.w * x, space.p))


def norms(space: SpaceSpec, xs: np.ndarray) -> np.ndarray:
    """Row-wise norms of a (k, dim) array."""
    xs = np.asarray(xs, dtype=float)
    return lp_norm(xs * space.w, space.p, axis=-1)


def dual_norm(space: SpaceSpec, f) -> float:
    """Norm of the functional ``f`` (acting by dot product) on ``space``."""
    f = check_point(space, f)
    return float(lp_norm(f / space.w, space.q))


def _kink_tol(u: np.ndarray, rel: float = KINK_TOL) -> float:
    return rel * float(np.abs(u).max(initial=0.0))


def _derivatives(space: SpaceSpec, x, y, kink: float = KINK_TOL) -> tuple[float, float]:
    x = check_point(space, x)
    y = check_point(space, y)
    w = space.w
    u, v = w * x, w * y
    if not np.any(u):
        raise UndefinedDerivativeError("one-sided norm derivatives are undefined at x = 0")
    p = space.p
    tol = _kink_tol(u, kink)
    if p == 1.0:
        nz = np.abs(u) > tol
        base = float(np.sum(np.sign(u[nz]) * v[nz]))
        free = float(np.sum(np.abs(v[~nz])))
        return base + free, base - free
    if p == INF:
        a = np.abs(u)
        top = a >= a.max() - tol
        slopes = np.sign(u[top]) * v[top]
        return float(slopes.max()), float(slopes.min())
    # smooth case; normalise by the largest entry to keep |u|^(p-1) finite
    m = np.abs(u).max()
    un = u / m
    nu = float(lp_norm(un, p))
    d = float(np.sum(np.sign(un) * np.abs(un) ** (p - 1.0) * v)) / nu ** (p - 1.0)
    return d, d


def norm_derivative_plus(space: SpaceSpec, x, y) -> float:
    """Right derivative of t -> ||x + t y|| at t = 0."""
    return _derivatives(space, x, y)[0]


def norm_derivative_minus(space: SpaceSpec, x, y) -> float:
    """Left derivative of t -> ||x + t y|| at t = 0."""
    return _derivatives(space, x, y)[1]


def norm_derivatives(space: SpaceSpec, x, y, kink: float = KINK_TOL) -> tuple[float, float]:
    """``(D+, D-)`` in one call.

    ``kink`` is the relative tolerance below which coordinates count as zero
    (p = 1) or as tied for the maximum (p = inf).
    """
    return _derivatives(space, x, y, kink)


@dataclass(frozen=True)
class NormingSet:
    """Unit vectors ``x`` with ``f(x) = ||f||``.

    ``free`` marks coordinates that may vary over a face of the unit ball
    (only for p = inf); ``points`` then lists the face's vertices.
    """

    points: list
    free: np.ndarray
    value: float

    @property
    def is_face(self) -> bool:
        return len(self.points) > 1


MAX_FACE_VERTICES = 1 << 12


def norming_witnesses(space: SpaceSpec, f) -> NormingSet:
    """Representatives of the norming set of the functional ``f``.

    For 1 < p < inf this is the single duality-map vector.  For p = 1 every
    maximising coordinate contributes ``sign(f_i) e_i / w_i``.  For p = inf
    the sign vector of ``f`` is returned; coordinates where ``f`` vanishes
    are free and the face is listed through its vertices.
    """
    f = check_point(space, f)
    if not np.any(f):
        raise ValueError("the zero functional has no norming vector")
    w = space.w
    g = f / w  # functional in scaled coordinates
    value = dual_norm(space, f)
    p = space.p
    free = np.zeros(space.dim, dtype=bool)
    if p == 1.0:
        a = np.abs(g)
        top = np.flatnonzero(a >= a.max() - _kink_tol(g))
        pts = []
        for i in top:
            u = np.zeros(space.dim)
            u[i] = np.sign(g[i])
            pts.append(u / w)
        return NormingSet(pts, free, value)
    if p == INF:
        free = np.abs(g) <= _kink_tol(g)
        base = np.sign(g)
        idx = np.flatnonzero(free)
        if len(idx) > 12:
            raise ValueError("norming face has too many vertices to enumerate")
        pts = []
        for signs in product((1.0, -1.0), repeat=len(idx)):
            u = base.copy()
            u[idx] = signs
            pts.append(u / w)
        return NormingSet(pts, free, value)
    q = space.q
    m = np.abs(g).max()
    gn = g / m
    u = np.sign(gn) * np.abs(gn) ** (q - 1.0)
    u = u / lp_norm(u, p)
    return NormingSet([u / w], free, value)


def support_functional(space: SpaceSpec, x, rng: np.random.Generator | None = None,
                       extreme: bool = True) -> np.ndarray:
    """A functional ``f`` with ``||f||_* = 1`` and ``f(x) = ||x||``.

    At non-smooth points of polyhedral spaces the choice is not unique; with
    ``rng`` given a random element is drawn (an extreme one when
    ``extreme``), otherwise a canonical one.
    """
    x = check_point(space, x)
    w = space.w
    u = w * x
    if not np.any(u):
        raise ValueError("x must be nonzero")
    p = space.p
    tol = _kink_tol(u)
    if p == 1.0:
        g = np.sign(u)
        zero = np.abs(u) <= tol
        g[zero] = 0.0
        if rng is not None and zero.any():
            k = int(zero.sum())
            g[zero] = rng.choice([-1.0, 1.0], size=k) if extreme else rng.uniform(-1, 1, size=k)
        return g * w
    if p == INF:
        a = np.abs(u)
        top = np.flatnonzero(a >= a.max() - tol)
        g = np.zeros(space.dim)
        if rng is None:
            g[top[0]] = np.sign(u[top[0]])
        elif extreme:
            i = rng.choice(top)
            g[i] = np.sign(u[i])
        else:
            c = rng.dirichlet(np.ones(len(top)))
            g[top] = c * np.sign(u[top])
        return g * w
    m = np.abs(u).max()
    un = u / m
    g = np.sign(un) * np.abs(un) ** (p - 1.0)
    g = g / lp_norm(g, space.q)
    return g * w


def is_smooth_point(space: SpaceSpec, x) -> bool:
    """Whether ``x`` (rescaled to the sphere) has a unique supporting hyperplane."""
    x = check_point(space, x)
    u = space.w * x
    if not np.any(u):
        raise ValueError("x must be nonzero")
    if space.dim == 1 or space.strictly_convex:
        return True
    tol = _kink_tol(u)
    if space.p == 1.0:
        return bool(np.all(np.abs(u) > tol))
    a = np.abs(u)
    return int(np.sum(a >= a.max() - tol)) == 1


def is_rotund_point(space: SpaceSpec, x) -> bool:
    """Analytic rule: every unit vector is rotund iff the space is strictly convex.

    Polyhedral spaces of dimension >= 2 have no rotund points: each unit
    vector lies in a facet together with a second unit vector.  ``rotund_probe``
    cross-checks this through the orthogonality characterisation.
    """
    check_point(space, x)
    if norm(space, x) == 0:
        raise ValueError("x must be nonzero")
    return space.strictly_convex or space.dim == 1


def rotund_probe(space: SpaceSpec, x, samples: int = 64, seed: int = 0) -> bool:
    """Numerical rotundity test: ``x`` is rotund iff x _|_B y forces x _|_SB y.

    Directions y with x _|_B y are drawn from kernels of extreme support
    functionals at x.  Returns False as soon as a non-strict pair is seen.
    """
    from .vec_ortho import is_strongly_bj_orthogonal

    x = check_point(space, x)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        f = support_functional(space, x, rng=rng)
        z = rng.standard_normal(space.dim)
        y = z - (f @ z) / (f @ x) * x
        if norm(space, y) <= 1e-12 * norm(space, x):
            continue
        v = is_strongly_bj_orthogonal(space, x, y)
        if v.holds is False or "NEAR-BOUNDARY" in v.flags:
            return False
    return True


def modulus_of_convexity_estimate(space: SpaceSpec, eps: float, samples: int = 200,
                                  seed: int = 0) -> tuple[float, float]:
    """Bracket ``[lower, upper]`` for the modulus of convexity at ``eps``.

    ``upper`` is an infimum over sampled pairs of unit vectors at distance
    >= eps.  ``lower`` comes from closed forms: exact for p = 2 and p >= 2
    (Hanner), ``(p-1) eps^2 / 8`` for 1 < p < 2, and 0 for polyhedral norms.
    Weights are an isometry and do not change the modulus.
    """
    if not (0 < eps <= 2):
        raise ValueError("eps must lie in (0, 2]")
    if space.dim == 1:
        return 1.0, 1.0
    if space.polyhedral:
        return 0.0, 0.0
    p = space.p
    if p >= 2.0:
        lower = 1.0 - (1.0 - (eps / 2.0) ** p) ** (1.0 / p)
    else:
        lower = (p - 1.0) * eps * eps / 8.0
    upper = _sampled_modulus(space, eps, samples, seed)
    upper = max(upper, lower)
    if p == 2.0:
        upper = lower
    return float(lower), float(upper)


def _sampled_modulus(space: SpaceSpec, eps: float, samples: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    p = space.p
    best = 1.0
    t = np.linspace(0.0, np.pi, 2001)
    for k in range(samples):
        if k == 0:
            a = np.zeros(space.dim); a[0] = 1.0
            b = np.zeros(space.dim); b[1] = 1.0
        else:
            a, b = rng.standard_normal((2, space.dim))
        a = a / lp_norm(a, p)
        ys = np.outer(np.cos(t), a) + np.outer(np.sin(t), b)
        ys = ys / lp_norm(ys, p, axis=1)[:, None]
        sep = lp_norm(ys - a, p, axis=1)
        ok = sep >= eps
        if not ok.any():
            continue
        dips = 1.0 - lp_norm((ys[ok] + a) / 2.0, p, axis=1)
        best = min(best, float(dips.min()))
    return best


@dataclass(frozen=True)
class BestApproximation:
    """Minimiser of beta -> ||x + beta z||.

    ``interval`` is the whole minimiser set (degenerate unless the norm is
    polyhedral); ``beta`` is its midpoint.
    """

    beta: float
    interval: tuple[float, float]
    value: float
    d_plus: float
    d_minus: float
    colinear: bool = False

    @property
    def certified(self) -> bool:
        # x + beta z _|_B z  <=>  D- <= 0 <= D+
        return self.colinear or (self.d_minus <= 1e-9 and self.d_plus >= -1e-9)


def best_approximation_coefficient(space: SpaceSpec, x, z) -> BestApproximation:
    """Best approximation of ``-x`` from the line spanned by ``z``."""
    from .vec_ortho import pencil_min

    x = check_point(space, x)
    z = check_point(space, z)
    if norm(space, z) == 0:
        raise ValueError("z must be nonzero")
    pm = pencil_min(space, x, z, side="full")
    beta = pm.minimizer
    r = x + beta * z
    if pm.value <= 1e-14 * max(norm(space, x), 1.0):
        return BestApproximation(beta, pm.interval, pm.value, 0.0, 0.0, colinear=True)
    dp, dm = norm_derivatives(space, r, z)
    return BestApproximation(beta, pm.interval, pm.value, dp, dm)


def sample_unit_sphere(space: SpaceSpec, count: int, seed: int = 0) -> list:
    """``count`` unit vectors: +-e_i (normalised) first, then seeded Gaussian directions."""
    out = []
    w = space.w
    for i in range(space.dim):
        for s in (1.0, -1.0):
            if len(out) >= count:
                return out
            e = np.zeros(space.dim)
            e[i] = s / w[i]
            out.append(e)
    rng = np.random.default_rng(seed)
    while len(out) < count:
        g = rng.standard_normal(space.dim)
        n = norm(space, g)
        if n == 0:
            continue
        out.append(g / n)
    return out
