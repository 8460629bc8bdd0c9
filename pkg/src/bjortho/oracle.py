"""Brute-force references: lambda grids, sphere meshes, finite differences.

These deliberately avoid the clever paths of the main modules so that they
can be used to cross-check them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import minimize

from .spaces import INF, SpaceSpec, lp_norm, norms

MAX_MESH_DIM = 3


@dataclass(frozen=True)
class GridSpec:
    lo: float = -1e4
    hi: float = 1e4
    points: int = 1_000_001
    refine: int = 2

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("grid needs lo < hi")
        if self.points < 3:
            raise ValueError("grid needs at least 3 points")


def grid_min_lambda(evaluator, grid: GridSpec = GridSpec(), vectorized: bool = False,
                    chunk: int = 1 << 16) -> tuple[float, float]:
    """Minimum of ``evaluator`` on a uniform grid, refined around the best node.

    With ``vectorized`` the evaluator receives arrays of lambdas.
    """
    def evaluate(ts):
        if vectorized:
            return np.concatenate([np.asarray(evaluator(ts[i:i + chunk]), dtype=float)
                                   for i in range(0, len(ts), chunk)])
        return np.array([evaluator(float(t)) for t in ts])

    lo, hi = grid.lo, grid.hi
    best_t, best_v = 0.0, math.inf
    for _ in range(grid.refine + 1):
        ts = np.linspace(lo, hi, grid.points)
        vals = evaluate(ts)
        k = int(np.argmin(vals))
        if vals[k] < best_v:
            best_t, best_v = float(ts[k]), float(vals[k])
        step = ts[1] - ts[0]
        lo, hi = max(best_t - step, grid.lo), min(best_t + step, grid.hi)
    return best_t, best_v


def finite_difference(evaluator, at: float, h: float = 1e-7, side: str = "right") -> float:
    """One-sided (``right``/``left``) or ``central`` difference quotient."""
    if side == "right":
        return (evaluator(at + h) - evaluator(at)) / h
    if side == "left":
        return (evaluator(at) - evaluator(at - h)) / h
    if side == "central":
        return (evaluator(at + h) - evaluator(at - h)) / (2 * h)
    raise ValueError("side must be right, left or central")


def extreme_points(space: SpaceSpec) -> np.ndarray:
    """Vertices of the unit ball for l_1 (``+-e_i/w_i``) and l_inf (sign vectors / w)."""
    n = space.dim
    if space.p == 1.0:
        E = np.eye(n) / space.w[None, :]
        return np.vstack([E, -E])
    if space.is_inf:
        if n > 20:
            raise ValueError("too many cube vertices to enumerate")
        S = np.array(list(product((1.0, -1.0), repeat=n)))
        return S / space.w[None, :]
    raise ValueError("only polyhedral balls have finitely many extreme points")


def _euclidean_mesh(dim: int, resolution: float) -> np.ndarray:
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        k = max(8, math.ceil(2 * math.pi / resolution))
        a = np.linspace(0.0, 2 * math.pi, k, endpoint=False)
        return np.column_stack([np.cos(a), np.sin(a)])
    rows = []
    m = max(4, math.ceil(math.pi / resolution))
    for theta in np.linspace(0.0, math.pi, m + 1):
        k = max(1, math.ceil(2 * math.pi * math.sin(theta) / resolution))
        a = np.linspace(0.0, 2 * math.pi, k, endpoint=False)
        s = math.sin(theta)
        rows.append(np.column_stack([s * np.cos(a), s * np.sin(a), np.full(k, math.cos(theta))]))
    return np.vstack(rows)


def sphere_mesh(space: SpaceSpec, resolution: float = 1e-2) -> np.ndarray:
    """Rows are unit vectors of ``space`` (dim <= 3).

    A Euclidean angular mesh with gap ``resolution`` is pushed radially onto
    the unit sphere of ``space``; polyhedral balls also get their vertices.
    """
    if space.dim > MAX_MESH_DIM:
        raise ValueError(f"sphere meshes are limited to dim <= {MAX_MESH_DIM}")
    E = _euclidean_mesh(space.dim, resolution)
    pts = E / norms(space, E)[:, None]
    if space.polyhedral:
        pts = np.vstack([extreme_points(space), pts])
    return pts


def op_norm_bruteforce_plain(M: np.ndarray, p: float, q: float, resolution: float = 1e-3):
    """Max of ``||M u||_q`` over a mesh of the plain l_p sphere; returns ``(value, u)``."""
    space = SpaceSpec(p, M.shape[1])
    if space.polyhedral and (p == 1.0 or space.dim <= 20):
        U = extreme_points(space)
    else:
        U = sphere_mesh(space, resolution)
    vals = lp_norm(U @ M.T, q, axis=1)
    k = int(np.argmax(vals))
    return float(vals[k]), U[k]


def op_norm_bruteforce(T, resolution: float = 1e-3) -> float:
    """Lower bound on ``||T||`` from a domain sphere mesh (exact on l_1 / l_inf domains)."""
    return op_norm_bruteforce_plain(T.scaled_matrix(), T.domain.p, T.codomain.p, resolution)[0]


def lower_bound_search(A, starts: int = 16, seed: int = 0) -> float:
    """Multistart local minimisation of ``||Ax|| / ||x||``; an upper bound on the infimum."""
    M = A.scaled_matrix()
    p, q = A.domain.p, A.codomain.p
    n = M.shape[1]

    def ratio(u):
        d = lp_norm(u, p)
        return float(lp_norm(M @ u, q) / d) if d > 0 else math.inf

    rng = np.random.default_rng(seed)
    inits = [np.eye(n)[i] for i in range(n)] + [rng.standard_normal(n) for _ in range(starts)]
    best = min(ratio(u) for u in inits)
    for u0 in inits:
        r = minimize(ratio, u0, method="Nelder-Mead",
                     options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
        best = min(best, float(r.fun))
    if n <= MAX_MESH_DIM:
        U = sphere_mesh(SpaceSpec(p, n), 1e-2)
        best = min(best, float(lp_norm(U @ M.T, q, axis=1).min()))
    return best


def pencil_grid_min(space: SpaceSpec, x, y, grid: GridSpec = GridSpec()) -> tuple[float, float]:
    """Grid minimum of ``lam -> ||x + lam y||`` (vectorised)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)

    def ev(ts):
        return norms(space, x[None, :] + ts[:, None] * y[None, :])

    return grid_min_lambda(ev, grid, vectorized=True)
