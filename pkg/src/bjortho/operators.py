"""Linear operators between weighted l_p spaces.

Operator norms are computed on the rescaled matrix
``M = diag(w_Y) T diag(1 / w_X)``, which maps plain l_p to plain l_q.
Exact ("guaranteed") paths exist whenever the domain or codomain is
polyhedral, for l_2 -> l_2, and for diagonal operators with equal exponents;
only the remaining (p, q) pairs fall back to a multistart nonlinear power
method, flagged heuristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .spaces import INF, SpaceSpec, check_point, lp_norm, norm, norming_witnesses
from .vec_ortho import (DEFAULT_TOL, Verdict, _decide, convex_min_1d, max_affine_min)

FAMILY_IDS = ("example23_T", "example23_A", "example25_T", "example25_A", "table")
MAX_SIGN_DIM = 20


class ComplexityError(ValueError):
    """Refused: exact computation would need an exponential enumeration."""


def family_entries(family_id: str, N: int) -> np.ndarray:
    """Diagonal entries d_1..d_N of a named truncation family."""
    n = np.arange(1, N + 1, dtype=float)
    if family_id == "example23_T":
        return 1.0 - 1.0 / (n + 1.0)
    if family_id == "example23_A":
        return 1.0 / (n + 1.0)
    if family_id == "example25_T":
        d = 1.0 - 1.0 / n**4
        d[0] = 0.5
        return d
    if family_id == "example25_A":
        d = (1.0 / n**2) * (1.0 / n**2 - 1.0)
        d[0] = 0.5
        return d
    raise ValueError(f"unknown family {family_id!r}")


# limits of inf_n |d_n| over the whole (infinite) family
FAMILY_INF = {"example23_T": 0.5, "example23_A": 0.0, "example25_T": 0.5, "example25_A": 0.0}


class OperatorSpec:
    """A dense matrix between two spaces, or a diagonal operator.

    Diagonal operators (including the truncation families) keep only their
    diagonal; the dense matrix is materialised on demand.
    """

    def __init__(self, matrix=None, domain: SpaceSpec | None = None,
                 codomain: SpaceSpec | None = None, *, diagonal=None,
                 family_id: str | None = None, N: int | None = None):
        if diagonal is not None:
            d = np.asarray(diagonal, dtype=float).copy()
            if d.ndim != 1:
                raise ValueError("diagonal must be one-dimensional")
            domain = domain or SpaceSpec(1, len(d))
            codomain = codomain or domain
            if domain.dim != len(d) or codomain.dim != len(d):
                raise ValueError("diagonal length must match the space dimensions")
            self._diag = d
            self._matrix = None
        else:
            m = np.array(matrix, dtype=float)
            if m.ndim != 2:
                raise ValueError("matrix must be two-dimensional")
            if domain is None or codomain is None:
                raise ValueError("dense operators need domain and codomain")
            if m.shape != (codomain.dim, domain.dim):
                raise ValueError(f"matrix shape {m.shape} does not match "
                                 f"codomain x domain = ({codomain.dim}, {domain.dim})")
            if not np.all(np.isfinite(m)):
                raise ValueError("matrix entries must be finite")
            self._diag = None
            self._matrix = m
        self.domain = domain
        self.codomain = codomain
        self.family_id = family_id
        self.N = N

    @classmethod
    def family(cls, family_id: str, N: int, entries=None) -> "OperatorSpec":
        if N < 2:
            raise ValueError("truncation N must be >= 2")
        if family_id == "table":
            if entries is None or len(entries) != N:
                raise ValueError("table family needs N explicit entries")
            d = np.asarray(entries, dtype=float)
        else:
            d = family_entries(family_id, N)
        return cls(diagonal=d, domain=SpaceSpec(1, N), family_id=family_id, N=N)

    @classmethod
    def identity(cls, space: SpaceSpec) -> "OperatorSpec":
        return cls(diagonal=np.ones(space.dim), domain=space, codomain=space)

    @property
    def is_diagonal(self) -> bool:
        return self._diag is not None

    @property
    def diagonal(self) -> np.ndarray | None:
        return self._diag

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            return np.diag(self._diag)
        return self._matrix

    @property
    def shape(self) -> tuple[int, int]:
        return self.codomain.dim, self.domain.dim

    def scaled_matrix(self) -> np.ndarray:
        """Matrix of the operator between the unweighted spaces."""
        return self.codomain.w[:, None] * self.matrix / self.domain.w[None, :]

    def apply(self, x) -> np.ndarray:
        x = check_point(self.domain, x)
        if self._diag is not None:
            return self._diag * x
        return self._matrix @ x

    __call__ = apply

    def _combine(self, other: "OperatorSpec", a: float, b: float) -> "OperatorSpec":
        if self.domain != other.domain or self.codomain != other.codomain:
            raise ValueError("operators act between different spaces")
        if self.is_diagonal and other.is_diagonal:
            return OperatorSpec(diagonal=a * self._diag + b * other._diag,
                                domain=self.domain, codomain=self.codomain)
        return OperatorSpec(a * self.matrix + b * other.matrix, self.domain, self.codomain)

    def __add__(self, other):
        return self._combine(other, 1.0, 1.0)

    def __sub__(self, other):
        return self._combine(other, 1.0, -1.0)

    def __mul__(self, c):
        c = float(c)
        if self.is_diagonal:
            return OperatorSpec(diagonal=c * self._diag, domain=self.domain, codomain=self.codomain)
        return OperatorSpec(c * self._matrix, self.domain, self.codomain)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def pencil(self, other: "OperatorSpec", lam: float) -> "OperatorSpec":
        """``self + lam * other``."""
        return self._combine(other, 1.0, float(lam))

    def to_dict(self) -> dict:
        if self.family_id is not None and self.family_id != "table":
            return {"kind": "family", "id": self.family_id, "N": self.N}
        if self.family_id == "table":
            return {"kind": "family", "id": "table", "N": self.N,
                    "entries": self._diag.tolist()}
        return {"kind": "dense", "domain": self.domain.to_dict(),
                "codomain": self.codomain.to_dict(), "matrix": self.matrix.tolist()}

    @classmethod
    def from_dict(cls, d: dict, N: int | None = None) -> "OperatorSpec":
        kind = d.get("kind")
        if kind == "family":
            n = int(d.get("N", N if N is not None else 0))
            return cls.family(d["id"], n, d.get("entries"))
        if kind == "dense":
            return cls(d["matrix"], SpaceSpec.from_dict(d["domain"]),
                       SpaceSpec.from_dict(d["codomain"]))
        raise ValueError(f"unknown operator kind {kind!r}")

    def __repr__(self):
        if self.family_id:
            return f"OperatorSpec(family={self.family_id}, N={self.N})"
        return f"OperatorSpec({self.domain} -> {self.codomain}, shape={self.shape})"


# ------------------------------------------------------------ operator norm


@dataclass(frozen=True)
class NormCertificate:
    """Operator norm with a unit witness; ``value - ||T witness|| <= err``."""

    value: float
    witness: np.ndarray
    method: str
    err: float
    guaranteed: bool

    def to_dict(self) -> dict:
        return {"value": self.value, "witness": self.witness.tolist(), "method": self.method,
                "err": self.err, "guaranteed": self.guaranteed}


def _sign_vectors(n: int, chunk: int = 1 << 15):
    """All sign vectors with first entry +1, in chunks of rows."""
    if n == 1:
        yield np.ones((1, 1))
        return
    total = 1 << (n - 1)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        bits = (idx[:, None] >> np.arange(n - 1)[None, :]) & 1
        s = np.ones((len(idx), n))
        s[:, 1:] = 1.0 - 2.0 * bits
        yield s


def _max_over_signs(M: np.ndarray, q: float, on_rows: bool = False):
    """Max of ||M s||_q over sign vectors s; returns (value, all maximising s within tol)."""
    n = M.shape[1]
    best_val = -1.0
    best = []
    for S in _sign_vectors(n):
        vals = lp_norm(S @ M.T, q, axis=1)
        top = vals.max()
        if top > best_val * (1 + 1e-13):
            best_val = float(top)
            best = [S[i] for i in np.flatnonzero(vals >= top * (1 - 1e-12))]
        elif top >= best_val * (1 - 1e-12):
            best.extend(S[i] for i in np.flatnonzero(vals >= best_val * (1 - 1e-12)))
    return best_val, best


def _norming_plain(p: float, f: np.ndarray) -> np.ndarray:
    """A plain-l_p unit vector on which ``f`` attains its dual norm."""
    if not np.any(f):
        out = np.zeros(len(f))
        out[0] = 1.0
        return out
    return norming_witnesses(SpaceSpec(p, len(f)), f).points[0]


def power_iteration(M: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000, seed: int = 0):
    """Top singular value of ``M`` by power iteration on ``M^T M``.

    Start vector: normalised all-ones plus a seeded perturbation.  Stops when
    the Rayleigh residual ``||G v - s^2 v||`` drops below ``tol * s^2``.
    Returns ``(sigma, v, residual, iterations)``.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[1]
    rng = np.random.default_rng(seed)
    v = np.ones(n) / math.sqrt(n) + 1e-3 * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    G = M.T @ M
    res = 0.0
    for it in range(1, max_iter + 1):
        Gv = G @ v
        lam = float(v @ Gv)
        if lam <= 0.0:
            return 0.0, v, 0.0, it
        res = float(np.linalg.norm(Gv - lam * v))
        if res < tol * lam:
            return math.sqrt(lam), v, res, it
        v = Gv / np.linalg.norm(Gv)
    return math.sqrt(lam), v, res, max_iter


def _boyd(M: np.ndarray, p: float, q: float, x0: np.ndarray, iters: int = 500):
    """Nonlinear power method for ||M||_{p->q} from one start (1 < p, q < inf)."""
    pstar = p / (p - 1.0)
    x = x0 / lp_norm(x0, p)
    val = float(lp_norm(M @ x, q))
    for _ in range(iters):
        y = M @ x
        if not np.any(y):
            break
        ym = y / np.abs(y).max()
        g = np.sign(ym) * np.abs(ym) ** (q - 1.0)
        z = M.T @ g
        if not np.any(z):
            break
        zm = z / np.abs(z).max()
        xn = np.sign(zm) * np.abs(zm) ** (pstar - 1.0)
        xn /= lp_norm(xn, p)
        vn = float(lp_norm(M @ xn, q))
        if vn <= val * (1 + 1e-15):
            if vn >= val:
                x, val = xn, vn
            break
        x, val = xn, vn
    return val, x


def _sign_ascent(M: np.ndarray, q: float, s: np.ndarray):
    """Coordinate flips on a sign vector until no flip increases ||M s||_q."""
    val = float(lp_norm(M @ s, q))
    improved = True
    while improved:
        improved = False
        for i in range(len(s)):
            s[i] = -s[i]
            v = float(lp_norm(M @ s, q))
            if v > val * (1 + 1e-15):
                val, improved = v, True
            else:
                s[i] = -s[i]
    return val, s


def _heuristic_candidates(M, p, q, starts, seed):
    rng = np.random.default_rng(seed)
    n = M.shape[1]
    inits = [np.ones(n)] + [np.eye(n)[i] for i in range(min(n, starts))]
    inits += [rng.standard_normal(n) for _ in range(starts)]
    out = []
    for x0 in inits:
        if p == INF:
            out.append(_sign_ascent(M, q, np.where(x0 >= 0, 1.0, -1.0)))
        else:
            out.append(_boyd(M, p, q, x0))
    return out


def op_norm(T: OperatorSpec, tol: float = 1e-12, heuristic: bool = False, seed: int = 0,
            starts: int = 8, method: str | None = None) -> NormCertificate:
    """Operator norm with a witness and an error certificate.

    Parameters
    ----------
    T : OperatorSpec
    tol : float
        Relative residual target for the iterative paths.
    heuristic : bool
        Allow the sign-flip search for l_inf domains above 20 dimensions.
    method : {None, "power"}
        Force power iteration on the l_2 -> l_2 path instead of LAPACK SVD.
    """
    X, Y = T.domain, T.codomain
    p, q = X.p, Y.p
    wx = X.w
    M = T.scaled_matrix() if not T.is_diagonal else None

    if T.is_diagonal and p == q:
        d = np.abs(T.diagonal) * Y.w / wx
        j = int(np.argmax(d))
        x = np.zeros(X.dim)
        x[j] = 1.0 / wx[j]
        return NormCertificate(float(d[j]), x, "diagonal", 0.0, True)
    if M is None:
        M = T.scaled_matrix()

    if p == 1.0:
        cols = lp_norm(M, q, axis=0)
        j = int(np.argmax(cols))
        x = np.zeros(X.dim)
        x[j] = 1.0 / wx[j]
        return NormCertificate(float(cols[j]), x, "max-column", 0.0, True)
    if q == INF:
        rows = lp_norm(M, X.q, axis=1)
        i = int(np.argmax(rows))
        u = _norming_plain(p, M[i])
        val = float(lp_norm(M @ u, q))
        return NormCertificate(val, u / wx, "max-row", abs(float(rows[i]) - val), True)
    if p == 2.0 and q == 2.0:
        if method == "power":
            s, v, res, _ = power_iteration(M, tol=tol)
            meth = "power-iteration"
        else:
            _, svals, vt = np.linalg.svd(M)
            s, v = float(svals[0]), vt[0]
            res = float(np.linalg.norm(M.T @ (M @ v) - s * s * v))
            meth = "svd"
        img = float(np.linalg.norm(M @ v))
        val = max(s, img)
        err = val - img + (res / val if val > 0 else 0.0) + 4 * np.finfo(float).eps * val
        return NormCertificate(val, v / wx, meth, float(err), True)
    if p == INF and X.dim <= MAX_SIGN_DIM:
        val, best = _max_over_signs(M, q)
        return NormCertificate(val, best[0] / wx, "sign-enumeration", 0.0, True)
    if q == 1.0 and Y.dim <= MAX_SIGN_DIM:
        val, best = _max_over_signs(M.T, X.q)
        u = _norming_plain(p, M.T @ best[0])
        img = float(lp_norm(M @ u, q))
        return NormCertificate(max(val, img), u / wx, "dual-sign-enumeration",
                               abs(val - img), True)
    if p == INF and not heuristic:
        raise ComplexityError(f"l_inf domain of dimension {X.dim} > {MAX_SIGN_DIM}; "
                              "pass heuristic=True for a sign-flip search")
    cands = _heuristic_candidates(M, p, q, starts, seed)
    val, u = max(cands, key=lambda c: c[0])
    if X.dim <= 3:
        from .oracle import op_norm_bruteforce_plain
        mval, mu = op_norm_bruteforce_plain(M, p, q, 2e-3 if X.dim <= 2 else 1e-2)
        if mval > val:
            val, u = mval, mu
    # nominal error only; the guaranteed flag is what downstream checks read
    return NormCertificate(float(val), u / wx, "multistart-ascent", float(tol * val), False)


# --------------------------------------------------------------- attainment


@dataclass(frozen=True)
class AttainmentWitnessSet:
    """Representatives of the norm attainment set (up to sign).

    ``kind`` is ``"vertices"`` (M_T is a union of faces of the domain ball
    spanned by the listed vertices), ``"subspace"`` (M_T is the unit sphere
    of ``span(points)``, l_2 only) or ``"sampled"``.
    """

    points: list
    exact: bool
    face_flags: list
    kind: str
    value: float

    @property
    def is_sign_pair(self) -> bool:
        return self.exact and len(self.points) == 1 and not any(self.face_flags)


def _dedupe_signs(points, tol=1e-9):
    out = []
    for x in points:
        if not any(np.allclose(x, y, atol=tol) or np.allclose(x, -y, atol=tol) for y in out):
            out.append(x)
    return out


def attainment_set(T: OperatorSpec, tol: float = 1e-8, seed: int = 0) -> AttainmentWitnessSet:
    """Points of the unit sphere where ``||Tx||`` is within ``tol * ||T||`` of ``||T||``."""
    X, Y = T.domain, T.codomain
    p, q = X.p, Y.p
    wx = X.w
    M = T.scaled_matrix()
    cert = op_norm(T)
    nt = cert.value
    thresh = nt - tol * max(nt, 1e-300)

    if nt == 0:
        return AttainmentWitnessSet([np.eye(X.dim)[i] / wx[i] for i in range(X.dim)], True,
                                    [True] * X.dim, "subspace" if p == 2 else "vertices", 0.0)
    if p == 1.0:
        cols = lp_norm(M, q, axis=0)
        top = np.flatnonzero(cols >= thresh)
        pts = [np.eye(X.dim)[j] / wx[j] for j in top]
        flags = []
        for a in top:
            aligned = False
            for b in top:
                if a == b:
                    continue
                for s in (1.0, -1.0):
                    if lp_norm(M[:, a] + s * M[:, b], q) >= cols[a] + cols[b] - 2 * tol * nt:
                        aligned = True
            flags.append(aligned)
        return AttainmentWitnessSet(pts, True, flags, "vertices", nt)
    if p == 2.0 and q == 2.0:
        _, s, vt = np.linalg.svd(M)
        k = int(np.sum(s >= thresh))
        pts = [vt[i] / wx for i in range(k)]
        return AttainmentWitnessSet(pts, True, [k > 1] * k, "subspace", nt)
    if p == INF and X.dim <= MAX_SIGN_DIM:
        best = []
        for S in _sign_vectors(X.dim):
            vals = lp_norm(S @ M.T, q, axis=1)
            best.extend(S[i] for i in np.flatnonzero(vals >= thresh))
        pts = [s / wx for s in best]
        return AttainmentWitnessSet(pts, True, [len(pts) > 1] * len(pts), "vertices", nt)
    if X.strictly_convex and q == INF:
        rows = lp_norm(M, X.q, axis=1)
        pts = _dedupe_signs([_norming_plain(p, M[i]) / wx for i in np.flatnonzero(rows >= thresh)])
        return AttainmentWitnessSet(pts, True, [False] * len(pts), "vertices", nt)
    if X.strictly_convex and q == 1.0 and Y.dim <= MAX_SIGN_DIM:
        cands = []
        for S in _sign_vectors(Y.dim):
            vals = lp_norm(S @ M, X.q, axis=1)
            cands.extend(S[i] for i in np.flatnonzero(vals >= thresh))
        pts = _dedupe_signs([_norming_plain(p, M.T @ s) / wx for s in cands])
        return AttainmentWitnessSet(pts, True, [False] * len(pts), "vertices", nt)
    if T.is_diagonal and p == q and X.strictly_convex:
        d = np.abs(T.diagonal) * Y.w / wx
        top = np.flatnonzero(d >= thresh)
        pts = [np.eye(X.dim)[j] / wx[j] for j in top]
        return AttainmentWitnessSet(pts, len(top) == 1, [len(top) > 1] * len(top), "subspace", nt)
    cands = _heuristic_candidates(M, p, q, 8, seed) if p != INF else []
    pts = _dedupe_signs([u / wx for v, u in cands if v >= thresh] + [cert.witness], tol=1e-6)
    return AttainmentWitnessSet(pts, False, [False] * len(pts), "sampled", nt)


# ------------------------------------------------------------ orthogonality


def _pencil_norm(T, A, certs=None):
    def g(lam):
        c = op_norm(T.pencil(A, lam))
        if certs is not None:
            certs.append(c)
        return c.value
    return g


def op_bj_direct(T: OperatorSpec, A: OperatorSpec, tol: float = DEFAULT_TOL) -> Verdict:
    """Decide ``T _|_B A`` by minimising the convex map lam -> ||T + lam A||.

    ``margin`` is a slope: for a violation it is ``-(||T|| - min) / |lam*|``
    (an upper bound on the offending one-sided derivative); otherwise the
    smaller of the two one-sided derivatives of the pencil norm at 0,
    estimated from secants at steps ``h, 2h`` with ``h = 1e-6 ||T|| / ||A||``.
    """
    certs: list[NormCertificate] = []
    g = _pencil_norm(T, A, certs)
    c0 = op_norm(T)
    g0 = c0.value
    ca = op_norm(A)
    flags = []
    if ca.value == 0:
        return Verdict(True, 0.0, (-INF, INF), g0, tol, "trivial", ("ZERO_A",))
    scale = g0 / ca.value if g0 > 0 else 1.0
    r = convex_min_1d(g, "full", tol=1e-12, scale=scale)
    err = c0.err + max((c.err for c in certs), default=0.0)
    if not c0.guaranteed or any(not c.guaranteed for c in certs):
        flags.append("HEURISTIC")
    tolerance = tol * max(g0, 1e-300) + err
    defect = g0 - r.value
    details = {"norm_T": g0, "norm_A": ca.value, "defect": defect, "cert_err": err,
               "lambda_star": r.minimizer}
    if defect > tolerance:
        margin = -defect / max(abs(r.minimizer), 1e-300)
        return Verdict(False, margin, r.minimizer, r.value, tolerance, "convex-search",
                       tuple(flags), details)
    # one-sided derivatives by Richardson extrapolation of secant slopes;
    # exact at kinks and removes the O(h) bias of a smooth minimum
    h = 1e-6 * scale
    sp = 2 * (g(h) - g0) / h - (g(2 * h) - g0) / (2 * h)
    sm = 2 * (g(-h) - g0) / h - (g(-2 * h) - g0) / (2 * h)
    margin = min(sp, sm)
    details.update({"slope_plus": sp, "slope_minus": sm})
    if margin < 0:
        flags.append("INDETERMINATE")
    return Verdict(True, margin, r.minimizer, r.value, tolerance, "convex-search",
                   tuple(flags), details)


def op_strong_bj(T: OperatorSpec, A: OperatorSpec, tol: float = DEFAULT_TOL,
                 ladder: tuple = (1e-1, 1e-2, 1e-3, 1e-4)) -> Verdict:
    """Decide ``||T + lam A|| > ||T||`` for all lam != 0.

    Requires ``T _|_B A``; then, by convexity, strictness on both sides is
    equivalent to a strict increase at arbitrarily small steps, probed on a
    geometric ladder of step sizes.
    """
    direct = op_bj_direct(T, A, tol)
    if not direct.holds:
        return direct
    if direct.details.get("norm_A", 0.0) == 0:
        return Verdict(False, 0.0, (-INF, INF), direct.min_value, tol, "trivial", ("ZERO_A",))
    g = _pencil_norm(T, A)
    g0 = direct.details["norm_T"]
    scale = g0 / direct.details["norm_A"] if g0 > 0 else 1.0
    noise = 64 * np.finfo(float).eps * max(g0, 1e-300) + direct.details["cert_err"]
    worst = INF
    flat_side = None
    for step in ladder:
        h = step * scale
        for s in (1.0, -1.0):
            inc = g(s * h) - g0
            worst = min(worst, inc / h)
            if inc <= noise:
                flat_side = (0.0, h) if s > 0 else (-h, 0.0)
        if flat_side is not None:
            break
    flags = tuple(f for f in direct.flags if f == "HEURISTIC")
    details = dict(direct.details, noise=noise)
    if flat_side is not None:
        return Verdict(False, min(worst, 0.0) - noise, flat_side, g0, noise, "step-ladder", flags, details)
    if worst * ladder[-1] * scale <= 100 * noise:
        flags = flags + ("NEAR-BOUNDARY",)
    return Verdict(True, worst, 0.0, g0, noise, "step-ladder", flags, details)


# ------------------------------------------------------ approximate spectrum


@dataclass(frozen=True)
class ApproxSpectrum:
    """Whether 0 is in the approximate point spectrum, with ``inf ||Ax||`` over the sphere."""

    member: bool
    inf_estimate: float
    method: str
    certified: bool
    limit_inf: float | None = None


def zero_in_approx_spectrum(A: OperatorSpec, tol: float = DEFAULT_TOL,
                            seed: int = 0) -> ApproxSpectrum:
    """Lower bound of ``A`` on the unit sphere and membership of 0 in sigma_app(A)."""
    if A.family_id in FAMILY_INF:
        inf_n = float(np.abs(A.diagonal).min())
        lim = FAMILY_INF[A.family_id]
        return ApproxSpectrum(lim == 0.0, inf_n, "family-analytic", True, lim)
    X, Y = A.domain, A.codomain
    M = A.scaled_matrix()
    m, n = M.shape
    nrm = op_norm(A).value
    if nrm == 0 or n > m:
        return ApproxSpectrum(True, 0.0, "rank", True)
    if X.p == 2.0 and Y.p == 2.0:
        smin = float(np.linalg.svd(M, compute_uv=False)[-1])
        return ApproxSpectrum(smin < tol * max(nrm, 1.0), smin, "svd", True)
    if A.is_diagonal:
        d = np.abs(A.diagonal) * Y.w / X.w
        if X.p == Y.p:
            val = float(d.min())
            return ApproxSpectrum(val < tol * nrm, val, "diagonal", True)
    if m == n:
        smin = float(np.linalg.svd(M, compute_uv=False)[-1])
        if smin <= 1e3 * np.finfo(float).eps * nrm * n:
            return ApproxSpectrum(True, 0.0, "singular", True)
        inv = OperatorSpec(np.linalg.inv(A.matrix), Y, X)
        c = op_norm(inv, heuristic=True, seed=seed)
        val = 1.0 / c.value
        # the heuristic path under-estimates ||A^-1||, so 1/value is then an upper bound
        return ApproxSpectrum(val < tol * nrm, val, "inverse-norm", c.guaranteed)
    from .oracle import lower_bound_search
    val = lower_bound_search(A, seed=seed)
    return ApproxSpectrum(val < tol * nrm, val, "multistart", False)


# -------------------------------------------------------- truncation defect


@dataclass(frozen=True)
class TruncationDefect:
    N: int
    norm_T: float
    min_value: float
    minimizer: tuple
    delta: float


def truncation_defect(T: OperatorSpec, A: OperatorSpec, N: int | None = None) -> TruncationDefect:
    """``delta_N = ||T_N|| - min_lam ||T_N + lam A_N||`` for diagonal operators (exact).

    For a diagonal operator with equal exponents the pencil norm is
    ``max_n |t_n + lam a_n|``, a maximum of affine functions, minimised by
    its upper envelope.  Families are re-truncated at ``N`` when given.
    """
    if N is not None and T.family_id and A.family_id:
        T = OperatorSpec.family(T.family_id, N, T.diagonal[:N] if T.family_id == "table" else None)
        A = OperatorSpec.family(A.family_id, N, A.diagonal[:N] if A.family_id == "table" else None)
    if not (T.is_diagonal and A.is_diagonal and T.domain == A.domain
            and T.domain.p == T.codomain.p and T.codomain == A.codomain):
        raise ValueError("truncation_defect needs two diagonal operators on one space")
    scale = T.codomain.w / T.domain.w
    t = T.diagonal * scale
    a = A.diagonal * scale
    nt = float(np.abs(t).max())
    n = len(t)
    if not np.any(a):
        return TruncationDefect(n, nt, nt, (-INF, INF), 0.0)
    lo, hi, val = max_affine_min(np.concatenate([a, -a]), np.concatenate([t, -t]))
    lam = lo if lo == hi else 0.5 * (lo + hi)
    val = float(np.abs(t + lam * a).max())
    return TruncationDefect(n, nt, val, (lo, hi), nt - val)
