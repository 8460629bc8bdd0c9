"""Executable forms of the operator orthogonality theorems.

Finite dimension makes every space reflexive and every operator compact, so
the characterisation through norm-attaining vectors can be checked exactly
on the attainment set.  The constructive proofs (near-maximisers of
``T + A/n`` and the eps_n sequences) are replayed step by step; a finite
prefix is evidence, never a proof of a limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .operators import (FAMILY_IDS, AttainmentWitnessSet, OperatorSpec, attainment_set,
                        op_bj_direct, op_norm, op_strong_bj, zero_in_approx_spectrum)
from .spaces import SpaceSpec, check_point, dual_norm, norm, norm_derivatives, norming_witnesses
from .vec_ortho import (DEFAULT_TOL, Verdict, in_negative_part, in_negative_part_eps,
                        in_positive_part, in_positive_part_eps, is_bj_orthogonal)


class FalsificationError(AssertionError):
    """A theorem's conclusion failed under verified hypotheses (always a bug)."""


# ------------------------------------------------------- characterisation


@dataclass(frozen=True)
class Characterization:
    direct: Verdict
    charact: bool
    plus_margin: float
    minus_margin: float
    witnesses: tuple
    flags: tuple = ()

    @property
    def agree(self) -> bool:
        return self.direct.holds == self.charact


def _plain_subspace(att: AttainmentWitnessSet, space: SpaceSpec) -> np.ndarray:
    return np.column_stack([p * space.w for p in att.points])


def check_characterization_finite(T: OperatorSpec, A: OperatorSpec, tol: float = DEFAULT_TOL,
                                  att_tol: float = 1e-8) -> Characterization:
    """``T _|_B A`` iff some x, y in M_T have ``Ax in (Tx)^+`` and ``Ay in (Ty)^-``.

    Polyhedral domains: M_T is a union of faces spanned by the listed
    vertices, and ``x -> D+(Tx, Ax)`` is convex along a face, so vertices
    suffice.  l_2 -> l_2: on the top singular subspace ``x = V c`` the sign
    of ``<Tx, Ax>`` is the quadratic form ``c^T Q c`` and the question
    reduces to the extreme eigenvalues of Q.
    """
    direct = op_bj_direct(T, A, tol)
    att = attainment_set(T, att_tol)
    nt = att.value
    if nt == 0:
        raise ValueError("characterisation needs T != 0")
    flags = () if att.exact else ("HEURISTIC",)
    ctol = tol * max(op_norm(A).value, 1e-300)
    Y = T.codomain
    if att.kind == "subspace" and T.domain.p == 2.0 and Y.p == 2.0:
        V = _plain_subspace(att, T.domain)
        M, N = T.scaled_matrix(), A.scaled_matrix()
        Q = V.T @ M.T @ N @ V
        Q = 0.5 * (Q + Q.T)
        lam, U = np.linalg.eigh(Q)
        pm, mm = lam[-1] / nt, -lam[0] / nt
        x = (V @ U[:, -1]) / T.domain.w
        y = (V @ U[:, 0]) / T.domain.w
    else:
        best_p, best_m = -math.inf, math.inf
        x = y = None
        for v in att.points:
            Tv = T.apply(v)
            dp, dm = norm_derivatives(Y, Tv, A.apply(v), kink=att_tol)
            if dp > best_p:
                best_p, x = dp, v
            if dm < best_m:
                best_m, y = dm, v
        pm, mm = best_p, -best_m
    charact = pm >= -ctol and mm >= -ctol
    return Characterization(direct, bool(charact), float(pm), float(mm), (x, y), flags)


# ------------------------------------------------------- sufficient sequences


@dataclass(frozen=True)
class SequenceCheck:
    holds: bool
    plus_ok: bool
    minus_ok: bool
    failing_index: int | None
    direct: Verdict | None
    falsification: bool
    reason: str = ""


def _converges_to(values: np.ndarray, target: float, tol: float) -> int | None:
    """Index of the first tail failure of ``values -> target``, or None.

    Cauchy-tail surrogate: on the second half of the prefix the gaps
    ``target - value`` must be non-increasing (up to tol) and the last gap
    must be at most ``max(tol, 1/len)`` relative to the target.
    """
    gaps = target - values
    n = len(values)
    slack = tol * max(target, 1.0)
    if np.any(gaps < -slack):
        return int(np.argmax(gaps < -slack))
    for k in range(n // 2, n - 1):
        if gaps[k + 1] > gaps[k] + slack:
            return k + 1
    if gaps[-1] > max(tol, 1.0 / n) * max(target, 1e-300):
        return n - 1
    return None


def check_sufficient_sequences(T: OperatorSpec, A: OperatorSpec, xs, ys,
                               tol: float = DEFAULT_TOL) -> SequenceCheck:
    """Sequence form: ``||Tx_n|| -> ||T||`` with ``Ax_n in (Tx_n)^+``, and the mirror for y_n."""
    nt = op_norm(T).value
    Y = T.codomain

    def side(seq, member):
        seq = [check_point(T.domain, v) for v in seq]
        vals = np.array([norm(Y, T.apply(v)) / norm(T.domain, v) for v in seq])
        bad = _converges_to(vals, nt, tol)
        if bad is not None:
            return False, bad, "norm condition"
        for i, v in enumerate(seq):
            if not member(Y, T.apply(v), A.apply(v), tol).holds:
                return False, i, "membership"
        return True, None, ""

    plus_ok, ip, rp = side(xs, in_positive_part)
    minus_ok, im, rm = side(ys, in_negative_part)
    failing = ip if ip is not None else im
    reason = rp or rm
    if not (plus_ok and minus_ok):
        return SequenceCheck(False, plus_ok, minus_ok, failing, None, False, reason)
    direct = op_bj_direct(T, A, tol)
    return SequenceCheck(True, True, True, None, direct, not direct.holds)


# -------------------------------------------------------- witness sequences


@dataclass
class WitnessSequence:
    """Prefix of a proof's sequence; ``eps`` is NaN before the threshold ``n0``."""

    side: str
    n: np.ndarray
    xs: np.ndarray
    eps: np.ndarray
    eps_formula: np.ndarray
    norm_Tx: np.ndarray
    norm_Ax: np.ndarray
    c_inf: np.ndarray
    near_max: np.ndarray
    member: np.ndarray
    n0: int | None
    norm_T: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def verified(self) -> bool:
        """Every step past n0 is a near-maximiser with the eps-membership."""
        if self.n0 is None:
            return False
        k = self.n >= self.n0
        return bool(np.all(self.near_max[k]) and np.all(self.member[k]))

    def to_rows(self) -> list[dict]:
        return [{"n": int(n), "eps": float(e), "eps_formula": float(ef), "norm_Tx": float(a),
                 "norm_Ax": float(b), "c_inf": float(c), "near_max": bool(m), "member": bool(s)}
                for n, e, ef, a, b, c, m, s in zip(self.n, self.eps, self.eps_formula,
                                                   self.norm_Tx, self.norm_Ax, self.c_inf,
                                                   self.near_max, self.member)]


def _at_step(T: OperatorSpec, A: OperatorSpec, n: int):
    """Operators used at step n; truncation families grow as N = max(2, n)."""
    if T.family_id in FAMILY_IDS and A.family_id in FAMILY_IDS and T.family_id != "table":
        N = max(2, n)
        return OperatorSpec.family(T.family_id, N), OperatorSpec.family(A.family_id, N)
    return T, A


def _first_stable(values: np.ndarray, bound: float) -> int | None:
    """Smallest n (1-based) with values[m] > bound for every m >= n in the prefix."""
    ok = values > bound
    if not ok[-1]:
        return None
    k = len(ok)
    while k > 0 and ok[k - 1]:
        k -= 1
    return k + 1


def _eps_formula(ratio: np.ndarray, n: np.ndarray) -> np.ndarray:
    r = ratio / n
    with np.errstate(invalid="ignore"):
        out = np.sqrt(1.0 - (1.0 - r) ** 2)
    out[(r <= 0) | (r >= 1)] = np.nan
    out[ratio == 0] = 0.0
    return out


def _sequence(T, A, n_max, tol, sign, scale_A, near_slack):
    rows = []
    for n in range(1, n_max + 1):
        Tn, An = _at_step(T, A, n)
        An = An * (1.0 / scale_A)
        P = Tn.pencil(An, sign / n)
        cert = op_norm(P)
        x = cert.witness
        val = norm(P.codomain, P.apply(x))
        nt = op_norm(Tn).value
        near = val >= cert.value - max(near_slack(n), cert.err) and val >= nt - near_slack(n)
        rows.append((n, x, norm(Tn.codomain, Tn.apply(x)), norm(An.codomain, An.apply(x)),
                     near, nt, Tn, An))
    return rows


def _finish(rows, side, eps, eps_formula, n0, tol):
    member = np.zeros(len(rows), dtype=bool)
    test = in_positive_part_eps if side == "plus" else in_negative_part_eps
    for k, (n, x, _, _, _, _, Tn, An) in enumerate(rows):
        if n0 is not None and n >= n0 and np.isfinite(eps[k]):
            member[k] = test(Tn.codomain, Tn.apply(x), An.apply(x), float(eps[k]), tol).holds
    dims = max(len(r[1]) for r in rows)
    xs = np.zeros((len(rows), dims))
    for k, r in enumerate(rows):
        xs[k, :len(r[1])] = r[1]
    nAx = np.array([r[3] for r in rows])
    return WitnessSequence(side, np.array([r[0] for r in rows]), xs, eps, eps_formula,
                           np.array([r[2] for r in rows]), nAx, np.minimum.accumulate(nAx),
                           np.array([r[4] for r in rows]), member, n0,
                           np.array([r[5] for r in rows]))


def witness_rotund(T: OperatorSpec, A: OperatorSpec, n_max: int = 50,
                   tol: float = DEFAULT_TOL) -> tuple[WitnessSequence, WitnessSequence]:
    """Replay the rotund-operator construction on both sides.

    Rotundity of T is the caller's responsibility.  Steps use maximisers of
    ``||T +- A/n||``; eps_n = sqrt(1 - (1 - ||A|| / (n ||Tx_n||))^2) from
    ``n0 = max(n1, n2)`` with ``||Tx_n|| > ||T||/2`` for n >= n1 and
    ``n2 > 2 ||A|| / ||T||``.
    """
    out = []
    for sign, side in ((1.0, "plus"), (-1.0, "minus")):
        rows = _sequence(T, A, n_max, tol, sign, 1.0, lambda n: tol)
        nTx = np.array([r[2] for r in rows])
        nT = np.array([r[5] for r in rows])
        nA = np.array([op_norm(r[7]).value for r in rows])
        n = np.arange(1, n_max + 1, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            formula = _eps_formula(np.where(nTx > 0, nA / nTx, np.inf), n)
        n1 = _first_stable(nTx - nT / 2, 0.0)
        n2 = math.floor(2 * nA[-1] / nT[-1]) + 1 if nT[-1] > 0 else None
        n0 = None if n1 is None or n2 is None else max(n1, n2)
        eps = np.where(n >= (n0 or math.inf), formula, np.nan)
        out.append(_finish(rows, side, eps, formula, n0, tol))
    return out[0], out[1]


@dataclass
class GeneralWitness:
    condition_a: bool
    trace: np.ndarray
    threshold: float
    scale_A: float
    plus: WitnessSequence | None
    minus: WitnessSequence | None
    c: float | None = None


def witness_general(T: OperatorSpec, A: OperatorSpec, n_max: int = 50,
                    tol: float = DEFAULT_TOL) -> GeneralWitness:
    """Replay the general-operator dichotomy on a finite prefix.

    A is scaled to norm at most 1.  Condition (a), ``||Ax_n|| -> 0``, is
    reported when the running infimum falls below ``max(tol, 1/n_max)``
    ("detected on the prefix").  Otherwise eps_n = sqrt(1 - (1 - 1/(n
    ||Tx_n||))^2) from n0 = max(n1, n2, n3) with ``n1 > 2||T||/c``,
    ``||Tx_n|| > ||T||/2`` past n2 and ``n3 > 2/||T||``.
    """
    T1, A1 = _at_step(T, A, n_max)
    scale = max(op_norm(A1).value, 1.0)
    near = lambda n: min(1.0 / n**3, tol)  # noqa: E731
    rows_p = _sequence(T, A, n_max, tol, 1.0, scale, near)
    nAx = np.array([r[3] for r in rows_p])
    trace = np.minimum.accumulate(nAx)
    threshold = max(tol, 1.0 / n_max)
    if trace[-1] < threshold:
        return GeneralWitness(True, nAx, threshold, scale, None, None)
    seqs = []
    c = None
    n = np.arange(1, n_max + 1, dtype=float)
    for sign, side, rows in ((1.0, "plus", rows_p),
                             (-1.0, "minus", _sequence(T, A, n_max, tol, -1.0, scale, near))):
        nTx = np.array([r[2] for r in rows])
        nT = np.array([r[5] for r in rows])
        cs = float(np.min([r[3] for r in rows]))
        c = cs if c is None else min(c, cs)
        with np.errstate(divide="ignore"):
            formula = _eps_formula(np.where(nTx > 0, 1.0 / nTx, np.inf), n)
        n1 = math.floor(2 * nT[-1] / cs) + 1
        n2 = _first_stable(nTx - nT / 2, 0.0)
        n3 = math.floor(2 / nT[-1]) + 1 if nT[-1] > 0 else None
        n0 = None if n2 is None or n3 is None else max(n1, n2, n3)
        eps = np.where(n >= (n0 or math.inf), formula, np.nan)
        seqs.append(_finish(rows, side, eps, formula, n0, tol))
    return GeneralWitness(False, nAx, threshold, scale, seqs[0], seqs[1], c)


# ----------------------------------------------------------------- functionals


@dataclass(frozen=True)
class FunctionalResult:
    holds: bool
    mode: str
    g_max: float
    g_min: float
    witnesses: tuple
    dual_check: Verdict

    @property
    def consistent(self) -> bool:
        return self.holds == self.dual_check.holds


def functional_bj(space: SpaceSpec, f, g, tol: float = DEFAULT_TOL) -> FunctionalResult:
    """``f _|_B g`` in the dual via the norming set M_f.

    Orthogonal iff g takes both signs (weakly) on M_f; for 1 < p < inf M_f is
    a single point and the condition is ``g(x) = 0``.  M_f is a face of the
    unit ball, so extreme values of g occur at its vertices (l_1) or follow
    from the free coordinates (l_inf).
    """
    f = check_point(space, f)
    g = check_point(space, g)
    ns = norming_witnesses(space, f)
    scale = max(dual_norm(space, g), 1e-300)
    if space.is_inf:
        w = space.w
        base = np.where(ns.free, 0.0, np.sign(f)) / w
        spread = float(np.sum(np.abs(g[ns.free]) / w[ns.free]))
        mid = float(g @ base)
        gmax, gmin = mid + spread, mid - spread
        lo = base.copy()
        hi = base.copy()
        lo[ns.free] = -np.sign(g[ns.free]) / w[ns.free]
        hi[ns.free] = np.sign(g[ns.free]) / w[ns.free]
        wit = (hi, lo)
        mode = "face"
    else:
        vals = [float(g @ x) for x in ns.points]
        i, j = int(np.argmax(vals)), int(np.argmin(vals))
        gmax, gmin = vals[i], vals[j]
        wit = (ns.points[i], ns.points[j])
        mode = "strictly-convex" if space.strictly_convex else "face"
    holds = gmax >= -tol * scale and gmin <= tol * scale
    dual = is_bj_orthogonal(space.dual(), f, g, tol)
    return FunctionalResult(bool(holds), mode, gmax, gmin, wit, dual)


# -------------------------------------------------------------- equivalences


@dataclass
class ProbeReport:
    status: str
    direct: Verdict | None = None
    strong: Verdict | None = None
    witness: np.ndarray | None = None
    inner: float | None = None
    lower_bound: float | None = None
    lambda0_trace: list = field(default_factory=list)
    reason: str = ""

    @property
    def falsified(self) -> bool:
        return self.status == "FALSIFIED"


def _lambda0_trace(T, A, direct: Verdict) -> list:
    g0 = direct.details.get("norm_T", 0.0)
    lam = direct.minimizer if isinstance(direct.minimizer, float) else 0.0
    pts = sorted({lam, -1e-3, 1e-3, -1.0, 1.0})
    return [(t, op_norm(T.pencil(A, t)).value - g0) for t in pts]


def _equivalence(T, A, tol, lower):
    direct = op_bj_direct(T, A, tol)
    rep = ProbeReport("", direct, lower_bound=lower)
    rep.lambda0_trace = _lambda0_trace(T, A, direct)
    if not direct.holds:
        rep.status = "SKIP-NOT-ORTHOGONAL"
        rep.reason = "T is not orthogonal to A, so the equivalence is vacuous"
        return rep
    rep.strong = op_strong_bj(T, A, tol)
    rep.status = "CONFIRMED" if rep.strong.holds else "FALSIFIED"
    return rep


def bhatia_semrl_witness(T: OperatorSpec, A: OperatorSpec, tol: float = 1e-8):
    """x in M_T with ``<Tx, Ax> = 0`` (l_2), or None when none exists.

    On the top singular subspace the form ``c -> <TVc, AVc>`` has extreme
    eigenpairs (l_max, u_max), (l_min, u_min); when l_min <= 0 <= l_max the
    combination ``cos t u_max + sin t u_min`` with ``tan^2 t = l_max / -l_min``
    is a zero.
    """
    att = attainment_set(T, tol)
    V = _plain_subspace(att, T.domain)
    M, N = T.scaled_matrix(), A.scaled_matrix()
    Q = V.T @ M.T @ N @ V
    lam, U = np.linalg.eigh(0.5 * (Q + Q.T))
    lmax, lmin = lam[-1], lam[0]
    if lmax < 0 or lmin > 0:
        return None
    if lmax == 0:
        c = U[:, -1]
    elif lmin == 0:
        c = U[:, 0]
    else:
        th = math.atan(math.sqrt(lmax / -lmin))
        c = math.cos(th) * U[:, -1] + math.sin(th) * U[:, 0]
    return (V @ c) / T.domain.w


def hilbert_equivalence_probe(T: OperatorSpec, A: OperatorSpec,
                              tol: float = DEFAULT_TOL) -> ProbeReport:
    """On l_2 with 0 outside sigma_app(A), orthogonality must be strong."""
    if not (T.domain.p == 2.0 and T.codomain.p == 2.0 and A.domain == T.domain
            and A.codomain == T.codomain):
        return ProbeReport("REFUSED", reason="needs operators between l_2 spaces")
    spec = zero_in_approx_spectrum(A, tol)
    if spec.inf_estimate < tol:
        return ProbeReport("SKIP-PRECONDITION", lower_bound=spec.inf_estimate,
                           reason="0 lies in the approximate point spectrum of A")
    rep = _equivalence(T, A, tol, spec.inf_estimate)
    x = bhatia_semrl_witness(T, A)
    if x is not None:
        rep.witness = x
        M, N = T.scaled_matrix(), A.scaled_matrix()
        u = x * T.domain.w
        rep.inner = float((M @ u) @ (N @ u))
    return rep


def uniform_equivalence_probe(T: OperatorSpec, A: OperatorSpec,
                              tol: float = DEFAULT_TOL) -> ProbeReport:
    """Uniformly convex codomain (1 < q < inf) and A bounded below."""
    if not T.codomain.strictly_convex:
        return ProbeReport("REFUSED", reason=f"codomain exponent {T.codomain.p} is not "
                           "uniformly convex")
    spec = zero_in_approx_spectrum(A, tol)
    if spec.inf_estimate < tol:
        return ProbeReport("SKIP-PRECONDITION", lower_bound=spec.inf_estimate,
                           reason="0 lies in the approximate point spectrum of A")
    rep = _equivalence(T, A, tol, spec.inf_estimate)
    if not spec.certified and rep.strong is not None:
        rep.reason = "lower bound on A is heuristic"
    return rep
