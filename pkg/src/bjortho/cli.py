"""Command-line front end (``bjo``).

Exit codes: 0 decided, 2 indeterminate or heuristic, 3 input error,
4 falsification (a theorem contradicted under verified hypotheses).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import operators as ops
from . import smoothness as sm
from . import theorems as th
from .oracle import GridSpec, grid_min_lambda, op_norm_bruteforce, pencil_grid_min
from .spaces import INF, SpaceSpec, norm, norm_derivatives
from .vec_ortho import (DEFAULT_TOL, InternalConsistencyError, Verdict, _jsonable,
                        in_negative_part, in_positive_part, in_positive_part_eps,
                        is_bj_orthogonal, is_eps_orthogonal, is_strongly_bj_orthogonal)

CONFIG_SCHEMA = "bjo-config/1"
REPORT_SCHEMA = "bjo-report/1"
EXIT_OK, EXIT_INDETERMINATE, EXIT_INPUT, EXIT_FALSIFIED = 0, 2, 3, 4
FAMILIES = {"example23": ("example23_T", "example23_A"),
            "example25": ("example25_T", "example25_A")}


class InputError(ValueError):
    """Malformed configuration or arguments."""


# ------------------------------------------------------------------ config


def load_config(path: str, accept_report: bool = False) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(cfg, dict):
        raise InputError(f"{path}: top level must be an object")
    if accept_report and cfg.get("schema") == REPORT_SCHEMA:
        inner = cfg.get("inputs", {}).get("config")
        if not isinstance(inner, dict) or inner.get("schema") != CONFIG_SCHEMA:
            raise InputError(f"{path}: report carries no embedded {CONFIG_SCHEMA} config")
        return cfg
    if cfg.get("schema") != CONFIG_SCHEMA:
        raise InputError(f"{path}: schema must be {CONFIG_SCHEMA!r}, got {cfg.get('schema')!r}")
    return cfg


def _field(cfg: dict, key: str):
    if key not in cfg:
        raise InputError(f"config: missing field {key!r}")
    return cfg[key]


def _space(cfg: dict, key: str) -> SpaceSpec:
    try:
        return SpaceSpec.from_dict(_field(cfg, key))
    except (TypeError, ValueError, KeyError) as e:
        raise InputError(f"config.{key}: {e}") from None


def _vector(cfg: dict, key: str, space: SpaceSpec) -> np.ndarray:
    v = _field(cfg, key)
    try:
        arr = np.asarray(v, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"config.{key}: not a numeric array") from None
    if arr.shape != (space.dim,) or not np.all(np.isfinite(arr)):
        raise InputError(f"config.{key}: expected {space.dim} finite numbers")
    return arr


def _operator(cfg: dict, key: str, N: int | None) -> ops.OperatorSpec:
    d = _field(cfg, key)
    if not isinstance(d, dict):
        raise InputError(f"config.{key}: must be an object")
    d = dict(d)
    if d.get("kind") == "dense":
        d.setdefault("domain", cfg.get("domain"))
        d.setdefault("codomain", cfg.get("codomain"))
    if N is not None and d.get("kind") == "family":
        d["N"] = N
    try:
        return ops.OperatorSpec.from_dict(d)
    except (TypeError, ValueError, KeyError) as e:
        raise InputError(f"config.{key}: {e}") from None


# ------------------------------------------------------------------ reports


class Report:
    def __init__(self, command: str, inputs: dict, seed: int, tol: float):
        self.data = {"schema": REPORT_SCHEMA, "command": command, "inputs": inputs,
                     "seed": seed, "tolerance": tol, "verdicts": [], "certificates": [],
                     "flags": []}
        self.exit = EXIT_OK
        self.rows: list[dict] = []

    def verdict(self, name: str, v, **extra):
        if isinstance(v, Verdict):
            entry = dict(v.to_dict(), name=name)
            if v.indeterminate or v.heuristic:
                self.flag("INDETERMINATE" if v.indeterminate else "HEURISTIC")
        else:
            entry = {"name": name, "holds": v}
        entry.update({k: _jsonable(a) for k, a in extra.items()})
        self.data["verdicts"].append(entry)

    def certificate(self, name: str, **fields):
        self.data["certificates"].append(dict({k: _jsonable(a) for k, a in fields.items()},
                                              name=name))

    def flag(self, f: str):
        if f not in self.data["flags"]:
            self.data["flags"].append(f)
        if f == "FALSIFIED":
            self.exit = EXIT_FALSIFIED
        elif self.exit == EXIT_OK and f in ("INDETERMINATE", "HEURISTIC", "NEAR-BOUNDARY"):
            self.exit = EXIT_INDETERMINATE

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            rows = self.rows or [dict(v) for v in self.data["verdicts"]]
            if not rows:
                return ""
            buf = io.StringIO()
            keys = list(rows[0].keys())
            w = csv.DictWriter(buf, fieldnames=keys, extrasaction="ignore", lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: _fmt_cell(r.get(k)) for k in keys})
            return buf.getvalue()
        if fmt == "text":
            lines = [f"{self.data['command']}:"]
            for v in self.data["verdicts"]:
                lines.append(f"  {v['name']}: holds={v['holds']}"
                             + (f" margin={v['margin']}" if "margin" in v else ""))
            for c in self.data["certificates"]:
                lines.append(f"  {c['name']}: " + ", ".join(f"{k}={c[k]}" for k in sorted(c)
                                                           if k != "name"))
            if self.data["flags"]:
                lines.append("  flags: " + " ".join(self.data["flags"]))
            return "\n".join(lines) + "\n"
        data = dict(self.data)
        if self.rows:
            data["rows"] = self.rows
        return json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n"


def _fmt_cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return json.dumps(v)
    return v


# ----------------------------------------------------------------- commands


def _mode(mode: str):
    if mode in ("bj", "sbj", "plus", "minus"):
        return mode, None
    for prefix in ("eps=", "deps="):
        if mode.startswith(prefix):
            try:
                e = float(mode[len(prefix):])
            except ValueError:
                break
            if not 0.0 <= e < 1.0:
                raise InputError(f"--mode {mode}: eps must lie in [0, 1)")
            return prefix[:-1], e
    raise InputError(f"--mode {mode!r}: expected bj, sbj, plus, minus, eps=E or deps=E")


def cmd_vector_check(args, cfg, rep: Report):
    space = _space(cfg, "space")
    x, y = _vector(cfg, "x", space), _vector(cfg, "y", space)
    kind, eps = _mode(args.mode)
    tol = args.tol
    fn = {"bj": lambda: is_bj_orthogonal(space, x, y, tol),
          "sbj": lambda: is_strongly_bj_orthogonal(space, x, y, tol),
          "plus": lambda: in_positive_part(space, x, y, tol),
          "minus": lambda: in_negative_part(space, x, y, tol),
          "eps": lambda: in_positive_part_eps(space, x, y, eps, tol),
          "deps": lambda: is_eps_orthogonal(space, x, y, eps, tol)}[kind]
    rep.verdict(args.mode, fn())


def cmd_op_norm(args, cfg, rep: Report):
    T = _operator(cfg, "operator", args.N)
    try:
        c = ops.op_norm(T, heuristic=args.heuristic, seed=args.seed)
    except ops.ComplexityError as e:
        raise InputError(str(e)) from None
    rep.certificate("op_norm", **c.to_dict())
    if not c.guaranteed:
        rep.flag("HEURISTIC")


def _family_defect(T, A, rep: Report):
    if T.family_id and A.family_id:
        d = ops.truncation_defect(T, A)
        rep.certificate("truncation_defect", N=d.N, delta=d.delta, norm_T=d.norm_T,
                        min_value=d.min_value, minimizer=d.minimizer)
        return d
    return None


def cmd_op_check(args, cfg, rep: Report):
    T, A = _operator(cfg, "operator", args.N), _operator(cfg, "operator2", args.N)
    if args.method in ("direct", "both"):
        rep.verdict("direct", ops.op_bj_direct(T, A, args.tol))
    if args.method in ("charact", "both"):
        c = th.check_characterization_finite(T, A, args.tol)
        rep.verdict("characterization", c.charact, plus_margin=c.plus_margin,
                    minus_margin=c.minus_margin, witnesses=[w for w in c.witnesses])
        for f in c.flags:
            rep.flag(f)
        if args.method == "both" and not c.agree and abs(c.direct.margin) > 10 * args.tol:
            rep.flag("FALSIFIED")
    d = _family_defect(T, A, rep)
    if d is not None:
        # the exact statement concerns the infinite family; at finite N only the
        # defect shrinking with N is checkable
        rep.verdict("direct_within_defect", bool(d.delta <= args.defect_tol), delta=d.delta,
                    defect_tol=args.defect_tol)
        rep.certificate("limit_consistency", delta=d.delta,
                        consistent=bool(d.delta < 1.0 / math.sqrt(d.N)))


def cmd_attainment(args, cfg, rep: Report):
    T = _operator(cfg, "operator", args.N)
    a = ops.attainment_set(T, args.att_tol)
    rep.certificate("attainment_set", points=a.points, exact=a.exact, face_flags=a.face_flags,
                    kind=a.kind, value=a.value)
    if not a.exact:
        rep.flag("HEURISTIC")


def _seq_rows(seq: th.WitnessSequence, which: str) -> list[dict]:
    return [dict(r, sequence=which, side=seq.side) for r in seq.to_rows()]


def cmd_witness(args, cfg, rep: Report):
    T, A = _operator(cfg, "operator", args.N), _operator(cfg, "operator2", args.N)
    if args.kind == "rotund":
        plus, minus = th.witness_rotund(T, A, args.n_max, args.tol)
        rep.flag("ROTUNDITY-CALLER-ASSERTED")
        seqs = [plus, minus]
    else:
        g = th.witness_general(T, A, args.n_max, args.tol)
        rep.certificate("condition_a", detected=g.condition_a, threshold=g.threshold,
                        trace=g.trace, scale_A=g.scale_A, note="detected on a finite prefix")
        seqs = [s for s in (g.plus, g.minus) if s is not None]
        if g.condition_a:
            rep.rows = [{"sequence": "condition_a", "n": n + 1, "norm_Ax": v}
                        for n, v in enumerate(g.trace.tolist())]
    for s in seqs:
        rep.verdict(f"{args.kind}_{s.side}", s.verified(), n0=s.n0)
        rep.rows += _seq_rows(s, args.kind)


def cmd_functional_check(args, cfg, rep: Report):
    space = _space(cfg, "space")
    f, g = _vector(cfg, "f", space), _vector(cfg, "g", space)
    r = th.functional_bj(space, f, g, args.tol)
    rep.verdict("functional_bj", r.holds, mode=r.mode, g_max=r.g_max, g_min=r.g_min,
                witnesses=list(r.witnesses))
    rep.verdict("dual_pencil", r.dual_check)
    if not r.consistent and abs(r.dual_check.margin) > 10 * args.tol:
        rep.flag("FALSIFIED")


def cmd_smoothness(args, cfg, rep: Report):
    T = _operator(cfg, "operator", args.N)
    if args.kind == "sufficient":
        r = sm.sufficient_smoothness(T, args.tol, args.samples, args.seed)
        rep.verdict("sufficient", r.sufficient_verdict, mt_singleton=r.mt_singleton, x0=r.x0,
                    image_smooth=r.image_smooth)
        rep.certificate("hyperspace_trace", rows=r.hyperspace_trace, notes=r.notes)
    elif args.kind == "necessary":
        r = sm.necessary_smoothness_probe(T, args.tol, args.samples, args.seed)
        rep.verdict("necessary", r.necessary_verdict)
        if r.james_decomposition:
            j = r.james_decomposition
            rep.certificate("james_decomposition", A1=j["A1"].matrix, A2=j["A2"].matrix,
                            split_residual=j["split_residual"])
            rep.verdict("T_A1", j["T_A1"])
            rep.verdict("T_A2", j["T_A2"])
            rep.verdict("T_A1_plus_A2", j["T_sum"])
        if r.necessary_verdict == "INCONCLUSIVE-CONSISTENT-WITH-SMOOTH":
            rep.flag("INCONCLUSIVE")
    else:
        suff = sm.sufficient_smoothness(T, args.tol, args.samples, args.seed)
        r = sm.right_additivity_probe(T, args.trials, args.tol, args.seed,
                                      smooth=suff.sufficient_verdict)
        rep.verdict("right_additivity", r.failures == 0, passes=r.passes, trials=r.trials)
        if r.falsifications:
            rep.flag("FALSIFIED")
    for f in r.flags if hasattr(r, "flags") else ():
        rep.flag(f)


def cmd_family(args, cfg, rep: Report):
    tid, aid = FAMILIES[args.name]
    Ns = _int_list(args.N_list)
    prev = math.inf
    for N in Ns:
        d = ops.truncation_defect(ops.OperatorSpec.family(tid, N), ops.OperatorSpec.family(aid, N))
        rep.rows.append({"family": args.name, "N": N, "norm_T": d.norm_T, "min_value": d.min_value,
                         "lambda_lo": d.minimizer[0], "lambda_hi": d.minimizer[1],
                         "delta": d.delta})
        if not d.delta < prev:
            rep.flag("NON-MONOTONE")
        prev = d.delta
    rep.verdict("defect_positive", all(r["delta"] > 0 for r in rep.rows))


def _int_list(s: str) -> list[int]:
    try:
        out = [int(t) for t in s.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"--N-list {s!r}: expected comma-separated integers") from None
    if not out or min(out) < 2:
        raise InputError("--N-list: every N must be >= 2")
    return out


# ------------------------------------------------------------------- suite


def _random_space(rng, ps=(1.0, 1.5, 2.0, 3.0, INF), dims=(2, 3, 4)):
    return SpaceSpec(float(rng.choice(ps)), int(rng.choice(dims)))


def run_suite(cases: int, seed: int, tol: float = DEFAULT_TOL) -> dict:
    """Seeded property suite; returns counts per property."""
    counts: dict[str, list[int]] = {}

    def record(name, ok):
        c = counts.setdefault(name, [0, 0])
        c[0 if ok else 1] += 1

    for k in range(cases):
        rng = np.random.default_rng([seed, k])
        S = _random_space(rng)
        x, y = rng.standard_normal(S.dim), rng.standard_normal(S.dim)
        if rng.random() < 0.3:
            x[rng.integers(S.dim)] = 0.0
        dp, dm = norm_derivatives(S, x, y)
        record("derivative_order", dm <= dp + 1e-12 * (1 + abs(dp)))
        bj = is_bj_orthogonal(S, x, y, tol)
        plus, minus = in_positive_part(S, x, y, tol), in_negative_part(S, x, y, tol)
        if abs(bj.margin) > tol:
            record("decomposition", bj.holds == (plus.holds and minus.holds))
        a, b = rng.choice([-3.0, -0.5, 0.25, 2.0], size=2)
        bj2 = is_bj_orthogonal(S, a * x, b * y, tol)
        if abs(bj.margin) > 10 * tol:
            record("homogeneity", bj.holds == bj2.holds)
        record("strong_implies_bj", (not is_strongly_bj_orthogonal(S, x, y, tol).holds) or bj.holds)
        e1, e2 = sorted(rng.uniform(0, 0.99, size=2))
        v1 = in_positive_part_eps(S, x, y, e1, tol)
        if v1.holds and not v1.indeterminate:
            record("eps_monotone", in_positive_part_eps(S, x, y, e2, tol).holds)
        f = rng.standard_normal(S.dim)
        from .spaces import dual_norm
        record("holder", abs(f @ x) <= dual_norm(S, f) * norm(S, x) * (1 + 1e-12) + 1e-300)
        # operator level, cheap exact configurations only
        P = SpaceSpec(float(rng.choice([1.0, 2.0, INF])), int(rng.choice([2, 3])))
        T = ops.OperatorSpec(rng.standard_normal((P.dim, P.dim)), P, P)
        A = ops.OperatorSpec(rng.standard_normal((P.dim, P.dim)), P, P)
        if rng.random() < 0.5:
            lam = ops.op_bj_direct(T, A, tol).minimizer
            T = T.pencil(A, float(lam))
        c = ops.op_norm(T)
        img = norm(P, T.apply(c.witness))
        record("norm_certificate", img <= c.value * (1 + 1e-12) and c.value - img <= c.err + 1e-12)
        ch = th.check_characterization_finite(T, A, tol)
        if abs(ch.direct.margin) > 1e-5:
            record("characterization", ch.agree)
    return {k: {"pass": v[0], "fail": v[1]} for k, v in sorted(counts.items())}


def cmd_suite(args, cfg, rep: Report):
    try:
        res = run_suite(args.cases, args.seed, args.tol)
    except InternalConsistencyError as e:
        rep.flag("FALSIFIED")
        rep.certificate("internal_consistency", message=str(e))
        return
    for name, c in res.items():
        rep.verdict(name, c["fail"] == 0, passes=c["pass"], failures=c["fail"])
        rep.rows.append({"property": name, "pass": c["pass"], "fail": c["fail"]})
        if c["fail"]:
            rep.flag("FALSIFIED")


# ------------------------------------------------------------------ oracle


def cmd_oracle(args, cfg, rep: Report):
    """Re-check a config (or the inputs embedded in a report) by brute force."""
    if cfg.get("schema") == REPORT_SCHEMA:
        cfg = cfg["inputs"]["config"]
    grid = GridSpec(-args.range, args.range, args.points, 2)
    if "x" in cfg:
        space = _space(cfg, "space")
        x, y = _vector(cfg, "x", space), _vector(cfg, "y", space)
        lam, val = pencil_grid_min(space, x, y, grid)
        nx = norm(space, x)
        rep.certificate("pencil_grid", argmin=lam, min_value=val, norm_x=nx)
        rep.verdict("grid_bj", bool(val >= nx * (1 - args.tol)))
        return
    T = _operator(cfg, "operator", args.N)
    if T.domain.dim <= 3 or T.domain.polyhedral:
        rep.certificate("op_norm_mesh", lower_bound=op_norm_bruteforce(T, args.resolution))
    if "operator2" in cfg:
        A = _operator(cfg, "operator2", args.N)
        g0 = ops.op_norm(T).value
        coarse = GridSpec(-args.range, args.range, min(args.points, 2001), 2)
        lam, val = grid_min_lambda(lambda t: ops.op_norm(T.pencil(A, t)).value, coarse)
        rep.certificate("operator_pencil_grid", argmin=lam, min_value=val, norm_T=g0)
        rep.verdict("grid_bj", bool(val >= g0 * (1 - args.tol)))


# -------------------------------------------------------------------- main


COMMANDS = {"vector-check": cmd_vector_check, "op-norm": cmd_op_norm, "op-check": cmd_op_check,
            "attainment": cmd_attainment, "witness": cmd_witness,
            "functional-check": cmd_functional_check, "smoothness": cmd_smoothness,
            "family": cmd_family, "suite": cmd_suite, "oracle": cmd_oracle}
NEEDS_CONFIG = {"vector-check", "op-norm", "op-check", "attainment", "witness",
                "functional-check", "smoothness", "oracle"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--seed", type=int, default=None,
                        help="RNG seed (falls back to $BJO_SEED, then 0)")
    common.add_argument("--N", type=int, default=None, help="truncation size for families")
    common.add_argument("--output", "-o", default=None)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)

    p = argparse.ArgumentParser(prog="bjo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, config=True):
        s = sub.add_parser(name, parents=[common], help=help_)
        if config:
            s.add_argument("config", help="bjo-config/1 JSON file")
        return s

    add("vector-check", "vector orthogonality relations").add_argument(
        "--mode", default="bj", help="bj | sbj | plus | minus | eps=E | deps=E")
    add("op-norm", "operator norm with certificate").add_argument(
        "--heuristic", action="store_true")
    oc = add("op-check", "operator orthogonality")
    oc.add_argument("--method", choices=("direct", "charact", "both"), default="both")
    oc.add_argument("--defect-tol", type=float, default=2e-6,
                    help="allowed truncation defect for family pairs")
    add("attainment", "norm attainment set").add_argument("--att-tol", type=float, default=1e-8)
    w = add("witness", "witness sequences from the constructive proofs")
    w.add_argument("--kind", choices=("rotund", "general"), default="general")
    w.add_argument("--n-max", type=int, default=50)
    add("functional-check", "orthogonality of functionals")
    s = add("smoothness", "operator smoothness checks")
    s.add_argument("--kind", choices=("sufficient", "necessary", "additivity"),
                   default="sufficient")
    s.add_argument("--samples", type=int, default=4)
    s.add_argument("--trials", type=int, default=100)
    f = add("family", "truncation defect sweep", config=False)
    f.add_argument("name", choices=sorted(FAMILIES))
    f.add_argument("--N-list", default="10,100,1000")
    add("suite", "seeded property suite", config=False).add_argument(
        "--cases", type=int, default=500)
    o = add("oracle", "brute-force re-check of a config or report")
    o.add_argument("--range", type=float, default=1e4)
    o.add_argument("--points", type=int, default=1_000_001)
    o.add_argument("--resolution", type=float, default=1e-3)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    if args.seed is None:
        env = os.environ.get("BJO_SEED")
        try:
            args.seed = int(env) if env else 0
        except ValueError:
            print(f"bjo: BJO_SEED={env!r} is not an integer", file=sys.stderr)
            return EXIT_INPUT
    fmt = args.format or ("csv" if args.command == "family" else "json")
    try:
        cfg = (load_config(args.config, accept_report=args.command == "oracle")
               if args.command in NEEDS_CONFIG else {})
        inputs = {k: v for k, v in sorted(vars(args).items())
                  if k not in ("config", "output", "format", "command")}
        inputs["config"] = cfg
        rep = Report(args.command, inputs, args.seed, args.tol)
        COMMANDS[args.command](args, cfg, rep)
    except InputError as e:
        print(f"bjo: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except InternalConsistencyError as e:
        print(f"bjo: internal consistency failure: {e}", file=sys.stderr)
        return EXIT_FALSIFIED
    except (ValueError, ops.ComplexityError) as e:
        print(f"bjo: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    text = rep.render(fmt)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return rep.exit


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
