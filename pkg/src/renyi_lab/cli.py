"""``renyi-lab`` command line: ``eval``, ``check`` and ``sweep``.

Exit codes: 0 success, 1 inequality violation, 2 usage or parse error,
3 numerical failure (oracle non-convergence or a non-monotone threshold).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from . import inequalities as ineq
from . import states, sweeps
from .concurrence import concurrence_of_assistance, pure_concurrence, wootters_concurrence
from .entropy import as_alpha
from .errors import BracketError, NonMonotoneTransitionError, RenyiLabError
from .linalg import DensityMatrix, PureState
from .renyi_ent import (
    CONJECTURE_ALPHA_FLOOR,
    closed_form_status,
    renyi_entanglement_pure,
    renyi_entanglement_two_qubit,
    reoa_lower_bound,
)
from .roof import Measure, RoofBudget, convex_roof_min, roof_max

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def fmt(v) -> str:
    """17 significant digits, enough to round-trip a double."""
    if v is None:
        return ""
    return format(float(v), ".17g")


def fixed12(v) -> str:
    """Twelve decimals, without a sign on values that round to zero."""
    s = f"{float(v):.12f}"
    return s.lstrip("-") if float(s) == 0.0 else s


# -- state specs --------------------------------------------------------------

def _pairs_to_complex(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.shape[-1] != 2:
        raise UsageError("complex numbers must be given as [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_json(psi: PureState) -> dict:
    return {"n_qubits": psi.n_qubits,
            "amplitudes": [[float(z.real), float(z.imag)] for z in psi.amplitudes]}


def load_state_file(path: str):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read state file {path}: {exc}") from exc
    if "amplitudes" in data:
        psi = PureState(_pairs_to_complex(data["amplitudes"]))
        if "n_qubits" in data and data["n_qubits"] != psi.n_qubits:
            raise UsageError(f"n_qubits={data['n_qubits']} does not match {psi.dim} amplitudes")
        return psi
    if "matrix" in data:
        return DensityMatrix(_pairs_to_complex(data["matrix"]))
    raise UsageError(f"state file {path} needs an 'amplitudes' or 'matrix' field")


def parse_state(spec: str):
    """``ghz[:n]``, ``w[:n]``, ``werner:p``, ``bell``, ``product:n`` or a JSON file path."""
    name, _, arg = spec.partition(":")
    try:
        if name in ("ghz", "w"):
            n = int(arg) if arg else 3
            if n not in (3, 4):
                raise UsageError(f"named state {name} is available for n = 3 or 4, got {n}")
            return states.ghz(n) if name == "ghz" else states.w_state(n)
        if name == "werner":
            return states.werner(float(arg))
        if name == "bell":
            return states.bell_phi_plus()
        if name == "product":
            return states.product_zero(int(arg) if arg else 2)
    except ValueError as exc:
        raise UsageError(f"bad state spec {spec!r}: {exc}") from exc
    if Path(spec).is_file():
        return load_state_file(spec)
    raise UsageError(f"unknown state spec {spec!r}")


def parse_alphas(text: str | None) -> list[float]:
    if not text:
        return []
    try:
        return [float(a) for a in text.split(",") if a.strip()]
    except ValueError as exc:
        raise UsageError(f"bad alpha list {text!r}") from exc


# -- eval ---------------------------------------------------------------------

EVAL_MEASURES = (
    "renyi-ent", "concurrence", "coa", "reoa-bound", "roof-min", "roof-max",
    "ckw-residual", "renyi-monogamy-residual", "coa-polygamy-residual",
    "eoa-polygamy-residual", "renyi-polygamy-residual",
)


def _as_two_qubit_rho(state) -> DensityMatrix:
    rho = state.density_matrix() if isinstance(state, PureState) else state
    if rho.matrix.shape != (4, 4):
        raise UsageError("this measure needs a two-qubit state")
    return rho


def _need_alpha(args) -> float:
    if args.alpha is None:
        raise UsageError(f"--measure {args.measure} needs --alpha")
    return args.alpha


def evaluate(args) -> dict:
    state = parse_state(args.state)
    m = args.measure
    rec = {"state": args.state, "measure": m, "alpha": args.alpha, "conjectural": False}
    pure = isinstance(state, PureState)
    if m.endswith("-residual"):
        if not pure:
            raise UsageError("inequality residuals need a pure multi-qubit state")
        inequality_id = m[: -len("-residual")].replace("-", "_")
        kw = {"focus": args.focus}
        if inequality_id in ineq.ALPHA_IDS:
            kw["alpha"] = _need_alpha(args)
            if inequality_id == "renyi_monogamy":
                kw["floor"] = args.floor
        if inequality_id in ("eoa_polygamy",) or (inequality_id == "renyi_polygamy" and args.oracle_rhs):
            kw["budget"] = RoofBudget()
        if inequality_id == "renyi_polygamy":
            kw["oracle_rhs"] = args.oracle_rhs
        rep = getattr(ineq, f"{inequality_id}_residual")(state, **kw)
        rec.update(value=rep.residual, branch=inequality_id, lhs=rep.lhs, rhs_terms=list(rep.rhs_terms),
                   conjectural=rep.conjectural, converged=not rep.unconverged)
    elif m == "renyi-ent":
        alpha = _need_alpha(args)
        if pure:
            rec.update(value=renyi_entanglement_pure(state, args.cut, alpha), branch="reduced-spectrum")
        else:
            rho = _as_two_qubit_rho(state)
            rec.update(value=renyi_entanglement_two_qubit(rho, alpha, floor=args.floor, strict=args.strict),
                       branch="f_alpha(wootters)")
            rec["conjectural"] = closed_form_status(alpha, args.floor) != "proven"
    elif m == "concurrence":
        if pure:
            rec.update(value=pure_concurrence(state, args.cut), branch="pure-purity")
        else:
            rec.update(value=wootters_concurrence(_as_two_qubit_rho(state)), branch="wootters")
    elif m == "coa":
        rec.update(value=concurrence_of_assistance(_as_two_qubit_rho(state)), branch="lambda-sum")
    elif m == "reoa-bound":
        alpha = _need_alpha(args)
        rec.update(value=reoa_lower_bound(_as_two_qubit_rho(state), alpha, floor=args.floor, strict=args.strict),
                   branch="f_alpha(coa)")
        rec["conjectural"] = closed_form_status(alpha, args.floor) != "proven"
    elif m in ("roof-min", "roof-max"):
        measure = Measure("renyi", args.alpha) if args.alpha is not None else Measure("concurrence")
        budget = RoofBudget(restarts=args.restarts, seed=args.seed)
        fn = convex_roof_min if m == "roof-min" else roof_max
        res = fn(_as_two_qubit_rho(state), measure, budget)
        rec.update(value=res.value, branch=f"oracle:{measure}", converged=res.converged,
                   restarts=res.restarts_run)
    else:
        raise UsageError(f"unknown measure {m!r}")
    if args.alpha is not None:
        rec["formula"] = "shannon" if as_alpha(args.alpha).is_shannon else "renyi"
    return rec


def cmd_eval(args) -> int:
    rec = evaluate(args)
    if args.format == "json":
        print(json.dumps(rec, sort_keys=True))
    else:
        print(fixed12(rec["value"]))
        extras = {k: v for k, v in rec.items() if k not in ("value", "rhs_terms") and v is not None}
        for k in sorted(extras):
            print(f"{k}={extras[k]}")
    return EXIT_NUMERICAL if rec.get("converged") is False else EXIT_OK


# -- check --------------------------------------------------------------------

CHECK_COLUMNS = [
    "inequality", "alpha", "n_qubits", "n_samples", "n_checks", "min_residual", "mean_residual",
    "violations", "numerical_zeros", "unconverged", "worst_sample", "worst_focus", "conjectural",
    "version", "seed", "tolerance",
]


def _summary_rows(summary: ineq.BatchSummary) -> list[dict]:
    rows = []
    for s in summary.per_alpha:
        conj = ""
        if s.alpha is not None:
            if summary.inequality_id == "renyi_monogamy":
                conj = s.alpha < ineq.MONOGAMY_ALPHA_MIN
            else:
                lo, hi = ineq.POLYGAMY_WINDOW
                conj = not as_alpha(s.alpha).is_shannon or not lo <= s.alpha <= hi
        rows.append({
            "inequality": summary.inequality_id,
            "alpha": fmt(s.alpha),
            "n_qubits": summary.n_qubits,
            "n_samples": summary.n_samples,
            "n_checks": s.n_checks,
            "min_residual": fmt(s.min_residual),
            "mean_residual": fmt(s.mean_residual),
            "violations": s.violations,
            "numerical_zeros": s.numerical_zeros,
            "unconverged": s.unconverged,
            "worst_sample": "" if s.worst_seed is None else s.worst_seed,
            "worst_focus": "" if s.worst_focus is None else s.worst_focus,
            "conjectural": str(conj).lower(),
            "version": __version__,
            "seed": summary.seed,
            "tolerance": fmt(summary.tolerance),
        })
    return rows


def _violation_records(summary: ineq.BatchSummary, oracle_rhs: bool, budget) -> list[dict]:
    out = []
    for s in summary.per_alpha:
        for idx, focus in s.violating:
            psi = ineq.sample_state(summary.n_qubits, summary.seed, idx)
            t = ineq._terms(psi, focus)
            rep = ineq._report(summary.inequality_id, t, s.alpha, seed=idx, focus=focus,
                               oracle_rhs=oracle_rhs, budget=budget, check_alpha=False)
            out.append({
                "inequality": summary.inequality_id, "alpha": s.alpha, "sample_index": idx,
                "focus": focus, "seed": summary.seed, "residual": rep.residual, "lhs": rep.lhs,
                "rhs_terms": list(rep.rhs_terms), "state": state_to_json(psi),
            })
    return out


def render_table(rows: list[dict], columns: list[str], output_format: str) -> str:
    if output_format == "json":
        return json.dumps(rows, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def cmd_check(args) -> int:
    inequality_id = args.inequality.replace("-", "_")
    alphas = parse_alphas(args.alpha)
    if inequality_id in ineq.ALPHA_IDS and not alphas:
        raise UsageError(f"check {args.inequality} needs --alpha")
    budget = RoofBudget(restarts=args.restarts) if (inequality_id == "eoa_polygamy" or args.oracle_rhs) else None
    summary = ineq.batch_check(
        inequality_id, alphas, args.n, args.samples, args.seed, focus=args.focus, all_foci=args.all_foci,
        tolerance=args.tol, oracle_rhs=args.oracle_rhs, budget=budget, workers=args.workers,
        floor=args.floor, strict=args.strict,
    )
    _emit(render_table(_summary_rows(summary), CHECK_COLUMNS, args.format), args.out)
    if summary.violations:
        sidecar = args.violations_out or (f"{args.out}.violations.json" if args.out else "renyi-lab-violations.json")
        records = _violation_records(summary, args.oracle_rhs, budget)
        Path(sidecar).write_text(json.dumps(records, indent=1) + "\n")
        print(f"{summary.violations} violation(s); states written to {sidecar}", file=sys.stderr)
        return EXIT_VIOLATION
    if summary.unconverged:
        print(f"{summary.unconverged} oracle evaluation(s) did not converge", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


# -- sweep --------------------------------------------------------------------

SCAN_COLUMNS = ["alpha", "grid_min_or_max", "location_x", "location_y", "verdict", "version", "seed", "tolerance"]
THRESHOLD_COLUMNS = ["kind", "lo", "hi", "width", "iters", "version", "seed", "tolerance"]


def _scan_row(r: sweeps.SweepResult, seed: int) -> dict:
    loc = r.extremal_location
    return {
        "alpha": fmt(r.alpha), "grid_min_or_max": fmt(r.extremal_value), "location_x": fmt(loc[0]),
        "location_y": fmt(loc[1]) if len(loc) > 1 else "", "verdict": r.verdict,
        "version": __version__, "seed": seed, "tolerance": fmt(r.tolerance),
    }


def cmd_sweep(args) -> int:
    kind = args.kind
    if kind in ("convexity-scan", "h-scan", "h-sign-scan"):
        alphas = parse_alphas(args.alpha)
        if not alphas:
            raise UsageError(f"sweep {kind} needs --alpha")
        rows = []
        for al in sorted(alphas):
            if kind == "convexity-scan":
                r = sweeps.convexity_scan(al, args.x_grid, args.tol)
            elif kind == "h-scan":
                r = sweeps.h_nonneg_scan(al, args.radial, args.angular, args.tol)
            else:
                r = sweeps.h_sign_scan(al, args.radial, args.angular, args.tol)
            rows.append(_scan_row(r, args.seed))
        _emit(render_table(rows, SCAN_COLUMNS, args.format), args.out)
        return EXIT_OK

    defaults = {"convexity-threshold": (0.5, 2.0), "polygamy-threshold": (1.0, 2.0), "monogamy-threshold": (1.9, 2.0)}
    lo = args.lo if args.lo is not None else defaults[kind][0]
    hi = args.hi if args.hi is not None else defaults[kind][1]
    if kind == "convexity-threshold":
        res = sweeps.convexity_threshold(lo, hi, args.iters, args.x_grid, args.tol)
    elif kind == "polygamy-threshold":
        res = sweeps.polygamy_threshold(lo, hi, args.iters, args.radial, args.angular, args.tol)
    else:
        res = sweeps.monogamy_threshold(lo, hi, args.iters, args.radial, args.angular, args.tol)
    row = {"kind": res.kind, "lo": fmt(res.lo), "hi": fmt(res.hi), "width": fmt(res.width), "iters": res.iters,
           "version": __version__, "seed": args.seed, "tolerance": fmt(args.tol)}
    _emit(render_table([row], THRESHOLD_COLUMNS, args.format), args.out)
    if args.out:
        print(f"[{fmt(res.lo)}, {fmt(res.hi)}]")
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _cut(text: str) -> list[int]:
    try:
        return [int(k) for k in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad cut {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="renyi-lab", description="Renyi-alpha entanglement toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate one quantity on one state")
    e.add_argument("--state", required=True, help="ghz[:n], w[:n], werner:p, bell, product:n or a JSON file")
    e.add_argument("--measure", required=True, choices=EVAL_MEASURES)
    e.add_argument("--alpha", type=float)
    e.add_argument("--cut", type=_cut, default=[0], help="qubits on one side of the cut (default 0)")
    e.add_argument("--focus", type=int, default=0)
    e.add_argument("--floor", type=float, default=CONJECTURE_ALPHA_FLOOR)
    e.add_argument("--strict", action="store_true", help="error instead of warning below the floor")
    e.add_argument("--oracle-rhs", action="store_true")
    e.add_argument("--restarts", type=int, default=RoofBudget.restarts)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--format", choices=("text", "json"), default="text")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("check", help="Monte-Carlo check of an inequality on Haar-random states")
    c.add_argument("inequality", choices=[i.replace("_", "-") for i in ineq.INEQUALITIES])
    c.add_argument("--alpha", help="comma-separated alpha values")
    c.add_argument("--n", type=int, default=3, help="number of qubits")
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--focus", type=int, default=0)
    c.add_argument("--all-foci", action="store_true")
    c.add_argument("--oracle-rhs", action="store_true")
    c.add_argument("--floor", type=float, default=CONJECTURE_ALPHA_FLOOR)
    c.add_argument("--strict", action="store_true")
    c.add_argument("--tol", type=float, default=ineq.VIOLATION_TOL)
    c.add_argument("--restarts", type=int, default=RoofBudget.restarts)
    c.add_argument("--workers", type=int, help="worker processes (default RENYI_LAB_THREADS or 1)")
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.add_argument("--out")
    c.add_argument("--violations-out", help="sidecar JSON for violating states")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("sweep", help="grid scans and threshold searches")
    s.add_argument("kind", choices=("convexity-scan", "h-scan", "h-sign-scan", "convexity-threshold",
                                    "polygamy-threshold", "monogamy-threshold"))
    s.add_argument("--alpha", help="comma-separated alpha values (scans)")
    s.add_argument("--lo", type=float)
    s.add_argument("--hi", type=float)
    s.add_argument("--iters", type=int, default=20)
    s.add_argument("--x-grid", type=int, default=10_000)
    s.add_argument("--radial", type=int, default=200)
    s.add_argument("--angular", type=int, default=200)
    s.add_argument("--tol", type=float, default=sweeps.SCAN_TOL)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args)
    except (UsageError, BracketError) as exc:
        print(f"renyi-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonMonotoneTransitionError as exc:
        print(f"renyi-lab: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (RenyiLabError, ValueError) as exc:
        print(f"renyi-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
