"""Command-line front end: ``l1coherence {measure,verify,region,scan,generate}``.

Exit codes: 0 success, 2 parse or validation failure, 3 robustness solver did
not converge, 4 output path not writable, 5 a bound or the conjecture failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import bounds, conjecture, measures
from .core import CoherenceError, ConvergenceError, as_density, as_pure, maximally_coherent, random_density

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_CONVERGENCE = 3
EXIT_UNWRITABLE = 4
EXIT_VIOLATION = 5

GENERATE_GRAMMAR = (
    "max:<d> | iso:<b>:<d> | prop6:<b>:<d> | extremal-min:<b>:<d> | extremal-max:<b> | random:<d>:<rank>:<seed>"
)
CSV_HEADER = ["type", "index", "b", "lower", "upper", "c_l1", "c_r", "c_robustness", "d", "kind", "seed", "in_region"]


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt(x) -> str:
    """12 significant digits; empty for a missing value."""
    return "" if x is None else f"{float(x) + 0.0:.12g}"


def _round(obj):
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(f"{x + 0.0:.12g}") if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj), indent=2) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}", EXIT_UNWRITABLE) from None


# --- state files ------------------------------------------------------------


def state_to_json(m: np.ndarray, label: str = "") -> dict:
    m = np.asarray(m)
    out = {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}
    if label:
        out["label"] = label
    return out


def parse_state(data) -> np.ndarray:
    """Density matrix from a decoded state file; a vector form is a pure state."""
    if not isinstance(data, dict):
        raise CliError("state file must hold a JSON object with keys dim, re, im", EXIT_INVALID)
    missing = [k for k in ("dim", "re", "im") if k not in data]
    if missing:
        raise CliError(f"state file is missing key(s): {', '.join(missing)}", EXIT_INVALID)
    try:
        dim = int(data["dim"])
        re = np.array(data["re"], dtype=float)
        im = np.array(data["im"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise CliError(f"state file has non-numeric entries: {exc}", EXIT_INVALID) from None
    if re.shape != im.shape:
        raise CliError(f"re has shape {re.shape} but im has shape {im.shape}", EXIT_INVALID)
    if re.shape in ((dim,), (1, dim)):
        psi = as_pure((re + 1j * im).reshape(-1))
        return np.outer(psi, psi.conj())
    if re.shape != (dim, dim):
        raise CliError(f"expected re/im of shape ({dim}, {dim}) or ({dim},), got {re.shape}", EXIT_INVALID)
    return as_density(re + 1j * im)


def load_state(path: str) -> np.ndarray:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_INVALID) from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}", EXIT_INVALID) from None
    return parse_state(data)


def generate_state(spec: str) -> tuple[np.ndarray, bool]:
    """State for a generator spec; the flag says whether to write vector form."""
    parts = spec.split(":")
    head, args = parts[0], parts[1:]
    arity = {"max": 1, "iso": 2, "prop6": 2, "extremal-min": 2, "extremal-max": 1, "random": 3}
    if head not in arity or len(args) != arity[head]:
        raise CliError(f"malformed generator spec {spec!r}; expected {GENERATE_GRAMMAR}", EXIT_INVALID)
    try:
        if head == "max":
            return maximally_coherent(int(args[0])), True
        if head == "iso":
            return bounds.isotropic_like_state(float(args[0]), int(args[1])), False
        if head == "prop6":
            return bounds.prop6_state(float(args[0]), int(args[1])), False
        if head == "extremal-min":
            return bounds.extremal_pure_min(float(args[0]), int(args[1])), True
        if head == "extremal-max":
            return bounds.extremal_pure_max(float(args[0])), True
        d, rank, seed = (int(a) for a in args)
        return random_density(d, rank, seed), False
    except ValueError as exc:
        if isinstance(exc, CoherenceError):
            raise
        raise CliError(f"malformed generator spec {spec!r} ({exc}); expected {GENERATE_GRAMMAR}", EXIT_INVALID) from None


def _input_state(args) -> tuple[np.ndarray, str]:
    if (args.state_file is None) == (args.generate is None):
        raise CliError("give exactly one of a state file or --generate <spec>", EXIT_INVALID)
    if args.generate is not None:
        v, is_vec = generate_state(args.generate)
        return (np.outer(v, v.conj()) if is_vec else as_density(v)), args.generate
    return load_state(args.state_file), args.state_file


# --- commands ---------------------------------------------------------------


def cmd_generate(args) -> int:
    v, is_vec = generate_state(args.spec)
    _emit(dumps(state_to_json(v, args.spec)), args.out)
    return EXIT_OK


def cmd_measure(args) -> int:
    m, _ = _input_state(args)
    report = {"c_l1": measures.c_l1(m), "c_r": measures.c_r(m), "c_log": measures.c_log(m)}
    code = EXIT_OK
    if args.sdp:
        try:
            sol = measures.c_robustness(m, tol=args.tol)
        except ConvergenceError as exc:
            report["c_robustness"] = {"available": False, "lower": exc.lower, "upper": exc.upper, "message": str(exc)}
            code = EXIT_NO_CONVERGENCE
        else:
            report["c_robustness"] = {"value": sol.value, "gap": sol.gap, "iterations": sol.iterations}
    if args.roof is not None:
        if m.shape[0] == 2:
            dec = measures.convex_roof_qubit(m)
        else:
            dec = measures.convex_roof_upper(m, restarts=args.roof)
        report["convex_roof"] = {
            "value": dec.achieved_value,
            "components": [
                {"weight": w, "re": s.real.tolist(), "im": s.imag.tolist()} for w, s in dec.components
            ],
        }
    sys.stdout.write(dumps(report))
    return code


def cmd_verify(args) -> int:
    m, state_id = _input_state(args)
    rep = bounds.evaluate_all_bounds(m, with_sdp=args.sdp, state_id=state_id)
    cert = conjecture.certify(m)
    out = io.StringIO()
    out.write(f"state {state_id}  d={rep.d}  c_l1={fmt(rep.c_l1)}  c_r={fmt(rep.c_r)}")
    if rep.c_robustness is not None:
        out.write(f"  c_robustness={fmt(rep.c_robustness)}")
    out.write("\n")
    for r in rep.records:
        status = "PASS" if r.satisfied else "FAIL"
        out.write(
            f"{r.name:40s} lower={fmt(r.lower) or '-':>16s} upper={fmt(r.upper) or '-':>16s} "
            f"value={fmt(r.value):>16s} slack={fmt(r.slack):>16s} {status}\n"
        )
    for note in rep.notes:
        out.write(f"note: {note}\n")
    out.write(f"conjecture {cert.verdict.value} margin={fmt(cert.margin)} ({cert.details})\n")
    sys.stdout.write(out.getvalue())
    if args.sdp and rep.c_robustness is None:
        return EXIT_NO_CONVERGENCE
    if not rep.all_satisfied or cert.verdict is conjecture.Verdict.NUMERICALLY_VIOLATED:
        return EXIT_VIOLATION
    return EXIT_OK


def region_csv(kind: str, d: int, samples: int, curve_points: int, seed: int, sdp: bool) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for i, (b, lo, hi) in enumerate(conjecture.boundary_curves(kind, d, curve_points)):
        w.writerow(["curve", i, fmt(b), fmt(lo), fmt(hi), "", "", "", d, kind, "", ""])
    for s in conjecture.region_scan(d, samples, kind, seed, with_sdp=sdp):
        w.writerow(
            ["sample", s.index, "", "", "", fmt(s.c_l1), fmt(s.c_r), fmt(s.c_robustness), d, kind, seed,
             "true" if s.in_region else "false"]
        )
    return out.getvalue()


def cmd_region(args) -> int:
    d = args.d
    if args.kind == "qubit":
        d = 2 if d is None else d
        if d != 2:
            raise CliError(f"--kind qubit needs --d 2, got {d}", EXIT_INVALID)
    elif d is None:
        raise CliError(f"--kind {args.kind} needs --d", EXIT_INVALID)
    if d < 2 or args.samples < 0 or args.curve_points < 0:
        raise CliError("--d must be >= 2 and counts must be non-negative", EXIT_INVALID)
    text = region_csv(args.kind, d, args.samples, args.curve_points, args.seed, args.sdp)
    _emit(text, args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.d_max < 2 or args.per_dim < 0:
        raise CliError("--d-max must be >= 2 and --per-dim non-negative", EXIT_INVALID)
    camp = conjecture.run_campaign(args.d_max, args.per_dim, args.seed)
    summary = {
        "d_max": args.d_max,
        "per_dim": args.per_dim,
        "seed": args.seed,
        "n_states": camp.n_states,
        "min_margin": camp.min_margin,
        "verdicts": dict(sorted(camp.verdicts.items())),
        "states_per_dim": {str(d): n for d, n in camp.per_dim.items()},
        "violations": camp.violations,
        "ordering_witness": camp.ordering_witness,
    }
    _emit(dumps(summary), args.out)
    return EXIT_VIOLATION if camp.violations else EXIT_OK


# --- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="l1coherence", description="Coherence measures and their inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    def state_args(p):
        p.add_argument("state_file", nargs="?", help="JSON state file {dim, re, im[, label]}")
        p.add_argument("--generate", metavar="SPEC", help=f"use a generated state: {GENERATE_GRAMMAR}")

    p = sub.add_parser("measure", help="print c_l1, c_r, c_log and optional robustness / convex roof as JSON")
    state_args(p)
    p.add_argument("--sdp", action="store_true", help="also compute the robustness of coherence")
    p.add_argument("--tol", type=float, default=1e-7, help="robustness duality-gap tolerance")
    p.add_argument("--roof", type=int, metavar="N", help="convex roof upper bound with N restarts")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("verify", help="check every applicable inequality and certify the conjecture")
    state_args(p)
    p.add_argument("--sdp", action="store_true", help="include robustness-based inequalities")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("region", help="boundary curves and random samples as CSV")
    p.add_argument("--d", type=int)
    p.add_argument("--kind", choices=["pure", "qubit", "mixed"], default="pure")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--curve-points", type=int, default=101)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sdp", action="store_true", help="compute robustness for each sample")
    p.add_argument("--out")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("scan", help="randomized conjecture campaign, JSON summary")
    p.add_argument("--d-max", type=int, default=4)
    p.add_argument("--per-dim", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("generate", help="write a state file")
    p.add_argument("spec", help=GENERATE_GRAMMAR)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except CoherenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE if isinstance(exc, ConvergenceError) else EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
