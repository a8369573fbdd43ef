"""Command-line surface.

Subcommands: thresholds, tomography, classify, compose, simulate.  Primary
output (JSON or CSV) goes to stdout or --output and is byte-identical for
identical inputs and flags; --plot renders a matplotlib figure next to it.

Exit status: 0 success, 2 input validation failure, 3 solver
non-certification, 4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import sys

import numpy as np

from . import __version__
from .errors import CertificationError, InvariantError, ValidationError
from .linalg import hermitian_eigen, process_fidelity, project_psd
from .network import (
    classify,
    paper_thresholds,
    recomputed_thresholds,
    threshold_table,
)
from .optimizer import SolverConfig, SolverResult, maximize_mimicry_fidelity, scan_thresholds
from .records import (
    decode_count_table,
    decode_process_matrix,
    decode_prob_table,
    encode_process_matrix,
    encode_transition_matrix,
    process_matrix_payload,
    write_csv,
)
from .simulator import network_fidelities, noise_sweep, noise_tolerance
from .tomography import (
    DEFAULT_PHI,
    DEFAULT_THETA,
    estimate_conditional_probs,
    ideal_process_matrix,
    process_matrix_from_table,
    rotated_observables,
)


def parse_angle(text: str) -> float:
    """Angle in radians; accepts plain floats and pi expressions like pi/4."""
    try:
        node = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ValidationError(f"cannot parse angle {text!r}") from exc

    def ev(n) -> float:
        if isinstance(n, ast.Expression):
            return ev(n.body)
        if isinstance(n, ast.Constant) and isinstance(n.value, (int, float)):
            return float(n.value)
        if isinstance(n, ast.Name) and n.id == "pi":
            return math.pi
        if isinstance(n, ast.UnaryOp) and isinstance(n.op, (ast.USub, ast.UAdd)):
            v = ev(n.operand)
            return -v if isinstance(n.op, ast.USub) else v
        if isinstance(n, ast.BinOp) and isinstance(
            n.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)
        ):
            a, b = ev(n.left), ev(n.right)
            if isinstance(n.op, ast.Add):
                return a + b
            if isinstance(n.op, ast.Sub):
                return a - b
            if isinstance(n.op, ast.Mult):
                return a * b
            return a / b
        raise ValidationError(f"unsupported token in angle {text!r}")

    return ev(node)


def parse_grid(text: str) -> np.ndarray:
    """Grid spec a:b:n -> n equally spaced points from a to b inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"grid spec must be a:b:n, got {text!r}")
    a, b = parse_angle(parts[0]), parse_angle(parts[1])
    try:
        n = int(parts[2])
    except ValueError as exc:
        raise ValidationError(f"grid count must be an integer, got {parts[2]!r}") from exc
    if n < 1:
        raise ValidationError("grid count must be >= 1")
    if n == 1:
        return np.array([a])
    return np.linspace(a, b, n)


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ": "), indent=2) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        tolerance=args.solver_tolerance,
        max_iterations=args.solver_max_iterations,
        cert_gap=args.cert_gap,
    )


def _solver_summary(res: SolverResult) -> dict:
    return {
        "value": res.value,
        "lp_bound": res.lp_bound,
        "lp_gap": res.lp_gap,
        "cert_bound": res.cert_bound,
        "cert_gap": res.cert_gap,
        "psd_residual": res.psd_residual,
        "polytope_residual": res.polytope_residual,
        "iterations": res.iterations,
        "certified": res.certified,
    }


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solver-tolerance", type=float, default=1e-7,
                   help="PSD/polytope residual tolerance (default 1e-7)")
    p.add_argument("--solver-max-iterations", type=int, default=200000,
                   help="iteration budget (default 200000)")
    p.add_argument("--cert-gap", type=float, default=1e-3,
                   help="certificate gap required for a certified solve (default 1e-3)")


def _add_obs_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theta", type=parse_angle, default=DEFAULT_THETA,
                   help="output-observable rotation theta in radians (default 0)")
    p.add_argument("--phi", type=parse_angle, default=DEFAULT_PHI,
                   help="output-observable rotation phi in radians (default pi/4)")


def cmd_thresholds(args) -> int:
    cfg = _solver_config(args)
    if args.scan:
        if not args.theta_grid or not args.phi_grid:
            raise ValidationError("--scan requires --theta-grid and --phi-grid")
        scan = scan_thresholds(parse_grid(args.theta_grid), parse_grid(args.phi_grid), cfg)
        rows = [[p.theta, p.phi, p.value, p.certified] for p in scan.points]
        _emit(write_csv(["theta", "phi", "f_gc", "certified"], rows), args.output)
        if args.plot:
            from .plots import render_scan_heatmap

            render_scan_heatmap(scan, args.plot)
        if not all(p.certified for p in scan.points):
            raise CertificationError("scan contains non-certified grid points")
        return 0

    ts_paper = paper_thresholds()
    payload = {
        "command": "thresholds",
        "observables": {"theta": args.theta, "phi": args.phi},
        "paper": {
            "thresholds": ts_paper.as_dict(),
            "n_table": threshold_table(args.n_max, ts_paper),
        },
    }
    res = None
    if args.recompute:
        res = maximize_mimicry_fidelity(rotated_observables(args.theta, args.phi), cfg)
        ts_re = recomputed_thresholds(res.chi, res.value)
        payload["recomputed"] = {
            "thresholds": ts_re.as_dict(),
            "n_table": threshold_table(args.n_max, ts_re),
            "solver": _solver_summary(res),
            "chi_gc": process_matrix_payload(
                res.chi,
                {"theta": args.theta, "phi": args.phi, "provenance": "mimicry-optimum"},
            ),
        }
        if args.omega_out:
            with open(args.omega_out, "w") as fh:
                fh.write(
                    encode_transition_matrix(
                        res.omega_star,
                        {"theta": args.theta, "phi": args.phi,
                         "provenance": "mimicry-optimum"},
                    )
                )
    _emit(_dump_json(payload), args.output)
    if res is not None and not res.certified:
        raise CertificationError("threshold recomputation was not certified")
    return 0


def cmd_tomography(args) -> int:
    with open(args.input) as fh:
        text = fh.read()
    adjustment = 0.0
    if args.counts:
        counts = decode_count_table(text)
        table = estimate_conditional_probs(counts)
    else:
        table, adjustment = decode_prob_table(text, renormalize=True)
    obs = rotated_observables(args.theta, args.phi)
    chi = process_matrix_from_table(table, obs)
    min_eig = float(hermitian_eigen(chi).values[0])
    psd = min_eig >= -1e-9
    projected = False
    if args.project_psd and not psd:
        chi = project_psd(chi)
        chi = chi / np.trace(chi).real
        projected = True
        min_eig = float(hermitian_eigen(chi).values[0])
    fid = process_fidelity(chi, ideal_process_matrix())
    metadata = {
        "theta": args.theta,
        "phi": args.phi,
        "provenance": "tomography",
        "fidelity_vs_ideal": fid,
        "psd": bool(psd),
        "min_eigenvalue": min_eig,
        "renormalization_adjustment": adjustment,
        "psd_projected": projected,
    }
    _emit(encode_process_matrix(chi, metadata), args.output)
    return 0


def cmd_classify(args) -> int:
    if args.f12 is None and args.f1given2 is None and args.f112 is None:
        raise ValidationError("classify needs at least one of --f12, --f1given2, --f112")
    if args.thresholds == "paper":
        ts = paper_thresholds()
        solver = None
    else:
        cfg = _solver_config(args)
        res = maximize_mimicry_fidelity(rotated_observables(args.theta, args.phi), cfg)
        ts = recomputed_thresholds(res.chi, res.value)
        solver = res
    verdict = classify(args.f12, args.f1given2, args.f112, ts)
    payload = {"command": "classify", **verdict.as_dict()}
    if solver is not None:
        payload["solver"] = _solver_summary(solver)
    _emit(_dump_json(payload), args.output)
    if solver is not None and not solver.certified:
        raise CertificationError("threshold recomputation was not certified")
    return 0


def cmd_compose(args) -> int:
    from .network import compose

    chis = []
    for path in args.chain:
        with open(path) as fh:
            chi, _ = decode_process_matrix(fh.read())
        chis.append(chi)
    out = chis[0]
    for chi in chis[1:]:
        out = compose(out, chi)
    fid = process_fidelity(out, ideal_process_matrix())
    metadata = {
        "provenance": "compose",
        "chain_length": len(chis),
        "fidelity_vs_ideal": fid,
    }
    _emit(encode_process_matrix(out, metadata), args.output)
    return 0


def cmd_simulate(args) -> int:
    links = [float(x) for x in args.links.split(",") if x.strip() != ""]
    if not links:
        raise ValidationError("--links needs at least one noise value")
    obs = rotated_observables(args.theta, args.phi)
    if args.thresholds == "paper":
        ts = paper_thresholds()
    else:
        cfg = _solver_config(args)
        res = maximize_mimicry_fidelity(obs, cfg)
        ts = recomputed_thresholds(res.chi, res.value)

    if args.tolerance_curve:
        if not args.criterion:
            raise ValidationError("--tolerance-curve requires --criterion")
        rows = noise_tolerance(args.criterion, list(range(1, args.max_n + 1)), obs, ts)
        csv_rows = [[r.criterion, r.n, r.threshold, r.p_star, r.saturated] for r in rows]
        _emit(
            write_csv(["criterion", "n", "threshold", "p_star", "saturated"], csv_rows),
            args.output,
        )
        if args.plot:
            from .plots import render_tolerance_curve

            render_tolerance_curve(rows, args.plot)
        return 0

    if args.grid:
        if len(links) != 2:
            raise ValidationError(
                "the noise sweep is defined for the two-link network; "
                "pass exactly two --links values"
            )
        sweep = noise_sweep(parse_grid(args.grid), obs, ts)
        header = [
            "p", "f_expt12", "f_expt1given2", "f_expt112",
            "bell_nonlocal", "nonbilocal", "steering", "nonlocality_steering",
            "band_expt12", "band_expt1given2",
        ]
        rows = [
            [r.p, r.f_expt12, r.f_expt1given2, r.f_expt112,
             r.bell_nonlocal, r.nonbilocal, r.steering, r.nonlocality_steering,
             r.band_expt12, r.band_expt1given2]
            for r in sweep.rows
        ]
        _emit(write_csv(header, rows), args.output)
        if args.crossings_out:
            payload = {
                name: {"p_star": p_star, "saturated": saturated}
                for name, (p_star, saturated) in sweep.crossings.items()
            }
            with open(args.crossings_out, "w") as fh:
                fh.write(_dump_json(payload))
        if args.plot:
            from .plots import render_noise_sweep

            render_noise_sweep(sweep, ts, args.plot)
        return 0

    report = network_fidelities(links, obs)
    header = [
        "n_links", "links", "f_1_given_n", "f_11n", "f_end_to_end",
        "f_expt12", "f_expt1given2", "f_expt112",
    ]
    row = [
        len(report.links),
        ";".join(repr(p) for p in report.links),
        report.f_1_given_n,
        report.f_11n,
        report.f_end_to_end,
        report.f_expt12 if report.f_expt12 is not None else "",
        report.f_expt1given2 if report.f_expt1given2 is not None else "",
        report.f_expt112 if report.f_expt112 is not None else "",
    ]
    _emit(write_csv(header, [row]), args.output)
    if args.chi_out:
        for k, chi in enumerate(report.chi_links, start=1):
            with open(f"{args.chi_out}{k}.json", "w") as fh:
                fh.write(
                    encode_process_matrix(
                        chi,
                        {"theta": args.theta, "phi": args.phi,
                         "provenance": f"simulated-link-{k}",
                         "noise": report.links[k - 1]},
                    )
                )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="telecert",
        description="Certify teleportation-network processes against "
        "classical-mimicry fidelity thresholds.",
    )
    parser.add_argument("--version", action="version", version=f"telecert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", help="threshold table, recomputation, (theta, phi) scan")
    _add_obs_flags(p)
    p.add_argument("--scan", action="store_true", help="scan a (theta, phi) grid")
    p.add_argument("--theta-grid", help="grid spec a:b:n for theta (radians, pi allowed)")
    p.add_argument("--phi-grid", help="grid spec a:b:n for phi")
    p.add_argument("--recompute", action="store_true",
                   help="recompute thresholds with the mimicry optimiser")
    p.add_argument("--n-max", type=int, default=4, help="tabulate N-link bounds up to N")
    p.add_argument("--omega-out", help="write the optimiser's transition matrix here")
    p.add_argument("--output", help="write primary output to this file (default stdout)")
    p.add_argument("--plot", help="render a figure (scan heatmap) to this file")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("tomography", help="process matrix from a table or counts file")
    p.add_argument("--input", required=True, help="JSON table file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--counts", action="store_true", help="input holds raw tallies")
    group.add_argument("--probs", action="store_true", help="input holds probabilities")
    _add_obs_flags(p)
    p.add_argument("--project-psd", action="store_true",
                   help="project a non-PSD reconstruction onto the PSD cone (recorded)")
    p.add_argument("--output", help="write the record to this file (default stdout)")
    p.set_defaults(func=cmd_tomography)

    p = sub.add_parser("classify", help="hierarchy verdict for experimental fidelities")
    p.add_argument("--f12", type=float, help="end-to-end process fidelity")
    p.add_argument("--f1given2", type=float, help="per-link composed process fidelity")
    p.add_argument("--f112", type=float, help="chained verifier-side fidelity")
    p.add_argument("--thresholds", choices=["paper", "recomputed"], default="paper")
    _add_obs_flags(p)
    p.add_argument("--output", help="write the verdict to this file (default stdout)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("compose", help="chain process-matrix records")
    p.add_argument("--chain", nargs="+", required=True, metavar="FILE",
                   help="process-matrix records, applied left to right")
    p.add_argument("--output", help="write the composed record here (default stdout)")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("simulate", help="noisy-network fidelities, sweeps, tolerance curves")
    p.add_argument("--links", required=True,
                   help="comma-separated white-noise intensities, one per link")
    p.add_argument("--grid", help="common-noise grid a:b:n for the two-link sweep")
    p.add_argument("--tolerance-curve", action="store_true",
                   help="bisect the critical noise per link count")
    p.add_argument("--criterion", choices=["exptN", "expt11N"],
                   help="which N-link fidelity the tolerance curve uses")
    p.add_argument("--max-n", type=int, default=5, help="largest link count (default 5)")
    p.add_argument("--thresholds", choices=["paper", "recomputed"], default="paper")
    _add_obs_flags(p)
    p.add_argument("--chi-out", metavar="PREFIX",
                   help="write per-link process-matrix records to PREFIX<k>.json")
    p.add_argument("--crossings-out", help="write sweep threshold crossings (JSON) here")
    p.add_argument("--output", help="write primary output to this file (default stdout)")
    p.add_argument("--plot", help="render a figure for the sweep or tolerance curve")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CertificationError as exc:
        print(f"not certified: {exc}", file=sys.stderr)
        return 3
    except InvariantError as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
