"""Command-line front end.

Exit status: 0 on success, 1 for validation or physics errors (a JSON
object with an ``error_kind`` field goes to stderr), 2 for usage errors
such as bad flags or unreadable files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import extremal, quasiprob, reconstruct, simulate
from .errors import QPCalcError
from .hilbert import DEFAULT_TOL, Seed, as_seed, validate_projector
from .jsonio import (
    decode_matrix,
    dumps,
    load_pvm,
    load_state,
    load_table,
    read_json,
    state_to_dict,
    table_to_dict,
)

KIND_NAMES = {"mh": "margenau_hill", "kd": "kirkwood_dirac", "wigner": "wigner_rule"}
WITNESS_TOL = 1e-10


class UsageError(Exception):
    def __init__(self, kind: str, message: str) -> None:
        super().__init__(message)
        self.kind = kind
        self.message = message


def _global_flags(parser: argparse.ArgumentParser, defaults: dict | None) -> None:
    # subcommands repeat the global flags with suppressed defaults so either position works
    def kw(name: str) -> dict:
        return {"default": defaults[name] if defaults else argparse.SUPPRESS}

    parser.add_argument("--tol", type=float, help="validation tolerance for loaded files (default 1e-9)", **kw("tol"))
    parser.add_argument("--seed", type=int, help="default seed for random procedures (default 0)", **kw("seed"))
    parser.add_argument("--json-only", action="store_true", help="print only the JSON document on stdout",
                        **kw("json_only"))


GLOBAL_DEFAULTS = {"tol": DEFAULT_TOL, "seed": 0, "json_only": False}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpcalc", description="Quasi-probabilities for successive yes-no measurements."
    )
    _global_flags(parser, GLOBAL_DEFAULTS)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        _global_flags(p, None)
        return p

    p = add("validate", "validate state and PVM files")
    p.add_argument("paths", nargs="+")

    p = add("quasiprob", "tabulate a quasi-probability over two PVMs")
    p.add_argument("state")
    p.add_argument("pvm_a")
    p.add_argument("pvm_b")
    p.add_argument("--kind", choices=sorted(KIND_NAMES), default="mh")
    p.add_argument("--out")

    p = add("reconstruct", "rebuild a state from a Kirkwood-Dirac table")
    p.add_argument("table")
    p.add_argument("pvm_a")
    p.add_argument("pvm_b")
    p.add_argument("--eta", type=float, default=reconstruct.DEFAULT_ETA)
    p.add_argument("--out")

    p = add("simulate", "run a measurement simulation from a config file")
    p.add_argument("config")
    p.add_argument("--out")

    p = add("bounds", "sample and refine the Margenau-Hill extremes")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--refine-budget", type=int, default=0)
    p.add_argument("--mixed", action="store_true")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--out")
    return parser


# -- helpers -----------------------------------------------------------------


def _read(path: str) -> Any:
    try:
        return read_json(path)
    except FileNotFoundError:
        raise UsageError("FileNotFound", f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError("InvalidJSON", f"{path}: {exc}") from None


def _emit(args, payload: dict, text: str) -> None:
    doc = dumps(payload)
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(doc)
    if args.json_only:
        sys.stdout.write(doc)
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _fmt(z: complex, complex_mode: bool) -> str:
    if complex_mode:
        return f"{z.real:+.6f}{z.imag:+.6f}i"
    return f"{z.real:+.6f}"


def _format_table(values: np.ndarray, complex_mode: bool) -> str:
    cells = [[_fmt(v, complex_mode) for v in row] for row in values]
    width = max(len(c) for row in cells for c in row)
    header = " " * 6 + " ".join(f"{'b' + str(j):>{width}}" for j in range(values.shape[1]))
    lines = [header]
    for i, row in enumerate(cells):
        lines.append(f"{'a' + str(i):<6}" + " ".join(f"{c:>{width}}" for c in row))
    return "\n".join(lines)


def _operator(entry, base: Path, tol: float, what: str):
    """Inline matrix, ``{"dim", "matrix"}`` object, or a path to either."""
    if isinstance(entry, str):
        entry = _read(str(base / entry))
    if isinstance(entry, dict):
        entry = entry["matrix"]
    if what == "state":
        return load_state({"matrix": entry}, tol)
    return validate_projector(decode_matrix(entry), tol)


# -- commands ----------------------------------------------------------------


def cmd_validate(args) -> int:
    results, status = [], 0
    for path in args.paths:
        obj = _read(path)
        entry: dict[str, Any] = {"path": path}
        try:
            if isinstance(obj, dict) and ("projectors" in obj or "basis" in obj):
                entry["type"] = "pvm"
                pvm = load_pvm(obj, args.tol)
                entry.update(dim=pvm.dim, outcomes=len(pvm), rank_one=pvm.rank_one)
            elif isinstance(obj, dict) and "matrix" in obj:
                entry["type"] = "state"
                rho = load_state(obj, args.tol)
                entry.update(dim=rho.dim, purity=rho.purity())
            else:
                raise UsageError("UnknownFileType", f"{path}: not a state or PVM file")
            entry["ok"] = True
        except QPCalcError as exc:
            entry.update(ok=False, **exc.to_dict())
            sys.stderr.write(json.dumps({"path": path, **_json_safe(exc.to_dict())}) + "\n")
            status = 1
        results.append(entry)

    lines = []
    for e in results:
        if e["ok"]:
            lines.append(f"{e['path']}: OK {e['type']} dim={e['dim']}")
        else:
            lines.append(f"{e['path']}: FAIL {e['error_kind']} violation={e.get('value')}")
    _emit(args, {"results": results}, "\n".join(lines))
    return status


def cmd_quasiprob(args) -> int:
    rho = load_state(_read(args.state), args.tol)
    pa = load_pvm(_read(args.pvm_a), args.tol)
    pb = load_pvm(_read(args.pvm_b), args.tol)
    builder = {"mh": quasiprob.mh_table, "kd": quasiprob.kd_table, "wigner": quasiprob.wigner_table}
    table = builder[args.kind](rho, pa, pb)
    vals = table.values
    summary = {
        "violations": table.violations(),
        "min_entry": table.min_entry(),
        "max_abs_imag": table.max_imag(),
        "negative_entries": int(np.sum(vals.real < -WITNESS_TOL)),
        "imaginary_entries": int(np.sum(np.abs(vals.imag) > WITNESS_TOL)),
    }
    summary["nonclassical"] = summary["negative_entries"] > 0 or summary["imaginary_entries"] > 0
    payload = {**table_to_dict(table), "summary": summary}

    v = summary["violations"]
    text = [
        f"{table.kind} table ({len(pa)} x {len(pb)}, dim {rho.dim})",
        _format_table(vals, args.kind == "kd"),
        f"total = {table.total.real:.12f}",
        f"row-marginal error = {v['row_marginals']:.3e}, column-marginal error = {v['col_marginals']:.3e}",
        f"min entry = {summary['min_entry']:.12f}",
        f"nonclassicality witnesses: {summary['negative_entries']} negative, "
        f"{summary['imaginary_entries']} imaginary",
    ]
    _emit(args, payload, "\n".join(text))
    return 0


def cmd_reconstruct(args) -> int:
    pa = load_pvm(_read(args.pvm_a), args.tol)
    pb = load_pvm(_read(args.pvm_b), args.tol)
    table = load_table(_read(args.table), pa, pb)
    overlap = reconstruct.completeness_check(pa, pb, args.eta)
    rho = reconstruct.reconstruct_state(table, pa, pb, args.eta)
    payload = {
        **state_to_dict(rho),
        "conditioning": {"min_overlap": overlap.min_abs, "argmin": list(overlap.argmin),
                         "well_conditioned": overlap.well_conditioned},
    }
    with np.printoptions(precision=6, suppress=True):
        text = f"min |<a_i|b_j>| = {overlap.min_abs:.6f} at {overlap.argmin}\n{rho.matrix}"
    _emit(args, payload, text)
    return 0


def cmd_simulate(args) -> int:
    cfg = _read(args.config)
    base = Path(args.config).resolve().parent
    try:
        rho = _operator(cfg["state"], base, args.tol, "state")
        a = _operator(cfg["alpha"], base, args.tol, "projector")
        b = _operator(cfg["beta"], base, args.tol, "projector")
        n = int(cfg["n"])
    except KeyError as exc:
        raise UsageError("InvalidConfig", f"config is missing {exc}") from None
    seed = as_seed(cfg["seed"]) if "seed" in cfg else Seed(args.seed)
    shards = int(cfg.get("shards", 1))
    mode = cfg.get("mode", "weak" if "model" in cfg else "projective")
    if mode == "projective":
        report = simulate.sample_projective_sequence(rho, a, b, n, seed, shards=shards)
    elif mode == "disturbance":
        report = simulate.estimate_disturbance(rho, a, b, n, seed, shards=shards)
    elif mode == "weak":
        if "model" not in cfg:
            raise UsageError("InvalidConfig", 'weak mode needs "model": {"sigma": ...}')
        model = simulate.PointerModel(float(cfg["model"]["sigma"]))
        report = simulate.sample_weak_pointer(rho, a, b, model, n, seed, shards=shards)
    else:
        raise UsageError("InvalidConfig", f"unknown mode {mode!r}")

    payload = report.to_dict()
    lines = [f"{report.kind} simulation, n = {report.n}, seed = {seed.value}/{seed.stream}"]
    for name, est in report.estimates.items():
        line = f"  {name:<16} {est:.6f} +/- {report.standard_errors[name]:.6f}"
        if name in report.exact:
            line += f"   exact {report.exact[name]:.6f}   z = {report.z_score(name):+.2f}"
        lines.append(line)
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_bounds(args) -> int:
    report = extremal.scan_bounds(
        args.dim, args.samples, Seed(args.seed), mixed=args.mixed, rank=args.rank, shards=args.shards
    )
    if args.refine_budget > 0:
        refined = extremal.refine_minimum(report.min_config, args.refine_budget, Seed(args.seed, 1))
        report = report.with_refined(refined)
    lines = [
        f"dim {report.dim}, {report.n_samples} samples, seed {args.seed}",
        f"min = {report.min_config.value:.12f} (bound -0.125)",
        f"max = {report.max_config.value:.12f} (bound 1)",
    ]
    if report.refined is not None:
        lines.append(f"refined min = {report.refined.value:.12f}")
    _emit(args, report.to_dict(), "\n".join(lines))
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "quasiprob": cmd_quasiprob,
    "reconstruct": cmd_reconstruct,
    "simulate": cmd_simulate,
    "bounds": cmd_bounds,
}


def _json_safe(d: dict) -> dict:
    return json.loads(dumps(d))


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except QPCalcError as exc:
        sys.stderr.write(json.dumps(_json_safe(exc.to_dict())) + "\n")
        return 1
    except UsageError as exc:
        sys.stderr.write(json.dumps({"error_kind": exc.kind, "message": exc.message}) + "\n")
        return 2
    except (ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(json.dumps({"error_kind": "InvalidInput", "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
