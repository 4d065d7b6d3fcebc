"""Command-line interface.

Every command reads a POVM (or cloning machine) from a JSON file or a named
preset and writes JSON or CSV to stdout or ``--out``. Exit status is 0 on
success, 1 when the input violates a domain condition (invalid POVM, failed
inequality, non-reconstructive direction) and 2 on I/O or parse errors.
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

from . import extreal
from .accuracy import accuracy_matrix, accuracy_parameter, fisher_matrix, fisher_directional, is_optimal, is_symmetric
from .cloning import CloningMachine, cloning_parameters, machine_preset
from .estimation import simulate_trajectories
from .povm import (
    POVM_TOL,
    Povm,
    PovmError,
    minimal_tomography_povm,
    projection_povm,
    standard_tomography_povm,
    trivial_povm,
    validate_povm,
)
from .reconstruction import reconstruction_json
from .tradeoff import accessible_region, equality_povm, pairwise_tradeoff, triple_tradeoff

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2
TOL_ENV = "ACCURACY_MATRIX_TOL"
TOL_RANGE = (0.0, 1e-2)

FIG2_AXES = ((0.0, 0.0, 1.0), (0.5, 0.0, math.sqrt(3.0) / 2.0))
FIG2_STATE = (1.0, 0.0, 0.0)


class UsageError(Exception):
    """Bad flags, unreadable files or malformed input (exit 2)."""


def _preset(name: str) -> Povm:
    if name.startswith("projection:"):
        axis = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}.get(name.split(":", 1)[1])
        if axis is None:
            raise UsageError(f"unknown projection axis in {name!r}")
        return projection_povm(axis)
    table = {
        "tomography:standard": standard_tomography_povm,
        "tomography:minimal": minimal_tomography_povm,
        "equality:fig2": lambda: equality_povm(FIG2_AXES[0], FIG2_AXES[1], 0.1, 36.0 / 37.0),
        "trivial": trivial_povm,
    }
    if name not in table:
        raise UsageError(f"unknown preset {name!r}; choose from projection:x|y|z, {', '.join(table)}")
    return table[name]()


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_povm(args) -> Povm:
    if args.preset:
        return _preset(args.preset)
    if not args.povm:
        raise UsageError("one of --povm or --preset is required")
    try:
        return Povm.from_json(_read_json(args.povm))
    except PovmError as exc:
        raise UsageError(str(exc)) from exc


def parse_vector(text: str) -> np.ndarray:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected x,y,z but got {text!r}") from exc
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three components, got {len(parts)}")
    return np.array(parts)


def resolve_tol(flag: float | None) -> float:
    """``--tol`` if given, else ``$ACCURACY_MATRIX_TOL``, else the library default."""
    if flag is not None:
        tol = flag
    elif os.environ.get(TOL_ENV):
        try:
            tol = float(os.environ[TOL_ENV])
        except ValueError as exc:
            raise UsageError(f"{TOL_ENV} is not a number") from exc
    else:
        return POVM_TOL
    if not TOL_RANGE[0] < tol <= TOL_RANGE[1]:
        raise UsageError(f"tolerance must lie in ({TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}], got {tol:g}")
    return tol


def _g(x: float) -> str:
    return extreal.fmt(float(x))


def _emit(args, text: str) -> None:
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)


def _emit_json(args, payload) -> None:
    _emit(args, json.dumps(payload, indent=2, allow_nan=False) + "\n")


def _emit_csv(args, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _emit(args, buf.getvalue())


def _require(args, name: str):
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"--{name} is required for '{args.command}'")
    return value


def cmd_validate(args) -> int:
    try:
        p = load_povm(args)
    except UsageError:
        # structurally valid JSON with bad numbers still gets a report
        if args.povm and not args.preset:
            data = _read_json(args.povm)
            try:
                pairs = [(el["r"], el["v"]) for el in data["elements"]]
            except (KeyError, TypeError) as exc:
                raise UsageError(f"malformed POVM JSON: {exc}") from exc
            report = validate_povm(pairs, args.tol)
            _emit_json(args, report.to_json())
            return EXIT_OK if report.valid else EXIT_DOMAIN
        raise
    report = validate_povm(p, args.tol)
    _emit_json(args, report.to_json())
    return EXIT_OK if report.valid else EXIT_DOMAIN


def cmd_accuracy(args) -> int:
    p = load_povm(args).require_valid(args.tol)
    a = accuracy_matrix(p)
    out = a.to_json()
    out["optimal"] = is_optimal(p)
    out["symmetric"] = is_symmetric(p)
    out["directions"] = []
    for n in args.direction or []:
        entry = accuracy_parameter(a, n).to_json()
        entry["direction"] = n.tolist()
        out["directions"].append(entry)
    _emit_json(args, out)
    return EXIT_OK


def cmd_tradeoff(args) -> int:
    p = load_povm(args).require_valid(args.tol)
    dirs = args.direction or []
    if len(dirs) not in (2, 3):
        raise UsageError("tradeoff needs two or three --direction flags")
    report = pairwise_tradeoff(p, *dirs) if len(dirs) == 2 else triple_tradeoff(p, *dirs)
    out = report.to_json()
    out["kind"] = "pairwise" if len(dirs) == 2 else "triple"
    _emit_json(args, out)
    return EXIT_OK if report.satisfied else EXIT_DOMAIN


def cmd_region(args) -> int:
    theta = _require(args, "theta")
    rows = accessible_region(theta, args.grid)
    _emit_csv(args, ["chiA", "chiB", "feasible", "region_label"],
              [(_g(a), _g(b), int(f), label) for a, b, f, label in rows])
    return EXIT_OK


def _crb(p: Povm, state, n, n_samples: int) -> float:
    # boundary states can make an informative outcome impossible; report inf then
    try:
        info = fisher_directional(fisher_matrix(p, state), n)
    except PovmError:
        return math.inf
    return 0.5 * math.sqrt(1.0 / (n_samples * info)) if info > 0.0 else math.inf


def cmd_estimate(args) -> int:
    p = load_povm(args).require_valid(args.tol)
    fig2 = args.preset == "equality:fig2"
    state = args.state if args.state is not None else (np.array(FIG2_STATE) if fig2 else None)
    if state is None:
        raise UsageError("--state is required for 'estimate'")
    dirs = args.direction or ([np.array(d) for d in FIG2_AXES] if fig2 else None)
    if not dirs:
        raise UsageError("at least one --direction is required for 'estimate'")
    if args.n < 8:
        raise UsageError("--n must be at least 8")
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    trajectories = simulate_trajectories(p, state, args.n, args.trials, dirs, args.seed)
    crb = {}
    rows = []
    for tr in trajectories:
        for point in tr.points:
            for j, est in enumerate(point.p_plus):
                key = (point.n, j)
                if key not in crb:
                    crb[key] = _crb(p, state, dirs[j], point.n)
                rows.append((tr.trial, point.n, j, _g(est), _g(crb[key])))
    _emit_csv(args, ["trial", "N", "direction_index", "p_plus_estimate", "crb_std"], rows)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    p = load_povm(args).require_valid(args.tol)
    if args.probs is None:
        raise UsageError("--probs is required for 'reconstruct'")
    try:
        q = [float(x) for x in args.probs.split(",")]
    except ValueError as exc:
        raise UsageError(f"--probs: {exc}") from exc
    results = [reconstruction_json(p, q, n) for n in args.direction or []]
    _emit_json(args, {"directions": results})
    return EXIT_OK if all(r["reconstructive"] for r in results) else EXIT_DOMAIN


def cmd_clone(args) -> int:
    if args.machine:
        try:
            machine = CloningMachine.from_json(_read_json(args.machine))
        except PovmError as exc:
            raise UsageError(str(exc)) from exc
    else:
        name = args.preset or "universal"
        try:
            machine = machine_preset(name)
        except (PovmError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
    report = cloning_parameters(machine, args.order)
    _emit_json(args, report.to_json())
    return EXIT_DOMAIN if report.satisfied is False else EXIT_OK


COMMANDS = {
    "validate": (cmd_validate, "check positivity and completeness of a POVM"),
    "accuracy": (cmd_accuracy, "accuracy matrix and per-direction accuracy/error"),
    "tradeoff": (cmd_tradeoff, "pairwise or triple trade-off check"),
    "region": (cmd_region, "accessible (chiA, chiB) region as CSV"),
    "estimate": (cmd_estimate, "simulated maximum-likelihood trajectories as CSV"),
    "reconstruct": (cmd_reconstruct, "direction distributions from outcome probabilities"),
    "clone": (cmd_clone, "cloning parameters of a two-qubit machine"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--povm", help="POVM JSON file")
    src.add_argument("--preset", help="built-in POVM (or machine for 'clone')")
    common.add_argument("--direction", type=parse_vector, action="append", help="unit vector x,y,z (repeatable)")
    common.add_argument("--state", type=parse_vector, help="Bloch vector x,y,z")
    common.add_argument("--theta", type=float, help="angle between the two directions (rad)")
    common.add_argument("--grid", type=int, default=101, help="points per axis for 'region'")
    common.add_argument("--n", type=int, default=10_000, help="largest sample size for 'estimate'")
    common.add_argument("--trials", type=int, default=20)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--order", type=int, default=32, help="sphere quadrature order for 'clone'")
    common.add_argument("--machine", help="cloning machine JSON file")
    common.add_argument("--probs", help="outcome probabilities p1,p2,... for 'reconstruct'")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--tol", type=float, help=f"POVM tolerance (default ${TOL_ENV} or {POVM_TOL:g})")

    parser = argparse.ArgumentParser(prog="accmat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_IO
    try:
        args.tol = resolve_tol(args.tol)
        return COMMANDS[args.command][0](args)
    except UsageError as exc:
        print(f"accmat {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except PovmError as exc:
        print(f"accmat {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
