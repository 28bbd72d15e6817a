"""Command-line interface.

Subcommands:

* ``rank FILE``: multilinear rank of a tensor stored as JSON.
* ``verify-minimality``: randomized vanishing-mean-curvature campaign.
* ``segre-probe FILE``: witness curves for a normal functional at the
  rank-one base point.
* ``slice-field``: mean-curvature field of the independence model as CSV.

Exit codes: 0 success/pass, 1 verification failure, 2 usage or validation
error, 3 precondition failure on the input data.  Reports are rendered
deterministically, so identical configurations yield byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import segre, tensors, tucker


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _dump_json(obj, fh) -> None:
    json.dump(obj, fh, sort_keys=True, indent=2)
    fh.write("\n")


def _emit(obj, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            _dump_json(obj, fh)
    else:
        _dump_json(obj, sys.stdout)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tensorcurv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_rank = sub.add_parser("rank", help="multilinear rank of a tensor JSON file")
    p_rank.add_argument("tensor", help="path to a tensor JSON file")
    p_rank.add_argument("--tol", type=float, default=None, help="relative singular-value cutoff")

    p_ver = sub.add_parser("verify-minimality", help="randomized mean-curvature campaign")
    p_ver.add_argument("--shape", type=_parse_ints, required=True)
    p_ver.add_argument("--rank", type=_parse_ints, required=True)
    p_ver.add_argument("--samples", type=int, default=20)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--tol", type=float, default=1e-8, help="pass threshold on ||H|| / max ||d2r||")
    p_ver.add_argument("--output", default=None, help="report path (stdout when omitted)")
    p_ver.add_argument("--format", choices=("json", "csv"), default="json")

    p_probe = sub.add_parser("segre-probe", help="witness curves for a normal functional")
    p_probe.add_argument("functional", help="path to the functional tensor JSON file")
    p_probe.add_argument("--epsilon", type=float, default=0.1, help="initial curve parameter")
    p_probe.add_argument("--tol", type=float, default=1e-10, help="level detection tolerance")
    p_probe.add_argument("--output", default=None, help="report path (stdout when omitted)")

    p_field = sub.add_parser("slice-field", help="mean-curvature field of the independence model")
    p_field.add_argument("--dims", type=_parse_ints, required=True)
    p_field.add_argument("--grid", type=int, required=True, help="points per parameter axis")
    p_field.add_argument("--output", default="slice_field.csv", help="CSV path")

    return parser


def _cmd_rank(args) -> int:
    try:
        tensor = tensors.load_tensor(args.tensor)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    ranks = tensors.multilinear_rank(tensor, tol=args.tol)
    report = {
        "ranks": list(ranks),
        "singular_values_per_mode": [
            [float(s) for s in sv] for sv in tensors.singular_values_per_mode(tensor)
        ],
    }
    _dump_json(report, sys.stdout)
    return 0


def _cmd_verify_minimality(args) -> int:
    try:
        report = tucker.verify_minimality(
            args.shape, args.rank, samples=args.samples, seed=args.seed, tol=args.tol
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        _emit(report.to_json_dict(), args.output)
    else:
        lines = ["sample,shape,rank,gram_min_eig,curvature_ratio,off_structure_max"]
        for row in report.rows:
            lines.append(
                ",".join(
                    [
                        str(row["sample"]),
                        "x".join(str(n) for n in row["shape"]),
                        "x".join(str(r) for r in row["rank"]),
                        repr(row["gram_min_eig"]),
                        repr(row["curvature_ratio"]),
                        repr(row["off_structure_max"]),
                    ]
                )
            )
        text = "\n".join(lines) + "\n"
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    print(
        f"{'PASS' if report.passed else 'FAIL'}: max ratio {report.max_ratio:.3e} "
        f"over {len(report.rows)} samples ({report.rank_failures} rank failures)",
        file=sys.stderr,
    )
    return 0 if report.passed else 1


def _cmd_segre_probe(args) -> int:
    try:
        ell = tensors.load_tensor(args.functional)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    frame = segre.normal_frame(ell.shape)
    try:
        witness = segre.extremum_witness(ell, frame, eps=args.epsilon, tol=args.tol)
    except segre.NotNormalError as exc:
        print(
            f"error: functional is not normal at the base point "
            f"(tangent component norm {exc.tangent_norm:.6e})",
            file=sys.stderr,
        )
        return 3
    except (segre.NoWitnessError, segre.WitnessSearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    curve = segre.probe_curve(
        frame,
        modes=[j for j, i in enumerate(witness.witness_index) if i > 0],
        targets=[i for i in witness.witness_index if i > 0],
    )
    pairings = segre.curve_pairings(curve, ell, witness.kstar)
    report = {
        "kstar": witness.kstar,
        "witness_index": list(witness.witness_index),
        "coefficient": witness.coeff,
        "u_plus": witness.u_plus,
        "u_minus": witness.u_minus,
        "pairing_plus": witness.pairing_plus,
        "pairing_minus": witness.pairing_minus,
        "pairing_derivatives": [float(v) for v in pairings],
    }
    _emit(report, args.output)
    return 0


def _cmd_slice_field(args) -> int:
    if args.grid < 2:
        print("error: grid resolution must be at least 2", file=sys.stderr)
        return 2
    try:
        field = segre.slice_curvature_field(args.dims, args.grid)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    field.save_csv(args.output)
    summary = {
        "rows": len(field.rows),
        "min_H_norm": field.min_norm,
        "max_H_norm": field.max_norm,
        "output": args.output,
    }
    _dump_json(summary, sys.stdout)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    handlers = {
        "rank": _cmd_rank,
        "verify-minimality": _cmd_verify_minimality,
        "segre-probe": _cmd_segre_probe,
        "slice-field": _cmd_slice_field,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
