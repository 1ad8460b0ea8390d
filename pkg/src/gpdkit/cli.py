"""Command-line surface: validate, info, rep, cstar, schwinger.

Exit codes are the process-level contract: 0 success, 1 validation or
check failure, 2 tokenize/parse failure, 3 I/O failure.  All randomness is
seeded (default seed 0) so identical invocations produce identical bytes.
The environment variable GPDKIT_MAX_N overrides the dense
composition-table size guard.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

import numpy as np

from . import representation as rep_mod
from . import schwinger as sch
from . import speclang
from .errors import (
    ElaborationError,
    GpdError,
    ShapeMismatch,
    SpecSyntaxError,
    UnexpectedCharacter,
)
from .groupoid import FiniteGroupoid
from .representation import (
    check_cstar_identity,
    check_star_rep,
    matrix_from_json_dict,
    matrix_to_csv,
    matrix_to_json_dict,
    random_element,
)
from .schwinger import EventSpace

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARSE = 2
EXIT_IO = 3


def _load(path: str):
    """Returns (values, exit_code); on failure prints to stderr."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None, EXIT_IO
    try:
        return speclang.loads(text), EXIT_OK
    except (UnexpectedCharacter, SpecSyntaxError) as exc:
        print(f"{path}:{exc}", file=sys.stderr)
        return None, EXIT_PARSE
    except ElaborationError as exc:
        print(f"{path}:{exc}", file=sys.stderr)
        return None, EXIT_VALIDATION
    except GpdError as exc:
        print(f"{path}: {exc}", file=sys.stderr)
        return None, EXIT_VALIDATION


def _lookup(values, name: str, path: str):
    if name not in values:
        print(f"error: {path} declares no structure named {name}", file=sys.stderr)
        return None, EXIT_VALIDATION
    return values[name], EXIT_OK


def cmd_validate(args) -> int:
    values, code = _load(args.file)
    if code != EXIT_OK:
        return code
    for name, value in values.items():
        if isinstance(value, FiniteGroupoid):
            print(
                f"{name}: ok (objects {value.n_objects}, morphisms {value.n_morphisms})"
            )
        else:
            print(
                f"{name}: ok (frames {len(value.frames)}, classes {value.n_classes})"
            )
    return EXIT_OK


def cmd_info(args) -> int:
    values, code = _load(args.file)
    if code != EXIT_OK:
        return code
    value, code = _lookup(values, args.name, args.file)
    if code != EXIT_OK:
        return code
    if isinstance(value, EventSpace):
        print(f"name: {args.name}")
        print(f"frames: {len(value.frames)}")
        print(f"events: {sum(len(f.events) for f in value.frames)}")
        print(f"classes: {value.n_classes}")
        print(f"identifications: {len(value.identifications)}")
        return EXIT_OK
    g = value
    parts = g.orbits()
    iso_orders = [g.isotropy_group(objs[0]).order for objs in parts.orbits]
    print(f"name: {args.name}")
    print(f"objects: {g.n_objects}")
    print(f"morphisms: {g.n_morphisms}")
    print(f"orbits: {len(parts.orbits)} {[len(o) for o in parts.orbits]}")
    print(f"isotropy orders: {iso_orders}")
    print(f"connected: {'yes' if g.is_connected() else 'no'}")
    print(f"principal: {'yes' if g.is_principal() else 'no'}")
    return EXIT_OK


def _emit_matrix(m, fmt: str) -> str:
    if fmt == "csv":
        return matrix_to_csv(m)
    return json.dumps(matrix_to_json_dict(m), separators=(",", ":")) + "\n"


def cmd_rep(args) -> int:
    values, code = _load(args.file)
    if code != EXIT_OK:
        return code
    g, code = _lookup(values, args.name, args.file)
    if code != EXIT_OK:
        return code
    if not isinstance(g, FiniteGroupoid):
        print(f"error: {args.name} is an event space, not a groupoid", file=sys.stderr)
        return EXIT_VALIDATION
    if args.which == "fundamental":
        mats = [rep_mod.fundamental_matrix(g, k) for k in range(g.n_morphisms)]
    else:
        mats = rep_mod.regular_rep(g)
    index = [
        {
            "index": k,
            "label": g.morphism_labels[k],
            "source": int(g.source[k]),
            "target": int(g.target[k]),
        }
        for k in range(g.n_morphisms)
    ]
    if args.out is None:
        if args.format == "csv":
            for k, m in enumerate(mats):
                print(f"# {k} {g.morphism_labels[k]}")
                sys.stdout.write(matrix_to_csv(m))
        else:
            doc = {
                "name": args.name,
                "which": args.which,
                "basis": index,
                "matrices": [matrix_to_json_dict(m) for m in mats],
            }
            print(json.dumps(doc, separators=(",", ":")))
        return EXIT_OK
    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        ext = "csv" if args.format == "csv" else "json"
        for k, m in enumerate(mats):
            (outdir / f"m{k:03d}.{ext}").write_text(
                _emit_matrix(m, args.format), encoding="utf-8"
            )
        for k, row in enumerate(index):
            row["file"] = f"m{k:03d}.{ext}"
        (outdir / "index.json").write_text(
            json.dumps({"name": args.name, "which": args.which, "basis": index}, indent=2)
            + "\n",
            encoding="utf-8",
        )
    except OSError as exc:
        print(f"error: cannot write to {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(mats)} matrices to {outdir}")
    return EXIT_OK


def cmd_cstar(args) -> int:
    values, code = _load(args.file)
    if code != EXIT_OK:
        return code
    g, code = _lookup(values, args.name, args.file)
    if code != EXIT_OK:
        return code
    if not isinstance(g, FiniteGroupoid):
        print(f"error: {args.name} is an event space, not a groupoid", file=sys.stderr)
        return EXIT_VALIDATION
    star = check_star_rep(g, samples=args.samples, seed=args.seed)
    print(f"star-representation max deviation: {star.max_abs_deviation:.3e}")
    worst = 0.0
    rng = np.random.default_rng(args.seed)
    for _ in range(args.samples):
        report = check_cstar_identity(g, random_element(g, rng))
        worst = max(worst, report.rel_deviation)
    print(f"cstar-identity max relative deviation over {args.samples} samples: {worst:.3e}")
    ok = star.ok and (args.samples == 0 or worst <= 1e-9)
    print("result: pass" if ok else "result: FAIL")
    return EXIT_OK if ok else EXIT_VALIDATION


def _exchange_quadruples(n: int, limit: int | None, seed: int):
    """All composable exchange squares over n classes, or a seeded sample."""
    total = n**9
    if limit is None or total <= limit:
        return total, itertools.product(range(n), repeat=9)
    rng = np.random.default_rng(seed)
    return limit, (tuple(rng.integers(0, n, size=9)) for _ in range(limit))


def cmd_schwinger(args) -> int:
    values, code = _load(args.file)
    if code != EXIT_OK:
        return code
    space, code = _lookup(values, args.name, args.file)
    if code != EXIT_OK:
        return code
    if not isinstance(space, EventSpace):
        print(f"error: {args.name} is not an event space", file=sys.stderr)
        return EXIT_VALIDATION

    if args.subcommand == "total":
        g = sch.total_groupoid(space)
        print(g.to_json())
        return EXIT_OK

    if args.subcommand == "exchange":
        n = space.n_classes
        limit = None if n <= 4 else 10000
        count, quads = _exchange_quadruples(n, limit, args.seed)
        failures = 0
        for a, a2, a3, b, b2, b3, c, c2, c3 in quads:
            phi = sch.TwoCell(space, a, a2, b, b2)
            phi_p = sch.TwoCell(space, a2, a3, b2, b3)
            psi = sch.TwoCell(space, b, b2, c, c2)
            psi_p = sch.TwoCell(space, b2, b3, c2, c3)
            if not sch.check_exchange(phi, phi_p, psi, psi_p).ok:
                failures += 1
        if failures:
            print(f"checked {count} quadruples, {failures} FAILED")
            return EXIT_VALIDATION
        print(f"checked {count} quadruples, all pass")
        return EXIT_OK

    # superop
    if args.matrices is None:
        print("error: superop requires --matrices FILE", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        data = json.loads(Path(args.matrices).read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"error: cannot read {args.matrices}: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"error: {args.matrices} is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        t = matrix_from_json_dict(data["T"])
        t_prime = matrix_from_json_dict(data["Tprime"])
        a = matrix_from_json_dict(data["A"])
        agg = sch.CellAggregate(space, t, t_prime)
        result = sch.represent_cells(agg, a)
    except (KeyError, TypeError, ValueError, ShapeMismatch) as exc:
        print(f"error: bad matrices file: {exc!r}", file=sys.stderr)
        return EXIT_VALIDATION
    print(json.dumps(matrix_to_json_dict(result), separators=(",", ":")))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gpdkit",
        description="Analyze .gpd groupoid and event-space descriptions.",
        epilog="GPDKIT_MAX_N overrides the dense composition-table size guard.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate every declaration")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("info", help="structural report for one declaration")
    p.add_argument("file")
    p.add_argument("name")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("rep", help="export representation matrices")
    p.add_argument("file")
    p.add_argument("name")
    p.add_argument("--which", choices=["fundamental", "regular"], required=True)
    p.add_argument("--out", default=None, help="output directory (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_rep)

    p = sub.add_parser("cstar", help="star-representation and C*-identity checks")
    p.add_argument("file")
    p.add_argument("name")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_cstar)

    p = sub.add_parser("schwinger", help="event-space commands")
    p.add_argument("file")
    p.add_argument("name")
    p.add_argument("subcommand", choices=["total", "exchange", "superop"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--matrices", default=None, help="JSON file with T, Tprime, A")
    p.set_defaults(func=cmd_schwinger)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
