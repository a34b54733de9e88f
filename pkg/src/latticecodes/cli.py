"""Command-line interface.

Every subcommand prints one payload with a top-level "schema" field.  Exit
codes: 0 success, 2 budget exhausted, 3 verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from .code import StabilizerCode, num_logical
from .complexes import css_from_complex, torus_complex
from .distance import DistanceBudgetExceeded, min_weight_logical
from .lattice import (
    LatticeBasis,
    SearchBudgetExceeded,
    hadamard_lattice,
    hnf,
    l1_systole,
    n_slice,
    parse_inline,
    search_min_det,
)

SCHEMA = "latticecodes/1"

EXIT_OK, EXIT_BUDGET, EXIT_MISMATCH = 0, 2, 3

# published minimum determinants, keyed by systole; the last entry of each is --long only
TABLES = {
    "1": {"dim": 3, "slices": 1, "rows": {2: 2, 3: 7, 4: 12, 5: 27, 6: 38}, "long": {7: 70}},
    "2": {"dim": 3, "slices": 2, "rows": {2: 4, 3: 10, 4: 16, 5: 30, 6: 44}, "long": {7: 72}},
    "3": {"dim": 4, "slices": 1, "rows": {2: 2, 3: 9, 4: 16}, "long": {5: 45}},
    "4": {"dim": 4, "slices": 2, "rows": {3: 14, 4: 24}, "long": {5: 54}},
}
SHALLOW = {3: [[2, 0, 4], [0, 1, 3], [0, 0, 5]], 5: [[2, 0, 12], [0, 1, 8], [0, 0, 13]]}
NAMED = {"hadamard": lambda: hadamard_lattice(2)}


class BudgetError(RuntimeError):
    pass


def read_lattice(text: str) -> LatticeBasis:
    """Inline "r1;r2;..." rows, a JSON file, or a named lattice."""
    if text in NAMED:
        return NAMED[text]()
    p = Path(text)
    if p.suffix == ".json" or p.is_file():
        return LatticeBasis.from_json(p.read_text())
    return parse_inline(text)


def _hnf_rows(h) -> list[list[int]]:
    return [[int(x) for x in r] for r in h.rows]


# ---------------------------------------------------------------------------
# subcommands


def cmd_search(args) -> tuple[dict, int]:
    if args.dim == 4 and args.systole >= 5 and not args.long:
        raise BudgetError("4D systole >= 5 needs --long")
    kw = {"threads": args.threads}
    if args.budget:
        kw["max_nodes"] = args.budget
    r = search_min_det(args.dim, args.systole, args.slices, **kw)
    row = {
        "systole": args.systole,
        "det": r.det,
        "ratio": round(r.det / args.systole**args.dim, 6),
        "witness_count": r.witness_count,
        "witnesses": [_hnf_rows(w) for w in r.witnesses[: args.max_witnesses]],
        "min_witness_slices": r.min_witness_slices,
        "nodes": r.nodes,
    }
    return {"rows": [row]}, EXIT_OK


def cmd_distance(args) -> tuple[dict, int]:
    basis = read_lattice(args.lattice)
    c = torus_complex(basis)
    q = args.degree if args.degree is not None else max(1, c.top // 2)
    code = css_from_complex(c, q)
    if code.n >= 96 and args.w_max >= 7 and not args.long:
        raise BudgetError("distance search at this size needs --long")
    sides = ["X", "Z"] if args.side == "both" else [args.side.upper()]
    kw = {"node_limit": args.budget} if args.budget else {}
    det = abs(int(round(np.linalg.det(np.asarray(basis.rows, dtype=float)))))
    reports = {}
    for s in sides:
        rep = min_weight_logical(
            code, s, args.w_max, use_translation=args.translation, translation_orbit_size=det if args.translation else None, **kw
        )
        j = rep.to_json()
        j.pop("seconds", None)  # keep output byte-reproducible
        reports[s] = j
    return {"n": code.n, "k": num_logical(code), "qubit_degree": q, "reports": reports}, EXIT_OK


def cmd_slice(args) -> tuple[dict, int]:
    from .complexes import circle_complex, translation_permutations, twisted_product
    from .gf2 import row_span_equal
    from .protocols import slice_protocol, twisted_slice_logicals

    h = hnf(read_lattice(args.lattice))
    if h.dim != 3:
        raise ValueError("slice needs a 3D lattice")
    r = slice_protocol(h, args.seed)
    d = torus_complex(h.rows[1:, 1:])
    twist = {(int(h.rows[0, 0]) - 1, 0): translation_permutations(d, [-int(x) for x in h.rows[0, 1:]])}
    alg = twisted_slice_logicals(twisted_product(circle_complex(int(h.rows[0, 0])), d, twist))
    agree = row_span_equal(alg, r.logical_group)
    out = r.to_json()
    out["hnf"] = _hnf_rows(h)
    out["twisted_product_agrees"] = agree
    ok = agree and r.matches_expected
    return out, EXIT_OK if ok else EXIT_MISMATCH


def _load_code(args) -> StabilizerCode:
    if args.code:
        if args.code == "five":
            from .code import PauliOp
            from .gf2 import BitMatrix

            rows = [PauliOp.from_string(s).vector.to_array() for s in ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")]
            return StabilizerCode(5, BitMatrix.from_dense(np.array(rows)), name="five")
        return StabilizerCode.from_json(Path(args.code).read_text())
    if not args.lattice:
        raise ValueError("give a lattice or --code")
    c = torus_complex(read_lattice(args.lattice))
    return css_from_complex(c, args.degree if args.degree is not None else max(1, c.top // 2))


def cmd_inject(args) -> tuple[dict, int]:
    from .injection import css_injection_sets, noncss_injection_sets, round_trip, unencoding_bases

    code = _load_code(args)
    if args.noncss or not code.is_css:
        sets = noncss_injection_sets(code)
    else:
        sets = css_injection_sets(code)
    sets.validate(code)
    good = round_trip(code, sets, args.trials, args.seed) if args.trials else 0
    out = {
        "n": code.n,
        "k": num_logical(code),
        "sets": sets.to_json(),
        "recipe": {str(q): v for q, v in sets.recipe().items()},
        "unencoding_bases": {str(q): v for q, v in unencoding_bases(sets).items()},
        "round_trips": {"trials": args.trials, "exact": good},
    }
    return out, EXIT_OK if good == args.trials else EXIT_MISMATCH


def cmd_surgery(args) -> tuple[dict, int]:
    from .protocols import boundary_distance, surgery_measure

    h = hnf(read_lattice(args.lattice))
    rows = [args.row] if args.row else list(range(1, h.dim + 1))
    out = []
    ok = True
    for r in rows:
        res = surgery_measure(h, r, args.basis)
        j = res.to_json()
        j["boundary_distance"] = {b: boundary_distance(h, r, b) for b in "XZ"}
        ok &= res.measured_x + res.measured_z == 6 and res.surviving_pairs == res.k_merged
        out.append(j)
    return {"hnf": _hnf_rows(h), "rows": out}, EXIT_OK if ok else EXIT_MISMATCH


def cmd_symmetry(args) -> tuple[dict, int]:
    from .symmetry import crystalline_gates

    c = torus_complex(read_lattice(args.lattice))
    q = args.degree if args.degree is not None else max(1, c.top // 2)
    rep = crystalline_gates(c, q)
    out = rep.to_json(include_gates=args.gates)
    out["qubit_degree"] = q
    return out, EXIT_OK


def cmd_starfish(args) -> tuple[dict, int]:
    from .protocols import STARFISH, circuit_distance, hook_table, starfish_circuit

    basis = read_lattice(args.lattice)
    order = tuple(args.order.split(",")) if args.order else STARFISH
    circ = starfish_circuit(basis, order)
    code = css_from_complex(torus_complex(basis), 1)
    kw = {"node_limit": args.budget} if args.budget else {}
    d = circuit_distance(circ, code, args.w_max, **kw)
    sys1 = l1_systole(basis)
    table = [
        {"after": r.after, "support": r.support, "reduced_weight": r.reduced_weight, "vertex_violations": r.vertex_violations}
        for r in hook_table(basis, circ)
    ]
    out = {
        "order": list(order),
        "circuit_distance": d if d is not None else f"> {args.w_max}",
        "code_distance": sys1,
        "hook_table": table,
    }
    # the order must preserve the code distance whenever it lies within reach
    ok = d == sys1 if sys1 <= args.w_max else d is None
    return out, EXIT_OK if ok else EXIT_MISMATCH


def _table_rows(spec, include_long, args) -> tuple[list[dict], bool]:
    targets = dict(spec["rows"])
    if include_long:
        targets.update(spec["long"])
    rows, ok = [], True
    kw = {"threads": args.threads}
    if args.budget:
        kw["max_nodes"] = args.budget
    for s, want in sorted(targets.items()):
        r = search_min_det(spec["dim"], s, spec["slices"], **kw)
        match = r.det == want
        ok &= match
        rows.append(
            {
                "systole": s,
                "det": r.det,
                "expected": want,
                "ratio": round(r.det / s ** spec["dim"], 6),
                "match": match,
                "witness": _hnf_rows(r.witnesses[0]),
            }
        )
    return rows, ok


def cmd_tables(args) -> tuple[dict, int]:
    if args.which == "shallow":
        from .protocols import effective_distance_bell

        rows, ok = [], True
        for d, basis in sorted(SHALLOW.items()):
            if d > 3 and not args.long:
                continue
            rep = effective_distance_bell(basis, budget=d)
            match = rep.value == d
            ok &= match
            rows.append(
                {
                    "effective_distance": str(rep.value) if rep.value is not None else f"> {d}",
                    "expected": d,
                    "hnf": basis,
                    "flux_only": rep.flux_only,
                    "x_only": rep.x_only,
                    "n_slice": n_slice(basis),
                    "match": match,
                }
            )
        return {"table": "shallow", "rows": rows}, EXIT_OK if ok else EXIT_MISMATCH
    rows, ok = _table_rows(TABLES[args.which], args.long, args)
    return {"table": args.which, "rows": rows}, EXIT_OK if ok else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# output


def _flat(v):
    return json.dumps(v) if isinstance(v, (list, dict)) else v


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True)
    rows = payload.get("rows")
    if fmt == "csv":
        buf = io.StringIO()
        if rows:
            # every row carries the schema so a lone table stays self-describing
            rows = [{"schema": payload["schema"], **r} for r in rows]
            keys = sorted({k for r in rows for k in r})
            w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: _flat(r.get(k)) for k in keys})
        else:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["key", "value"])
            for k, v in sorted(payload.items()):
                w.writerow([k, _flat(v)])
        return buf.getvalue().rstrip("\n")
    lines = []
    for k, v in sorted(payload.items()):
        if k == "rows":
            continue
        lines.append(f"{k}: {_flat(v)}")
    for r in rows or []:
        lines.append("  ".join(f"{k}={_flat(r[k])}" for k in sorted(r)))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--budget", type=int, default=None, help="node budget for searches")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--long", action="store_true", help="allow long-running instances")

    p = argparse.ArgumentParser(prog="latticecodes", description="Rotated toric codes on integral lattices.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("search", parents=[common], help="minimum determinant for a target l1 systole")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--systole", type=int, required=True)
    s.add_argument("--slices", type=int, default=1)
    s.add_argument("--max-witnesses", type=int, default=8)
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("distance", parents=[common], help="minimum logical weight of a toric code")
    s.add_argument("lattice")
    s.add_argument("--degree", type=int, default=None)
    s.add_argument("--side", choices=("X", "Z", "x", "z", "both"), default="both")
    s.add_argument("--w-max", type=int, default=8)
    s.add_argument("--translation", action="store_true")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("slice", parents=[common], help="slice a 3D code into 2D codes")
    s.add_argument("lattice")
    s.set_defaults(func=cmd_slice)

    s = sub.add_parser("inject", parents=[common], help="state injection sets and round trips")
    s.add_argument("lattice", nargs="?")
    s.add_argument("--degree", type=int, default=None)
    s.add_argument("--code", default=None, help="code JSON file, or 'five'")
    s.add_argument("--noncss", action="store_true")
    s.add_argument("--trials", type=int, default=100)
    s.set_defaults(func=cmd_inject)

    s = sub.add_parser("surgery", parents=[common], help="merge two 4D blocks along an HNF row")
    s.add_argument("lattice")
    s.add_argument("--row", type=int, default=None)
    s.add_argument("--basis", choices=("X", "Z", "both"), default="both")
    s.set_defaults(func=cmd_surgery)

    s = sub.add_parser("symmetry", parents=[common], help="crystalline logical gates")
    s.add_argument("lattice")
    s.add_argument("--degree", type=int, default=None)
    s.add_argument("--gates", action="store_true", help="list every emitted gate")
    s.set_defaults(func=cmd_symmetry)

    s = sub.add_parser("starfish", parents=[common], help="syndrome circuit distance and hook table")
    s.add_argument("lattice")
    s.add_argument("--order", default=None, help="comma-separated, e.g. +1,-1,+2,-2,+3,-3")
    s.add_argument("--w-max", type=int, default=3)
    s.set_defaults(func=cmd_starfish)

    s = sub.add_parser("tables", parents=[common], help="reproduce a published table")
    s.add_argument("which", choices=("1", "2", "3", "4", "shallow"))
    s.set_defaults(func=cmd_tables)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    head = {"schema": SCHEMA, "command": args.command}
    try:
        payload, code = args.func(args)
        payload = {**head, **payload, "verified": code == EXIT_OK}
    except (SearchBudgetExceeded, DistanceBudgetExceeded, BudgetError) as e:
        partial = getattr(e, "partial", None)
        payload = {**head, "incomplete": True, "error": str(e)}
        if partial is not None:
            payload["partial"] = partial
        code = EXIT_BUDGET
    print(render(payload, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
