"""``loadouts`` command-line interface.

Exit codes: 0 success, 1 internal consistency failure, 2 invalid arguments,
3 mathematically unresolved (non-generic design or undecidable sign).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import re
import sys
from typing import Optional, Sequence

from . import bounds, cells, cyclic, designs, lpsolver
from . import exactmath as em
from .errors import (
    DesignInvalid,
    DimensionMismatch,
    EnumerationTooLarge,
    IndeterminateSign,
    InvalidParams,
    LoadoutError,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_UNRESOLVED = 3

KIND_ALIASES = {"moment": "moment_curve", "moment_curve": "moment_curve", "exact_m3": "exact_m3",
                "exact_m2": "exact_m2", "identity": "identity"}
_RATIONAL = re.compile(r"^-?\d+/\d+$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# argument helpers


def parse_int_list(text: str) -> list:
    """``"7"``, ``"2,3"`` or ``"3..12"`` (inclusive)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            a, b = int(lo), int(hi)
            if a > b:
                raise UsageError(f"empty range {part!r}")
            out.extend(range(a, b + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise UsageError(f"no integers in {text!r}")
    return out


def _single(args, name: str) -> int:
    vals = getattr(args, name)
    if vals is None:
        raise UsageError(f"--{name} is required")
    if len(vals) != 1:
        raise UsageError(f"--{name} takes a single integer here")
    return vals[0]


def _design_from_args(args) -> designs.Design:
    if args.design is not None:
        if args.kind is not None:
            raise UsageError("--design and --kind are mutually exclusive")
        text = sys.stdin.read() if args.design == "-" else _read_file(args.design)
        try:
            d = designs.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidParams(f"design is not valid JSON: {exc}") from exc
    else:
        if args.kind is None:
            raise UsageError("give --design or --kind")
        kind = KIND_ALIASES.get(args.kind)
        if kind is None:
            raise UsageError(f"unknown --kind {args.kind!r}")
        n = _single(args, "n")
        bits = args.precision_bits or em.DEFAULT_BITS
        if kind == "moment_curve":
            t = [em.as_rational(v) for v in args.t.split(",")] if args.t else None
            d = designs.moment_curve_design(n, _single(args, "m"), t, args.M)
        elif kind == "exact_m3":
            d = designs.exact_design_m3(n, bits)
        elif kind == "exact_m2":
            d = designs.exact_design_m2(n)
        else:
            d = designs.identity_design(n)
    if args.perturb is not None:
        d = designs.perturb(d, args.perturb)
    return d


def _read_file(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _parse_subset(text: str) -> tuple:
    try:
        return tuple(sorted(int(v) for v in text.replace(" ", "").strip("{}[]").split(",") if v))
    except ValueError as exc:
        raise UsageError(f"bad subset {text!r}") from exc


# ---------------------------------------------------------------------------
# verbs (each returns (payload, exit code))


def cmd_design(args):
    d = _design_from_args(args)
    out = d.to_json()
    out["validation"] = designs.validate(d).to_json()
    return out, EXIT_OK


def cmd_loadouts(args):
    d = _design_from_args(args)
    k = _single(args, "k")
    mode = args.mode or "inequality"
    method = args.method or "cells"
    if mode == "equality" and method != "cells":
        raise UsageError("equality loadouts are enumerated by the cell route only")
    payload = {"k": k, "mode": mode, "method": method}
    if method in ("cells", "both"):
        if mode == "equality":
            res = cells.enumerate_equality_loadouts(d, k, cap=args.cap)
        else:
            res = cells.enumerate_inequality_loadouts(d, k, cap=args.cap)
        if isinstance(res, cells.NonGeneric):
            payload.update(status="unresolved", count=None, loadouts=None, non_generic=res.to_json())
            return payload, EXIT_UNRESOLVED
        found = list(res)
    if method in ("oracle", "both"):
        oracle = lpsolver.oracle_loadouts(d, k)
        if method == "both" and oracle != found:
            payload.update(status="oracle_disagreement", cells=[list(L) for L in found],
                           oracle=[list(L) for L in oracle])
            return payload, EXIT_FAILURE
        found = oracle
    payload.update(status="ok", count=len(found), loadouts=[list(L) for L in found])
    return payload, EXIT_OK


def cmd_verify(args):
    d = _design_from_args(args)
    L = _parse_subset(args.subset)
    witness = None
    if args.seed is not None:
        witness = lpsolver.random_witness(L, d.n, random.Random(args.seed))
    check = lpsolver.verify_loadout(d, L, witness)
    return check.to_json(), EXIT_OK


def cmd_cyclic(args):
    n, m = _single(args, "n"), _single(args, "m")
    out = cyclic.fvector(n, m).to_json()
    if args.k is not None:
        faces = {}
        for k in args.k:
            faces[str(k)] = [list(s) for s in cyclic.enumerate_faces(n, m, k, cap=args.cap)]
        out["faces"] = faces
    return out, EXIT_OK


def cmd_arrays(args):
    n = _single(args, "n")
    out = []
    for k in args.k or []:
        for s in args.s if args.s is not None else range(0, k + 1):
            row = {"n": n, "k": k, "s": s, "count": cyclic.count_arrays(n, k, s)}
            row["odd"] = cyclic.count_arrays(n, k, s, "odd")
            row["even"] = cyclic.count_arrays(n, k, s, "even")
            out.append(row)
    if not out:
        raise UsageError("--k is required")
    return {"arrays": out}, EXIT_OK


def cmd_bounds(args):
    m = _single(args, "m")
    rows = []
    for n in args.n or []:
        for k in args.k or []:
            lower, label = bounds.lower_bound(n, m, k)
            row = {"n": n, "m": m, "k": k, "upper": bounds.upper_bound(n, m, k),
                   "lower": bounds.render_count(lower), "lower_label": label}
            if m <= 3:
                t2, t2_label = bounds.moment_curve_bound(n, m, k)
                row["moment_curve_lower"] = bounds.render_count(t2)
                row["moment_curve_label"] = t2_label
            rows.append(row)
    if not rows:
        raise UsageError("--n and --k are required")
    return (rows[0] if len(rows) == 1 else rows), EXIT_OK


def cmd_sweep(args):
    if args.kind is None:
        raise UsageError("--kind is required")
    kind = KIND_ALIASES.get(args.kind)
    if kind not in bounds.SWEEP_KINDS:
        raise UsageError(f"sweep supports kinds {bounds.SWEEP_KINDS}")
    if args.n is None or args.k is None:
        raise UsageError("--n and --k are required")
    m = {"exact_m2": 2, "exact_m3": 3}.get(kind) or _single(args, "m")
    method = args.method or ("cells" if kind == "exact_m3" else "both")
    rows = bounds.sweep(kind, args.n, m, args.k, method, args.jobs or 1, args.cap, args.perturb, strict=False)
    if args.no_timing:
        for r in rows:
            r.runtime_ms = 0
    code = EXIT_OK
    if any(r.status == "bound_violation" or r.status.startswith("error") or r.status == "oracle_disagreement"
           for r in rows):
        code = EXIT_FAILURE
    if any(r.status == "non_generic" for r in rows) and code == EXIT_OK:
        code = EXIT_UNRESOLVED
    return rows, code


VERBS = {
    "design": cmd_design,
    "loadouts": cmd_loadouts,
    "verify": cmd_verify,
    "cyclic": cmd_cyclic,
    "arrays": cmd_arrays,
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="loadouts", description="Exact loadout enumeration for LP designs.")
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)
    for verb in VERBS:
        sp = sub.add_parser(verb)
        if verb == "verify":
            sp.add_argument("subset", help="comma-separated 1-based columns, e.g. 2,3")
        sp.add_argument("--kind")
        sp.add_argument("--n", type=parse_int_list)
        sp.add_argument("--m", type=parse_int_list)
        sp.add_argument("--k", type=parse_int_list)
        sp.add_argument("--s", type=parse_int_list)
        sp.add_argument("--t")
        sp.add_argument("--M")
        sp.add_argument("--design")
        sp.add_argument("--mode", choices=["equality", "inequality"])
        sp.add_argument("--method", choices=list(bounds.METHODS))
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        sp.add_argument("--precision-bits", type=int)
        sp.add_argument("--perturb")
        sp.add_argument("--jobs", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--cap", type=int)
        sp.add_argument("--approx", action="store_true")
        sp.add_argument("--no-timing", action="store_true")
    return p


# ---------------------------------------------------------------------------
# rendering


def _approx(obj):
    if isinstance(obj, dict):
        if set(obj) == {"lo", "hi", "bits"}:
            mid = (em.scalar_from_decimal(obj["lo"]) + em.scalar_from_decimal(obj["hi"])) / 2
            return dict(obj, approx=float(mid))
        return {k: _approx(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_approx(v) for v in obj]
    if isinstance(obj, str) and _RATIONAL.match(obj):
        return {"exact": obj, "approx": float(em.as_rational(obj))}
    return obj


def _to_jsonable(payload):
    if isinstance(payload, list):
        return [r.to_json() if hasattr(r, "to_json") else r for r in payload]
    return payload


def _render_csv(verb: str, payload) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if verb == "sweep":
        w.writerow(bounds.BoundReport.CSV_COLUMNS)
        for r in payload:
            w.writerow(r.csv_row())
    elif verb == "bounds":
        rows = payload if isinstance(payload, list) else [payload]
        cols = ["n", "m", "k", "lower", "upper", "lower_label"]
        w.writerow(cols)
        for r in rows:
            w.writerow([r[c] for c in cols])
    elif verb == "loadouts" and payload.get("loadouts") is not None:
        w.writerow(["loadout"])
        for L in payload["loadouts"]:
            w.writerow([" ".join(str(j) for j in L)])
    elif verb == "arrays":
        cols = ["n", "k", "s", "count", "odd", "even"]
        w.writerow(cols)
        for r in payload["arrays"]:
            w.writerow([r[c] for c in cols])
    else:
        raise UsageError(f"--format csv is not available for {verb}")
    return buf.getvalue()


def _emit(text: str, out) -> None:
    out.write(text)
    if not text.endswith("\n"):
        out.write("\n")


def _error(code: str, detail: str, out) -> None:
    _emit(json.dumps({"error": code, "detail": detail}, sort_keys=True), out)


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.verb is None:
            raise UsageError("a verb is required: " + ", ".join(VERBS))
        payload, code = VERBS[args.verb](args)
        if args.format == "csv":
            _emit(_render_csv(args.verb, payload), out)
        else:
            obj = _to_jsonable(payload)
            if args.approx:
                obj = _approx(obj)
            _emit(json.dumps(obj, indent=2, sort_keys=True), out)
        return code
    except UsageError as exc:
        _error("usage", str(exc), out)
        return EXIT_USAGE
    except IndeterminateSign as exc:
        _error(exc.code, str(exc), out)
        return EXIT_UNRESOLVED
    except (InvalidParams, DesignInvalid, DimensionMismatch, EnumerationTooLarge) as exc:
        _error(exc.code, str(exc), out)
        return EXIT_USAGE
    except LoadoutError as exc:
        _error(exc.code, str(exc), out)
        return EXIT_FAILURE
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        _error("invalid_params", str(exc), out)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
