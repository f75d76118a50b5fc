"""Command-line front end.

Every command builds a :class:`RunReport`.  Without ``--json`` the report is
printed as ``key: value`` lines (timing omitted, so output is byte-stable);
with ``--json`` it is printed as sorted JSON.  Exit codes: 0 when every check
passed, 1 when a check failed, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import isprime

from . import __version__
from .catalog import OrderDocumentError, Preset, load_preset, parse_order_document, preset_names
from .errors import CheckFailed, NotPrincipal, QuatlatError
from .hamiltonian import (
    E8Report,
    build_lambda_lattice,
    count_root_pairs,
    e8_report,
    find_pi_lambda,
    orbit_report,
    verify_gamma2,
)
from .quat import QuatElement, different, is_maximal, principal_different_witness, unit_group
from .ternary import (
    TableRow,
    deuring_check,
    enumerate_S,
    is_admissible,
    m_transform,
    order_from_ternary,
    represents_one,
    table,
    theorem25_report,
)

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def plain(x):
    """JSON-ready copy of ``x``; rationals become ``"p/q"`` strings."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, float, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, QuatElement):
        return str(x)
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return {f.name: plain(getattr(x, f.name)) for f in dataclasses.fields(x)}
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    raise TypeError(f"cannot serialize {type(x).__name__}")


@dataclass
class RunReport:
    command: list[str]
    inputs: dict
    outputs: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    timing: float = 0.0
    version: str = __version__
    csv: str | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.inputs = plain(self.inputs)
        self.outputs = plain(self.outputs)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "command": list(self.command),
            "inputs": self.inputs,
            "outputs": self.outputs,
            "failures": list(self.failures),
            "ok": self.ok,
            "timing": self.timing,
            "version": self.version,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        d = json.loads(text)
        return cls(d["command"], d["inputs"], d["outputs"], d["failures"], d["timing"], d["version"])

    def to_text(self) -> str:
        lines = [f"command: {' '.join(self.command)}", f"status: {'ok' if self.ok else 'FAILED'}"]
        _flatten("inputs", self.inputs, lines)
        _flatten("outputs", self.outputs, lines)
        lines += [f"failure: {f}" for f in self.failures]
        lines.append(f"version: {self.version}")
        return "\n".join(lines) + "\n"


def _flatten(prefix: str, x, lines: list[str]) -> None:
    if isinstance(x, dict):
        for k, v in x.items():
            _flatten(f"{prefix}.{k}", v, lines)
    elif isinstance(x, list) and any(isinstance(v, (dict, list)) for v in x):
        for i, v in enumerate(x):
            _flatten(f"{prefix}[{i}]", v, lines)
    elif isinstance(x, list):
        lines.append(f"{prefix}: [{', '.join(_scalar(v) for v in x)}]")
    else:
        lines.append(f"{prefix}: {_scalar(x)}")


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return "null" if v is None else str(v)


# ---------------------------------------------------------------------------
# Inputs


def _load(args) -> tuple[Preset, dict]:
    if getattr(args, "order_file", None):
        try:
            with open(args.order_file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"{args.order_file}: {exc.strerror}") from None
        try:
            p = parse_order_document(text, os.path.basename(args.order_file))
        except OrderDocumentError as exc:
            raise UsageError(f"{args.order_file}: {exc}") from None
        return p, {"order_file": args.order_file}
    if getattr(args, "preset", None):
        try:
            return load_preset(args.preset), {"preset": args.preset}
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    raise UsageError("give --preset or --order-file")


def _jobs(args) -> int:
    if args.jobs is not None:
        return args.jobs
    env = os.environ.get("QUATLAT_JOBS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"QUATLAT_JOBS must be a positive integer, got {env!r}") from None
        if n < 1:
            raise UsageError(f"QUATLAT_JOBS must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


# ---------------------------------------------------------------------------
# Commands


def cmd_order_info(args) -> RunReport:
    p, inputs = _load(args)
    o = p.order
    out = {
        "name": p.name,
        "algebra": str(o.algebra),
        "basis": [str(x) for x in o.basis],
        "discriminant": o.algebra.discriminant,
        "ramified_primes": list(o.algebra.ramified_primes),
        "reduced_discriminant": o.reduced_discriminant,
        "maximal": is_maximal(o),
    }
    if out["maximal"]:
        out["different_basis"] = [str(x) for x in different(o).basis]
        w = principal_different_witness(o)
        out["principal_different"] = w is not None
        out["witness"] = None if w is None else str(w)
    out["unit_count"] = len(unit_group(o))
    return RunReport(args.argv, inputs, out)


def _parse_lambda(p: Preset, text: str) -> QuatElement:
    if text in p.lambdas:
        return p.lambdas[text]
    parts = text.split(",")
    try:
        if len(parts) != 4:
            raise ValueError
        return p.order.algebra.elt(*[Fraction(x.strip()) for x in parts])
    except (ValueError, ZeroDivisionError):
        names = ", ".join(p.lambdas) or "none"
        raise UsageError(f"--lambda: expected a preset name ({names}) or four rationals a,b,c,d") from None


def _report_dict(r: E8Report, lam) -> dict:
    d = plain(r)
    d["ok"] = r.ok
    if lam is not None:
        e1, e2 = lam.obasis
        if lam.f0(e1) == 1 and lam.f0(e2) == 1:
            d["unitary_order"] = count_root_pairs(lam, lam.hermitian(e1, e2))
    return d


def cmd_gamma2(args) -> RunReport:
    p, inputs = _load(args)
    o = p.order
    inputs.update(route=args.route, **({"lambda": args.lam} if args.lam else {}))
    if not is_maximal(o):
        raise UsageError("order is not maximal")
    lam = _parse_lambda(p, args.lam) if args.lam else None
    rep = RunReport(args.argv, inputs)
    reports = []
    try:
        if args.route in ("lambda", "both"):
            try:
                pi, lam0 = find_pi_lambda(o)
            except NotPrincipal:
                if args.route == "lambda":
                    raise
                pi = None
            if pi is not None:
                lat = build_lambda_lattice(o, pi, lam or lam0)
                reports.append(_report_dict(e8_report(lat, "lambda"), lat))
        if args.route in ("glue", "both"):
            reports.append(_report_dict(verify_gamma2(o, "glue")[0], None))
    except NotPrincipal as exc:
        rep.failures.append(f"{exc} [principal different]")
    rep.outputs = plain({"reports": reports})
    for r in reports:
        rep.failures += [f"{r['construction']}: {k} [E8 witness for gamma_2]"
                         for k, v in r["checks"].items() if not v]
    if args.route != "glue" and not args.lam and len(p.lambdas) > 1:
        d = o.algebra.discriminant
        lats = [build_lambda_lattice(o, p.pi, x) for x in p.lambdas.values()]
        orb = orbit_report(d, lats)
        rep.outputs["orbits"] = plain(orb)
        if not orb.identities_ok:
            rep.failures.append("orbit sizes do not sum to (p+1)/m [orbit count]")
    return rep


def _csv(rows: list[TableRow], deuring: dict | None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["d", "t", "t_dnp"] + (["deuring_ok"] if deuring is not None else []))
    for r in rows:
        extra = [deuring[r.d]] if deuring is not None else []
        w.writerow([r.d, r.t, r.t_dnp] + extra)
    return buf.getvalue()


def cmd_table(args) -> RunReport:
    if args.dmax < 2:
        raise UsageError("--dmax must be at least 2")
    rows = table(args.dmax, _jobs(args))
    deuring = None
    rep = RunReport(args.argv, {"dmax": args.dmax, "deuring": args.deuring})
    if args.deuring:
        deuring = {}
        for r in rows:
            if r.d != 2 and isprime(r.d):
                ok = deuring_check(r.d, r)
                deuring[r.d] = "true" if ok else "false"
                if not ok:
                    rep.failures.append(f"d = {r.d}: t - t_dnp != (h(-p) + h(-4p))/2 [Deuring class count]")
            else:
                deuring[r.d] = "n/a"
    text = _csv(rows, deuring)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    rep.outputs = plain({"rows": [
        dict(dataclasses.asdict(r), **({"deuring_ok": deuring[r.d]} if deuring else {})) for r in rows
    ]})
    rep.csv = text
    return rep


def _check_d(d: int) -> None:
    if not is_admissible(d):
        raise UsageError(f"d = {d} is not squarefree with an odd number of prime factors")


def cmd_theorem25(args) -> RunReport:
    if args.from_ternary:
        d, idx = args.from_ternary
        _check_d(d)
        classes = enumerate_S(d)
        if not 0 <= idx < len(classes):
            raise UsageError(f"class index {idx} out of range 0..{len(classes) - 1}")
        # S(d) members map into R(d) under the M-transform
        o = order_from_ternary(m_transform(classes[idx], d), d)
        inputs = {"d": d, "index": idx, "gram": classes[idx].int_gram()}
    else:
        p, inputs = _load(args)
        o = p.order
        if not is_maximal(o):
            raise UsageError("order is not maximal")
    rep = RunReport(args.argv, inputs)
    try:
        r = theorem25_report(o)
    except CheckFailed as exc:
        rep.failures.append(f"{exc} [{exc.ref}]")
        return rep
    out = plain(r)
    out["agree"] = r.agree
    out["order_basis"] = [str(x) for x in o.basis]
    rep.outputs = out
    return rep


def cmd_ternary_classes(args) -> RunReport:
    _check_d(args.d)
    classes = enumerate_S(args.d)
    out = [{"index": i, "gram": c.int_gram(), "minimum": c.minimum(),
            "represents_one": represents_one(c)} for i, c in enumerate(classes)]
    return RunReport(args.argv, {"d": args.d}, {"t": len(out), "classes": out})


# ---------------------------------------------------------------------------
# Parser


def _order_source(sp, required: bool = True) -> None:
    g = sp.add_mutually_exclusive_group(required=required)
    g.add_argument("--preset", choices=preset_names())
    g.add_argument("--order-file", metavar="PATH")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--jobs", type=_positive, default=None,
                        help="worker processes (default: $QUATLAT_JOBS or CPU count)")

    ap = argparse.ArgumentParser(prog="quatlat", parents=[common],
                                 description="Exact computations on definite quaternion orders.")
    ap.add_argument("--version", action="version", version=f"quatlat {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    order = sub.add_parser("order", help="order queries")
    osub = order.add_subparsers(dest="action", required=True)
    info = osub.add_parser("info", parents=[common], help="discriminant, different, units")
    _order_source(info)
    info.set_defaults(func=cmd_order_info)

    g2 = sub.add_parser("gamma2", parents=[common], help="E8 witnesses for gamma_2 = sqrt(D)")
    _order_source(g2)
    g2.add_argument("--route", choices=["lambda", "glue", "both"], default="both")
    g2.add_argument("--lambda", dest="lam", metavar="NAME|a,b,c,d")
    g2.set_defaults(func=cmd_gamma2)

    tb = sub.add_parser("table", parents=[common], help="class counts t(d), t_dnp(d)")
    tb.add_argument("--dmax", type=int, required=True)
    tb.add_argument("--deuring", action="store_true", help="add the prime-case class-number check")
    tb.add_argument("--csv", metavar="PATH", help="also write the CSV to PATH")
    tb.set_defaults(func=cmd_table)

    t25 = sub.add_parser("theorem25", parents=[common], help="principal-different criteria")
    g = t25.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset", choices=preset_names())
    g.add_argument("--order-file", metavar="PATH")
    g.add_argument("--from-ternary", nargs=2, type=int, metavar=("D", "INDEX"))
    t25.set_defaults(func=cmd_theorem25)

    tern = sub.add_parser("ternary", help="ternary lattice queries")
    tsub = tern.add_subparsers(dest="action", required=True)
    cl = tsub.add_parser("classes", parents=[common], help="classes of S(d)")
    cl.add_argument("--d", type=int, required=True)
    cl.set_defaults(func=cmd_ternary_classes)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = ["quatlat"] + argv
    start = time.perf_counter()
    try:
        rep = args.func(args)
    except UsageError as exc:
        print(f"quatlat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckFailed as exc:
        rep = RunReport(args.argv, {}, failures=[f"{exc} [{exc.ref}]"])
    except QuatlatError as exc:
        print(f"quatlat: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rep.timing = round(time.perf_counter() - start, 6)
    if args.json:
        print(rep.to_json())
    elif rep.csv is not None:
        sys.stdout.write(rep.csv)
    else:
        sys.stdout.write(rep.to_text())
    for f in rep.failures:
        print(f"quatlat: check failed: {f}", file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_CHECK
