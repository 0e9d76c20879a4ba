"""Command-line front end.

Every subcommand builds a JSON-serialisable report; ``--format text`` renders
the same report as indented key/value lines.  The exit status is 0 exactly
when no section of the report carries a failure verdict.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from typing import Any

from . import __version__
from .charsum import DEFAULT_BUDGET, BudgetExceeded, exponential_sum, l_function, sum_bound_check
from .dwork import b_range, b_range_nonempty, trace_formula_check
from .ff import FieldError, make_field
from .ideals import FactorizationError, milnor_sum, theorem_1_18_check
from .koszul import check_vanishing, default_r_bound, page_table, regular_sequence_check
from .mpoly import PolyError, format_poly, homogeneous_parts, parse

SCHEMA_VERSION = 1
SELECTIONS = ("milnor", "spectral", "lfunction", "weil", "dwork")


class UsageError(ValueError):
    pass


@dataclass
class Report:
    command: str
    provenance: dict
    sections: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def fail(self, what: str):
        self.failures.append(what)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "provenance": self.provenance,
            **self.sections,
            "notes": self.notes,
            "failures": self.failures,
            "ok": not self.failures,
        }


# --- inputs


def _parse_modulus(text: str | None):
    if text is None:
        return None
    try:
        return [int(c) for c in re.split(r"[,\s]+", text.strip()) if c]
    except ValueError:
        raise UsageError(f"modulus must be comma-separated integers, got {text!r}") from None


def _infer_n(texts: list[str]) -> int:
    idx = [int(m) for t in texts for m in re.findall(r"x(\d+)", t)]
    return max(idx, default=1)


def _field(args):
    if args.p is None:
        raise UsageError("--p is required")
    return make_field(args.p, args.a, _parse_modulus(args.modulus))


def _poly(args, extra: list[str] = ()):
    if args.poly is None:
        raise UsageError("--poly is required")
    F = _field(args)
    n = args.n if args.n is not None else _infer_n([args.poly, *extra])
    return parse(args.poly, n, F)


def _positive(name: str, v):
    if v is not None and v < 1:
        raise UsageError(f"--{name} must be positive")


def _provenance(args) -> dict:
    keys = ("p", "a", "modulus", "poly", "n", "i_max", "r_bound", "cutoff_D", "precision_N",
            "budget", "tol", "threads")
    params = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    return {"package": "expsum", "version": __version__, "parameters": params}


def _field_json(F) -> dict:
    return {"p": F.p, "a": F.a, "q": F.q, "modulus": None if F.modulus is None else list(F.modulus)}


# --- subcommands


def cmd_analyze(args) -> Report:
    chosen = {s for s in SELECTIONS if getattr(args, s)}
    if args.full:
        chosen = set(SELECTIONS)
    if not chosen:
        raise UsageError("analyze needs at least one of --full, --milnor, --spectral, --lfunction, --weil, --dwork")
    if "weil" in chosen:
        chosen.add("lfunction")
    f = _poly(args)
    F = f.field
    if "dwork" in chosen and F.a != 1:
        if args.full:
            chosen.discard("dwork")
        else:
            raise UsageError("--dwork requires a = 1")
    rep = Report("analyze", _provenance(args))
    rep.sections["field"] = _field_json(F)
    rep.sections["polynomial"] = {"text": format_poly(f), "n": f.n}
    if f.degree < 1:
        raise UsageError("analyze needs a nonconstant polynomial")
    dec = homogeneous_parts(f)
    rep.sections["decomposition"] = {
        "delta": dec.delta,
        "delta_prime": dec.delta_prime,
        "top_form": format_poly(dec.top),
        "second_form": None if dec.second is None else format_poly(dec.second),
        "p_divides_delta": dec.delta % F.p == 0,
    }

    milnor = None
    if "milnor" in chosen or "spectral" in chosen:
        milnor = milnor_sum(f)
        rep.sections["milnor"] = {"M_f": milnor, "isolated": milnor is not None}

    degenerate_at = None
    if "spectral" in chosen:
        r_bound = args.r_bound if args.r_bound is not None else default_r_bound(f.n, dec.delta)
        reg, jdim = regular_sequence_check(dec.top)
        pages = []
        for e in range(1, dec.delta + 1):
            v = check_vanishing(f, e, r_bound=r_bound)
            entry = v.to_json()
            entry["b_range"] = b_range(F.p, dec.delta, e).to_json()
            pages.append(entry)
            if v.verified:
                degenerate_at = e
                break
        rep.sections["spectral"] = {
            "r_bound": r_bound,
            "top_form_regular_sequence": reg,
            "top_form_jacobian_dim": jdim,
            "pages": pages,
            "first_vanishing_page": degenerate_at,
        }

    lam_deg = None
    if "lfunction" in chosen:
        try:
            lrep = l_function(f, m=args.i_max, budget=args.budget, workers=args.threads,
                              tol=args.tol, weil="weil" in chosen)
        except BudgetExceeded as exc:
            rep.fail(f"charsum: {exc}")
            rep.sections["lfunction"] = {"error": str(exc), "partial": True}
        else:
            rep.sections["lfunction"] = lrep.to_json()
            lam_deg = lrep.lambda_degree
            if lrep.lam is None:
                rep.notes.append("Lambda is not a polynomial: L has nontrivial "
                                 + ("denominator" if f.n % 2 else "numerator"))
            if "weil" in chosen:
                if lrep.weil is None:
                    rep.sections["weil"] = {"applicable": False}
                else:
                    rep.sections["weil"] = {"applicable": True, **lrep.weil.to_json()}
                    if not lrep.weil.passed:
                        rep.fail("weil: reciprocal-root modulus off q^{n/2}")

    if "dwork" in chosen:
        try:
            cong = trace_formula_check(f, args.dwork_i_max, args.cutoff_D, args.precision_N,
                                       budget=args.budget)
        except BudgetExceeded as exc:
            rep.fail(f"dwork: {exc}")
            rep.sections["dwork"] = {"error": str(exc), "partial": True}
        else:
            rep.sections["dwork"] = cong.to_json()
            if not cong.passed:
                rep.fail("dwork: trace congruence T_i = S_i mod p^G failed")

    if "spectral" in chosen and "lfunction" in chosen:
        cross: dict[str, Any] = {"M_f": milnor, "lambda_degree": lam_deg, "vanishing_page": degenerate_at}
        applies = (degenerate_at is not None and milnor is not None
                   and b_range_nonempty(F.p, dec.delta, degenerate_at))
        cross["hypotheses_hold"] = applies
        cross["hypothesis_failure"] = not applies and lam_deg != milnor
        if applies:
            agree = lam_deg == milnor
            cross["agreement"] = agree
            if not agree:
                rep.fail("cross-check: deg Lambda != M_f although vanishing was verified")
        else:
            cross["agreement"] = None
            if cross["hypothesis_failure"]:
                rep.notes.append("hypothesis failure: no page with verified vanishing and nonempty b-range, "
                                 f"and deg Lambda = {lam_deg} differs from M_f = {milnor}")
        rep.sections["cross_check"] = cross
    return rep


def cmd_sum(args) -> Report:
    f = _poly(args)
    i_max = args.i_max or 1
    rep = Report("sum", _provenance(args))
    rep.sections["field"] = _field_json(f.field)
    rep.sections["polynomial"] = {"text": format_poly(f), "n": f.n}
    rows = []
    try:
        for i in range(1, i_max + 1):
            s = exponential_sum(f, i, args.budget, args.threads)
            rows.append({"i": i, "sum": s.to_json(), "text": str(s)})
    except BudgetExceeded as exc:
        rep.fail(f"charsum: {exc}")
        rep.sections["error"] = str(exc)
    rep.sections["sums"] = rows
    if args.milnor_bound:
        m = milnor_sum(f)
        if m is not None and rows:
            b = sum_bound_check(f, m, len(rows), args.budget)
            rep.sections["sum_bound"] = b.to_json()
    return rep


def cmd_lfunction(args) -> Report:
    f = _poly(args)
    rep = Report("lfunction", _provenance(args))
    rep.sections["field"] = _field_json(f.field)
    rep.sections["polynomial"] = {"text": format_poly(f), "n": f.n}
    try:
        lrep = l_function(f, degree_hint=args.degree_hint, m=args.i_max, budget=args.budget,
                          workers=args.threads, tol=args.tol, weil=not args.no_weil)
    except BudgetExceeded as exc:
        rep.fail(f"charsum: {exc}")
        rep.sections["error"] = str(exc)
        return rep
    rep.sections["lfunction"] = lrep.to_json()
    if lrep.weil is not None and not lrep.weil.passed:
        rep.fail("weil: reciprocal-root modulus off q^{n/2}")
    return rep


def cmd_spectral(args) -> Report:
    f = _poly(args)
    rep = Report("spectral", _provenance(args))
    rep.sections["polynomial"] = {"text": format_poly(f), "n": f.n}
    r_bound = args.r_bound if args.r_bound is not None else default_r_bound(f.n, f.degree)
    if args.check is not None:
        v = check_vanishing(f, args.check, r_bound=r_bound, collect_top=True)
        rep.sections["vanishing"] = v.to_json()
    else:
        rep.sections["page"] = page_table(f, args.page, r_bound, witnesses=args.witnesses).to_json()
    return rep


def _parse_factor(text: str, n: int, F):
    body, sep, mult = text.rpartition(":")
    if not sep:
        body, mult = text, "1"
    try:
        a = int(mult)
    except ValueError:
        raise UsageError(f"bad multiplicity in factor {text!r}") from None
    if a < 1:
        raise UsageError(f"multiplicity must be positive in {text!r}")
    return parse(body, n, F), a


def cmd_check_1_18(args) -> Report:
    if not args.factor:
        raise UsageError("check-1-18 needs at least one --factor 'poly[:mult]'")
    f = _poly(args, [*args.factor, args.second or ""])
    factors = [_parse_factor(t, f.n, f.field) for t in args.factor]
    second = parse(args.second, f.n, f.field) if args.second else None
    rep = Report("check-1-18", _provenance(args))
    rep.sections["polynomial"] = {"text": format_poly(f), "n": f.n}
    ci = theorem_1_18_check(factors, second, f)
    rep.sections["ci_report"] = ci.to_json()
    if not ci.passed:
        rep.fail("check-1-18: hypotheses not satisfied")
    return rep


def cmd_dwork_verify(args) -> Report:
    f = _poly(args)
    if f.field.a != 1:
        raise UsageError("dwork-verify requires a = 1")
    rep = Report("dwork-verify", _provenance(args))
    rep.sections["polynomial"] = {"text": format_poly(f), "n": f.n}
    cong = trace_formula_check(f, args.i_max or 2, args.cutoff_D, args.precision_N, budget=args.budget)
    rep.sections["dwork"] = cong.to_json()
    if not cong.passed:
        rep.fail("dwork: trace congruence T_i = S_i mod p^G failed")
    return rep


def cmd_b_range(args) -> Report:
    if args.p is None or args.delta is None or args.e is None:
        raise UsageError("b-range needs --p, --delta and --e")
    rep = Report("b-range", _provenance(args))
    br = b_range(args.p, args.delta, args.e)
    rep.sections["b_range"] = {**br.to_json(), "interval": str(br),
                               "inequality_holds": b_range_nonempty(args.p, args.delta, args.e)}
    return rep


COMMANDS = {
    "analyze": cmd_analyze,
    "sum": cmd_sum,
    "lfunction": cmd_lfunction,
    "spectral": cmd_spectral,
    "check-1-18": cmd_check_1_18,
    "dwork-verify": cmd_dwork_verify,
    "b-range": cmd_b_range,
}


# --- parser and rendering


def _common(sp: argparse.ArgumentParser):
    sp.add_argument("--p", type=int, help="field characteristic")
    sp.add_argument("--a", type=int, default=1, help="extension degree, q = p^a")
    sp.add_argument("--modulus", help="monic modulus coefficients, constant term first")
    sp.add_argument("--poly", help="polynomial in x1..xn, e.g. 'x1^3 + 2*x1*x2'")
    sp.add_argument("--n", type=int, help="number of variables (default: largest index in the text)")
    sp.add_argument("--i-max", type=int, help="number of sums S_1..S_m to compute")
    sp.add_argument("--r-bound", type=int, help="largest filtration index scanned")
    sp.add_argument("--cutoff-D", type=int, dest="cutoff_D", help="monomial degree cutoff for Dwork operators")
    sp.add_argument("--precision-N", type=int, dest="precision_N", help="p-adic precision exponent")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="cap on enumerated points")
    sp.add_argument("--tol", type=float, default=1e-9, help="tolerance for the purity check")
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.add_argument("--threads", type=int, default=1, help="worker threads for point enumeration")
    sp.add_argument("--config", help="JSON file of option defaults; explicit flags win")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="expsum", description="Exponential sums over finite fields.")
    ap.add_argument("--version", action="version", version=f"expsum {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analyze", help="run a selection of analyses on one polynomial")
    _common(sp)
    sp.add_argument("--full", action="store_true", help="all analyses")
    for s in SELECTIONS:
        sp.add_argument(f"--{s}", action="store_true")
    sp.add_argument("--dwork-i-max", type=int, default=2, help="number of trace congruences checked")

    sp = sub.add_parser("sum", help="exact sums S_1..S_m")
    _common(sp)
    sp.add_argument("--milnor-bound", action="store_true", help="compare |S_i| with M_f q^{ni/2}")

    sp = sub.add_parser("lfunction", help="L-function and Lambda")
    _common(sp)
    sp.add_argument("--degree-hint", type=int, help="degree of Lambda if known (Newton identities)")
    sp.add_argument("--no-weil", action="store_true", help="skip the purity check")

    sp = sub.add_parser("spectral", help="spectral sequence pages")
    _common(sp)
    sp.add_argument("--page", type=int, default=1, help="page t to tabulate")
    sp.add_argument("--check", type=int, help="check vanishing on page e instead of tabulating")
    sp.add_argument("--witnesses", action="store_true")

    sp = sub.add_parser("check-1-18", help="factorisation criterion for early degeneration")
    _common(sp)
    sp.add_argument("--factor", action="append", default=[], help="factor 'poly[:multiplicity]', repeatable")
    sp.add_argument("--second", help="second-highest homogeneous part (default: read off f)")

    sp = sub.add_parser("dwork-verify", help="trace formula congruences")
    _common(sp)

    sp = sub.add_parser("b-range", help="admissible b interval")
    _common(sp)
    sp.add_argument("--delta", type=int)
    sp.add_argument("--e", type=int)
    return ap


def _parse_args(argv):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        sp = ap._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sp._actions}
        unknown = set(k.replace("-", "_") for k in cfg) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        sp.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
        args = ap.parse_args(argv)
    for name in ("i_max", "r_bound", "cutoff_D", "precision_N", "budget", "threads"):
        _positive(name.replace("_", "-"), getattr(args, name, None))
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    return args


def _render_text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    elif isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            lines.append(pad + json.dumps(obj))
        else:
            for v in obj:
                lines.append(f"{pad}-")
                lines.extend(_render_text(v, indent + 1))
    else:
        lines.append(pad + json.dumps(obj))
    return lines


def render(report: Report, fmt: str) -> str:
    data = report.to_json()
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True)
    return "\n".join(_render_text(data))


def main(argv=None) -> int:
    try:
        args = _parse_args(argv)
        report = COMMANDS[args.command](args)
    except (UsageError, FieldError, PolyError, FactorizationError, ValueError, OSError) as exc:
        print(f"expsum: error: {exc}", file=sys.stderr)
        return 2
    print(render(report, args.format))
    return 0 if not report.failures else 1


if __name__ == "__main__":
    sys.exit(main())
