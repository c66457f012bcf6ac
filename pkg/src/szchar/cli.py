"""Command-line front end: tables, verifications, descent data, exports."""

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .chartab import (
    b2_table,
    derive_outer_table,
    outer_table,
    sz_table,
    verify_induction,
    verify_orthogonality,
)
from .chevalley import alpha_image_checks, relation_suite
from .cyclotomic import Cyclo
from .errors import ScaleExceeded, SzcharError
from .groups import context
from .lusztig import family_data, root_name, roots_of_unity, verify_digne_michel
from .shintani import (
    norm_map,
    verify_centralizer_doubling,
    verify_partner_classes,
    verify_thm41,
)

DEFAULT_BUDGET = 2_000_000
BUDGET_ENV = "SZCHAR_BUDGET"


@dataclass
class RunConfig:
    """One resolved invocation; q and theta always derive from n."""

    command: str
    n: int = 1
    format: str = "text"
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    target: str = ""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser():
    parser = _Parser(prog="szchar", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    def common(sp, fmt="text"):
        sp.add_argument("--n", type=int, default=1)
        sp.add_argument(
            "--format", choices=("json", "csv", "latex", "text"), default=fmt
        )
        sp.add_argument("--budget", type=int, default=None)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("table", help="print one character table")
    sp.add_argument("which", choices=("sz", "b2", "outer"))
    common(sp)
    common(sub.add_parser("derive-outer", help="replay the outer-table derivation"))
    sp = sub.add_parser("verify", help="run one verification suite")
    sp.add_argument(
        "which",
        choices=("orthogonality", "chevalley", "induction", "thm41", "digne-michel"),
    )
    common(sp)
    common(sub.add_parser("shintani", help="norm correspondence and witnesses"))
    common(sub.add_parser("roots", help="roots attached to the unipotent family"))
    common(sub.add_parser("fourier", help="Fourier data of the cuspidal family"))
    common(sub.add_parser("export", help="full dataset for one parameter"), fmt="json")
    return parser


def _resolve_budget(flag_value):
    if flag_value is not None:
        return flag_value
    env = os.environ.get(BUDGET_ENV)
    if env is not None:
        return int(env)
    return DEFAULT_BUDGET


def _config(args):
    target = getattr(args, "which", "")
    command = args.command if not target else f"{args.command} {target}"
    return RunConfig(
        command=command,
        n=args.n,
        format=args.format,
        budget=_resolve_budget(args.budget),
        seed=args.seed,
        target=target,
    )


# ---------------------------------------------------------------------------
# value formatting


def _approx(value, digits=6):
    z = value.to_complex()
    re = float(z.real)
    im = float(z.imag)
    if abs(im) < 10**-digits:
        return f"{re:.{digits}f}"
    return f"{re:.{digits}f}{im:+.{digits}f}j"


def _exact(value):
    rep = repr(value)
    return rep[6:-1] if rep.startswith("Cyclo(") else rep


def canonical_json(payload):
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def _table_payload(cfg):
    kind = cfg.target
    builder = {"sz": sz_table, "b2": b2_table, "outer": outer_table}[kind]
    table = builder(cfg.n)
    return {"n": cfg.n, "kind": kind, "table": table.to_jsonable()}, table


def _render_table(cfg, out):
    payload, table = _table_payload(cfg)
    cols = table.column_labels()
    if cfg.format == "json":
        out.write(canonical_json(payload))
    elif cfg.format == "csv":
        out.write("# lossy complex approximations; the exact values are the\n")
        out.write("# JSON output of the same command with --format json\n")
        out.write("row," + ",".join(cols) + "\n")
        for label in table.row_labels:
            vals = (_approx(table.value(label, c)) for c in cols)
            out.write(label + "," + ",".join(vals) + "\n")
    elif cfg.format == "latex":
        out.write("\\begin{tabular}{l" + "r" * len(cols) + "}\n")
        out.write(" & ".join(["class"] + cols).replace(":", "{:}") + " \\\\\n")
        for label in table.row_labels:
            cells = [_exact(table.value(label, c)) for c in cols]
            out.write(" & ".join([label] + cells) + " \\\\\n")
        out.write("\\end{tabular}\n")
    else:
        width = max(len(l) for l in table.row_labels) + 2
        out.write(f"{table.name}: {len(table.row_labels)} rows, {len(cols)} columns\n")
        for label in table.row_labels:
            cells = ", ".join(f"{c}={_exact(table.value(label, c))}" for c in cols)
            out.write(label.ljust(width) + cells + "\n")
    return 0


def _verify_payload(cfg):
    kind = cfg.target
    n = cfg.n
    detail = {}
    if kind == "orthogonality":
        rep = verify_orthogonality(n)
        checked = sum(v["checked"] for v in rep.values() if isinstance(v, dict))
        failures = [
            f"{part}: {fail}"
            for part, v in rep.items()
            if isinstance(v, dict)
            for fail in v["failures"]
        ]
    elif kind == "chevalley":
        ctx = context(n)
        counts = relation_suite(ctx.F, draws=1000, seed=cfg.seed)
        alpha_count = alpha_image_checks(ctx.F)
        checked = sum(counts.values()) + alpha_count
        failures = []
        detail["relations"] = counts
        detail["graph_map_images"] = alpha_count
    elif kind == "induction":
        _require_budget(cfg, 2 * context(n).borel_order, "Borel enumeration")
        rep = verify_induction(n)
        checked, failures = rep["checked"], rep["failures"]
    elif kind == "thm41":
        rep = verify_thm41(n)
        checked, failures = rep["checked"], rep["failures"]
        detail["parity"] = rep["parity"]
        detail["coefficients"] = rep["coefficients"]
    else:
        rep = verify_digne_michel(n)
        checked, failures = rep["checked"], rep["failures"]
        detail["sign"] = rep["sign"]
        detail["open"] = rep["open"]
    return {
        "command": cfg.command,
        "n": n,
        "checked": checked,
        "failures": failures,
        "ok": not failures and checked > 0,
        "detail": detail,
    }


def _require_budget(cfg, needed, what):
    if needed > cfg.budget:
        raise ScaleExceeded(
            f"{what} needs {needed} elements, over the budget {cfg.budget}"
        )


def _render_verify(cfg, out):
    payload = _verify_payload(cfg)
    if cfg.format == "json":
        out.write(canonical_json(payload))
    else:
        out.write(f"{payload['command']} (n={payload['n']})\n")
        out.write(f"checked {payload['checked']} exact identities\n")
        for key, value in sorted(payload["detail"].items()):
            out.write(f"{key}: {value}\n")
        if payload["failures"]:
            for fail in payload["failures"]:
                out.write(f"FAIL: {fail}\n")
        out.write("ok\n" if payload["ok"] else "failed\n")
    return 0 if payload["ok"] else 2


def _render_derive(cfg, out):
    table, report = derive_outer_table(cfg.n)
    derived = table.to_jsonable()
    tabulated = outer_table(cfg.n).to_jsonable()
    matches = (
        derived["rows"] == tabulated["rows"]
        and derived["columns"] == tabulated["columns"]
    )
    payload = {"n": cfg.n, "matches": matches, "report": report}
    if cfg.format == "json":
        out.write(canonical_json(payload))
    else:
        out.write(f"derive-outer (n={cfg.n})\n")
        for key, value in sorted(report.items()):
            out.write(f"{key}: {value}\n")
        out.write("matches tabulated outer table\n" if matches else "MISMATCH\n")
    return 0 if matches else 2


def _render_shintani(cfg, out):
    nm = norm_map(cfg.n)
    doubling = verify_centralizer_doubling(cfg.n)
    partners = verify_partner_classes(cfg.n)
    descent = verify_thm41(cfg.n)
    ok = doubling["ok"] and partners["ok"] and descent["ok"]
    payload = {
        "n": cfg.n,
        "norm_map": nm.to_jsonable(),
        "centralizer_doubling": doubling,
        "partner_classes": partners,
        "descent_identities": descent,
        "ok": ok,
    }
    if cfg.format == "json":
        out.write(canonical_json(payload))
    else:
        out.write(f"norm correspondence (n={cfg.n})\n")
        for entry in payload["norm_map"]["entries"]:
            marker = " [witness]" if entry["witness"] else ""
            out.write(f"{entry['sz_class']} -> {entry['outer_class']}{marker}\n")
        checked = doubling["checked"] + partners["checked"] + descent["checked"]
        out.write(f"checked {checked} exact identities\n")
        out.write("ok\n" if ok else "failed\n")
    return 0 if ok else 2


def _render_roots(cfg, out):
    roots = roots_of_unity(cfg.n)
    payload = {
        "n": cfg.n,
        "roots": {
            label: {"name": root_name(v), "approx": _approx(v)}
            for label, v in sorted(roots.items())
        },
    }
    if cfg.format == "json":
        out.write(canonical_json(payload))
    else:
        for label, data in sorted(payload["roots"].items()):
            out.write(f"{label}: {data['name']} ({data['approx']})\n")
    return 0


def _render_fourier(cfg, out):
    data = family_data(cfg.n)
    payload = {"n": cfg.n, **data}
    if cfg.format == "json":
        out.write(canonical_json(payload))
    else:
        out.write(f"families: {data['families']}\n")
        out.write(f"roots: {data['roots']}\n")
        block = data["fourier"]["cuspidal"]
        for row in block:
            out.write(
                "[" + ", ".join(_exact(Cyclo.from_dict(v)) for v in row) + "]\n"
            )
        out.write(data["normalization"] + "\n")
    return 0


def _render_export(cfg, out):
    n = cfg.n
    payload = {
        "n": n,
        "q": context(n).q,
        "theta": context(n).theta,
        "tables": {
            kind: builder(n).to_jsonable()
            for kind, builder in (("sz", sz_table), ("b2", b2_table), ("outer", outer_table))
        },
        "norm_map": norm_map(n).to_jsonable(),
        "families": family_data(n),
    }
    if cfg.format == "json":
        out.write(canonical_json(payload))
    elif cfg.format == "csv":
        out.write("# lossy complex approximations; the exact values are the\n")
        out.write("# JSON output of the same command with --format json\n")
        for kind in ("sz", "b2", "outer"):
            table = {"sz": sz_table, "b2": b2_table, "outer": outer_table}[kind](n)
            cols = table.column_labels()
            out.write(f"table,{kind}\n")
            out.write("row," + ",".join(cols) + "\n")
            for label in table.row_labels:
                vals = (_approx(table.value(label, c)) for c in cols)
                out.write(label + "," + ",".join(vals) + "\n")
    elif cfg.format == "latex":
        for kind in ("sz", "outer"):
            sub = RunConfig(
                command="table", n=n, format="latex", budget=cfg.budget, target=kind
            )
            _render_table(sub, out)
    else:
        out.write(f"dataset for n={n} (q={payload['q']})\n")
        for kind, tab in payload["tables"].items():
            out.write(f"{kind}: {len(tab['rows'])} rows\n")
        out.write(f"norm map entries: {len(payload['norm_map']['entries'])}\n")
        out.write(f"roots: {payload['families']['roots']}\n")
    return 0


_RENDERERS = {
    "table": _render_table,
    "derive-outer": _render_derive,
    "verify": _render_verify,
    "shintani": _render_shintani,
    "roots": _render_roots,
    "fourier": _render_fourier,
    "export": _render_export,
}


def run(argv=None, out=None):
    """Entry point; returns the exit code instead of raising SystemExit."""
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"szchar: error: {err}", file=sys.stderr)
        return 1
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1
    cfg = _config(args)
    if cfg.n < 1:
        print("szchar: error: --n must be at least 1", file=sys.stderr)
        return 1
    try:
        return _RENDERERS[args.command](cfg, out)
    except ScaleExceeded as err:
        out.write(canonical_json({"command": cfg.command, "error": "ScaleExceeded", "detail": str(err), "ok": False}))
        return 3
    except SzcharError as err:
        out.write(
            canonical_json(
                {
                    "command": cfg.command,
                    "error": type(err).__name__,
                    "detail": str(err),
                    "ok": False,
                }
            )
        )
        return 2


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
