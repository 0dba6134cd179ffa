"""Command-line interface: ``haarlab <command> [flags]``.

Every command builds a report of named checks; the exit status is 0 when
all checks pass, 1 when any fails, and 2 for invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .charts import ChartSpec, so_total_volume, su_total_volume
from .errors import HaarlabError
from .haar import (
    HaarSampler,
    QuadratureSpec,
    box_volume,
    default_quadrature,
    integrate,
    integrate_trace_power,
)
from .matgroup import Group, validate_matrices

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    command: str
    group: str
    chart: str = "hurwitz"
    nodes: int | None = None
    seed: int = 0
    samples: int | None = None
    format: str = "text"
    out: str | None = None
    tol: float | None = None
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass
class Check:
    name: str
    value: Any
    tol: Any
    passed: bool


@dataclass
class Report:
    command: str
    config: RunConfig
    checks: list[Check] = field(default_factory=list)
    table: list[dict] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    text: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name, value, tol, passed):
        self.checks.append(Check(name, value, tol, bool(passed)))


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers


def _compact_group(text: str) -> Group:
    try:
        return Group.parse(text)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _chart(cfg: RunConfig) -> ChartSpec:
    g = _compact_group(cfg.group)
    try:
        return ChartSpec(g, cfg.chart)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _quad(cfg: RunConfig, spec: ChartSpec) -> QuadratureSpec:
    if cfg.nodes is None:
        return default_quadrature(spec)
    return QuadratureSpec(cfg.nodes, periodic_nodes=cfg.nodes)


def _tol(cfg: RunConfig, default: float) -> float:
    return default if cfg.tol is None else cfg.tol


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else str(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, Fraction):
        return str(x)
    return x


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return f"{v:.12g}"
    if isinstance(v, (complex, np.complexfloating)):
        return f"{v.real:.12g}{v.imag:+.12g}i"
    return str(v)


def _csv_cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        return f"{float(v.real)!r}{float(v.imag):+}i"
    return _fmt(v)


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": report.command,
            "config": _jsonable(asdict(report.config)),
            "passed": report.passed,
            "checks": _jsonable([asdict(c) for c in report.checks]),
            "table": _jsonable(report.table),
            "data": _jsonable(report.data),
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        rows = report.table or [asdict(c) for c in report.checks]
        buf = io.StringIO()
        if rows:
            keys = list(rows[0])
            w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: _csv_cell(r.get(k, "")) for k in keys})
        return buf.getvalue()
    lines = [f"# {report.command}: {report.config.group}"]
    if report.text:
        lines.append(report.text)
    if report.table:
        keys = list(report.table[0])
        cells = [[_fmt(r.get(k, "")) for k in keys] for r in report.table]
        widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
        lines.append("  ".join(k.rjust(w) for k, w in zip(keys, widths)))
        lines.extend("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells)
    for c in report.checks:
        lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {_fmt(c.value)} (tol {_fmt(c.tol)})")
    lines.append("OK" if report.passed else "FAILED")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_volume(cfg: RunConfig) -> Report:
    spec = _chart(cfg)
    g = spec.group
    tol = _tol(cfg, 1e-8)
    closed = so_total_volume(g.n) if g.kind == "SO" else su_total_volume(g.n)
    quad = box_volume(spec, _quad(cfg, spec))
    rel = abs(quad - closed) / closed
    rep = Report("volume", cfg)
    rep.table.append({"group": str(g), "chart": spec.kind, "closed_form": closed,
                      "quadrature": quad, "rel_error": rel})
    rep.data = {"closed_form": closed, "quadrature": quad, "rel_error": rel}
    rep.check("relative error", rel, tol, rel < tol)
    return rep


def cmd_sample(cfg: RunConfig) -> Report:
    spec = _chart(cfg)
    count = cfg.samples if cfg.samples is not None else 10
    if count < 1:
        raise UsageError("--samples must be positive")
    sampler = HaarSampler(spec, cfg.seed)
    mats = sampler.sample_batch(count)
    ok = validate_matrices(mats, spec.group)
    rep = Report("sample", cfg)
    real = spec.group.is_real
    for i, m in enumerate(mats):
        for a in range(m.shape[0]):
            for b in range(m.shape[1]):
                row = {"sample": i, "row": a, "col": b, "re": float(m[a, b].real)}
                if not real:
                    row["im"] = float(m[a, b].imag)
                rep.table.append(row)
    rep.data = {"matrices": [[[(v.real if real else [v.real, v.imag]) for v in r] for r in m] for m in mats]}
    if cfg.format == "text":
        rep.text = "\n\n".join(np.array2string(m.real if real else m, precision=15, max_line_width=200)
                               for m in mats)
        rep.table = []
    rep.check("all samples validate", int(ok.sum()), count, bool(ok.all()))
    mean = float(np.mean(mats[:, 0, 0].real))
    se = float(np.std(mats[:, 0, 0].real, ddof=1) / math.sqrt(count)) if count > 1 else float("inf")
    z = abs(mean) / se if se > 0 else 0.0
    rep.data.update({"mean_g11": mean, "stderr_g11": se})
    rep.check("mean of Re g11 within 3 sigma of 0", z, 3.0, z < 3.0)
    return rep


def cmd_orthogonality(cfg: RunConfig) -> Report:
    from .reps import character_inner, defining_rep, matrix_element_gram, schur_pattern, sym_power_rep

    spec = _chart(cfg)
    g = spec.group
    q = _quad(cfg, spec)
    degrees = cfg.extra.get("reps") or ("0,1,2" if g.kind == "SU" and g.n == 2 else "0,1")
    reps = []
    for tok in degrees.split(","):
        tok = tok.strip()
        reps.append(defining_rep(g) if tok == "def" else sym_power_rep(g, int(tok)))
    tol_gram = _tol(cfg, 1e-6)
    tol_char = min(tol_gram, 1e-8) if cfg.tol is None else cfg.tol
    gram = matrix_element_gram(reps, spec, q)
    pattern = schur_pattern([r.dim for r in reps])
    dev = float(np.max(np.abs(gram - pattern)))
    rep = Report("orthogonality", cfg)
    rep.data = {"gram_diagonal": np.real(np.diag(gram)), "gram_max_deviation": dev,
                "dims": [r.dim for r in reps]}
    rep.check("matrix-element Gram matrix = delta delta / dim", dev, tol_gram, dev < tol_gram)
    for i, a in enumerate(reps):
        for j, b in enumerate(reps[i:], start=i):
            v = complex(character_inner(a.character, b.character, spec, q))
            target = 1.0 if i == j else 0.0
            err = abs(v - target)
            rep.table.append({"chi_1": a.label, "chi_2": b.label, "inner": v.real, "expected": target})
            rep.check(f"<{a.label}, {b.label}>", v.real, tol_char, err < tol_char)
    return rep


_FUNCTIONS = {"1": 0, "tr": 1, "tr2": 2, "tr3": 3, "tr4": 4}


def cmd_weyl_check(cfg: RunConfig) -> Report:
    from .weyl import weyl_group_order, weyl_integrate

    g = _compact_group(cfg.group)
    if g.kind != "SO" or g.n < 3:
        raise UsageError("weyl-check supports so:N with N >= 3")
    tol = _tol(cfg, 1e-6)
    names = (cfg.extra.get("functions") or "1,tr,tr2,tr3,tr4").split(",")
    unknown = [f for f in names if f.strip() not in _FUNCTIONS]
    if unknown:
        raise UsageError(f"unknown function(s) {unknown}; choose from {sorted(_FUNCTIONS)}")
    nodes = cfg.nodes or 128
    wd = weyl_group_order(g.n, nodes)
    rep = Report("weyl-check", cfg)
    rep.data = {"weyl_order": wd.order, "calibration": wd.calibration}
    rep.check("|W| calibration integral is an integer", wd.distance, tol, wd.distance < tol)
    spec = ChartSpec(g)
    for name in names:
        k = _FUNCTIONS[name.strip()]

        def f(m, k=k):
            return np.trace(m, axis1=-2, axis2=-1).real ** k

        torus = weyl_integrate(f, g.n, nodes, seed=cfg.seed)
        if g.n <= 4:
            full, method = integrate(f, spec), "hurwitz quadrature"
        else:
            full, method = integrate_trace_power(spec, k), "hurwitz moment tensor"
        diff = abs(torus - full)
        rep.table.append({"f": name.strip(), "torus": torus, "group": full, "abs_diff": diff, "method": method})
        rep.check(f"weyl formula for {name.strip()}", diff, tol, diff < tol)
    return rep


def _load_finite(cfg: RunConfig):
    from .finite import load_group

    return load_group(cfg.group)


def cmd_chartable(cfg: RunConfig) -> Report:
    from .finite import (
        frobenius_axiom_check,
        regular_rep_oracle,
        solve_character_equation,
        tables_match,
    )
    from .finite.characters import ORACLE_CAP, check_character_equation

    G = _load_finite(cfg)
    table = solve_character_equation(G, seed=cfg.seed)
    rep = Report("chartable", cfg)
    rep.data = table.to_dict()
    rep.data["order"] = G.h
    if cfg.format == "csv":
        for i, (f, row) in enumerate(zip(table.degrees, rep.data["rows"])):
            rep.table.append({"row": i, "degree": f, **{f"class{a}": v for a, v in enumerate(row)}})
    else:
        rep.text = table.format_text()
    bad = check_character_equation(table)
    rep.check("character equation (exact)", len(bad), 0, not bad)
    rep.check("sum of squared degrees = h", sum(f * f for f in table.degrees), G.h,
              sum(f * f for f in table.degrees) == G.h)
    rep.check("degrees divide h", list(table.degrees), G.h, all(G.h % f == 0 for f in table.degrees))
    ax = frobenius_axiom_check(G, table)
    rep.check("character axioms (exact)", ax.max_residual, 0, ax.passed())
    sizes = table.classes.sizes
    rows = table.rows
    ortho = all(
        sum(sizes[a] * rows[i][a] * rows[j][a].conjugate() for a in range(table.k)) == (G.h if i == j else 0)
        for i in range(table.k) for j in range(table.k)
    )
    cols = all(
        sum(rows[i][a] * rows[i][b].conjugate() for i in range(table.k)) == (Fraction(G.h, sizes[a]) if a == b else 0)
        for a in range(table.k) for b in range(table.k)
    )
    rep.check("row orthogonality (exact)", ortho, True, ortho)
    rep.check("column orthogonality (exact)", cols, True, cols)
    if G.h <= ORACLE_CAP:
        tol = _tol(cfg, 1e-8)
        match = tables_match(table, regular_rep_oracle(G, seed=cfg.seed).table, tol)
        rep.check("matches regular-representation oracle", match, tol, match)
    return rep


def cmd_groupdet(cfg: RunConfig) -> Report:
    from .finite import group_determinant, verify_factorization

    G = _load_finite(cfg)
    trials = cfg.extra.get("trials")
    trials = 20 if trials is None else trials
    tol = _tol(cfg, 1e-8)
    rep = Report("groupdet", cfg)
    if cfg.extra.get("symbolic"):
        import sympy

        if G.h > 8:
            raise UsageError("symbolic determinant limited to groups of order <= 8")
        xs = sympy.symbols(["x_E"] + [f"x_{i}" for i in range(1, G.h)])
        theta = group_determinant(G, np.array(xs, dtype=object))
        rep.data["symbolic"] = str(theta)
        rep.data["factored"] = str(sympy.factor(theta))
        rep.text = f"Theta = {theta}\n      = {sympy.factor(theta)}"
    r = verify_factorization(G, trials, cfg.seed)
    rep.data.update({"trials": r.trials, "degrees": list(r.degrees), "exponents": list(r.exponents)})
    for s in r.samples:
        rep.table.append({"trial": s["trial"], "theta": s["theta"], "product": s["product"],
                          "rel_residual": s["residual"]})
    if trials > 0:
        rep.check("Theta = prod det(sum pi(R) x_R)^f", r.max_residual, tol, r.max_residual < tol)
        rep.check("class-constant Theta = prod xi^(f^2)", r.class_residual, tol, r.class_residual < tol)
        rep.check("k x k class-algebra determinant", r.reduced_residual, tol, r.reduced_residual < tol)
    return rep


def cmd_invariants(cfg: RunConfig) -> Report:
    from .invariants import invariant_basis, invariant_dimension

    spec = _chart(cfg)
    p, r = cfg.extra.get("p"), cfg.extra.get("r")
    if p is None or r is None or p < 0 or r < 0:
        raise UsageError("invariants needs --p and --r (nonnegative)")
    q = _quad(cfg, spec)
    tol = _tol(cfg, 1e-3)
    count = invariant_dimension(spec.group.n, p, r, spec, q, tol=max(tol, 0.5))
    basis = invariant_basis(spec.group.n, p, r, spec, q)
    rep = Report("invariants", cfg)
    rep.data = {"value": count.value, "count": count.count, "distance": count.distance,
                "basis": [b.format() for b in basis]}
    rep.table = [{"index": i, "invariant": b.format()} for i, b in enumerate(basis)]
    rep.text = f"count = {count.count} (integral {count.value:.12g})"
    rep.check("count is an integer", count.distance, tol, count.distance < tol)
    rep.check("basis size equals count", len(basis), count.count, len(basis) == count.count)
    return rep


COMMANDS = {
    "volume": cmd_volume,
    "sample": cmd_sample,
    "orthogonality": cmd_orthogonality,
    "weyl-check": cmd_weyl_check,
    "chartable": cmd_chartable,
    "groupdet": cmd_groupdet,
    "invariants": cmd_invariants,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", required=True,
                        help="so:N / su:N, or a finite-group file / corpus name for chartable and groupdet")
    common.add_argument("--chart", choices=["hurwitz", "alt"], default="hurwitz")
    common.add_argument("--nodes", type=int, help="quadrature nodes per angle")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int)
    common.add_argument("--format", choices=["text", "json", "csv"], default="text")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--tol", type=float, help="override the command's tolerance")

    parser = argparse.ArgumentParser(prog="haarlab", description="Invariant integration on groups.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("volume", parents=[common], help="chart volume: closed form vs quadrature")
    sub.add_parser("sample", parents=[common], help="Haar-random group elements")
    p = sub.add_parser("orthogonality", parents=[common], help="Schur orthogonality report")
    p.add_argument("--reps", help="comma-separated symmetric powers, or 'def' (default 0,1,2 on su:2)")
    p = sub.add_parser("weyl-check", parents=[common], help="Weyl integration formula vs full quadrature")
    p.add_argument("--functions", help="comma-separated subset of 1,tr,tr2,tr3,tr4")
    sub.add_parser("chartable", parents=[common], help="character table of a finite group")
    p = sub.add_parser("groupdet", parents=[common], help="group determinant factorisation")
    p.add_argument("--trials", type=int, help="random points (default 20)")
    p.add_argument("--symbolic", action="store_true", help="also print the symbolic determinant")
    p = sub.add_parser("invariants", parents=[common], help="count and list invariants of forms")
    p.add_argument("--p", type=int, help="degree of the form")
    p.add_argument("--r", type=int, help="degree of the invariant in the coefficients")
    return parser


def parse_config(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    base = {"command", "group", "chart", "nodes", "seed", "samples", "format", "out", "tol"}
    extra = {k: v for k, v in vars(ns).items() if k not in base}
    if ns.nodes is not None and ns.nodes < 2:
        raise UsageError("--nodes must be at least 2")
    return RunConfig(ns.command, ns.group, ns.chart, ns.nodes, ns.seed, ns.samples,
                     ns.format, ns.out, ns.tol, extra)


def run(cfg: RunConfig) -> Report:
    return COMMANDS[cfg.command](cfg)


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        report = run(cfg)
    except (UsageError, HaarlabError, FileNotFoundError, KeyError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"haarlab: error: {msg}", file=sys.stderr)
        return 2
    text = render(report, cfg.format)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
