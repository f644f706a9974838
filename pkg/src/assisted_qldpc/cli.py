"""
Command-line entry point.

A code is named by ``source[:assembly[:mode]]``, for example
``ag(4,3):standard_form:rqa`` or ``bose(81):addr_extend:ea``.  Sources are
``ag(m,q)``, ``pg(m,q)``, ``bose(v)``, ``peg(rows,cols,w,seed)`` and
``alist(path)``; assemblies are ``incidence``, ``standard_form`` and
``addr_extend``; modes are ``rqa``, ``ea`` and ``hyp`` (hypothetical CSS).
"""

from __future__ import annotations

import argparse
import ast
import operator
import os
import re
import sys
from dataclasses import dataclass

from assisted_qldpc import analysis, decode_sim, designs, galois, gf2, qcode
from assisted_qldpc.designs import PairwiseBalancedDesign
from assisted_qldpc.gf2 import BinaryMatrix, BudgetExceeded

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION, EXIT_BUDGET = 0, 1, 2, 3

ASSEMBLIES = ("incidence", "standard_form", "addr_extend")
MODES = ("rqa", "ea", "hyp")
CHECKS = ("girth", "evenfree", "configs", "ranks", "oddpoint", "degeneracy")


class SpecError(ValueError):
    """Malformed or inconsistent code specification."""


@dataclass(frozen=True)
class CodeSpec:
    source: str
    args: tuple
    assembly: str
    mode: str

    @property
    def code_id(self) -> str:
        # no commas, so plotting tools can split the CSV naively
        inner = " ".join(str(a).replace(",", " ") for a in self.args)
        return f"{self.source}({inner}):{self.assembly}"


_SOURCE = re.compile(r"^\s*(ag|pg|bose|peg|alist)\s*\((.*)\)\s*$", re.IGNORECASE)


def parse_spec(text: str) -> CodeSpec:
    """Parse ``source[:assembly[:mode]]`` and validate the combination."""
    # alist paths may contain ':'; split from the right on known words only
    src, rest = text, []
    while len(rest) < 2 and ":" in src:
        head, tail = src.rsplit(":", 1)
        if tail.strip().lower() not in ASSEMBLIES + MODES:
            break
        src, rest = head, [tail.strip().lower()] + rest
    m = _SOURCE.match(src)
    if not m:
        raise SpecError(f"unknown source {src!r}")
    kind, inner = m.group(1).lower(), m.group(2).strip()
    if kind == "alist":
        args: tuple = (inner,)
    else:
        try:
            args = tuple(int(x) for x in inner.split(","))
        except ValueError:
            raise SpecError(f"bad arguments in {src!r}") from None
        want = {"ag": 2, "pg": 2, "bose": 1, "peg": 4}[kind]
        if len(args) != want:
            raise SpecError(f"{kind} takes {want} arguments")
    assembly = next((p for p in rest if p in ASSEMBLIES), None)
    mode = next((p for p in rest if p in MODES), None)
    if assembly is None:
        assembly = "incidence" if kind == "peg" or mode in ("ea", "hyp") else "standard_form"
    if mode is None:
        mode = "rqa" if assembly == "standard_form" else "ea"
    if mode == "rqa" and assembly != "standard_form":
        raise SpecError("rqa requires the standard_form assembly")
    if mode == "ea" and assembly == "standard_form":
        raise SpecError("ea accepts the incidence or addr_extend assembly")
    if kind == "peg" and assembly != "incidence":
        raise SpecError("peg matrices support the incidence assembly only")
    return CodeSpec(kind, args, assembly, mode)


@dataclass
class Built:
    spec: CodeSpec
    H: BinaryMatrix
    design: PairwiseBalancedDesign | None
    geometry: galois.GeometryDesign | None
    standard: qcode.StandardFormCode | None = None


def _source_design(spec: CodeSpec):
    if spec.source == "ag":
        g = galois.ag_lines(*spec.args)
        return g.design, g
    if spec.source == "pg":
        g = galois.pg_lines(*spec.args)
        return g.design, g
    if spec.source == "bose":
        return designs.bose_sts(*spec.args), None
    if spec.source == "alist":
        M = designs.read_alist(spec.args[0])
        return PairwiseBalancedDesign.from_incidence(M), None
    return None, None


def build(spec: CodeSpec) -> Built:
    d, geo = _source_design(spec)
    if spec.source == "peg":
        return Built(spec, qcode.peg_construct(*spec.args), None, None)
    if spec.assembly == "standard_form":
        sf = qcode.build_standard_form(d)
        return Built(spec, sf.H, d, geo, sf)
    if spec.assembly == "addr_extend":
        return Built(spec, qcode.extend_addR(d), d, geo)
    return Built(spec, designs.incidence(d), d, geo)


def _theorem_distance(b: Built) -> int | None:
    """Design distance supplied by the erasure theorems for odd q."""
    g = b.geometry
    if g is None or g.q % 2 == 0:
        return None
    if g.kind == "AG":
        return 2 * g.q
    return 2 * g.q + 2 if g.m >= 3 else None


def params_of(b: Built, catalytic: bool = True, budget: int = 50_000_000) -> qcode.QuantumCodeParams:
    if b.spec.mode == "rqa":
        return qcode.rqa_params(b.standard)
    dist, src = qcode.ea_design_distance(b.H, _theorem_distance(b), node_budget=budget)
    if b.spec.mode == "hyp":
        return qcode.hypothetical_params(b.H, dist)
    return qcode.ea_params(b.H, dist, catalytic=catalytic, distance_source=src)


# ------------------------------------------------------------------ commands

def cmd_construct(args) -> int:
    b = build(parse_spec(args.spec))
    if args.out:
        designs.write_alist(b.H, args.out)
    w = qcode.WeightProfile.of(b.H)
    print(analysis.format_record({
        "code": b.spec.code_id, "rows": b.H.rows, "cols": b.H.cols,
        "mean_col_row_weight": w.mean, "max_col_row_weight": w.max,
        "alist": args.out or "-",
    }))
    return EXIT_OK


def cmd_params(args) -> int:
    b = build(parse_spec(args.spec))
    print(params_of(b, catalytic=not args.raw_dimension, budget=args.budget).to_record())
    return EXIT_OK


def _analyze(b: Built, checks, budget: int, kinds) -> tuple[list[str], int]:
    lines: list[str] = []
    violated = over_budget = False

    def flag(ok: bool, what: str):
        nonlocal violated
        if not ok:
            violated = True
            lines.append(f"violation: {what}")

    d, geo = b.design, b.geometry
    steiner = d is not None and d.is_steiner() and d.mu >= 2
    ef = None
    for check in checks:
        lines.append(f"[{check}]")
        try:
            if check == "girth":
                g = analysis.girth(b.H)
                lines.append(f"girth: {g if g is not None else 'acyclic'}")
                if steiner and b.spec.assembly in ("incidence", "standard_form") and d.v > d.mu:
                    flag(g == 6, "design-derived matrix should have girth 6")
            elif check == "evenfree":
                if d is None:
                    lines.append("even_freeness: not applicable")
                    continue
                ef = analysis.even_freeness(d, r_max=7 if not geo else min(2 * geo.q + 1, 12),
                                            node_budget=budget)
                lines.append(ef.to_record())
                if steiner and d.mu == 3 and d.v > 3:
                    flag(3 <= ef.r <= 7, "triple systems are 3- but never 8-even-free")
                if geo is not None and geo.q % 2 == 1:
                    if geo.kind == "AG":
                        flag(ef.r == 2 * geo.q - 1, f"AG even-freeness should be {2 * geo.q - 1}")
                    elif geo.m >= 3:
                        flag(ef.r == 2 * geo.q + 1, f"PG even-freeness should be {2 * geo.q + 1}")
            elif check == "configs":
                if not steiner:
                    lines.append("configs: not applicable")
                    continue
                for kind in kinds or (("pasch", "grid", "double_triangle") if d.mu == 3
                                      else ("generalized_pasch",)):
                    lines.append(f"{kind}: {analysis.count_configurations(d, kind)}")
                    if kind == "pasch" and ef is not None and ef.exact:
                        n = int(lines[-1].split()[-1])
                        flag((n == 0) == (ef.r >= 4), "Pasch count disagrees with even-freeness")
            elif check == "ranks":
                if d is None:
                    lines.append(f"rank: {gf2.rank(b.H)}\ngram_rank: {gf2.gram_rank(b.H)}")
                    continue
                rep = analysis.rank_predictions(geo or d)
                lines.append(rep.to_record())
                flag(rep.all_consistent, "a rank prediction failed")
            elif check == "oddpoint":
                if geo is None or geo.q % 2 == 0:
                    lines.append("oddpoint: no bound applies")
                    continue
                q = geo.q
                limit, bound = (2 * q - 1, 2 * q) if geo.kind == "AG" else (2 * q + 1, 2 * q + 2)
                if limit > analysis.ODD_POINT_MAX:
                    raise BudgetExceeded(f"range {limit} exceeds the exhaustive limit")
                res = analysis.odd_point_bound_check(d, limit, bound, budget=budget)
                lines.append(res.to_record())
                flag(res.holds, "|C| + odd(C) bound failed")
            elif check == "degeneracy":
                if b.spec.assembly != "addr_extend":
                    lines.append("degeneracy: needs the addr_extend assembly")
                    continue
                target = _theorem_distance(b) or 6
                if b.H.rows > analysis.AUDIT_MAX_ROWS:
                    lines.append("degeneracy: not audited")
                    over_budget = True
                    continue
                rep = analysis.degeneracy_audit(b.H, target)
                lines.append(rep.to_record())
                if steiner and d.mu == 3 and d.v not in (21, 33, 45):
                    flag(rep.non_degenerate_conclusion, "extension should be non-degenerate")
        except BudgetExceeded as exc:
            lines.append(f"budget exceeded: {exc}")
            over_budget = True
    # a violation outranks an incomplete check
    return lines, EXIT_VIOLATION if violated else EXIT_BUDGET if over_budget else EXIT_OK


def cmd_analyze(args) -> int:
    b = build(parse_spec(args.spec))
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    bad = [c for c in checks if c not in CHECKS]
    if bad:
        raise SpecError(f"unknown checks {bad}")
    kinds = [k.strip() for k in args.configs.split(",")] if args.configs else None
    lines, status = _analyze(b, checks, args.budget, kinds)
    print("\n".join(lines))
    print(f"status: {('ok', 'error', 'violation', 'budget')[status]}")
    return status


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def parse_split(expr: str):
    """Compile an arithmetic expression in ``p`` (numbers, + - * / ** only)."""
    tree = ast.parse(expr, mode="eval")

    def ev(node, p):
        if isinstance(node, ast.Expression):
            return ev(node.body, p)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "p":
            return p
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left, p), ev(node.right, p))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand, p)
            return -v if isinstance(node.op, ast.USub) else v
        raise SpecError(f"unsupported element in split expression: {ast.dump(node)}")

    ev(tree, 0.1)
    return lambda p: ev(tree, p)


def parse_grid(text: str) -> tuple[float, ...]:
    try:
        grid = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise SpecError(f"bad grid {text!r}") from None
    if any(not 0 < p <= 0.5 for p in grid):
        raise SpecError("grid values must lie in (0, 0.5]")
    return grid


def cmd_simulate(args) -> int:
    spec = parse_spec(args.spec)
    grid = parse_grid(args.grid)
    split = parse_split(args.split) if args.split else None
    b = build(spec)
    cfg = decode_sim.SimConfig(grid, args.min_errors, args.max_trials, args.seed, args.threads)
    points = decode_sim.sweep(b.H, cfg, split=split)
    mode = spec.mode + ("-split" if split else "")
    text = decode_sim.bler_csv(points, spec.code_id, mode)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        if args.plot:
            with open(os.path.splitext(args.out)[0] + ".gp", "w") as fh:
                fh.write(decode_sim.gnuplot_script(args.out, spec.code_id))
    else:
        sys.stdout.write(text)
    return EXIT_OK


TABLE1 = {
    "RQA": ("RQA [[1242,1080]] assist=162 rate=0.8696 d=4", "2.86/41", "3/41"),
    "EA": ("EA [[1161,997;1]] assist=1 catalytic rate=0.8587 d=6", "2.93/41.48", "3/81"),
    "H-AG": ("H-CSS [[1080,918]] assist=(80) rate=0.8500 d=6", "3/40", "3/40"),
}


def table1_rows(budget: int = 50_000_000, peg_seed: int = 1) -> list[tuple[str, str, str, str]]:
    """(label, params record, mean weights, max weights) for the AG(4,3) comparison."""
    rows = []
    for label, text in (("RQA", "ag(4,3):standard_form:rqa"), ("EA", "ag(4,3):addr_extend:ea"),
                        ("H-AG", "ag(4,3):incidence:hyp")):
        b = build(parse_spec(text))
        w = qcode.WeightProfile.of(b.H)
        rows.append((label, params_of(b, budget=budget).to_record(), w.mean, w.max))
    peg = qcode.peg_construct(82, 1161, 3, peg_seed)
    w = qcode.WeightProfile.of(peg)
    rows.append(("H-PEG", qcode.hypothetical_params(peg).to_record(), w.mean, w.max))
    return rows


def cmd_verify_table1(args) -> int:
    ok = True
    for label, rec, mean, mx in table1_rows(args.budget, args.seed):
        want = TABLE1.get(label)
        good = want is None or (rec, mean, mx) == want
        ok &= good
        tag = "reference only" if want is None else ("match" if good else "MISMATCH")
        print(f"{label:6s} {rec:55s} mean {mean:11s} max {mx:6s} {tag}")
    print(f"status: {'ok' if ok else 'violation'}")
    return EXIT_OK if ok else EXIT_VIOLATION


# ---------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qldpc", description=__doc__.strip().splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, spec=True):
        if spec:
            p.add_argument("--spec", required=True, help="source[:assembly[:mode]]")
        p.add_argument("--budget", type=int, default=50_000_000, help="search node / subset budget")

    p = sub.add_parser("construct", help="build a check matrix and write it as alist")
    common(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("params", help="quantum code parameters")
    common(p)
    p.add_argument("--raw-dimension", action="store_true",
                   help="EA: report 2k-n+c instead of the catalytic 2k-n")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("analyze", help="structural checks against known results")
    common(p)
    p.add_argument("--checks", default=",".join(CHECKS))
    p.add_argument("--configs", help="comma list of configuration kinds")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo block error rates")
    common(p)
    p.add_argument("--grid", required=True, help="comma list of crossover probabilities")
    p.add_argument("--min-errors", type=int, default=100)
    p.add_argument("--max-trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=decode_sim.default_threads())
    p.add_argument("--split", help="p_aux as an expression in p, e.g. 'p/2'")
    p.add_argument("--out")
    p.add_argument("--plot", action="store_true", help="also write a gnuplot script")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-table1", help="regenerate the AG(4,3) parameter table")
    common(p, spec=False)
    p.add_argument("--seed", type=int, default=1, help="PEG seed")
    p.set_defaults(func=cmd_verify_table1)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
