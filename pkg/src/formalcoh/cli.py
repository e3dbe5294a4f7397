"""Command line: ``formalcoh eval|table|verify <manifest> ...``.

Exit codes: 0 success, 1 verification failure, 2 parse or input error,
3 inconclusive certificate.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .complexes import CohomologyTable, DegreeBox, as_complex, homology_table
from .derived import (DEFAULT_PLATEAU, DEFAULT_STAGES, formal_table, local_cohomology,
                      local_homology, tate_table)
from .errors import FormalCohError, Inconclusive, InvalidInput, ParseError, RouteDisagreement
from .invariants import (InvariantReport, cd, depth, dim_complex, fdepth, max_shift,
                         stage_policy)
from .language import Call, IdealLit, Name, parse_manifest, parse_query, _parse_box
from .monomial import MonomialIdeal
from .resolve import CONSTRUCTIONS, Context, resolve_manifest
from .verify import (CHECKS, PER_IDEAL, CheckConfig, Instance, VerificationOutcome,
                     prop_2_9_records, run_check)

DEFAULT_RADIUS = 5

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


@dataclass
class Settings:
    box: DegreeBox
    stages: int | None      # None: default bound, raised by the stage policy
    plateau: int

    def stages_for(self, box: DegreeBox, *objs) -> int:
        if self.stages is not None:
            return self.stages
        return max(DEFAULT_STAGES, stage_policy(box, self.plateau, max_shift(*objs)))


# --- loading -------------------------------------------------------------

def _box_from(bounds, n) -> DegreeBox:
    if len(bounds) == 1:
        bounds = bounds * n
    if len(bounds) != n:
        raise ParseError(f"box has {len(bounds)} intervals for {n} variables")
    return DegreeBox(bounds)


def load(text: str, box=None, stages=None, plateau=None, field=None) -> tuple[Context, Settings]:
    """Parse a manifest and apply command line overrides."""
    man = parse_manifest(text)
    ctx = resolve_manifest(man, field)
    n = ctx.ring.n
    if box is not None:
        bx = _box_from(_parse_box(box, None, None), n)
    elif "box" in man.options:
        bx = _box_from(man.options["box"], n)
    else:
        bx = DegreeBox.cube(n, -DEFAULT_RADIUS, DEFAULT_RADIUS)
    st = stages if stages is not None else man.options.get("stages")
    pl = plateau if plateau is not None else man.options.get("plateau", DEFAULT_PLATEAU)
    return ctx, Settings(bx, st, pl)


def header(ctx: Context, s: Settings, query: str | None = None, route: str | None = None) -> list[str]:
    n = ctx.ring.n
    lines = []
    if query is not None:
        lines.append(f"# query: {query}")
    lines.append(f"# ring: {ctx.ring.field}[{','.join(ctx.ring.names)}]")
    lines.append(f"# defaults: box [-{DEFAULT_RADIUS},{DEFAULT_RADIUS}]^{n}, stages {DEFAULT_STAGES}, "
                 f"plateau {DEFAULT_PLATEAU}")
    st = s.stages if s.stages is not None else f"{s.stages_for(s.box)} (policy)"
    lines.append(f"# box: {s.box}  stages: {st}  plateau: {s.plateau}")
    if route is not None:
        lines.append(f"# route: {route}")
    return lines


# --- evaluation ----------------------------------------------------------

TABLE_FUNCS = {"H", "Hloc", "F", "Tate"}
INVARIANTS = {"depth", "dim", "cd", "fdepth"}


def _split(call: Call, nideals: tuple[int, ...], nobj: int):
    """(ideal args, object args); ``;`` separates them, else the tail is objects."""
    groups = [g for g in call.groups]
    if len(groups) == 2:
        ids, objs = list(groups[0]), list(groups[1])
    elif len(groups) == 1:
        args = list(groups[0])
        ids, objs = args[:len(args) - nobj], args[len(args) - nobj:]
    else:
        raise ParseError(f"{call.func}: at most one ';' is allowed")
    if len(ids) not in nideals or len(objs) != nobj:
        want = " or ".join(str(k) for k in nideals)
        raise ParseError(f"{call.func} takes {want} ideal(s) and {nobj} object(s)")
    return ids, objs


def evaluate(ctx: Context, s: Settings, query: str):
    """CohomologyTable, InvariantReport or a plain string."""
    ast = parse_query(query)
    result = _evaluate(ctx, s, ast)
    if isinstance(result, CohomologyTable):
        result.meta["symbol"] = ast.func if isinstance(ast, Call) and ast.func in TABLE_FUNCS else "H"
    return result


def _evaluate(ctx: Context, s: Settings, ast):
    m = MonomialIdeal.maximal(ctx.ring.n)
    if isinstance(ast, Call) and ast.func in TABLE_FUNCS:
        f = ast.func
        if f == "F":
            ids, (x,) = _split(ast, (1, 2), 1)
            a = ctx.ideal(ids[0])
            b = ctx.ideal(ids[1]) if len(ids) == 2 else m
            X = ctx.obj(x)
            return formal_table(a, b, X, s.box, s.stages_for(s.box, X), s.plateau, ast.index)
        ids, (x,) = _split(ast, (1,), 1)
        a, X = ctx.ideal(ids[0]), ctx.obj(x)
        if f == "H":
            return local_cohomology(a, X, s.box, ast.index)
        if f == "Hloc":
            return local_homology(a, X, s.box, s.stages_for(s.box, X), s.plateau, ast.index)
        return tate_table(a, X, s.box, s.stages_for(s.box, X), s.plateau, ast.index)
    if isinstance(ast, Call) and ast.func in INVARIANTS:
        if ast.index is not None:
            raise ParseError(f"{ast.func} takes no index")
        f = ast.func
        if f == "dim":
            ids, (x,) = _split(ast, (0,), 1)
            return dim_complex(ctx.obj(x))
        if f == "fdepth":
            ids, (x,) = _split(ast, (1, 2), 1)
            a = ctx.ideal(ids[0])
            b = ctx.ideal(ids[1]) if len(ids) == 2 else m
            X = ctx.obj(x)
            # fdepth raises the bound itself for its margin boxes
            return fdepth(a, b, X, s.box, s.stages or DEFAULT_STAGES, s.plateau)
        ids, (x,) = _split(ast, (1,), 1)
        return (depth if f == "depth" else cd)(ctx.ideal(ids[0]), ctx.obj(x))
    if isinstance(ast, Call) and ast.func not in CONSTRUCTIONS:
        raise ParseError(f"unknown function {ast.func!r}")
    if isinstance(ast, (Name, IdealLit)) and _is_ideal(ctx, ast):
        I = ctx.ideal(ast)
        gens = ", ".join(ctx.ring.format_monomial(g) for g in I.generators)
        return f"ideal ({gens})" if gens else "ideal (0)"
    index = None
    if isinstance(ast, Call) and ast.index is not None:
        index = ast.index
        ast = Call(ast.func, None, ast.groups)
    C = as_complex(ctx.obj(ast))
    return homology_table(C, s.box, index, route="homology")


def _is_ideal(ctx, node):
    if isinstance(node, IdealLit):
        return True
    return node.id == "m" or node.id in ctx.ideals


# --- rendering -------------------------------------------------------------

def _deg(d) -> str:
    return "(" + ",".join(str(c) for c in d) + ")"


def _symbol(t: CohomologyTable) -> str:
    return t.meta.get("symbol", "H") + ("^" if t.kind == "cohomological" else "_")


def _cert(t: CohomologyTable, key) -> str:
    c = t.certificates.get(key)
    return "exact" if c is None else str(c)


def render_table(t: CohomologyTable, fmt: str, head: list[str]) -> str:
    lines = list(head)
    lines.append(f"# route: {t.route or 'homology'}  kind: {t.kind}  indices: {t.indices[0]}..{t.indices[1]}")
    lines.append(f"# certificate: stabilization stage per cell ('exact' where no stabilization is involved)")
    cells = t.sorted_cells()
    if fmt == "flat":
        for (i, d), v in cells:
            lines.append(f"{i}\t{_deg(d)}\t{v}\t{t.route or 'homology'}\t{_cert(t, (i, d))}")
        return "\n".join(lines) + "\n"
    rows = [("index", "degree", "dim", "stage")]
    rows += [(f"{_symbol(t)}{i}", _deg(d), str(v), _cert(t, (i, d))) for (i, d), v in cells]
    widths = [max(len(r[k]) for r in rows) for k in range(4)]
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    lines.append(f"# nonzero indices: {t.nonzero_indices() or 'none'}; {len(cells)} nonzero cells")
    return "\n".join(lines) + "\n"


def render(result, fmt: str, head: list[str]) -> str:
    if isinstance(result, CohomologyTable):
        return render_table(result, fmt, head)
    lines = list(head)
    if isinstance(result, InvariantReport):
        for k, v in sorted(result.detail.items()):
            lines.append(f"# {k}: {v}")
    lines.append(str(result))
    return "\n".join(lines) + "\n"


# --- verification ------------------------------------------------------------

def instances(ctx: Context):
    """(ideals, objects) of the manifest; m is added when not already named."""
    n = ctx.ring.n
    ideals = [(name, I) for name, I in ctx.ideals.items() if not I.is_zero()]
    m = MonomialIdeal.maximal(n)
    if all(I != m for _, I in ideals):
        ideals.append(("m", m))
    objects = list(ctx.objects.items())
    return ideals, objects


def run_verification(ctx: Context, s: Settings, only=None, out=None):
    """Run every applicable check; returns (outcomes, exit code).

    Records are tab separated: theorem, instance, status, evidence,
    optional counterexample.  ``only`` restricts to the given check ids.
    """
    out = out or sys.stdout
    names = [k for k in CHECKS if only is None or k in only]
    ideals, objects = instances(ctx)
    cfg = CheckConfig(s.box, s.stages if s.stages is not None else DEFAULT_STAGES, s.plateau)
    free = None
    outcomes = []

    def emit(o: VerificationOutcome):
        outcomes.append(o)
        print(o.record(), file=out, flush=True)

    for th in names:
        _, applicable = CHECKS[th]
        for an, a in ideals:
            targets = objects
            if th in PER_IDEAL:
                from .monomial import ModulePresentation
                targets = [("S", free or ModulePresentation.free(ctx.ring))]
            for xn, X in targets:
                for bn, b in (ideals if th == "prop_2_5" else [("m", None)]):
                    label = f"a={an}; X={xn}" + (f"; b={bn}" if th == "prop_2_5" else "")
                    inst = Instance(a, X, b, label)
                    try:
                        if not applicable(inst):
                            continue
                    except FormalCohError:
                        continue
                    if th == "prop_2_9":
                        for o in prop_2_9_records(inst, cfg):
                            emit(o)
                        continue
                    kw = {"ideals": ideals} if th == "cor_3_7" else {}
                    emit(run_check(th, inst, cfg, **kw))
    counts = {k: sum(o.status == k for o in outcomes) for k in ("pass", "fail", "inconclusive")}
    print(f"# summary: {len(outcomes)} outcomes, {counts['pass']} pass, {counts['fail']} fail, "
          f"{counts['inconclusive']} inconclusive", file=out)
    return outcomes, (EXIT_FAIL if counts["fail"] else EXIT_OK)


# --- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--box", help="lo..hi for every coordinate, or lo..hi,lo..hi,... per coordinate")
    common.add_argument("--stages", type=int, help="stage bound (default: 12 raised by the stage policy)")
    common.add_argument("--plateau", type=int, help="plateau length (default 3)")
    common.add_argument("--field", type=int, help="characteristic: 0 or a prime")
    p = argparse.ArgumentParser(prog="formalcoh", description="Formal local cohomology of monomial data.")
    sub = p.add_subparsers(dest="verb", required=True)
    e = sub.add_parser("eval", parents=[common], help="evaluate a query")
    e.add_argument("manifest")
    e.add_argument("query")
    t = sub.add_parser("table", parents=[common], help="evaluate a table query")
    t.add_argument("manifest")
    t.add_argument("query")
    t.add_argument("--format", choices=("text", "flat"), default="text")
    v = sub.add_parser("verify", parents=[common], help="run the executable checks on a manifest")
    v.add_argument("manifest")
    v.add_argument("--only", help="comma separated check ids: " + ", ".join(CHECKS))
    return p


def _join_box(argv):
    # "--box -1..1" would otherwise read the interval as an option
    out, it = [], iter(argv)
    for a in it:
        if a == "--box":
            out.append("--box=" + next(it, ""))
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_box(argv))
    try:
        with open(args.manifest, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        ctx, s = load(text, args.box, args.stages, args.plateau, args.field)
        if args.verb == "verify":
            only = None
            if args.only is not None:
                only = {x.strip() for x in args.only.split(",") if x.strip()}
            print("\n".join(header(ctx, s)))
            _, code = run_verification(ctx, s, only)
            return code
        result = evaluate(ctx, s, args.query)
        fmt = getattr(args, "format", "text")
        sys.stdout.write(render(result, fmt, header(ctx, s, args.query)))
        return EXIT_OK
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Inconclusive as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except RouteDisagreement as exc:
        print(f"route disagreement: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (InvalidInput, FormalCohError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
