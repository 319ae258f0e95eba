"""Command-line front end.

Subcommands: decide (point or oracle membership, exit code is the
verdict), render (PGM/PPM images with a JSON sidecar), area (exact
pixel-count brackets per budget), zeno (machine traces on the halving
clock, plus the staged orbit watcher), rational (the total deciders),
and table (decision-model comparison).

Exit codes: 0 = In, 1 = Out, 2 = Unknown, 64 = usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from . import certify, rationals, render, zeno
from .exact import (
    ComplexRational,
    RealOracle,
    constant_oracle,
    format_rational,
    parse_rational,
    sqrt_oracle,
)

_EXIT = {"in": 0, "out": 1, "unknown": 2}
USAGE_ERROR = 64


class _Parser(argparse.ArgumentParser):
    # argparse's stock usage-error status is 2, which is taken by Unknown
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let values like -3/4 through; stock argparse only knows -3 and -3.5
        self._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _oracle_arg(text: str) -> RealOracle:
    """'3/4' -> constant oracle; 'sqrt:2' -> square-root oracle."""
    if text.startswith("sqrt:"):
        return sqrt_oracle(parse_rational(text[len("sqrt:") :]))
    return constant_oracle(parse_rational(text))


def _is_oracle_spec(text: str) -> bool:
    return text.startswith("sqrt:")


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w") as fh:
            fh.write(text)


# --- decide -------------------------------------------------------------


def _cmd_decide(args) -> int:
    oracle_mode = args.stages is not None or _is_oracle_spec(args.re) or _is_oracle_spec(args.im)
    if oracle_mode:
        stages = args.stages if args.stages is not None else 30
        try:
            ox, oy = _oracle_arg(args.re), _oracle_arg(args.im)
        except ValueError as exc:
            args.parser.error(str(exc))
        run = certify.decide_oracle(
            ox, oy, stages, p0=args.precision, p_max=args.precision_max
        )
        v = run.verdict
        obj = {
            "c": {"re": ox.label, "im": oy.label},
            "verdict": certify.verdict_kind(v),
            "certificate": certify.certificate_obj(v),
            "stages": stages,
            "stage": run.stage,
            "precision": args.precision_max,
        }
        print(_dump(obj))
        return _EXIT[certify.verdict_kind(v)]
    try:
        c = ComplexRational(parse_rational(args.re), parse_rational(args.im))
    except ValueError as exc:
        args.parser.error(str(exc))
    v = certify.decide(
        c,
        budget=args.budget,
        p0=args.precision,
        p_max=args.precision_max,
        bit_cap=args.bit_cap,
    )
    if isinstance(v, certify.UnknownVerdict):
        obj = certify.verdict_to_obj(c, v, v.budget, v.precision)
    else:
        obj = certify.verdict_to_obj(c, v, args.budget, args.precision)
    print(_dump(obj))
    return _EXIT[certify.verdict_kind(v)]


# --- render and area ----------------------------------------------------


def _viewport(args) -> render.Viewport:
    return render.Viewport(args.re_min, args.re_max, args.im_min, args.im_max, args.n)


def _cmd_render(args) -> int:
    v = _viewport(args)
    grid = render.classify_grid(
        v,
        budget=args.budget,
        p0=args.precision,
        p_max=args.precision_max,
        bit_cap=args.bit_cap,
        mode=args.mode,
        jobs=args.jobs,
    )
    image = render.escape_bands(grid)
    if args.format == "pgm":
        render.emit_pgm(image, args.out)
    else:
        render.emit_ppm(image, path=args.out)
    area = render.area_estimate(grid, v)
    sidecar = {
        "provenance": grid.provenance,
        "counts": grid.counts(),
        "area": {
            "lower": format_rational(area.lower),
            "upper": format_rational(area.upper),
        },
        "image": args.out,
        "format": args.format,
    }
    with open(args.out + ".json", "w") as fh:
        fh.write(_dump(sidecar) + "\n")
    if args.grid_json:
        with open(args.grid_json, "w") as fh:
            fh.write(render.grid_to_json(grid) + "\n")
    counts = grid.counts()
    print(
        f"{args.out}: {v.n}x{v.n} {args.mode} budget={args.budget}"
        f" in={counts['in']} out={counts['out']} unknown={counts['unknown']}"
        f" area=[{area.lower}, {area.upper}]"
    )
    return 0


def _cmd_area(args) -> int:
    v = _viewport(args)
    budgets = args.budgets
    rows = []
    for budget in budgets:
        grid = render.classify_grid(
            v,
            budget=budget,
            p0=args.precision,
            p_max=args.precision_max,
            bit_cap=args.bit_cap,
            mode=args.mode,
            jobs=args.jobs,
        )
        counts = grid.counts()
        area = render.area_estimate(grid, v)
        rows.append(
            {
                "budget": budget,
                "in": counts["in"],
                "out": counts["out"],
                "unknown": counts["unknown"],
                "area_lower": format_rational(area.lower),
                "area_upper": format_rational(area.upper),
            }
        )
    if args.format == "json":
        _emit(_dump({"viewport": v.to_obj(), "mode": args.mode, "rows": rows}), args.out)
    else:
        head = "budget,in,out,unknown,area_lower,area_upper"
        lines = [head] + [
            f"{r['budget']},{r['in']},{r['out']},{r['unknown']},"
            f"{r['area_lower']},{r['area_upper']}"
            for r in rows
        ]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


# --- zeno ---------------------------------------------------------------


def _load_machine(args) -> zeno.TMDescription:
    name = args.machine
    try:
        if os.path.exists(name):
            with open(name) as fh:
                text = fh.read()
        else:
            try:
                text = zeno.bundled_machine(name)
            except FileNotFoundError:
                args.parser.error(
                    f"no such machine file or bundled machine: {name!r}"
                    f" (bundled: {', '.join(zeno.list_bundled())})"
                )
        return zeno.parse_tm(text, strict=args.strict)
    except zeno.TMParseError as exc:
        args.parser.error(str(exc))


def _cmd_zeno_run(args) -> int:
    m = _load_machine(args)
    trace = zeno.run_stages(
        m, input_str=args.input, budget=args.budget, snapshot_every=args.snapshot_every
    )
    _emit("\n".join(zeno.trace_to_jsonl(trace)) + "\n", args.out)
    return 0


def _cmd_zeno_lamp(args) -> int:
    m = zeno.parse_tm(zeno.bundled_machine("lamp"))
    trace = zeno.run_stages(m, budget=args.budget)
    limit = zeno.classify_cell_limit(trace, cell=0, window=args.window)
    obj = {
        "machine": "lamp",
        "budget": args.budget,
        "steps": trace.steps,
        "stop_reason": trace.stop_reason,
        "elapsed": format_rational(trace.elapsed),
        "cell": 0,
        "limit": {"kind": limit.kind, "value": limit.value, "since": limit.since},
    }
    print(_dump(obj))
    return 0


def _cmd_zeno_mandelbrot(args) -> int:
    try:
        ox, oy = _oracle_arg(args.re), _oracle_arg(args.im)
    except ValueError as exc:
        args.parser.error(str(exc))
    run = zeno.zeno_mandelbrot_run(
        ox, oy, stages=args.stages, p=args.precision, window=args.window
    )
    lines = []
    for rec in run.records:
        lines.append(
            _dump(
                {
                    "stage": rec.stage,
                    "abs_sq": [str(rec.abs_sq.lo), str(rec.abs_sq.hi)],
                    "z_re": [str(rec.z.re.lo), str(rec.z.re.hi)],
                    "z_im": [str(rec.z.im.lo), str(rec.z.im.hi)],
                    "flagged": rec.flagged,
                }
            )
        )
    lines.append(
        _dump(
            {
                "classification": run.classification,
                "first_flagged": run.first_flagged,
                "window": run.window,
                "stages": args.stages,
            }
        )
    )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# --- rational -----------------------------------------------------------


def _cmd_rational_circle(args) -> int:
    member = rationals.circle_decide(args.x, args.y)
    print(
        _dump(
            {
                "x": format_rational(args.x),
                "y": format_rational(args.y),
                "on_circle": member,
            }
        )
    )
    return 0


def _cmd_rational_evenden(args) -> int:
    print(
        _dump(
            {
                "q": format_rational(args.q),
                "even_denominator": rationals.even_denominator(args.q),
            }
        )
    )
    return 0


def _cmd_rational_epigraph(args) -> int:
    above, order = rationals.exp_epigraph_witness(args.x, args.y)
    print(
        _dump(
            {
                "x": format_rational(args.x),
                "y": format_rational(args.y),
                "in_epigraph": above,
                "order": order,
            }
        )
    )
    return 0


def _cmd_rational_encode(args) -> int:
    if args.q is not None:
        n = rationals.phi_encode(args.q)
        print(_dump({"q": format_rational(args.q), "code": n}))
    else:
        q = rationals.phi_decode(args.code)
        print(_dump({"code": args.code, "q": format_rational(q)}))
    return 0


# --- table --------------------------------------------------------------


def _table_rows() -> list[dict]:
    circle_ok = rationals.circle_decide(Fraction(3, 5), Fraction(4, 5))
    epi_above, epi_order = rationals.exp_epigraph_witness(Fraction(1), Fraction(3))
    evenden_ok = (
        rationals.even_denominator(Fraction(1, 2)) == 1
        and rationals.even_denominator(Fraction(1, 3)) == 0
    )
    sample = render.classify_grid(render.Viewport.default(16), budget=25)
    counts = sample.counts()
    total = 16 * 16
    return [
        {
            "model": "turing-over-rationals/circle",
            "question": "x^2 + y^2 = 1",
            "power": "total decider",
            "status": "checked-here",
            "note": f"witness (3/5,4/5) -> {str(circle_ok).lower()}",
        },
        {
            "model": "turing-over-rationals/even-denominator",
            "question": "reduced denominator even?",
            "power": "total decider, no continuous extension to the reals",
            "status": "checked-here",
            "note": f"1/2 vs 1/3 witnesses -> {str(evenden_ok).lower()}",
        },
        {
            "model": "turing-over-rationals/exp-epigraph",
            "question": "y >= exp(x)",
            "power": "total decider via shrinking rational brackets",
            "status": "checked-here",
            "note": f"(1,3) -> {str(epi_above).lower()} at order {epi_order}",
        },
        {
            "model": "turing-over-rationals/bounded-orbit-set",
            "question": "orbit of 0 under z^2+c stays in |z|<=2",
            "power": "complement semi-decidable; three-valued with certificates",
            "status": "checked-here",
            "note": (
                f"16x16 sample at budget 25:"
                f" {counts['unknown']}/{total} unknown,"
                f" {counts['in']} in, {counts['out']} out"
            ),
        },
        {
            "model": "markov-computable-reals",
            "question": "membership from algorithmic approximations",
            "power": "partial functions on constructive reals",
            "status": "literature",
            "note": "Markov (1954); Uspensky & Semenov (1993); not evaluated here",
        },
        {
            "model": "bss-real-machine",
            "question": "membership with exact real registers",
            "power": "set undecidable in this model",
            "status": "literature",
            "note": "Blum & Smale (1993); Blum, Cucker, Shub & Smale (1998); out of scope",
        },
        {
            "model": "computable-analysis/type-two",
            "question": "is the set (or its distance function) computable?",
            "power": "open; yes if hyperbolicity conjecture holds",
            "status": "literature",
            "note": "Hertling (2005); Brattka & Weihrauch (1999); out of scope",
        },
        {
            "model": "zeno-machine",
            "question": "infinite run compressed into one hour",
            "power": "limit questions in principle; only finite prefixes here",
            "status": "simulated-finitely-here",
            "note": "Copeland (2002); see the zeno subcommand",
        },
    ]


def _cmd_table(args) -> int:
    rows = _table_rows()
    if args.format == "json":
        print(_dump({"rows": rows}))
        return 0
    if args.format == "csv":
        cols = ["model", "question", "power", "status", "note"]
        lines = [",".join(cols)]
        for r in rows:
            lines.append(",".join('"' + r[c].replace('"', '""') + '"' for c in cols))
        print("\n".join(lines))
        return 0
    widths = {}
    cols = ["model", "power", "status", "note"]
    for c in cols:
        widths[c] = max(len(c), *(len(r[c]) for r in rows))
    header = "  ".join(c.ljust(widths[c]) for c in cols)
    print(header)
    print("-" * len(header))
    for r in rows:
        print("  ".join(r[c].ljust(widths[c]) for c in cols))
    return 0


# --- parser wiring --------------------------------------------------------


def _add_decide_knobs(p: argparse.ArgumentParser, budget_default: int) -> None:
    p.add_argument("--budget", type=int, default=budget_default, help="orbit step budget")
    p.add_argument(
        "--precision", type=int, default=certify.DEFAULT_P0, help="starting interval precision bits"
    )
    p.add_argument(
        "--precision-max",
        type=int,
        default=certify.DEFAULT_P_MAX,
        help="precision ceiling for blow-up restarts",
    )
    p.add_argument(
        "--bit-cap",
        type=int,
        default=certify.DEFAULT_BIT_CAP,
        help="bit size limit for the exact orbit",
    )


def _add_viewport_knobs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=render.DEFAULT_N, help="lattice points per axis")
    p.add_argument("--re-min", type=parse_rational, default=Fraction(-2))
    p.add_argument("--re-max", type=parse_rational, default=Fraction(2))
    p.add_argument("--im-min", type=parse_rational, default=Fraction(-2))
    p.add_argument("--im-max", type=parse_rational, default=Fraction(2))
    p.add_argument("--mode", choices=("point", "box"), default="point")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


def build_parser() -> _Parser:
    parser = _Parser(prog="mandelcert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_decide = sub.add_parser("decide", help="certified membership for one parameter")
    p_decide.add_argument("--re", required=True, help="rational, or oracle spec like sqrt:2")
    p_decide.add_argument("--im", required=True, help="rational, or oracle spec like sqrt:2")
    _add_decide_knobs(p_decide, certify.DEFAULT_BUDGET)
    p_decide.add_argument(
        "--stages", type=int, default=None, help="oracle mode: shrinking-box stages"
    )
    p_decide.set_defaults(func=_cmd_decide)

    p_render = sub.add_parser("render", help="render a certified image")
    _add_viewport_knobs(p_render)
    _add_decide_knobs(p_render, render.DEFAULT_RENDER_BUDGET)
    p_render.add_argument("--out", default="mandelbrot.pgm", help="image file path")
    p_render.add_argument("--format", choices=("pgm", "ppm"), default="pgm")
    p_render.add_argument(
        "--grid-json", default=None, help="also write the full per-cell grid JSON here"
    )
    p_render.set_defaults(func=_cmd_render)

    p_area = sub.add_parser("area", help="pixel-count area brackets per budget")
    _add_viewport_knobs(p_area)
    p_area.add_argument(
        "--budgets",
        type=lambda s: [int(tok) for tok in s.split(",") if tok],
        default=[10, 20, 30, 40, 50],
        help="comma-separated budgets",
    )
    p_area.add_argument("--precision", type=int, default=certify.DEFAULT_P0)
    p_area.add_argument("--precision-max", type=int, default=certify.DEFAULT_P_MAX)
    p_area.add_argument("--bit-cap", type=int, default=certify.DEFAULT_BIT_CAP)
    p_area.add_argument("--format", choices=("csv", "json"), default="csv")
    p_area.add_argument("--out", default=None, help="output path (default stdout)")
    p_area.set_defaults(func=_cmd_area)

    p_zeno = sub.add_parser("zeno", help="halving-clock machine runs")
    zeno_sub = p_zeno.add_subparsers(dest="zeno_command", required=True)

    p_zrun = zeno_sub.add_parser("run", help="trace a machine as JSON lines")
    p_zrun.add_argument("--machine", required=True, help="file path or bundled name")
    p_zrun.add_argument("--input", default="", help="initial tape symbols from cell 0")
    p_zrun.add_argument("--budget", type=int, default=100)
    p_zrun.add_argument("--snapshot-every", type=int, default=1)
    p_zrun.add_argument("--strict", action="store_true", help="reject undefined target states")
    p_zrun.add_argument("--out", default=None, help="output path (default stdout)")
    p_zrun.set_defaults(func=_cmd_zeno_run)

    p_zlamp = zeno_sub.add_parser("lamp", help="the alternating-cell machine, classified")
    p_zlamp.add_argument("--budget", type=int, default=64)
    p_zlamp.add_argument("--window", type=int, default=8)
    p_zlamp.set_defaults(func=_cmd_zeno_lamp)

    p_zmb = zeno_sub.add_parser(
        "mandelbrot", help="staged orbit watcher for an oracle-presented parameter"
    )
    p_zmb.add_argument("--re", required=True, help="rational, or oracle spec like sqrt:2")
    p_zmb.add_argument("--im", required=True, help="rational, or oracle spec like sqrt:2")
    p_zmb.add_argument("--stages", type=int, default=30)
    p_zmb.add_argument("--precision", type=int, default=64)
    p_zmb.add_argument("--window", type=int, default=5, help="recurrence window for flags")
    p_zmb.add_argument("--out", default=None, help="output path (default stdout)")
    p_zmb.set_defaults(func=_cmd_zeno_mandelbrot)

    p_rat = sub.add_parser("rational", help="total deciders on exact rationals")
    rat_sub = p_rat.add_subparsers(dest="rational_command", required=True)

    p_circle = rat_sub.add_parser("circle", help="unit circle membership")
    p_circle.add_argument("--x", type=parse_rational, required=True)
    p_circle.add_argument("--y", type=parse_rational, required=True)
    p_circle.set_defaults(func=_cmd_rational_circle)

    p_even = rat_sub.add_parser("evenden", help="even reduced denominator indicator")
    p_even.add_argument("--q", type=parse_rational, required=True)
    p_even.set_defaults(func=_cmd_rational_evenden)

    p_epi = rat_sub.add_parser("epigraph", help="is y >= exp(x)?")
    p_epi.add_argument("--x", type=parse_rational, required=True)
    p_epi.add_argument("--y", type=parse_rational, required=True)
    p_epi.set_defaults(func=_cmd_rational_epigraph)

    p_enc = rat_sub.add_parser("encode", help="rational <-> natural-number code")
    group = p_enc.add_mutually_exclusive_group(required=True)
    group.add_argument("--q", type=parse_rational, default=None, help="rational to encode")
    group.add_argument("--code", type=int, default=None, help="code to decode")
    p_enc.set_defaults(func=_cmd_rational_encode)

    p_table = sub.add_parser("table", help="decision-model comparison table")
    p_table.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p_table.set_defaults(func=_cmd_table)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.parser = parser
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
