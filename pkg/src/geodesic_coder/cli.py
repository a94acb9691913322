"""Command-line front end.

Exit codes: 0 on success, 2 for usage errors, 3 when a computation fails
(no finite attractor structure, a non-Markov partition and so on).
"""
import argparse
from dataclasses import dataclass
import io
import json
import math
import re
import sys

import numpy as np

from . import tolerance
from .boundary import attractor, cycle_report, parse_partition, reduce
from .coding import arithmetic_code, continuity_profile, geometric_code
from .duality import dual_check
from .errors import GeodesicCoderError, NotMarkov, NumericFailure
from .markov import fine_partition, markov_condition, sofic_presentation, transition_matrix
from .measure import entropy
from .surface import GroupWord, axis, build

_ANGLE = re.compile(r"^\s*(-)?\s*(\d+(?:\.\d*)?)?\s*\*?\s*pi\s*(?:\*\s*(\d+(?:\.\d*)?))?"
                    r"\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_angle(text):
    """Radians, or a multiple of pi such as ``pi``, ``pi/3``, ``pi*5/6``, ``-2pi/3``."""
    text = str(text).strip()
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE.match(text.lower())
    if not m:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}")
    sign, pre, post, den = m.groups()
    val = math.pi * float(pre or 1) * float(post or 1) / float(den or 1)
    return -val if sign else val


def parse_count(text):
    """Positive integer, also written like ``1e7``."""
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if val < 1 or val != int(val):
        raise argparse.ArgumentTypeError(f"not a positive integer: {text!r}")
    return int(val)


@dataclass(frozen=True)
class RunConfig:
    genus: int
    partition: str
    fmt: str
    seed: int
    tol: float = None


FORMATS = {
    "surface": ("json", "csv"),
    "attractor": ("csv", "svg", "json"),
    "code": ("json",),
    "reduce": ("json",),
    "cycles": ("json", "csv"),
    "markov": ("json", "dot"),
    "dual": ("json",),
    "entropy": ("json",),
    "probe-continuity": ("json", "csv"),
}


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _csv(rows, columns):
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_cell(r[c]) for c in columns) + "\n")
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    if isinstance(v, float):
        return f"{v:.15g}"
    return str(v)


# ---------------------------------------------------------------------------
# commands


def cmd_surface(cfg, args):
    s = build(cfg.genus)
    rows = s.table()
    if cfg.fmt == "csv":
        return _csv(rows, ["i", "V", "P", "Q", "M", "sigma", "rho", "theta", "tau"])
    return dumps({"genus": s.genus, "n": s.n, "rows": rows})


def _setup(cfg):
    s = build(cfg.genus)
    part = parse_partition(s, cfg.partition)
    return s, part


def cmd_attractor(cfg, args):
    s, part = _setup(cfg)
    attr = attractor(s, part, method=args.method)
    if cfg.fmt == "svg":
        return attr.to_svg(title=f"genus {s.genus}, {part.label()}")
    if cfg.fmt == "json":
        d = attr.to_dict()
        d["corners"] = len(attr.corners())
        d["partition"] = part.to_dict()
        return dumps(d)
    return attr.to_csv()


def _geodesic(s, args):
    if args.axis:
        g = axis(s, GroupWord.parse(args.axis))
        return (g.u.angle, g.w.angle), args.axis
    if args.u is None or args.w is None:
        raise ValueError("give --axis WORD or both --u and --w")
    return (args.u, args.w), None


def cmd_code(cfg, args):
    s, part = _setup(cfg)
    attr = attractor(s, part)
    g, word = _geodesic(s, args)
    out = {"genus": s.genus, "partition": part.label(), "u": g[0], "w": g[1]}
    if word:
        out["axis"] = word
    if args.flavor in ("arithmetic", "both"):
        out["arithmetic"] = arithmetic_code(s, part, attr, g, args.future, args.past).to_dict()
    if args.flavor in ("geometric", "both"):
        out["geometric"] = geometric_code(s, g, args.future, args.past, part, attr).to_dict()
    return dumps(out)


def cmd_reduce(cfg, args):
    s, part = _setup(cfg)
    attr = attractor(s, part)
    u, w, word = reduce(s, part, attr, args.u, args.w, args.max_steps)
    return dumps({"u": args.u, "w": args.w, "reduced": [u, w], "word": list(word.letters),
                  "steps": len(word)})


def cmd_cycles(cfg, args):
    s, part = _setup(cfg)
    rows = cycle_report(s, part).to_dict()
    if cfg.fmt == "csv":
        return _csv(rows, ["i", "B", "C", "short_cycle", "cycle_end", "interval"])
    return dumps({"genus": s.genus, "partition": part.label(), "rows": rows})


def cmd_markov(cfg, args):
    s, part = _setup(cfg)
    report = cycle_report(s, part)
    witnesses = markov_condition(s, part, report)
    missing = [i for i, w in enumerate(witnesses, start=1) if w is None]
    if missing:
        raise NotMarkov(f"no level matches U_i^-1 A_i for i in {missing}")
    fine = fine_partition(s, part, attractor(s, part), report)
    tm = transition_matrix(s, part, fine)
    graph = sofic_presentation(tm)
    if cfg.fmt == "dot":
        return graph.to_dot()
    return dumps({
        "genus": s.genus,
        "partition": part.label(),
        "witnesses": [[w.i, w.j, w.which] for w in witnesses],
        "fine_partition": fine.to_dict(),
        "transition_matrix": tm.to_dict(),
        "perron_root": tm.perron_root(),
        "graph": graph.to_dict(),
    })


def cmd_dual(cfg, args):
    s = build(cfg.genus)
    a = parse_partition(s, args.a)
    b = parse_partition(s, args.b)
    v = dual_check(s, a, b, samples=args.samples, grid=args.grid, seed=cfg.seed)
    d = v.to_dict()
    d.update(a=a.label(), b=b.label(), genus=s.genus)
    return dumps(d)


def cmd_entropy(cfg, args):
    s, part = _setup(cfg)
    rep = entropy(attractor(s, part), s.genus, samples=args.samples, seed=cfg.seed)
    d = rep.to_dict()
    d["partition"] = part.label()
    return dumps(d)


def cmd_probe(cfg, args):
    s, part = _setup(cfg)
    ms = list(range(1, args.max_m + 1))
    prof = continuity_profile(s, part, attractor(s, part), ms, samples=args.samples,
                              seed=cfg.seed, metric=args.metric)
    rows = []
    for m in ms:
        nxt = prof.get(m + 1)
        ratio = nxt / prof[m] if nxt is not None and prof[m] > 0 else None
        rows.append({"m": m, "max_distance": prof[m], "ratio": ratio})
    if cfg.fmt == "csv":
        return _csv([{**r, "ratio": "" if r["ratio"] is None else r["ratio"]} for r in rows],
                    ["m", "max_distance", "ratio"])
    return dumps({"genus": s.genus, "partition": part.label(), "metric": args.metric,
                  "samples": args.samples, "rows": rows})


COMMANDS = {
    "surface": cmd_surface,
    "attractor": cmd_attractor,
    "code": cmd_code,
    "reduce": cmd_reduce,
    "cycles": cmd_cycles,
    "markov": cmd_markov,
    "dual": cmd_dual,
    "entropy": cmd_entropy,
    "probe-continuity": cmd_probe,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--genus", type=int, default=2)
    common.add_argument("--partition", default="midpoints",
                        help="midpoints, product, mixed, endpoints:P, endpoints:PQ, ...")
    common.add_argument("--format", dest="fmt", default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="angular tolerance")
    common.add_argument("-o", "--output", default=None, help="write here instead of stdout")

    p = argparse.ArgumentParser(prog="geodesic-coder", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("surface", parents=[common], help="polygon tables")
    a = sub.add_parser("attractor", parents=[common], help="attractor rectangles")
    a.add_argument("--method", choices=("auto", "closed-form", "numeric"), default="auto")
    for name in ("code", "reduce"):
        c = sub.add_parser(name, parents=[common])
        c.add_argument("--u", type=parse_angle)
        c.add_argument("--w", type=parse_angle)
        if name == "code":
            c.add_argument("--axis", help="group word such as 2,8,5")
            c.add_argument("--flavor", choices=("arithmetic", "geometric", "both"),
                           default="both")
            c.add_argument("--future", type=int, default=24)
            c.add_argument("--past", type=int, default=24)
        else:
            c.add_argument("--max-steps", type=int, default=1000)
    sub.add_parser("cycles", parents=[common], help="short cycle report")
    sub.add_parser("markov", parents=[common], help="fine partition and sofic graph")
    d = sub.add_parser("dual", parents=[common], help="duality check")
    d.add_argument("--a", required=True)
    d.add_argument("--b", required=True)
    d.add_argument("--samples", type=parse_count, default=10_000)
    d.add_argument("--grid", type=parse_count, default=512)
    e = sub.add_parser("entropy", parents=[common], help="mass and entropy")
    e.add_argument("--samples", type=parse_count, default=1_000_000)
    pc = sub.add_parser("probe-continuity", parents=[common], help="sampled continuity modulus")
    pc.add_argument("--max-m", type=int, default=11)
    pc.add_argument("--samples", type=parse_count, default=20_000)
    pc.add_argument("--metric", choices=("endpoints", "tangent"), default="endpoints")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    allowed = FORMATS[args.command]
    fmt = args.fmt or allowed[0]
    if fmt not in allowed:
        print(f"error: --format for {args.command} must be one of {', '.join(allowed)}",
              file=sys.stderr)
        return 2
    if args.genus < 2:
        print("error: genus must be at least 2", file=sys.stderr)
        return 2
    if args.tol is not None:
        try:
            tolerance.set_angle_tol(args.tol)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    cfg = RunConfig(args.genus, args.partition, fmt, args.seed, args.tol)
    try:
        text = COMMANDS[args.command](cfg, args)
    except NumericFailure as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (GeodesicCoderError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
