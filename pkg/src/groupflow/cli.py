"""Command-line front end.

Every command prints one JSON report (sorted keys) on stdout and a short
summary on stderr unless --quiet. Exit codes: 0 positive verdict, 1
negative verdict, 2 usage or input error. Reports echo the inputs but not
execution knobs such as --threads, so they are byte-stable across runs.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import corpus
from .coloring import (
    EdgeColoring,
    expand_to_cubic,
    expand_to_regular,
    find_semi_coloring,
    is_semi_coloring,
)
from .contraction import contract, load_cut_family, verify_cut_sandwich
from .eulerian import CircleTemplate, find_spanning_eulerian, hamilton_shadow_flow, supereulerian_flow
from .flows import EdgeAssignment, count_flows, find_flow, find_k_flow, verify_flow
from .graph import Multigraph
from .groups import alphabet_all, alphabet_k_flow, alphabet_nonzero, parse_group
from .infinite import (
    DEFAULT_MAX_DEPTH,
    ObstructionCertificate,
    check_infinite,
    load_presentation,
    replay_certificate,
)
from .tension import check_infinite_tension, find_tension, verify_tension

POSITIVE = {"found", "yes-up-to", "valid"}

NAMED_GRAPHS = {
    "petersen": corpus.petersen,
    "K4": lambda: corpus.complete(4),
    "K5": lambda: corpus.complete(5),
    "K33": lambda: corpus.complete_bipartite(3, 3),
    "K44": lambda: corpus.complete_bipartite(4, 4),
}


class InputError(ValueError):
    pass


def load_graph(spec: str) -> Multigraph:
    """A graph JSON file, or one of the named graphs (petersen, K4, K5, K33, K44)."""
    path = Path(spec)
    if path.exists():
        return Multigraph.load(path)
    if spec in NAMED_GRAPHS:
        return NAMED_GRAPHS[spec]()
    raise InputError(f"no graph file or named graph {spec!r}")


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None


def _alphabet(args):
    group = parse_group(args.group)
    return alphabet_all(group) if args.allow_zero else alphabet_nonzero(group)


def _cuts_json(cuts) -> list:
    return [sorted(c.side_a, key=str) for c in cuts]


# -- commands -----------------------------------------------------------------------------


def cmd_find(args):
    g = load_graph(args.graph)
    a = _alphabet(args)
    f = find_flow(g, a, threads=args.threads)
    if f is None:
        return {"verdict": "absent"}, f"no {a.group.label} flow with alphabet {_describe(a)}"
    return {"verdict": "found", "flow": f.to_json()}, f"found a {a.group.label} flow"


def _describe(a) -> str:
    d = a.describe()
    return d if isinstance(d, str) else json.dumps(d)


def cmd_verify(args):
    g = load_graph(args.graph)
    f = EdgeAssignment.from_json(_load_json(args.flow))
    if f.group is None:
        a = alphabet_k_flow(args.k) if args.k else None
    else:
        a = alphabet_all(f.group) if args.allow_zero else alphabet_nonzero(f.group)
    check = verify_flow(g, f, a)
    if check:
        return {"verdict": "valid"}, "flow verifies"
    out = {"verdict": "invalid"}
    if check.bad_edge is not None:
        out["bad_edge"] = check.bad_edge
        return out, f"edge {check.bad_edge} carries a value outside the alphabet"
    out["violated_cut"] = sorted(check.violated_cut.side_a, key=str)
    return out, "nonzero sum on a cut"


def cmd_count(args):
    g = load_graph(args.graph)
    a = _alphabet(args)
    n = count_flows(g, a, max_edges=args.max_edges)
    return {"verdict": "found" if n else "absent", "count": n}, f"{n} flows"


def cmd_kflow(args):
    g = load_graph(args.graph)
    f = find_k_flow(g, args.k, threads=args.threads)
    if f is None:
        return {"verdict": "absent"}, f"no {args.k}-flow"
    return {"verdict": "found", "flow": f.to_json()}, f"found a {args.k}-flow"


def cmd_contract(args):
    if args.presentation:
        host = load_presentation(args.presentation)
    else:
        host = load_graph(args.graph)
    m = load_cut_family(host, _load_json(args.cuts))
    q, cmap = contract(host, m)
    report = {"quotient": q.quotient.to_json(), "contraction": cmap.to_json()}
    if isinstance(host, Multigraph):
        sw = verify_cut_sandwich(host, m, q, cmap)
        report["sandwich"] = {"ok": sw.ok, "detail": sw.detail}
        report["verdict"] = "valid" if sw.ok else "invalid"
    else:
        report["verdict"] = "valid"
    if args.out:
        Path(args.out).write_text(json.dumps(q.quotient.to_json(), sort_keys=True, indent=2) + "\n")
    g = q.quotient
    return report, f"quotient with {len(g.vertices)} vertices and {len(g.edges)} edges"


def _result_report(result, payload_key: str, dump_flows: bool = True):
    if result.verdict == "no":
        cert = result.certificate
        return {"verdict": "no-with-certificate", "depth": cert.depth, "certificate": cert.to_json()}
    out = {"verdict": "yes-up-to", "depth": result.depth, "note": result.note}
    if dump_flows:
        out[payload_key] = [f.to_json() for f in result.flows]
    return out


def cmd_infinite_check(args):
    p = load_presentation(args.presentation)
    a = _alphabet(args)
    result = check_infinite(p, a, args.max_depth, threads=args.threads)
    report = _result_report(result, "flows", dump_flows=False)
    if result.verdict == "no" and args.certificate_out:
        Path(args.certificate_out).write_text(json.dumps(result.certificate.to_json(), sort_keys=True) + "\n")
    if result.verdict == "no":
        return report, f"no {a.group.label} flow: quotient at depth {result.depth} has none"
    return report, f"every quotient up to depth {result.depth} has a flow"


def cmd_infinite_replay(args):
    cert = ObstructionCertificate.from_json(_load_json(args.certificate))
    p = load_presentation(args.presentation) if args.presentation else None
    r = replay_certificate(cert, p)
    return {"verdict": "valid" if r.ok else "invalid", "reasons": list(r.reasons)}, (
        "certificate replays" if r.ok else "; ".join(r.reasons)
    )


def cmd_color(args):
    g = load_graph(args.graph)
    if args.check:
        c = EdgeColoring.from_json(_load_json(args.check))
        chk = is_semi_coloring(g, c)
        if chk:
            return {"verdict": "valid"}, "semi-coloring verifies"
        return {"verdict": "invalid", "violated_cut": sorted(chk.violated_cut.side_a, key=str)}, "parity differs on a cut"
    c = find_semi_coloring(g, args.k)
    if c is None:
        return {"verdict": "absent"}, f"no semi-{args.k}-edge-coloring"
    return {"verdict": "found", "coloring": c.to_json()}, f"found a semi-{args.k}-edge-coloring"


def _expansion_report(ex, g) -> dict:
    out = {
        "verdict": "found",
        "graph": ex.graph.to_json(),
        "cuts": _cuts_json(ex.cuts.cuts),
        "owner": sorted([[str(w), str(v)] for w, v in ex.owner.items()]),
        "gadget_edges": sorted(ex.gadget_edges),
    }
    if ex.flow is not None:
        out["flow"] = ex.flow.to_json()
    if ex.coloring is not None:
        out["coloring"] = ex.coloring.to_json()
    return out


def cmd_expand_cubic(args):
    g = load_graph(args.graph)
    f = EdgeAssignment.from_json(_load_json(args.flow))
    if f.group is None or len(f.group.moduli) != 1:
        raise InputError("expand-cubic needs a flow over a cyclic group Z_k")
    ex = expand_to_cubic(g, f, f.group.moduli[0])
    return _expansion_report(ex, g), f"cubic graph with {len(ex.graph.vertices)} vertices"


def cmd_expand_regular(args):
    g = load_graph(args.graph)
    c = EdgeColoring.from_json(_load_json(args.coloring))
    ex = expand_to_regular(g, c)
    return _expansion_report(ex, g), f"{c.k}-regular graph with {len(ex.graph.vertices)} vertices"


def cmd_supereulerian(args):
    g = load_graph(args.graph)
    c = find_spanning_eulerian(g, max_edges=None if args.no_limit else args.max_edges)
    if c is None:
        return {"verdict": "absent"}, "no spanning Eulerian subgraph"
    f = supereulerian_flow(g, c)
    return {"verdict": "found", "subgraph": list(c), "flow": f.to_json()}, "found a spanning Eulerian subgraph"


def cmd_hamilton_flow(args):
    p = load_presentation(args.presentation)
    circle = CircleTemplate.from_json(_load_json(args.circle), p)
    result = hamilton_shadow_flow(p, circle, args.max_depth)
    report = _result_report(result, "flows")
    if result.verdict == "no":
        return report, f"depth {result.depth}: {result.certificate.reason}"
    return report, f"flows built and verified up to depth {result.depth}"


def cmd_tension_find(args):
    g = load_graph(args.graph)
    a = _alphabet(args)
    f = find_tension(g, a)
    if f is None:
        return {"verdict": "absent"}, f"no {a.group.label} tension"
    return {"verdict": "found", "tension": f.to_json()}, f"found a {a.group.label} tension"


def cmd_tension_verify(args):
    g = load_graph(args.graph)
    f = EdgeAssignment.from_json(_load_json(args.tension))
    if f.group is not None and not args.allow_zero and any(not x for x in f.values.values()):
        return {"verdict": "invalid", "reason": "zero value"}, "zero value in a non-elusive tension"
    chk = verify_tension(g, f)
    if chk:
        return {"verdict": "valid"}, "tension verifies"
    cycle = [[d.edge, str(d.tail), str(d.head)] for d in chk.violated_cycle]
    return {"verdict": "invalid", "violated_cycle": cycle}, "nonzero sum around a cycle"


def cmd_tension_infinite(args):
    p = load_presentation(args.presentation)
    a = _alphabet(args)
    result = check_infinite_tension(p, a, args.max_depth)
    report = _result_report(result, "tensions", dump_flows=False)
    if result.verdict == "no":
        return report, f"window at depth {result.depth} has no tension"
    return report, f"every window up to depth {result.depth} has a tension"


# -- parser ---------------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=1, help="worker threads for searches")
    p.add_argument("--quiet", action="store_true", help="no summary on stderr")
    p.add_argument("--seed", type=int, default=None, help="reserved; searches are deterministic")
    p.add_argument("--timing", action="store_true", help="add wall time to the report")


def _group_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--group", required=required, default=None if required else "Z2", help="e.g. Z4, Z2xZ2, Z2xZ3, R3")
    p.add_argument("--nonelusive", action="store_true", help="nonzero values only (the default)")
    p.add_argument("--allow-zero", action="store_true", help="allow the zero element")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="groupflow", description="Group-valued flows on multigraphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, parent=sub):
        p = parent.add_parser(name, help=help_text)
        _common(p)
        p.set_defaults(func=func)
        return p

    p = add("find", cmd_find, "search for an A-flow")
    p.add_argument("--graph", required=True)
    _group_args(p)

    p = add("verify", cmd_verify, "verify a flow")
    p.add_argument("--graph", required=True)
    p.add_argument("--flow", required=True)
    p.add_argument("--k", type=int, help="value bound for integer flows")
    p.add_argument("--allow-zero", action="store_true")

    p = add("count", cmd_count, "count A-flows exhaustively")
    p.add_argument("--graph", required=True)
    p.add_argument("--max-edges", type=int, default=12)
    _group_args(p)

    p = add("kflow", cmd_kflow, "search for an integer k-flow")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)

    p = add("contract", cmd_contract, "contract a graph or presentation along cuts")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--presentation")
    p.add_argument("--cuts", required=True)
    p.add_argument("--out")

    inf = sub.add_parser("infinite", help="periodic infinite graphs")
    isub = inf.add_subparsers(dest="action", required=True)
    p = add("check", cmd_infinite_check, "semi-decide flow existence", isub)
    p.add_argument("--presentation", required=True)
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    p.add_argument("--certificate-out")
    _group_args(p)
    p = add("replay", cmd_infinite_replay, "replay an obstruction certificate", isub)
    p.add_argument("--certificate", required=True)
    p.add_argument("--presentation")

    p = add("color", cmd_color, "search for (or check) a semi-k-edge-coloring")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--check")

    p = add("expand-cubic", cmd_expand_cubic, "expand a Z_k-flow graph to a cubic one")
    p.add_argument("--graph", required=True)
    p.add_argument("--flow", required=True)

    p = add("expand-regular", cmd_expand_regular, "expand a semi-coloring to a regular coloring")
    p.add_argument("--graph", required=True)
    p.add_argument("--coloring", required=True)

    p = add("supereulerian", cmd_supereulerian, "spanning Eulerian subgraph and its Z2xZ2-flow")
    p.add_argument("--graph", required=True)
    p.add_argument("--max-edges", type=int, default=16)
    p.add_argument("--no-limit", action="store_true", help="lift the exhaustive-search size guard")

    p = add("hamilton-flow", cmd_hamilton_flow, "flows from a periodic circle template")
    p.add_argument("--presentation", required=True)
    p.add_argument("--circle", required=True)
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)

    ten = sub.add_parser("tension", help="tensions")
    tsub = ten.add_subparsers(dest="action", required=True)
    p = add("find", cmd_tension_find, "search for an A-tension", tsub)
    p.add_argument("--graph", required=True)
    _group_args(p)
    p = add("verify", cmd_tension_verify, "verify a tension", tsub)
    p.add_argument("--graph", required=True)
    p.add_argument("--tension", required=True)
    p.add_argument("--allow-zero", action="store_true")
    p = add("check-infinite", cmd_tension_infinite, "tensions on growing windows", tsub)
    p.add_argument("--presentation", required=True)
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    _group_args(p, required=False)
    return parser


_KNOBS = {"threads", "quiet", "seed", "timing", "func", "command", "action"}


def _echo(args) -> dict:
    words = [args.command] + ([args.action] if getattr(args, "action", None) else [])
    inputs = {k: v for k, v in sorted(vars(args).items()) if k not in _KNOBS and v not in (None, False)}
    return {"command": " ".join(words), "inputs": inputs}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    start = time.perf_counter()
    try:
        report, summary = args.func(args)
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {**_echo(args), **report}
    if args.seed is not None:
        report["seed"] = args.seed
    if args.timing:
        report["seconds"] = round(time.perf_counter() - start, 6)
    print(json.dumps(report, sort_keys=True, indent=2, default=str))
    if not args.quiet:
        print(f"{report['verdict']}: {summary}", file=sys.stderr)
    return 0 if report["verdict"] in POSITIVE else 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
