"""Command-line front end.

Commands: invariants, decide, atlas, moves, lens, lens-iso.  Output is
text or JSON (DOT for invariants, CSV for atlas summaries); every run
echoes its effective configuration, and the decide exit code encodes the
verdict (0 yes, 1 no, 2 unknown).
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys

from . import atlas as atlas_mod
from .equivalence import Verdict, bowen_franks, decide
from .graphs import (Graph, GraphParseError, b_bullet, condition_H, condition_K,
                     condition_L, load_graph)
from .intlinalg import cokernel
from .lens import LensParams, check_path_lemma, lens_adjacency, lens_iso, torsion_order
from .moves import apply as apply_move
from .moves import moves_from_json
from .structure import dot_export, hasse, k_temperature


def _effective_config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    cfg["workers"] = int(os.environ.get("MOVEQUIV_WORKERS", "1"))
    return cfg


def _emit(args, payload: dict, text_lines):
    cfg = _effective_config(args)
    if args.format == "json":
        print(json.dumps({"config": cfg, **payload}, indent=2, default=str))
    else:
        print("# config: %s" % json.dumps(cfg, default=str))
        for line in text_lines:
            print(line)


def _graph_invariants(g: Graph) -> dict:
    kt = k_temperature(g)
    bf_group, bf_sign = bowen_franks(g)
    return {
        "vertices": g.n,
        "components": [list(c) for c in kt.poset.components],
        "transition_states": list(kt.poset.transition_states),
        "hasse": [list(e) for e in hasse(kt.poset)],
        "temperature": list(kt.tau),
        "k_temperature": ["K0=%s" % kt.groups[i] if kt.groups[i] is not None else str(kt.tau[i])
                          for i in range(kt.poset.size)],
        "k0": str(cokernel(b_bullet(g).transpose())),
        "condition_K": condition_K(g),
        "condition_L": condition_L(g),
        "condition_H": condition_H(g),
        "bowen_franks": str(bf_group),
        "det_sign": bf_sign,
        "convention": "adjacency entry (u, v) counts edges u -> v; "
                      "K-groups use the transposed reduced B-matrix; "
                      "det sign is that of det(I - A); blocks are listed predecessor-first",
    }


def cmd_invariants(args) -> int:
    g = load_graph(args.graph)
    if args.format == "dot":
        sys.stdout.write(dot_export(g))
        return 0
    inv = _graph_invariants(g)
    lines = ["%s: %s" % (k, v) for k, v in inv.items()]
    _emit(args, {"invariants": inv}, lines)
    return 0


def cmd_decide(args) -> int:
    ga, gb = load_graph(args.graph_a), load_graph(args.graph_b)
    verdict = decide(ga, gb, args.relation, bound=args.bound, budget=args.budget)
    payload = {"result": verdict.to_json_dict()}
    lines = ["verdict: %s" % verdict.verdict, "rule: %s" % verdict.rule]
    if verdict.distinguisher is not None:
        lines.append("distinguisher: %s (left=%s, right=%s)" % tuple(
            str(x) for x in verdict.distinguisher))
    if verdict.witness is not None:
        lines.append("witness U: %s" % verdict.witness[0].tolist())
        lines.append("witness V: %s" % verdict.witness[1].tolist())
    _emit(args, payload, lines)
    return verdict.exit_code()


def cmd_atlas(args) -> int:
    m = args.max_vertices
    if m > 5:
        print("error: the atlas is limited to 5 vertices", file=sys.stderr)
        return 2
    if m > 4 and not args.long:
        print("error: 5 vertices require --long", file=sys.stderr)
        return 2
    if args.relation == "full":
        rep = atlas_mod.full_classification(m, long=args.long)
        payload = {"classification": {
            k: v for k, v in rep.__dict__.items() if k != "seconds"}}
        lines = ["graphs: %d" % rep.graph_count,
                 "inner_classes: %d" % rep.inner_classes,
                 "outer_classes: %d" % rep.outer_classes,
                 "me_classes: %d" % rep.me_classes,
                 "ce_classes: %d" % rep.ce_classes,
                 "stable_classes: %d" % rep.stable_classes,
                 "undecided_pairs: %d" % len(rep.undecided_pairs),
                 "seconds: %.2f" % rep.seconds]
        _emit(args, payload, lines)
        return 0
    workers = int(os.environ.get("MOVEQUIV_WORKERS", "1"))
    if args.relation == "inner":
        rep = atlas_mod.partition_inner(m, long=args.long)
    else:
        rep = atlas_mod.partition_outer(m, long=args.long, workers=workers)
    if args.format == "csv":
        rows = atlas_mod.table_rows(m, long=args.long)
        sys.stdout.write(atlas_mod.table_csv(rows))
        return 0
    def _summary(bits):
        g = atlas_mod.bits_to_graph(bits, m)
        kt = k_temperature(g)
        return {"adj": [list(r) for r in g.adj],
                "temperature": list(kt.tau),
                "k0": str(cokernel(b_bullet(g).transpose()))}

    # timing is reported in text mode only, keeping JSON byte-identical
    # across worker counts
    payload = {"atlas": {"M": rep.M, "relation": rep.relation,
                         "graphs": rep.graph_count, "classes": rep.class_count,
                         "class_sizes": list(rep.class_sizes),
                         "representatives": [_summary(b) for b in rep.representatives]}}
    lines = ["graphs: %d" % rep.graph_count,
             "classes: %d" % rep.class_count,
             "seconds: %.2f" % rep.seconds]
    _emit(args, payload, lines)
    return 0


def cmd_moves(args) -> int:
    g = load_graph(args.graph)
    with open(args.script, "r", encoding="utf-8") as fh:
        specs = moves_from_json(fh.read())
    snapshots = []
    for step, spec in enumerate(specs):
        g = apply_move(g, spec)
        kt = k_temperature(g)
        snapshots.append({"step": step, "move": spec.to_json_dict(),
                          "vertices": g.n,
                          "temperature": list(kt.tau),
                          "k0": str(cokernel(b_bullet(g).transpose()))})
    payload = {"final": g.to_json_dict(), "log": snapshots}
    lines = ["applied %d moves" % len(specs), "final graph:"]
    lines.extend(" ".join(str(e) for e in row) for row in g.adj)
    _emit(args, payload, lines)
    return 0


def _parse_weights(text: str):
    return tuple(int(x) for x in text.split(","))


def cmd_lens(args) -> int:
    params = LensParams(args.n, args.r, _parse_weights(args.m))
    g = lens_adjacency(params)
    if args.grid:
        # isomorphism classes over all weight vectors with entries in 1..r-1
        units = [u for u in range(1, args.r) if math.gcd(u, args.r) == 1]
        classes = {}
        for m in itertools.product(units, repeat=args.n):
            p = LensParams(args.n, args.r, m)
            key = tuple(tuple(row) for row in lens_adjacency(p).adj)
            rep = None
            for k in classes:
                if lens_iso(classes[k][0], p).verdict == "yes":
                    rep = k
                    break
            if rep is None:
                classes[key] = (p, [m])
            else:
                classes[rep][1].append(m)
        print("class,representative_weights,count")
        for idx, (p, members) in enumerate(classes.values()):
            print("%d,\"%s\",%d" % (idx, ",".join(str(x) for x in p.m), len(members)))
        return 0
    report = check_path_lemma(params) if args.n >= 2 else None
    payload = {"adjacency": [list(r) for r in g.adj],
               "torsion_order": torsion_order(params),
               "k0": str(cokernel(b_bullet(g).transpose()))}
    lines = ["adjacency:"]
    lines.extend(" ".join(str(e) for e in row) for row in g.adj)
    lines.append("torsion_order: %d" % payload["torsion_order"])
    lines.append("k0: %s" % payload["k0"])
    if report is not None:
        payload["path_lemma"] = {"one_step": report.one_step_ok,
                                 "two_step": report.two_step_ok,
                                 "three_step": report.three_step_ok}
        lines.append("path_lemma: one=%s two=%s three=%s"
                     % (report.one_step_ok, report.two_step_ok, report.three_step_ok))
    _emit(args, payload, lines)
    return 0


def cmd_lens_iso(args) -> int:
    pa = LensParams(args.n, args.r, _parse_weights(args.m))
    pb = LensParams(args.n, args.r, _parse_weights(args.m2))
    verdict = lens_iso(pa, pb)
    payload = {"result": verdict.to_json_dict()}
    lines = ["verdict: %s" % verdict.verdict, "rule: %s" % verdict.rule]
    if verdict.witness is not None:
        lines.append("witness U: %s" % verdict.witness[0].tolist())
        lines.append("witness V: %s" % verdict.witness[1].tolist())
    _emit(args, payload, lines)
    return verdict.exit_code()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="movequiv",
                                description="move equivalence toolkit for finite graphs")
    p.add_argument("--format", choices=["text", "json", "dot", "csv"], default="text")
    p.add_argument("--seed", type=int, default=20160401,
                   help="seed echoed into reports (randomized tests live in the test suite)")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("invariants", help="component poset, temperatures, K-data of a graph")
    sp.add_argument("graph")
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("decide", help="decide move/splice/stable equivalence of two graphs")
    sp.add_argument("graph_a")
    sp.add_argument("graph_b")
    sp.add_argument("--relation", choices=["me", "ce", "stable"], default="me")
    sp.add_argument("--bound", type=int, default=2, help="entry bound for the witness search")
    sp.add_argument("--budget", type=int, default=10 ** 5,
                    help="candidate cap for the witness search")
    sp.set_defaults(func=cmd_decide)

    sp = sub.add_parser("atlas", help="enumerate and partition small simple graphs")
    sp.add_argument("--max-vertices", type=int, default=4)
    sp.add_argument("--relation", choices=["inner", "outer", "full"], default="inner")
    sp.add_argument("--long", action="store_true", help="allow the 5-vertex run")
    sp.set_defaults(func=cmd_atlas)

    sp = sub.add_parser("moves", help="replay a JSON move script against a graph")
    sp.add_argument("graph")
    sp.add_argument("script")
    sp.set_defaults(func=cmd_moves)

    sp = sub.add_parser("lens", help="build a quantum lens space graph")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--m", type=str, required=True, help="comma-separated weights")
    sp.add_argument("--grid", action="store_true",
                    help="CSV of isomorphism classes over all weight vectors")
    sp.set_defaults(func=cmd_lens)

    sp = sub.add_parser("lens-iso", help="decide isomorphism of two lens space graphs")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--m", type=str, required=True)
    sp.add_argument("--m2", type=str, required=True)
    sp.set_defaults(func=cmd_lens_iso)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GraphParseError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
