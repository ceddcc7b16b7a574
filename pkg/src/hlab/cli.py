"""Command-line harness: one subcommand per library operation.

Output contract: results go to stdout only after the computation
finishes (no partial output on error), rationals render as "num/den",
floats with 15 significant digits, and identical RunConfigs produce
byte-identical output regardless of worker count.  Exit codes: 0
success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .codec import (encode_graph6, graph_to_json_obj, load_graph,
                    load_graph_list, save_graph)
from .errors import HlabError, InputError
from .extremal import (exstar, exstar_to_json_obj, tau, tau_to_json_obj,
                       witness_check)
from .family import contains_induced, count_induced, normalize_family
from .measure import (EdgePredicate, cn_sequence, exact_measure, fraction_str,
                      mc_measure, predicate_from_json_obj)
from .steiner import (greedy_system, nibble_system, save_system,
                      verify_system)
from .supersat import (counting_floor, lemma_report, load_instance,
                       partition_table, tail_mass, x_set)


class _UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on; equal configs give equal output."""

    command: str
    fmt: str
    seed: int | None
    workers: int
    cap_bits: int | None
    args: argparse.Namespace


def _fmt_float(x) -> str:
    return f"{float(x):.15g}"


def _render(x):
    """Convert a result value into its canonical printed form."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, (float, mpmath.mpf)):
        return _fmt_float(x)
    if isinstance(x, dict):
        return {k: _render(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_render(v) for v in x]
    raise TypeError(f"unrenderable value {x!r}")


def _emit(rows: list, fmt: str) -> None:
    rows = [_render(r) for r in rows]
    if fmt == "json":
        out = rows[0] if len(rows) == 1 else rows
        sys.stdout.write(json.dumps(out, indent=2) + "\n")
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(rows[0].keys())
    for row in rows:
        # bools/None/nested values go through JSON so both formats agree
        writer.writerow(
            v if isinstance(v, str) or (isinstance(v, int)
                                        and not isinstance(v, bool))
            else json.dumps(v, separators=(",", ":"))
            for v in row.values())
    sys.stdout.write(buf.getvalue())


def _parse_ints(text: str) -> list:
    return [int(v) for v in text.split(",") if v != ""]


def _parse_edges(text: str) -> list:
    if not text:
        return []
    out = []
    for item in text.split(","):
        ends = item.split("-")
        if len(ends) != 2:
            raise _UsageError(f"edge {item!r} is not of the form a-b")
        out.append((int(ends[0]), int(ends[1])))
    return out


def _add_common(sp) -> None:
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--cap", type=int, default=None,
                    help="exact mask-space cap in bits")


def _add_predicate_flags(sp) -> None:
    sp.add_argument("--forb", metavar="FILE",
                    help="family file; predicate = no induced member")
    sp.add_argument("--contains", metavar="FILE",
                    help="family file; predicate = some induced member")
    sp.add_argument("--within", default=None,
                    help="comma list of vertices restricting --contains")
    sp.add_argument("--min-edges", dest="min_edges", type=int, default=None)
    sp.add_argument("--max-edges", dest="max_edges", type=int, default=None)
    sp.add_argument("--predicate", metavar="FILE",
                    help="JSON predicate descriptor file")


def _load_family(path: str):
    return normalize_family(load_graph_list(path))


def _predicate_from_args(args) -> EdgePredicate:
    chosen = [k for k in ("forb", "contains", "min_edges", "max_edges",
                          "predicate") if getattr(args, k) is not None]
    if len(chosen) != 1:
        raise _UsageError(
            "exactly one of --forb/--contains/--min-edges/--max-edges/"
            "--predicate is required")
    kind = chosen[0]
    if kind == "forb":
        return EdgePredicate.forb(_load_family(args.forb))
    if kind == "contains":
        within = _parse_ints(args.within) if args.within else None
        return EdgePredicate.contains(_load_family(args.contains), within=within)
    if kind == "min_edges":
        return EdgePredicate.min_edges(args.min_edges)
    if kind == "max_edges":
        return EdgePredicate.max_edges(args.max_edges)
    with open(args.predicate, encoding="utf-8") as fh:
        return predicate_from_json_obj(json.load(fh))


def _cmd_measure(cfg: RunConfig) -> list:
    a = cfg.args
    pred = _predicate_from_args(a)
    res = exact_measure(a.n, a.r, a.p, pred, cap_bits=cfg.cap_bits,
                        workers=cfg.workers)
    return [{"n": a.n, "r": a.r, "p": Fraction(a.p), "value": res.value,
             "log2_value": res.log2_value, "method": res.method}]


def _cmd_cn(cfg: RunConfig) -> list:
    a = cfg.args
    fam = _load_family(a.family)
    points = cn_sequence(fam, a.p, _parse_ints(a.n_list),
                         cap_bits=cfg.cap_bits, workers=cfg.workers)
    return [{"n": pt.n, "mu": pt.measure.value, "c_n": pt.c_n}
            for pt in points]


def _cmd_mc(cfg: RunConfig) -> list:
    a = cfg.args
    pred = _predicate_from_args(a)
    res = mc_measure(a.n, a.r, a.p, pred, samples=a.samples, seed=a.seed,
                     ci_level=a.ci_level, workers=cfg.workers)
    return [{"n": a.n, "r": a.r, "p": Fraction(a.p), "estimate": res.value,
             "hits": res.hits, "samples": res.samples, "seed": res.seed,
             "ci_level": res.ci_level, "ci_low": res.ci_low,
             "ci_high": res.ci_high, "method": res.method}]


def _build_system(a):
    if a.algo == "greedy":
        return greedy_system(a.r, a.m, a.n, seed=a.seed)
    return nibble_system(a.r, a.m, a.n, seed=a.seed, bite=a.bite,
                         rounds=a.rounds)


def _cmd_steiner(cfg: RunConfig) -> list:
    a = cfg.args
    best = None
    for offset in range(a.restarts):
        seed = a.seed + offset
        sub = argparse.Namespace(**{**vars(a), "seed": seed})
        sysm = _build_system(sub)
        if best is None or sysm.d > best[1].d:
            best = (seed, sysm)
    seed, sysm = best
    if a.out:
        save_system(sysm, a.out)
    rep = sysm.verify()
    return [{"r": a.r, "m": a.m, "n": a.n, "algo": a.algo, "seed": seed,
             "restarts": a.restarts, "valid": rep.valid, "d": rep.d,
             "covered": rep.covered,
             "uncovered_fraction": rep.uncovered_fraction,
             "violations": [list(v) for v in rep.violations]}]


def _cmd_verify_steiner(cfg: RunConfig) -> list:
    a = cfg.args
    with open(a.system, encoding="utf-8") as fh:
        obj = json.load(fh)
    rep = verify_system(int(obj["r"]), int(obj["m"]), int(obj["n"]),
                        [tuple(b) for b in obj["blocks"]])
    return [{"valid": rep.valid, "d": rep.d, "covered": rep.covered,
             "uncovered_fraction": rep.uncovered_fraction,
             "violations": [list(v) for v in rep.violations],
             "structural": list(rep.structural)}]


def _require(inst, field):
    if getattr(inst, field) is None:
        raise InputError(f"instance file lacks the {field!r} entry")
    return getattr(inst, field)


def _cmd_lemma(cfg: RunConfig) -> list:
    inst = load_instance(cfg.args.instance)
    rep = lemma_report(inst.predicate, _require(inst, "system"), inst.family,
                       _require(inst, "params"), inst.p,
                       cap_bits=cfg.cap_bits, workers=cfg.workers)
    return [{"d": rep.d, "theta": list(rep.theta),
             "index_set": list(rep.index_set), "eta": rep.eta,
             "mu_A": rep.mu_A.value, "gamma": rep.gamma, "nu": rep.nu,
             "mu_mB": rep.mu_mB, "tail": rep.tail,
             "tail_small": rep.tail_small, "chain_ok": rep.chain_ok}]


def _cmd_partition(cfg: RunConfig) -> list:
    inst = load_instance(cfg.args.instance)
    table = partition_table(inst.predicate, _require(inst, "system"),
                            inst.family, inst.n, inst.p,
                            cap_bits=cfg.cap_bits, workers=cfg.workers)
    cells = [{"pattern": s, "size": s.bit_count(), "mu": table.cells[s]}
             for s in sorted(table.cells)]
    return [{"d": table.d, "cells": cells, "total": table.total,
             "weighted_sum": table.weighted_sum,
             "theta_sum": table.theta_sum, "theta": list(table.theta),
             "identity_ok": table.weighted_sum == table.theta_sum}]


def _cmd_tailmass(cfg: RunConfig) -> list:
    a = cfg.args
    nu, mu = Fraction(a.nu), Fraction(a.mu)
    row = {"nu": nu, "d": a.d, "mu_mB": mu}
    if a.instance:
        inst = load_instance(a.instance)
        table = partition_table(inst.predicate, _require(inst, "system"),
                                inst.family, inst.n, inst.p,
                                cap_bits=cfg.cap_bits, workers=cfg.workers)
        if table.d != a.d:
            raise InputError(f"--d {a.d} disagrees with instance d={table.d}")
        value = tail_mass(nu, a.d, mu, table=table)
        cut = (nu * a.d).__floor__()
        row.update(value=value, small_mass=table.small_mass(cut),
                   dominates=True)
    else:
        row.update(value=tail_mass(nu, a.d, mu))
    return [row]


def _cmd_xset(cfg: RunConfig) -> list:
    a = cfg.args
    inst = load_instance(a.instance)
    gamma = Fraction(a.gamma) if a.gamma else _require(inst, "params").gamma
    m = a.m if a.m is not None else _require(inst, "params").m
    if m is None:
        raise InputError("block order m missing from flags and instance")
    rep = x_set(inst.predicate, inst.family, m, gamma, inst.n, inst.p,
                cap_bits=cfg.cap_bits, workers=cfg.workers)
    return [{"n": rep.n, "m": rep.m, "t": rep.t, "gamma": rep.gamma,
             "mu_A": rep.mu_A, "x_size": rep.x_size,
             "x_members": [list(d) for d in rep.x_members],
             "eta_eff": rep.eta_eff,
             "best_graph": graph_to_json_obj(rep.best_graph)
             if rep.best_graph else None,
             "best_mset_count": rep.best_mset_count,
             "distinct_copies": rep.distinct_copies,
             "delta_floor": rep.delta_floor,
             "averaging_lhs": rep.averaging_lhs,
             "averaging_rhs": rep.averaging_rhs,
             "averaging_ok": rep.averaging_ok}]


def _cmd_floor(cfg: RunConfig) -> list:
    a = cfg.args
    res = counting_floor(a.n, a.m, a.t, Fraction(a.gamma), Fraction(a.eta))
    return [{"n": a.n, "m": a.m, "t": a.t, "ratio": res.ratio,
             "floor": res.floor, "ok": res.ok,
             "proviso_met": res.proviso_met}]


def _cmd_tau(cfg: RunConfig) -> list:
    return [tau_to_json_obj(tau(load_graph(cfg.args.graph)))]


def _cmd_exstar(cfg: RunConfig) -> list:
    return [exstar_to_json_obj(exstar(cfg.args.n, load_graph(cfg.args.graph)))]


def _cmd_witness(cfg: RunConfig) -> list:
    a = cfg.args
    res = witness_check(a.n, load_graph(a.graph), _parse_edges(a.e),
                        _parse_edges(a.e0))
    return [{"ok": res.ok,
             "counterexample": [list(e) for e in res.counterexample]
             if res.counterexample is not None else None}]


def _cmd_count_induced(cfg: RunConfig) -> list:
    a = cfg.args
    G = load_graph(a.graph)
    fam = _load_family(a.family)
    return [{"count": count_induced(G, fam),
             "contains": contains_induced(G, fam)}]


def _cmd_codec(cfg: RunConfig) -> list:
    a = cfg.args
    G = load_graph(a.input)
    if a.out:
        save_graph(G, a.out)
        return [{"n": G.n, "r": G.r, "edges": G.num_edges, "out": a.out}]
    if a.to == "g6":
        return [{"g6": encode_graph6(G)}]
    return [graph_to_json_obj(G)]


_HANDLERS = {
    "measure": _cmd_measure, "cn": _cmd_cn, "mc": _cmd_mc,
    "steiner": _cmd_steiner, "verify-steiner": _cmd_verify_steiner,
    "lemma": _cmd_lemma, "partition": _cmd_partition,
    "tailmass": _cmd_tailmass, "xset": _cmd_xset, "floor": _cmd_floor,
    "tau": _cmd_tau, "exstar": _cmd_exstar, "witness": _cmd_witness,
    "count-induced": _cmd_count_induced, "codec": _cmd_codec,
}


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="hlab",
        description="exact verification lab for measures, designs, and "
                    "supersaturation counting in random r-graphs")
    subs = top.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("measure", help="exact class measure mu_n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--p", type=Fraction, required=True)
    sp.add_argument("--exact", action="store_true",
                    help="accepted for clarity; measure is always exact")
    _add_predicate_flags(sp)
    _add_common(sp)

    sp = subs.add_parser("cn", help="entropy constants over an n range")
    sp.add_argument("--family", required=True)
    sp.add_argument("--p", type=Fraction, required=True)
    sp.add_argument("--n-list", dest="n_list", required=True)
    _add_common(sp)

    sp = subs.add_parser("mc", help="Monte-Carlo measure with exact CI")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--p", type=Fraction, required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--ci-level", dest="ci_level", type=float, default=0.95)
    _add_predicate_flags(sp)
    _add_common(sp)

    sp = subs.add_parser("steiner", help="construct a partial Steiner system")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--algo", choices=("greedy", "nibble"), default="greedy")
    sp.add_argument("--bite", type=Fraction, default=Fraction(1, 10))
    sp.add_argument("--rounds", type=int, default=10)
    sp.add_argument("--restarts", type=int, default=1,
                    help="try seeds seed..seed+restarts-1, keep largest d")
    sp.add_argument("--out", default=None, help="write the system JSON here")
    _add_common(sp)

    sp = subs.add_parser("verify-steiner", help="verify a system file")
    sp.add_argument("--system", required=True)
    _add_common(sp)

    for name in ("lemma", "partition"):
        sp = subs.add_parser(name, help=f"{name} report for an instance file")
        sp.add_argument("--instance", required=True)
        _add_common(sp)

    sp = subs.add_parser("tailmass", help="closed-form small-cell bound")
    sp.add_argument("--nu", required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--mu", required=True)
    sp.add_argument("--instance", default=None,
                    help="also check domination of the true small-cell mass")
    _add_common(sp)

    sp = subs.add_parser("xset", help="dense m-subset scan and count floor")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--gamma", default=None)
    _add_common(sp)

    sp = subs.add_parser("floor", help="ratio versus (2m)^-t n^t floor")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--gamma", default="1")
    sp.add_argument("--eta", default="1")
    _add_common(sp)

    sp = subs.add_parser("tau", help="partition parameter of a graph")
    sp.add_argument("--graph", required=True)
    _add_common(sp)

    sp = subs.add_parser("exstar", help="exact ex*(n, F) with witnesses")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--graph", required=True)
    _add_common(sp)

    sp = subs.add_parser("witness", help="check an (E, E0) witness pair")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--e", default="", help='edges "a-b,c-d"')
    sp.add_argument("--e0", default="", help='base edges "a-b,c-d"')
    _add_common(sp)

    sp = subs.add_parser("count-induced", help="induced member subsets")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--family", required=True)
    _add_common(sp)

    sp = subs.add_parser("codec", help="convert graph file formats")
    sp.add_argument("--input", required=True)
    sp.add_argument("--to", choices=("g6", "json"), default="json")
    sp.add_argument("--out", default=None)
    _add_common(sp)

    return top


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    cfg = RunConfig(command=args.command, fmt=args.format,
                    seed=getattr(args, "seed", None), workers=args.workers,
                    cap_bits=args.cap, args=args)
    try:
        rows = _HANDLERS[args.command](cfg)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except HlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(rows, cfg.fmt)
    return 0


if __name__ == "__main__":
    sys.exit(main())
