"""Batch experiment runner.

Every subcommand writes one CSV row per (instance, protocol) and a JSON
manifest next to it echoing the configuration. The exit status is 0 iff
every check of the run passed, 1 if some check failed and 2 on a
configuration or runtime error.
"""

from __future__ import annotations

import argparse
import csv
import glob
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .engine import (DEFAULT_CAP, best_adversary_exact, best_adversary_search, exact_acceptance,
                     hoeffding_halfwidth, monte_carlo_acceptance)
from .fixtures import amos_family, amos_small_family, equality_paths
from .netconfig import LanguageId, Membership, NetworkConfig, decide_membership, dump, load
from .protocols import amos_private, amos_shared, spanning_tree_pls, tce_private, tce_shared

COLUMNS = ["instance_id", "language", "membership", "protocol", "randomness_mode", "k", "bandwidth_bits",
           "eval_mode", "acceptance_num", "acceptance_den", "estimate", "halfwidth", "adversary_mode",
           "wall_ms"]
PROTOCOLS = ("amos-shared", "amos-private", "tce-shared", "tce-private", "spanning-tree")


class CliError(Exception):
    """Invalid configuration; reported without a traceback."""


@dataclass
class Outcome:
    rows: list
    failures: list


def _fraction(text: str | None) -> Fraction | None:
    return None if text is None else Fraction(text)


def build_protocol(name: str, cfg: NetworkConfig, args):
    """Instantiate a named protocol with the run's parameters for ``cfg``."""
    if name == "amos-shared":
        return amos_shared(max(cfg.n, 2), args.c)
    if name == "amos-private":
        return amos_private(_fraction(args.eps) or Fraction(1, 4))
    if name in ("tce-shared", "tce-private"):
        width = len(cfg.labels[0])
        if width < 1:
            raise CliError("2-coloring protocols need non-empty labels")
        if name == "tce-shared":
            return tce_shared(width, args.c)
        return tce_private(width, args.reps, _fraction(args.rate) or Fraction(1, 3))
    if name == "spanning-tree":
        return spanning_tree_pls(max(cfg.n, 2), args.c, check_labels=True)
    raise CliError(f"unknown protocol {name!r}; choose from {', '.join(PROTOCOLS)}")


def load_instances(pattern: str | None) -> list[tuple[str, NetworkConfig]]:
    if not pattern:
        raise CliError("--instances is required")
    if os.path.isdir(pattern):
        pattern = os.path.join(pattern, "*.json")
    paths = sorted(glob.glob(pattern))
    if not paths:
        raise CliError(f"no instance files match {pattern!r}")
    return [(Path(p).stem, load(p)) for p in paths]


def _row(iid, language, membership, protocol=None, eval_mode="", num="", den="", estimate="", halfwidth="",
         adversary_mode="", wall_ms=0.0) -> dict:
    spec = protocol.spec if protocol is not None else None
    return {
        "instance_id": iid,
        "language": language.value if isinstance(language, LanguageId) else (language or ""),
        "membership": membership.value if isinstance(membership, Membership) else membership,
        "protocol": protocol.name if protocol is not None else "",
        "randomness_mode": spec.randomness.value if spec else "",
        "k": spec.rounds if spec else "",
        "bandwidth_bits": spec.bandwidth_bits if spec else "",
        "eval_mode": eval_mode,
        "acceptance_num": num,
        "acceptance_den": den,
        "estimate": "" if estimate == "" else format(estimate, ".10g"),
        "halfwidth": "" if halfwidth == "" else format(halfwidth, ".10g"),
        "adversary_mode": adversary_mode,
        "wall_ms": f"{wall_ms:.3f}",
    }


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1000


def _need_seed(args) -> int:
    if args.seed is None:
        raise CliError("--seed is required for randomized modes")
    return args.seed


# subcommands

def cmd_decide(args) -> Outcome:
    if not args.language:
        raise CliError("--language is required")
    lang = LanguageId(args.language)
    rows = []
    for iid, cfg in load_instances(args.instances):
        t0 = time.perf_counter()
        rows.append(_row(iid, lang, decide_membership(cfg, lang), wall_ms=_ms(t0)))
    return Outcome(rows, [])


def _honest(cfg, protocol, args):
    if args.mode == "exact":
        rep = exact_acceptance(cfg, protocol, cap=args.cap)
        return rep, "exact", rep.probability
    rep = monte_carlo_acceptance(cfg, protocol, args.trials, _need_seed(args))
    return rep, "mc", rep.estimate


def cmd_run(args) -> Outcome:
    rows, failures = [], []
    for iid, cfg in load_instances(args.instances):
        t0 = time.perf_counter()
        protocol = build_protocol(args.protocol, cfg, args)
        member = decide_membership(cfg, protocol.language) if protocol.language else Membership.YES
        rep, mode, value = _honest(cfg, protocol, args)
        if mode == "exact":
            row = _row(iid, protocol.language, member, protocol, "exact", rep.accepted, rep.total,
                       adversary_mode="honest", wall_ms=_ms(t0))
            if member is Membership.YES and value != 1:
                failures.append(f"{iid}: honest acceptance {value} on a yes-instance")
        else:
            row = _row(iid, protocol.language, member, protocol, "mc", estimate=rep.estimate,
                       halfwidth=rep.halfwidth, adversary_mode="honest", wall_ms=_ms(t0))
            if member is Membership.YES and rep.estimate + rep.halfwidth < 1:
                failures.append(f"{iid}: honest estimate {rep.estimate} on a yes-instance")
        rows.append(row)
    return Outcome(rows, failures)


def cmd_soundness_scan(args) -> Outcome:
    rows, failures = [], []
    for iid, cfg in load_instances(args.instances):
        t0 = time.perf_counter()
        protocol = build_protocol(args.protocol, cfg, args)
        member = decide_membership(cfg, protocol.language)
        if member is Membership.YES:
            continue
        eps = protocol.spec.error_budget
        if args.mode == "exact":
            rep = best_adversary_exact(cfg, protocol, cap=args.cap)
            mode = f"{rep.method}-{'adaptive' if rep.adaptive else 'fixed'}"
            rows.append(_row(iid, protocol.language, member, protocol, "exact", rep.winning, rep.total,
                             adversary_mode=mode, wall_ms=_ms(t0)))
            value = rep.value
        else:
            rep = best_adversary_search(cfg, protocol, args.budget, _need_seed(args), cap=args.cap,
                                        trials=args.trials)
            value = rep.value
            if rep.exact:
                rows.append(_row(iid, protocol.language, member, protocol, "exact", value.numerator,
                                 value.denominator, adversary_mode="search", wall_ms=_ms(t0)))
            else:
                rows.append(_row(iid, protocol.language, member, protocol, "mc", estimate=value,
                                 adversary_mode="search", wall_ms=_ms(t0)))
        if eps is not None and value > eps:
            failures.append(f"{iid}: adversary acceptance {value} above the error budget {eps}")
    return Outcome(rows, failures)


def cmd_derandomize(args) -> Outcome:
    from .transforms import (derandomize_am_to_m, derandomize_whp, seedwise_decomposition,
                             union_bound_holds, with_idle_coin)

    rows, failures = [], []
    for iid, cfg in load_instances(args.instances):
        t0 = time.perf_counter()
        source = build_protocol(args.protocol, cfg, args)
        if not source.spec.seed_domains:
            source = with_idle_coin(source)
        member = decide_membership(cfg, source.language)
        if args.variant == "am":
            out = derandomize_am_to_m(source, max(cfg.n, 2), args.c, args.cap)
        else:
            m = args.m if args.m is not None else cfg.n + 2
            out = derandomize_whp(source, m, args.cap)
            if not union_bound_holds(cfg.n, out.params["R"], m):
                failures.append(f"{iid}: m = {m} too small for n = {cfg.n}")
        if member is Membership.YES:
            rep = exact_acceptance(cfg, out, cap=args.cap)
            rows.append(_row(iid, source.language, member, out, "exact", rep.accepted, rep.total,
                             adversary_mode="honest", wall_ms=_ms(t0)))
            if rep.probability != 1:
                failures.append(f"{iid}: constructed certificate rejected")
        elif args.variant == "am":
            sw = seedwise_decomposition(cfg, source, args.cap)
            rows.append(_row(iid, source.language, member, out, "exact", sw.winning, sw.total,
                             adversary_mode="seedwise", wall_ms=_ms(t0)))
            if not sw.certified:
                failures.append(f"{iid}: {sw.winning}/{sw.total} winnable seeds reach the threshold")
    return Outcome(rows, failures)


def _family(args) -> list[tuple[str, NetworkConfig]]:
    if args.instances:
        return load_instances(args.instances)
    if args.family == "amos3":
        return [(f"amos3-{i:05d}", cfg) for i, cfg in enumerate(amos_small_family())]
    raise CliError("fix-coins needs --instances or --family amos3")


def cmd_fix_coins(args) -> Outcome:
    from .transforms import as_fraction, fix_coins_ma

    seed = _need_seed(args)
    if args.delta is None:
        raise CliError("--delta is required")
    family = _family(args)
    source = build_protocol(args.protocol, family[0][1], args)
    fixed = fix_coins_ma(source, [cfg for _, cfg in family], args.delta, seed, cap=args.cap)
    out = fixed.protocol
    bound = out.spec.error_budget
    rows, failures = [], []
    for iid, cfg in family:
        t0 = time.perf_counter()
        member = decide_membership(cfg, source.language)
        if member is Membership.YES:
            rep = exact_acceptance(cfg, out, cap=args.cap)
            err = 1 - rep.probability
            rows.append(_row(iid, source.language, member, out, "exact", rep.accepted, rep.total,
                             adversary_mode="honest", wall_ms=_ms(t0)))
        else:
            rep = best_adversary_exact(cfg, out, cap=args.cap)
            err = rep.value
            rows.append(_row(iid, source.language, member, out, "exact", rep.winning, rep.total,
                             adversary_mode=f"{rep.method}-{'adaptive' if rep.adaptive else 'fixed'}",
                             wall_ms=_ms(t0)))
        if err > bound:
            failures.append(f"{iid}: error {err} above eps + delta = {bound}")
    if fixed.audit.worst > as_fraction(args.delta):
        failures.append(f"audit deviation {fixed.audit.worst} above delta")
    return Outcome(rows, failures)


def cmd_sm_eq(args) -> Outcome:
    from . import sm

    n = args.bits
    rate = _fraction(args.rate) or Fraction(1, 3)
    rows, failures = [], []
    if args.variant == "derandomized":
        base = sm.eq_private(n, rate, args.reps)
        out = sm.derandomize_ma_sym(base, args.delta if args.delta is not None else 0.1, _need_seed(args))
        proto = out.protocol
    elif args.variant == "reduction":
        source = tce_private(n, args.reps, rate)
        proto = sm.reduce_tce_to_eq(source, n, _fraction(args.eps))
    else:
        proto = sm.eq_private(n, rate, args.reps)
    for x in proto.inputs():
        for y in proto.inputs():
            t0 = time.perf_counter()
            iid = f"eq-n{n}-x{x}-y{y}"
            member = Membership.YES if x == y else Membership.NO
            common = dict(iid=iid, language="EQUALITY", membership=member)
            best = sm.ma_sym_best_proof(proto, x, y)
            if args.mode == "exact":
                value = best.value
                row = _row(**common, eval_mode="exact", num=value.numerator, den=value.denominator,
                           adversary_mode="best-proof", wall_ms=_ms(t0))
            else:
                acc, trials = sm.monte_carlo(proto, x, y, best.proof, args.trials, _need_seed(args))
                value = acc / trials
                row = _row(**common, eval_mode="mc", estimate=value, halfwidth=hoeffding_halfwidth(trials),
                           adversary_mode="best-proof", wall_ms=_ms(t0))
            row.update(protocol=proto.name, randomness_mode="private", k=1,
                       bandwidth_bits=proto.max_message_bits)
            rows.append(row)
            if args.mode == "exact":
                if x == y and value < 1 - proto.error:
                    failures.append(f"{iid}: completeness {value}")
                if x != y and value > proto.error:
                    failures.append(f"{iid}: soundness {value} above {proto.error}")
    return Outcome(rows, failures)


def cmd_report(args) -> Outcome:
    if not args.instances:
        raise CliError("--instances must name the CSV files to merge")
    paths = sorted(glob.glob(args.instances))
    if not paths:
        raise CliError(f"no CSV files match {args.instances!r}")
    rows = []
    for p in paths:
        with open(p, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != COLUMNS:
                raise CliError(f"{p}: unexpected columns")
            rows.extend(reader)
    return Outcome(rows, [])


def cmd_gen(args) -> Outcome:
    if not args.out:
        raise CliError("--out is required")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.family == "amos":
        items = amos_family(args.max_n, args.seed or 0, args.c)
    elif args.family == "amos3":
        items = ((f"amos3-{i:05d}", cfg) for i, cfg in enumerate(amos_small_family()))
    elif args.family == "equality":
        items = ((f"eq-x{x}-y{y}", cfg) for x, y, cfg in equality_paths(args.bits))
    else:
        raise CliError(f"unknown family {args.family!r}")
    count = 0
    for iid, cfg in items:
        dump(cfg, out_dir / f"{iid}.json")
        count += 1
    print(f"wrote {count} instances to {out_dir}")
    return Outcome([], [])


COMMANDS = {
    "decide": cmd_decide,
    "run": cmd_run,
    "soundness-scan": cmd_soundness_scan,
    "derandomize": cmd_derandomize,
    "fix-coins": cmd_fix_coins,
    "sm-eq": cmd_sm_eq,
    "report": cmd_report,
    "gen": cmd_gen,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="distproofs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--instances", help="instance file, directory or glob (CSV glob for report)")
        p.add_argument("--protocol", default="amos-shared")
        p.add_argument("--mode", choices=("exact", "mc"), default="exact")
        p.add_argument("--trials", type=int, default=100_000)
        p.add_argument("--seed", type=int)
        p.add_argument("--cap", type=int, default=DEFAULT_CAP)
        p.add_argument("--out")
        p.add_argument("--c", type=int, default=2)
        p.add_argument("--eps")
        p.add_argument("--delta")
        p.add_argument("--reps", type=int, default=1)
        p.add_argument("--rate")
        p.add_argument("--language", choices=[lang.value for lang in LanguageId])
        p.add_argument("--variant", default=None)
        p.add_argument("--m", type=int)
        p.add_argument("--bits", type=int, default=4)
        p.add_argument("--budget", type=int, default=64)
        p.add_argument("--family", default="amos")
        p.add_argument("--max-n", type=int, default=4)
    return parser


def _validate(args) -> None:
    if args.command in ("run", "soundness-scan", "derandomize", "fix-coins") and args.protocol not in PROTOCOLS:
        raise CliError(f"unknown protocol {args.protocol!r}; choose from {', '.join(PROTOCOLS)}")
    variants = {"derandomize": ("am", "whp"), "sm-eq": ("eq-private", "reduction", "derandomized")}
    if args.command in variants:
        allowed = variants[args.command]
        args.variant = args.variant or allowed[0]
        if args.variant not in allowed:
            raise CliError(f"unknown variant {args.variant!r}; choose from {', '.join(allowed)}")
    if args.mode == "mc":
        _need_seed(args)
    if args.trials < 1 or args.cap < 1 or args.reps < 1:
        raise CliError("--trials, --cap and --reps must be positive")
    if args.delta is not None:
        args.delta = Fraction(args.delta)


def write_outputs(args, outcome: Outcome, status: str) -> None:
    rows = sorted(outcome.rows, key=lambda r: (r["instance_id"], r["protocol"]))
    if args.out and args.command != "gen":
        with open(args.out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        config = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in sorted(vars(args).items())}
        manifest = {"version": __version__, "config": config, "rows": len(rows), "status": status,
                    "failures": outcome.failures, "columns": COLUMNS}
        with open(f"{args.out}.manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    elif args.command != "gen":
        writer = csv.DictWriter(sys.stdout, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    partial = Outcome([], [])
    try:
        _validate(args)
        outcome = COMMANDS[args.command](args)
    except CliError as exc:
        print(f"distproofs {args.command}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # surface with stage context, flush what we have
        print(f"distproofs {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        write_outputs(args, partial, "error")
        return 2
    for msg in outcome.failures:
        print(f"FAIL {msg}", file=sys.stderr)
    write_outputs(args, outcome, "fail" if outcome.failures else "pass")
    return 1 if outcome.failures else 0


if __name__ == "__main__":
    sys.exit(main())
