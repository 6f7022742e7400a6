"""Command-line front end: encode, corrupt, decode, rates, curves, mindist, simulate, selftest."""
import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import channels as ch
from .decoder import DEFAULT_MAX_COST, soft_decode
from .errors import BudgetExceeded, LpDecodeError, RateTooHigh
from .grs import (CodeSpec, encode, format_codeword, min_dist_lower_bound, min_dist_rate_form,
                  observed_min_distance, parse_codeword, subclass_alpha_alpha)
from .lattice import DEFAULT_TOL, LpParams
from .rates import (BOUND, CONTINUOUS, CURVE_COLUMNS, DISCRETE, EXACT, A_bound, W_bound, wc_seed,
                    ac_threshold, comparison_curves, rate_ac, rate_wc)
from .selftest import run_selftest
from .weights import ReceivedWord, build_weights

EXIT_OK, EXIT_EMPTY, EXIT_USAGE, EXIT_RATE = 0, 1, 2, 3
FAULT_ENV = "LPDECODE_SELFTEST_FAULT"
FORCED_TAU = 0.02


class UsageError(Exception):
    pass


def fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def write_csv(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def emit(text, out=None):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def read_text(path_or_value):
    if path_or_value and os.path.exists(path_or_value):
        with open(path_or_value) as fh:
            return fh.read()
    return path_or_value


def parse_grid(text):
    text = (text or "").strip()
    if not text:
        return []
    if ":" in text:
        a, step, b = (float(t) for t in text.split(":"))
        if step <= 0:
            raise UsageError("grid step must be positive")
        count = int(math.floor((b - a) / step + 1e-9)) + 1
        return [round(a + i * step, 12) for i in range(max(count, 0))]
    return [float(t) for t in text.split(",") if t.strip()]


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join(missing)}")


def build_code(args):
    _need(args, "q", "n", "k")
    if args.code == "alpha-alpha":
        return subclass_alpha_alpha(args.q, args.n, args.k)
    return CodeSpec(args.q, args.n, args.k)


def resolve_s(args, p, q):
    """Explicit --s, else the closed-form seed from --delta, else the optimiser (--auto-s)."""
    if args.s is not None:
        return args.s, "explicit"
    if args.delta is not None and not args.auto_s and p in (1, 2):
        return wc_seed(p, args.delta), "closed-form seed"
    if args.delta is not None:
        return rate_wc(p, q, args.delta, args.tol).s_star, "optimised"
    if args.r is not None:
        return rate_ac(p, q, args.r, args.tol, kind=args.kind).s_star, "optimised"
    raise UsageError("need --s, --delta or --r to choose the weight scale")


# subcommands

def cmd_encode(args):
    code = build_code(args)
    if args.message is not None:
        msg = [int(t) for t in args.message.split(",") if t.strip()]
    else:
        msg = ch.stream(args.seed).integers(0, code.q, size=code.k).tolist()
    word = encode(code, msg)
    emit(format_codeword(word), args.out)
    if args.out:
        with open(args.out + ".json", "w") as fh:
            json.dump({"code": code.to_dict(), "message": [int(m) % code.q for m in msg]}, fh,
                      sort_keys=True)
    return EXIT_OK


def _channel_from_args(args, p):
    if args.delta is not None and args.r is not None:
        raise UsageError("--delta and --r are mutually exclusive")
    if args.delta is not None:
        return ch.ChannelSpec(ch.ADVERSARIAL, p, delta=args.delta, strategy=args.strategy,
                              seed=args.seed)
    if args.r is not None:
        return ch.ChannelSpec(args.kind, p, r=args.r, seed=args.seed)
    raise UsageError("need --delta (adversarial) or --r (random channel)")


def cmd_corrupt(args):
    _need(args, "q", "input")
    word = parse_codeword(read_text(args.input), args.q)
    channel = _channel_from_args(args, args.p)
    e = ch.channel_error(channel, len(word), args.q, ch.stream(args.seed))
    emit(ReceivedWord(word + e, args.q).to_text(), args.out)
    return EXIT_OK


def cmd_decode(args):
    code = build_code(args)
    _need(args, "input")
    y = ReceivedWord.from_text(read_text(args.input), code.q)
    if y.n != code.n:
        raise UsageError(f"received word has length {y.n}, code has n = {code.n}")
    if args.delta is not None and args.r is not None:
        raise UsageError("--delta and --r are mutually exclusive")
    p = args.p
    s, how = resolve_s(args, p, code.q)
    root = math.sqrt(code.rate_adj)
    if args.r is not None:
        A = A_bound(p, code.q, args.r, s, args.kind, args.tol, upper=True)
        bound = A * A
        tau = ac_threshold(A, code.rate_adj, args.alpha) - root
    elif args.delta is not None:
        Wb = W_bound(p, code.q, args.delta, s, args.tol, upper=True)
        bound = Wb * Wb
        tau = Wb - root
    else:
        raise UsageError("need --delta (worst case) or --r (average case) to plan the decode")
    plan = {"p": p, "s": s, "s_source": how, "rate_bound": bound, "rate_adj": code.rate_adj,
            "delta": args.delta, "r": args.r}
    if not (code.rate_adj < bound and tau > 0):
        if not args.force:
            raise RateTooHigh(f"R* = {code.rate_adj:.6g} is not below the bound {bound:.6g} at s = {s:.6g}")
        tau = max(tau, FORCED_TAU) if args.tau is None else args.tau
        plan["forced"] = True
    if args.tau is not None:
        tau = args.tau
    W = build_weights(y, LpParams(p, s), args.tol)
    try:
        res = soft_decode(code, W, tau, max_cost=args.max_cost)
    except BudgetExceeded as exc:
        emit(json.dumps({"error": "BudgetExceeded", "message": str(exc), "plan": plan,
                         "diagnostics": exc.diagnostics}, sort_keys=True), args.out)
        return EXIT_EMPTY
    out = res.to_dict()
    out["plan"] = plan
    out["diagnostics"]["tau"] = tau
    if args.format == "csv":
        rows = [{"codeword": format_codeword(c.codeword), "correlation": c.correlation}
                for c in res.candidates]
        emit(write_csv(rows, ("codeword", "correlation")), args.out)
    else:
        emit(json.dumps(out, sort_keys=True), args.out)
    return EXIT_OK if res.candidates else EXIT_EMPTY


def cmd_rates(args):
    _need(args, "q")
    if (args.delta is None) == (args.r is None):
        raise UsageError("give exactly one of --delta (worst case) or --r (average case)")
    rate_adj = (args.k - 1) / args.n if args.k is not None and args.n is not None else None
    if args.delta is not None:
        plan = rate_wc(args.p, args.q, args.delta, args.tol, args.method, rate_adj)
    else:
        plan = rate_ac(args.p, args.q, args.r, args.tol, args.method, args.kind, rate_adj)
    if args.s is not None:
        # evaluate at a pinned scale instead of the optimum
        if args.delta is not None:
            val = W_bound(args.p, args.q, args.delta, args.s, args.tol) ** 2
        else:
            val = A_bound(args.p, args.q, args.r, args.s, args.kind, args.tol) ** 2
        plan = replace(plan, s_star=args.s, rate_bound=min(val, 1.0))
    d = plan.to_dict()
    if args.format == "csv":
        flat = {k: v for k, v in d.items() if not isinstance(v, dict)}
        for k, v in d["fudge"].items():
            flat[f"fudge_{k}"] = v
        emit(write_csv([flat], list(flat)), args.out)
    else:
        emit(json.dumps(d, sort_keys=True), args.out)
    return EXIT_OK


AC_COLUMNS = ("r", "rate_ac_opt", "rate_ac_closed")


def cmd_curves(args):
    _need(args, "q")
    grid = parse_grid(args.grid)
    if not grid:
        raise UsageError("grid is empty")
    if args.mode == "ac":
        rows = []
        for r in grid:
            plan = rate_ac(args.p, args.q, r, args.tol, args.method, args.kind)
            rows.append({"r": r, "rate_ac_opt": plan.rate_bound, "rate_ac_closed": plan.closed_form_bound})
        cols = AC_COLUMNS
    else:
        rows = comparison_curves(args.p, args.q, grid, args.method, args.tol, args.workers)
        cols = CURVE_COLUMNS
    if args.format == "json":
        emit(json.dumps({"columns": list(cols), "rows": rows}, sort_keys=True), args.out)
    else:
        emit(write_csv(rows, cols), args.out)
    return EXIT_OK


MINDIST_COLUMNS = ("q", "n", "k", "p", "observed", "bound", "rate_form")


def cmd_mindist(args):
    _need(args, "q")
    q = args.q
    n = args.n if args.n is not None else q - 1
    ks = [args.k] if args.k is not None else list(range(1, 4))
    rows = []
    for k in ks:
        code = subclass_alpha_alpha(q, n, k)
        for p in (1, 2):
            rows.append({"q": q, "n": n, "k": k, "p": p, "observed": observed_min_distance(code, p),
                         "bound": min_dist_lower_bound(p, n, k) ** p,
                         "rate_form": min_dist_rate_form(p, n, k) ** p})
    if args.format == "json":
        emit(json.dumps(rows, sort_keys=True), args.out)
    else:
        emit(write_csv(rows, MINDIST_COLUMNS), args.out)
    return EXIT_OK


def cmd_simulate(args):
    if args.config:
        code, channel, params, trials, seed = ch.load_config(args.config)
        if args.trials is not None:
            trials = args.trials
    else:
        code = build_code(args)
        channel = _channel_from_args(args, args.p)
        s = args.s if args.s is not None else ch.resolve_scale(channel, code)
        params = LpParams(args.p, s)
        trials, seed = args.trials if args.trials is not None else 100, args.seed
    if trials < 1:
        raise UsageError("trials must be at least 1")
    rep = ch.run_experiment(code, channel, params, trials, parallelism=args.parallelism, seed=seed,
                            alpha=args.alpha, max_cost=args.max_cost)
    emit(rep.to_json(), args.out)
    return EXIT_OK


def cmd_selftest(args):
    fault = args.inject_fault or os.environ.get(FAULT_ENV)
    results = run_selftest(fault)
    failed = [r["name"] for r in results if not r["passed"]]
    if args.json:
        emit(json.dumps({"passed": not failed, "failed": failed, "checks": results}, sort_keys=True))
    else:
        width = max(len(r["name"]) for r in results)
        lines = [f"{r['name']:<{width}}  {'PASS' if r['passed'] else 'FAIL'}  {r['detail']}" for r in results]
        lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
        if failed:
            lines.append("failed: " + ", ".join(failed))
        emit("\n".join(lines))
    return EXIT_EMPTY if failed else EXIT_OK


def _global_flags():
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--q", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--p", type=float, default=2.0)
    sg = g.add_mutually_exclusive_group()
    sg.add_argument("--s", type=float, help="weight scale (default: derived from --delta/--r)")
    sg.add_argument("--auto-s", action="store_true", help="optimise the weight scale")
    g.add_argument("--delta", type=float, help="relative l_p decoding distance")
    g.add_argument("--r", type=float, help="random channel width")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--trials", type=int)
    g.add_argument("--format", choices=("csv", "json"), help="default: csv for tables, json otherwise")
    g.add_argument("--tol", type=float, default=DEFAULT_TOL)
    g.add_argument("--force", action="store_true", help="decode even above the planned rate")
    g.add_argument("--out", "-o", help="output path (default stdout)")
    g.add_argument("--code", choices=("default", "alpha-alpha"), default="default",
                   help="evaluation points 0..n-1 with unit twists, or alpha = twist = 1..n")
    g.add_argument("--kind", choices=(CONTINUOUS, DISCRETE), default=CONTINUOUS)
    return g


def build_parser():
    g = _global_flags()
    ap = argparse.ArgumentParser(prog="lpdecode", description="l_p-metric soft decoding of GRS codes")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", parents=[g], help="encode a message")
    p.add_argument("--message", help="comma-separated coefficients, low degree first")

    p = sub.add_parser("corrupt", parents=[g], help="add channel or adversarial error")
    p.add_argument("--input", "-i", help="codeword file or inline comma list")
    p.add_argument("--strategy", choices=ch.STRATEGIES, default=ch.SPREAD)

    p = sub.add_parser("decode", parents=[g], help="list-decode a received word")
    p.add_argument("--input", "-i", help="received-word file or inline comma list")
    p.add_argument("--tau", type=float)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--max-cost", type=int, default=DEFAULT_MAX_COST)

    p = sub.add_parser("rates", parents=[g], help="plan decodable rates")
    p.add_argument("--method", choices=(EXACT, BOUND), default=EXACT)

    p = sub.add_parser("curves", parents=[g], help="rate curves against competitors")
    p.add_argument("--grid", default="", help="a:step:b or comma list")
    p.add_argument("--mode", choices=("wc", "ac"), default="wc")
    p.add_argument("--method", choices=(EXACT, BOUND), default=BOUND)
    p.add_argument("--workers", type=int, default=1)

    sub.add_parser("mindist", parents=[g], help="observed vs bounded minimum distances")

    p = sub.add_parser("simulate", parents=[g], help="Monte Carlo decoding experiment")
    p.add_argument("--config", help="JSON config {code, channel, params, trials, seed}")
    p.add_argument("--strategy", choices=ch.STRATEGIES, default=ch.SPREAD)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--max-cost", type=int, default=DEFAULT_MAX_COST)

    p = sub.add_parser("selftest", parents=[g], help="run the embedded checks")
    p.add_argument("--json", action="store_true")
    p.add_argument("--inject-fault", help=argparse.SUPPRESS)
    return ap


COMMANDS = {"encode": cmd_encode, "corrupt": cmd_corrupt, "decode": cmd_decode, "rates": cmd_rates,
            "curves": cmd_curves, "mindist": cmd_mindist, "simulate": cmd_simulate,
            "selftest": cmd_selftest}


TABLE_COMMANDS = ("curves", "mindist")


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command in TABLE_COMMANDS else "json"
    try:
        return COMMANDS[args.command](args)
    except RateTooHigh as exc:
        print(json.dumps({"error": "RateTooHigh", "message": str(exc)}), file=sys.stderr)
        return EXIT_RATE
    except (UsageError, LpDecodeError, ValueError, OSError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
