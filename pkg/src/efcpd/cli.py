"""Command-line entry point: ``efcpd <command> [options]``.

Exit status is 0 on success, 1 on a usage or parameter-domain error and 2
when an exact verification finds a nonzero violation.  Output goes to
``--out`` if given, else to ``$EFCPD_OUTPUT_DIR/<command>.<ext>`` if that
variable is set, else to stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from importlib import resources
from pathlib import Path

from .chain import (
    build_generator,
    check_detailed_balance,
    restricted_pd_distribution,
    stationary_distribution,
    tv_distance,
)
from .eppf import Params, pd_eppf
from .exact import format_rational, parse_rational
from .mass import MassPartition
from .partitions import SetPartition, as_shape
from .rates import build_rate_table
from .samplers import (
    DEFAULT_EPS,
    DEFAULT_SEED,
    DEFAULT_STICKS,
    crp_sample,
    paintbox_sample,
    pd_stick_sample,
    spawn_rngs,
)
from .simulate import equilibrium_experiment, geometric_grid, split_merge_experiment

OUTPUT_DIR_ENV = "EFCPD_OUTPUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2

_EXTENSIONS = {
    "eppf": "txt", "rates": "csv", "verify-db": "json", "stationary": "json",
    "sample": "jsonl", "simulate": "csv", "split-merge": "json",
}
_VALUE_OPTIONS = {"--alpha", "--theta", "--masses"}


class UsageError(Exception):
    pass


def load_schema(name: str) -> dict:
    """JSON schema shipped for an output format: verify_db, stationary, split_merge, sample_record."""
    return json.loads(resources.files("efcpd.schemas").joinpath(f"{name}.json").read_text())


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _num(x):
    return format_rational(x) if not isinstance(x, float) else x


def _params(args) -> Params:
    return Params(parse_rational(args.alpha), parse_rational(args.theta))


def cmd_eppf(args) -> tuple[str, int]:
    params = _params(args)
    sizes = as_shape(int(s) for s in args.shape.split(","))
    value = pd_eppf(params, sizes)
    return f"{format_rational(value)}\t{float(value):.12g}\n", EXIT_OK


def cmd_rates(args) -> tuple[str, int]:
    table = build_rate_table(_params(args), args.n)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["kind", "args", "rate_exact", "rate_float"])
    for (ell, k), r in sorted(table.coag.items()):
        writer.writerow(["coag", f"{ell} {k}", format_rational(r), repr(float(r))])
    for s, r in sorted(table.split.items(), key=lambda kv: (sum(kv[0]), kv[0])):
        writer.writerow(["split", " ".join(map(str, s)), format_rational(r), repr(float(r))])
    for k, r in sorted(table.split_totals.items()):
        writer.writerow(["split_total", str(k), format_rational(r), repr(float(r))])
    return buf.getvalue(), EXIT_OK


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_verify_db(args) -> tuple[str, int]:
    params = _params(args)
    report = check_detailed_balance(build_generator(params, args.n), restricted_pd_distribution(params, args.n))
    out = {
        "n": args.n,
        "alpha": format_rational(params.alpha),
        "theta": format_rational(params.theta),
        "pairs_checked": report.pairs_checked,
        "max_violation": _num(report.max_violation),
        "stationary_residual": _num(report.stationary_residual),
        "reversible": report.reversible,
        "exact": report.exact,
    }
    status = EXIT_OK if report.reversible and report.stationary else EXIT_VERIFY
    return _dump(out), status


def cmd_stationary(args) -> tuple[str, int]:
    params = _params(args)
    exact = None if args.exact == "auto" else args.exact == "yes"
    pi = stationary_distribution(build_generator(params, args.n), exact=exact)
    rho = restricted_pd_distribution(params, args.n)
    tv = tv_distance(pi, rho)
    out = {
        "n": args.n,
        "alpha": format_rational(params.alpha),
        "theta": format_rational(params.theta),
        "exact": pi.exact,
        "states": [str(s) for s in pi.states],
        "stationary": [_num(p) for p in pi.probs],
        "tv_to_pd": _num(tv),
    }
    status = EXIT_VERIFY if pi.exact and tv != 0 else EXIT_OK
    return _dump(out), status


def cmd_sample(args) -> tuple[str, int]:
    lines = []
    rngs = spawn_rngs(args.seed, args.replicas)
    if args.kind in ("gem", "pd"):
        theta = float(parse_rational(args.theta))
        alpha = 0.0 if args.kind == "gem" else float(parse_rational(args.alpha))
        if args.kind == "pd":
            _params(args)
        for i, rng in enumerate(rngs):
            sb = pd_stick_sample(alpha, theta, rng, n_sticks=args.trunc, eps=args.eps)
            lines.append({"replica": i, "sticks": sb.sticks.tolist(), "dust": sb.dust})
    elif args.kind == "crp":
        params = _params(args)
        for i, rng in enumerate(rngs):
            lines.append({"replica": i, "partition": str(crp_sample(params, args.n, rng))})
    else:
        if not args.masses:
            raise UsageError("sample paintbox needs --masses p/q,p/q,...")
        x = MassPartition.from_sequence([parse_rational(v) for v in args.masses.split(",")])
        for i, rng in enumerate(rngs):
            lines.append({"replica": i, "partition": str(paintbox_sample(x, args.n, rng))})
    return "".join(json.dumps(rec) + "\n" for rec in lines), EXIT_OK


def cmd_simulate(args) -> tuple[str, int]:
    params = _params(args)
    initial = SetPartition.parse(args.initial) if args.initial else None
    times = geometric_grid(args.t_end, args.grid)
    rng = spawn_rngs(args.seed, 1)[0]
    points = equilibrium_experiment(params, args.n, times, args.replicas, rng, initial)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "tv", "se"])
    for p in points:
        writer.writerow([repr(p.t), repr(p.tv), repr(p.se)])
    return buf.getvalue(), EXIT_OK


def cmd_split_merge(args) -> tuple[str, int]:
    rng = spawn_rngs(args.seed, 1)[0]
    s = split_merge_experiment(args.steps, args.burn_in, args.thin, rng)
    out = {
        "steps": s.steps,
        "burn_in": s.burn_in,
        "thin": s.thin,
        "seed": args.seed,
        "p_x1_gt_half": s.p_x1_gt_half.mean,
        "p_x1_gt_half_se": s.p_x1_gt_half.se,
        "mean_x1": s.mean_x1.mean,
        "mean_x1_se": s.mean_x1.se,
        "mean_sum_sq": s.mean_sum_sq.mean,
        "mean_sum_sq_se": s.mean_sum_sq.se,
        "max_mass_error": s.max_mass_error,
        "final_support": s.final_support,
    }
    return _dump(out), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="efcpd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seed=False, params=True):
        if params:
            p.add_argument("--alpha", default="1/2", help="rational in (0, 1), e.g. 1/2")
            p.add_argument("--theta", default="1/2", help="rational > -alpha, e.g. -1/4")
        if seed:
            p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", type=Path, help="output file (default: stdout)")

    p = sub.add_parser("eppf", help="exact PD(alpha, theta) EPPF of a block-size shape")
    common(p)
    p.add_argument("--shape", required=True, help="comma-separated block sizes, e.g. 2,1")
    p.set_defaults(func=cmd_eppf)

    p = sub.add_parser("rates", help="coagulation and splitting rate table as CSV")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("verify-db", help="exact detailed-balance audit of the chain on [n]")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_verify_db)

    p = sub.add_parser("stationary", help="stationary law of the chain on [n] and TV to PD")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--exact", choices=["auto", "yes", "no"], default="auto")
    p.set_defaults(func=cmd_stationary)

    p = sub.add_parser("sample", help="draw replicas as JSON lines")
    p.add_argument("kind", choices=["gem", "pd", "crp", "paintbox"])
    common(p, seed=True)
    p.add_argument("--n", type=int, default=5, help="partition size for crp/paintbox")
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--trunc", type=int, default=DEFAULT_STICKS, help="maximum number of sticks")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS, help="stop once the dust is below this")
    p.add_argument("--masses", help="paint-box mass partition, e.g. 1/2,1/3,1/6")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("simulate", help="TV distance to equilibrium along a geometric time grid")
    common(p, seed=True)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--grid", type=int, default=12, help="number of grid times including t=0")
    p.add_argument("--replicas", type=int, default=10_000)
    p.add_argument("--initial", help='initial partition, e.g. "1 2|3 4" (default: one block)')
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("split-merge", help="long-run averages of the split-and-merge chain")
    common(p, seed=True, params=False)
    p.add_argument("--steps", type=int, default=1_000_000)
    p.add_argument("--burn-in", type=int, default=100_000)
    p.add_argument("--thin", type=int, default=10)
    p.set_defaults(func=cmd_split_merge)
    return parser


def _join_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "--theta -1/4" as two options; glue such values on
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _write(text: str, args) -> None:
    target = args.out
    if target is None and os.environ.get(OUTPUT_DIR_ENV):
        target = Path(os.environ[OUTPUT_DIR_ENV]) / f"{args.command}.{_EXTENSIONS[args.command]}"
    if target is None:
        sys.stdout.write(text)
        return
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text)


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_join_negative_values(argv))
        text, status = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(text, args)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
