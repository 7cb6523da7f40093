"""Command-line entry point: ``camu <subcommand> ...``.

Exit codes: 0 success, 1 runtime failure, 2 bad arguments. Results go to
stdout or ``--out``; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import demo as demo_mod
from .cesaro import (
    EmpiricalCylinderMeasure,
    cesaro_cylinder_estimate,
    convergence_diag,
    empirical_measure,
    mu_c_batch,
    str_to_word,
)
from .core import LocalRule, RuleError, TorusConfig, WindowConfig
from .entropy import column_entropy, column_entropy_from_cells, entropy_rate_estimate
from .gilman import classify, estimate_ratio
from .measures import MeasureError, StochasticMeasure, parse_measure_text
from .periodic import density_check, find_periodic_points
from .rng import RandomStream
from .spacetime import lightcone_diagram, torus_diagram, write_pgm
from .zoo import RuleSpec, resolve_rule


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    rule: RuleSpec
    measure: StochasticMeasure | None
    seed: int
    threads: int
    out: Path | None
    params: dict


def parse_measure_arg(text: str) -> StochasticMeasure:
    """``bernoulli:k:p0,...``, ``markov:k:FILE`` or a path to a measure file."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "bernoulli":
            k_text, _, probs = rest.partition(":")
            values = [float(Fraction(v)) for v in probs.split(",") if v]
            k = int(k_text)
            if len(values) != k:
                raise MeasureError(f"expected {k} probabilities, got {len(values)}")
            return StochasticMeasure.bernoulli(values)
        if kind == "markov":
            k_text, _, source = rest.partition(":")
            m = parse_measure_text(Path(source).read_text())
            if m.kind != "markov" or m.k != int(k_text):
                raise MeasureError(f"{source} does not hold a markov measure on {k_text} symbols")
            return m
        path = Path(text)
        if path.is_file():
            return parse_measure_text(path.read_text())
    except (ValueError, ZeroDivisionError, OSError) as exc:
        raise UsageError(f"bad measure {text!r}: {exc}") from exc
    raise UsageError(f"bad measure {text!r}: expected bernoulli:k:p0,... or markov:k:FILE")


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _positive(name):
    def conv(v):
        try:
            iv = int(v)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if iv < 1:
            raise argparse.ArgumentTypeError(f"{name} must be at least 1")
        return iv
    return conv


def _nonneg(name):
    def conv(v):
        try:
            iv = int(v)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if iv < 0:
            raise argparse.ArgumentTypeError(f"{name} must be nonnegative")
        return iv
    return conv


def _add_common(p: argparse.ArgumentParser, measure: bool = True, seed: bool = True) -> None:
    p.add_argument("--rule", required=True,
                   help="fs, identity:K, shift:K, eca:CODE, or a rule file path")
    if measure:
        p.add_argument("--measure", required=True,
                       help="bernoulli:K:p0,p1,... (fractions allowed), markov:K:FILE, or a measure file")
    if seed:
        p.add_argument("--seed", type=_nonneg("seed"), default=0, help="master seed (default 0)")
    p.add_argument("--threads", type=_positive("threads"), default=1,
                   help="worker threads; output does not depend on it (default 1)")
    p.add_argument("--out", type=Path, default=None, help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="camu", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ratio", help="Monte Carlo estimate of the conditional B-set ratio")
    _add_common(p)
    p.add_argument("--m", type=_nonneg("m"), required=True, help="column half-width")
    p.add_argument("--n", type=_nonneg("n"), action="append", required=True,
                   help="conditioning half-width; repeat for a grid")
    p.add_argument("--T", type=_nonneg("T"), required=True, help="time horizon")
    p.add_argument("--samples", type=_positive("samples"), default=10_000,
                   help="conditional samples per estimate (default 10000)")
    p.add_argument("--x-count", type=_positive("x-count"), default=1,
                   help="reference points drawn from the measure (default 1)")

    p = sub.add_parser("cesaro", help="Cesaro-mean cylinder estimates")
    _add_common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--word", help="track one cylinder word, e.g. 1 or 02")
    g.add_argument("--L", type=_positive("L"), help="tally all words of this length")
    p.add_argument("--n", type=_positive("n"), required=True, help="horizon")
    p.add_argument("--samples", type=_positive("samples"), default=10_000,
                   help="initial configurations (default 10000)")

    p = sub.add_parser("entropy", help="column entropy trace")
    _add_common(p)
    p.add_argument("--p", type=_nonneg("p"), required=True, help="partition half-width")
    p.add_argument("--T", type=_positive("T"), required=True, help="largest column height")
    p.add_argument("--samples", type=_positive("samples"), default=10_000,
                   help="columns to sample (default 10000)")
    p.add_argument("--mu-c", type=_positive("mu-c"), default=None, metavar="N",
                   help="start from approximate Cesaro-limit samples with horizon N")

    p = sub.add_parser("periodic", help="spatially periodic F-periodic points")
    _add_common(p, measure=False)
    p.add_argument("--Lmax", type=_positive("Lmax"), required=True, help="largest spatial period")
    p.add_argument("--time-bound", type=_positive("time-bound"), default=None,
                   help="largest temporal period reported (default k^L)")
    p.add_argument("--budget", type=_positive("budget"), default=100_000,
                   help="random words per size when k^L is too large to enumerate")
    p.add_argument("--density", type=Path, default=None,
                   help="empirical measure file; report which support words the points cover")
    p.add_argument("--threshold", type=float, default=0.0,
                   help="support frequency threshold for --density (default 0)")

    p = sub.add_parser("classify", help="heuristic three-way classification (JSON)")
    _add_common(p)
    p.add_argument("--m", type=_nonneg("m"), required=True, help="column half-width")
    p.add_argument("--n", type=_nonneg("n"), action="append", required=True,
                   help="conditioning half-width; repeat for a grid")
    p.add_argument("--T", type=_nonneg("T"), required=True, help="time horizon")
    p.add_argument("--samples", type=_positive("samples"), default=2000,
                   help="conditional samples per estimate (default 2000)")
    p.add_argument("--x-count", type=_positive("x-count"), default=10,
                   help="reference points drawn from the measure (default 10)")
    p.add_argument("--budget", type=_nonneg("budget"), default=10_000,
                   help="random candidates per witness search (default 10000)")

    p = sub.add_parser("spacetime", help="write a space-time diagram as binary PGM")
    p.add_argument("--rule", required=True,
                   help="fs, identity:K, shift:K, eca:CODE, or a rule file path")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--cells", help="initial word, e.g. 0000100000")
    g.add_argument("--random", metavar="MEASURE", help="draw the initial word from this measure")
    p.add_argument("--width", type=_positive("width"), default=101,
                   help="initial width for --random (default 101)")
    p.add_argument("--seed", type=_nonneg("seed"), default=0, help="seed for --random")
    p.add_argument("--steps", type=_nonneg("steps"), required=True, help="time steps")
    p.add_argument("--mode", choices=("lightcone", "torus"), default="lightcone",
                   help="boundary mode (default lightcone)")
    p.add_argument("--out", type=Path, required=True, help="output .pgm path")

    p = sub.add_parser("demo-fs", help="reproduce the F_s example claims")
    p.add_argument("--p0", type=float, default=0.2, help="probability of 0 (default 0.2)")
    p.add_argument("--p1", type=float, default=0.3, help="probability of 1 (default 0.3)")
    p.add_argument("--p2", type=float, default=0.5, help="probability of 2 (default 0.5)")
    p.add_argument("--seed", type=_nonneg("seed"), default=7, help="master seed (default 7)")
    p.add_argument("--samples", type=_positive("samples"), default=10_000,
                   help="conditional samples per reference point (default 10000)")
    p.add_argument("--ref-points", type=_positive("ref-points"), default=50,
                   help="reference points for the ratio and witness claims (default 50)")
    p.add_argument("--threads", type=_positive("threads"), default=1,
                   help="worker threads; output does not depend on it (default 1)")
    p.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    return parser


def _config(args) -> RunConfig:
    try:
        rule = resolve_rule(args.rule)
    except RuleError as exc:
        raise UsageError(str(exc)) from exc
    measure = None
    if getattr(args, "measure", None) is not None:
        measure = parse_measure_arg(args.measure)
        if measure.k != rule.rule.k:
            raise UsageError(f"measure has {measure.k} symbols but rule {rule.id} has {rule.rule.k}")
    return RunConfig(rule, measure, getattr(args, "seed", 0), getattr(args, "threads", 1),
                     getattr(args, "out", None), vars(args))


def cmd_ratio(args) -> int:
    cfg = _config(args)
    rule: LocalRule = cfg.rule.rule
    grid = sorted(set(args.n))
    if args.m > grid[0]:
        raise UsageError(f"--m {args.m} exceeds the smallest --n {grid[0]}")
    stream = RandomStream(cfg.seed)
    half = max(grid[-1], args.m) + rule.r * args.T
    lines = ["x_id,m,n,T,samples,estimate,wilson_lo,wilson_hi"]
    xs = [cfg.measure.sample_window(-half, half, stream.child(0).child(j))
          for j in range(args.x_count)]
    for j, x in enumerate(xs):
        for i, n in enumerate(grid):
            e = estimate_ratio(rule, cfg.measure, x, args.m, n, args.T, args.samples,
                               stream.child(1).child(i).child(j), cfg.threads)
            lines.append(f"{j},{e.m},{e.n},{e.T},{e.samples},{e.estimate!r},{e.lo!r},{e.hi!r}")
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


def cmd_cesaro(args) -> int:
    cfg = _config(args)
    rule = cfg.rule.rule
    stream = RandomStream(cfg.seed)
    if args.word is not None:
        try:
            word = str_to_word(args.word)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if not word or max(word) >= rule.k:
            raise UsageError(f"--word {args.word!r} is not a word over {rule.k} symbols")
        trace = cesaro_cylinder_estimate(rule, cfg.measure, word, args.n, args.samples, stream,
                                         cfg.threads)
        lines = ["t,value,cesaro"]
        for t, (v, c) in enumerate(zip(trace.values, trace.cesaro)):
            lines.append(f"{t},{float(v)!r},{float(c)!r}")
        _emit("\n".join(lines) + "\n", cfg.out)
        if args.n >= 4:
            d = convergence_diag(trace.cesaro, trace.stderr)
            print(f"final gap {d.final_gap:.6g}, stderr {trace.stderr:.3g}, trend {d.trend}",
                  file=sys.stderr)
        return 0
    emp = empirical_measure(rule, cfg.measure, args.L, args.n, args.samples, stream, cfg.threads,
                            rule_id=cfg.rule.id)
    _emit(emp.to_text(), cfg.out)
    return 0


def cmd_entropy(args) -> int:
    cfg = _config(args)
    rule = cfg.rule.rule
    stream = RandomStream(cfg.seed)
    if args.mu_c is None:
        trace = column_entropy(rule, cfg.measure, args.p, args.T, args.samples, stream,
                               cfg.threads)
    else:
        width = 2 * (args.p + rule.r * (args.T - 1)) + 1
        cells = mu_c_batch(rule, cfg.measure, args.mu_c, width, args.samples, stream, cfg.threads)
        trace = column_entropy_from_cells(rule, cells, args.p, args.T, -((width - 1) // 2))
    _emit(trace.to_csv(), cfg.out)
    if args.T >= 3:
        est = entropy_rate_estimate(trace)
        print(f"h(F, alpha_{args.p}) estimate: {est.value:.6g} nats ({est.bits:.6g} bits), "
              f"difference {est.rate_diff:.6g}, ratio {est.rate_ratio:.6g}", file=sys.stderr)
    if trace.undersampled:
        print("warning: distinct columns exceed samples/10; entropies are undersampled",
              file=sys.stderr)
    return 0


def cmd_periodic(args) -> int:
    cfg = _config(args)
    rule = cfg.rule.rule
    search = find_periodic_points(rule, args.Lmax, args.time_bound, args.budget,
                                  RandomStream(cfg.seed))
    if search.partial:
        print("warning: some sizes were sampled, the point list is partial", file=sys.stderr)
    if args.density is None:
        _emit(search.to_csv(), cfg.out)
        return 0
    try:
        support = EmpiricalCylinderMeasure.from_text(args.density.read_text())
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read empirical measure {args.density}: {exc}") from exc
    report = density_check(rule, search.points, support, args.threshold)
    _emit(report.to_csv(), cfg.out)
    print(f"coverage {report.coverage:.4f} ({report.n_covered}/{report.total})", file=sys.stderr)
    return 0


def cmd_classify(args) -> int:
    cfg = _config(args)
    grid = sorted(set(args.n))
    if args.m > grid[0]:
        raise UsageError(f"--m {args.m} exceeds the smallest --n {grid[0]}")
    result = classify(cfg.rule.rule, cfg.measure, grid, args.m, args.T, args.samples,
                      args.x_count, RandomStream(cfg.seed), args.budget, cfg.threads)
    doc = {"rule": cfg.rule.id, "measure": cfg.measure.id, "seed": cfg.seed, **result.to_dict()}
    _emit(json.dumps(doc, indent=2) + "\n", cfg.out)
    return 0


def cmd_spacetime(args) -> int:
    cfg = _config(args)
    rule = cfg.rule.rule
    if args.cells is not None:
        try:
            cells = str_to_word(args.cells)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if not cells or max(cells) >= rule.k:
            raise UsageError(f"--cells {args.cells!r} is not a word over {rule.k} symbols")
    else:
        measure = parse_measure_arg(args.random)
        if measure.k != rule.k:
            raise UsageError(f"measure has {measure.k} symbols but the rule has {rule.k}")
        cells = measure.sample_window(0, args.width - 1, RandomStream(args.seed)).cells
    if args.mode == "torus":
        img = torus_diagram(rule, TorusConfig(cells), args.steps)
    else:
        if len(cells) < 2 * rule.r * args.steps + 1:
            raise UsageError(f"{len(cells)} cells cannot be stepped {args.steps} times "
                             f"in light-cone mode (need {2 * rule.r * args.steps + 1})")
        img = lightcone_diagram(rule, WindowConfig(0, cells), args.steps)
    try:
        write_pgm(args.out, img)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_demo_fs(args) -> int:
    probs = (args.p0, args.p1, args.p2)
    if any(v < 0 for v in probs) or abs(sum(probs) - 1.0) > 1e-12:
        raise UsageError("--p0, --p1, --p2 must be nonnegative and sum to 1")
    params = demo_mod.DemoParams(p=probs, seed=args.seed, samples=args.samples,
                                 ref_points=args.ref_points, threads=args.threads)
    claims = demo_mod.run_demo(params)
    _emit(demo_mod.format_claims(params, claims), args.out)
    return 1 if any(c.status == demo_mod.FAIL for c in claims) else 0


COMMANDS = {
    "ratio": cmd_ratio,
    "cesaro": cmd_cesaro,
    "entropy": cmd_entropy,
    "periodic": cmd_periodic,
    "classify": cmd_classify,
    "spacetime": cmd_spacetime,
    "demo-fs": cmd_demo_fs,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, OSError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
