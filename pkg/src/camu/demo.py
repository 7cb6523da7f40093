"""End-to-end checks of the particle automaton F_s under a Bernoulli measure.

Four claims are measured: the conditional ratio grows with the
conditioning radius, no reference point is equicontinuous at horizon
scale, the Cesaro mean of the symbol-1 cylinder decays, and every word
over {0, 2} lies inside a fixed point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .cesaro import EmpiricalCylinderMeasure, cesaro_cylinder_estimate
from .gilman import RatioEstimate, estimate_ratio, pooled_estimate, witness_search
from .measures import bernoulli
from .periodic import density_check, find_periodic_points
from .rng import RandomStream
from .zoo import gilman_fs

PASS, FAIL, NOT_CONFIRMED = "PASS", "FAIL", "NOT CONFIRMED"


@dataclass(frozen=True)
class DemoParams:
    p: tuple[float, float, float] = (0.2, 0.3, 0.5)
    seed: int = 7
    m: int = 1
    T: int = 100
    n_small: int = 2
    n_large: int = 20
    samples: int = 10_000
    ref_points: int = 50
    witness_budget: int = 2_000
    cesaro_n: int = 200
    cesaro_early: int = 20
    cesaro_samples: int = 10_000
    cesaro_factor: float = 0.5
    L_max: int = 6
    support_L: int = 4
    threads: int = 1


@dataclass
class Claim:
    name: str
    status: str
    detail: str
    values: dict = field(default_factory=dict)


def ratio_trend(params: DemoParams, stream: RandomStream):
    rule, mu = gilman_fs(), bernoulli(params.p)
    half = params.n_large + rule.r * params.T
    xs = [mu.sample_window(-half, half, stream.child(0).child(j)) for j in range(params.ref_points)]
    pooled: dict[int, RatioEstimate] = {}
    means = {}
    for i, n in enumerate((params.n_small, params.n_large)):
        ests = [
            estimate_ratio(rule, mu, x, params.m, n, params.T, params.samples,
                           stream.child(1).child(i).child(j), params.threads)
            for j, x in enumerate(xs)
        ]
        pooled[n] = pooled_estimate(ests)
        means[n] = float(np.mean([e.estimate for e in ests]))
    return xs, pooled, means


def run_demo(params: DemoParams = DemoParams()) -> list[Claim]:
    stream = RandomStream(params.seed)
    rule, mu = gilman_fs(), bernoulli(params.p)
    favourable = params.p[2] > params.p[1]
    claims = []

    xs, pooled, means = ratio_trend(params, stream.child(0))
    lo_n, hi_n = params.n_small, params.n_large
    ok = pooled[hi_n].lo > pooled[lo_n].hi and means[hi_n] > means[lo_n]
    status = (PASS if ok else FAIL) if favourable else NOT_CONFIRMED
    claims.append(Claim(
        "ratio trend", status,
        "mean ratio m=%d T=%d: n=%d -> %.4f [%.4f, %.4f], n=%d -> %.4f [%.4f, %.4f]" % (
            params.m, params.T, lo_n, means[lo_n], pooled[lo_n].lo, pooled[lo_n].hi,
            hi_n, means[hi_n], pooled[hi_n].lo, pooled[hi_n].hi),
        {"means": means, "pooled": pooled},
    ))

    found = []
    for j, x in enumerate(xs):
        res = witness_search(rule, x, params.m, params.m, params.T, params.witness_budget,
                             stream.child(1).child(j))
        found.append(res.witness is not None)
    claims.append(Claim(
        "no equicontinuous point", PASS if all(found) else FAIL,
        "witness found for %d of %d reference points (n=m=%d, T=%d)" % (
            sum(found), len(found), params.m, params.T),
        {"found": found},
    ))

    trace = cesaro_cylinder_estimate(rule, mu, (1,), params.cesaro_n, params.cesaro_samples,
                                     stream.child(2), params.threads)
    early = float(trace.cesaro[params.cesaro_early - 1])
    late = float(trace.cesaro[-1])
    ok = late < params.cesaro_factor * early
    status = (PASS if ok else FAIL) if favourable else NOT_CONFIRMED
    claims.append(Claim(
        "symbol-1 Cesaro decay", status,
        "Cesaro mean of [1]: n=%d -> %.5f, n=%d -> %.5f (ratio %.3f, limit %.2f)" % (
            params.cesaro_early, early, params.cesaro_n, late, late / early if early else
            float("nan"), params.cesaro_factor),
        {"early": early, "late": late},
    ))

    search = find_periodic_points(rule, params.L_max)
    words02 = [w for w in itertools.product((0, 2), repeat=params.L_max)]
    fixed = all((pt := search.lookup(w)) is not None and pt.period == 1 for w in words02)
    support = EmpiricalCylinderMeasure.uniform_on(
        itertools.product((0, 2), repeat=params.support_L), k=3)
    report = density_check(rule, search.points, support, 0.0)
    ok = fixed and report.coverage == 1.0
    claims.append(Claim(
        "periodic density", PASS if ok else FAIL,
        "all %d words over {0,2} of length %d fixed: %s; coverage of {0,2}^%d: %.3f" % (
            len(words02), params.L_max, fixed, params.support_L, report.coverage),
        {"fixed": fixed, "coverage": report.coverage},
    ))
    return claims


def format_claims(params: DemoParams, claims: list[Claim]) -> str:
    lines = ["F_s demo: p = (%s), seed = %d" % (", ".join(repr(v) for v in params.p), params.seed),
             ""]
    width = max(len(c.name) for c in claims)
    for c in claims:
        lines.append(f"{c.name:<{width}}  {c.status:<13}  {c.detail}")
    return "\n".join(lines) + "\n"
