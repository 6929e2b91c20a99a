"""Command-line driver for the cocycle pipeline.

Verbs: bunching, holonomy, closing, reconstruct, verify, periodic-data.
Every verb loads (or assembles from flags) a scenario, runs deterministically
from its seed, writes <out>/<verb>.records and <out>/<verb>.txt, and exits 0
iff every check passed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from cocycle_rigidity import holonomy as hol
from cocycle_rigidity import rigidity as rig
from cocycle_rigidity import sampling
from cocycle_rigidity.cocycles import operator_norm
from cocycle_rigidity.reports import Report
from cocycle_rigidity.scenario import Scenario, build


def _load_scenario(args):
    sc = Scenario.load(args.scenario) if args.scenario else Scenario()
    if args.seed is not None:
        sc.seed = args.seed
    if args.tol is not None:
        sc.tol = args.tol
    if args.horizon is not None:
        sc.horizon = args.horizon
    if args.samples is not None:
        sc.samples = args.samples
    if args.generator:
        sc.gen_source = f"file:{args.generator}"
    if args.gen_scale is not None:
        sc.gen_scale = args.gen_scale
    return sc


def _report_mode(c, horizon):
    k = c.space.alphabet_size
    need = k ** ((horizon - 1) * c.space.step + 2 * c.radius + 1)
    return "exhaustive" if need <= 200_000 else "sampled"


def run_bunching(sc, report):
    bld = build(sc)
    mode = _report_mode(bld.a, sc.horizon)
    br = bld.a.bunching_report(sc.horizon, mode=mode, seed=sc.seed)
    for row in br.per_n:
        report.data("sup_product", f"n={row.n}", row.sup_product)
        report.data("sup_norm", f"n={row.n}", row.sup_norm)
        report.data("sup_inverse", f"n={row.n}", row.sup_inverse)
    report.data("mode", "", mode)
    report.data("c3_hat", "", br.c3_hat)
    report.data("bunched", "", str(br.bunched).lower())
    report.check("theta_below_rate", f"horizon={sc.horizon}", br.theta_hat, br.rate)
    return report


def run_closing(sc, report):
    bld = build(sc)
    space = bld.space
    rng = bld.rng
    worst = 0.0
    for i in range(sc.samples):
        n = int(rng.integers(1, sc.max_period + 1))
        z = sampling.random_near_recurrent(space, rng, n)
        gap = space.metric(space.shift(z, n), z)
        if not gap < space.epsilon0:
            continue
        p = space.closing(z, n)
        for j in range(n + 1):
            d = space.metric(space.shift(z, j), space.shift(p, j))
            ratio = d / space.shadowing_bound(j, n, gap) if gap else 0.0
            worst = max(worst, ratio)
            report.data("shadow_ratio", f"i={i},n={n},j={j}", ratio)
    report.check("shadowing_within_bound", f"samples={sc.samples}", worst, 1.0)
    return report


def run_holonomy(sc, report):
    bld = build(sc)
    rng = bld.rng
    a = bld.a
    mode = _report_mode(a, sc.horizon)
    br = a.bunching_report(sc.horizon, mode=mode, seed=sc.seed)
    report.check("bunched", f"mode={mode}", br.theta_hat, br.rate)
    consts = None
    if mode == "exhaustive":
        consts = hol.holonomy_constants(a, br)
        report.data("c4", "", consts.c4)
    worst = dict(composition=0.0, equivariance=0.0, oracle_gap=0.0, holder_excess=0.0)
    for i in range(sc.samples):
        x = sampling.random_homoclinic(bld.space, rng, bld.anchor)
        y = sampling.random_stable_pair(bld.space, rng, x)
        z = sampling.random_stable_pair(bld.space, rng, x)
        if consts is not None:
            res = hol.holonomy_identity_residuals(a, x, y, z, constants=consts)
            worst["composition"] = max(worst["composition"], res.composition)
            worst["equivariance"] = max(worst["equivariance"], res.equivariance)
            worst["holder_excess"] = max(
                worst["holder_excess"], res.holder_lhs - res.holder_rhs
            )
        iterative = hol.stable_holonomy(a, y, z, tol=1e-10, report=br)
        exact = hol.stable_holonomy_exact(a, y, z)
        gap = operator_norm(iterative.matrix - exact)
        worst["oracle_gap"] = max(worst["oracle_gap"], gap - iterative.tail_bound)
    report.check("composition", f"samples={sc.samples}", worst["composition"], 1e-9)
    report.check("equivariance", f"samples={sc.samples}", worst["equivariance"], 1e-9)
    if consts is not None:
        report.check("holder_bound", f"samples={sc.samples}", worst["holder_excess"], 0.0)
    report.check("oracle_gap_within_tail", f"samples={sc.samples}", worst["oracle_gap"], 0.0)
    return report


PERIODIC_TOL = 1e-10


def run_periodic_data(sc, report):
    bld = build(sc)
    tol = PERIODIC_TOL
    pd = rig.periodic_data_check(bld.a, bld.b, sc.max_period, q=bld.witness, tol=tol)
    report.data("max_residual", f"max_period={sc.max_period}", pd.max_residual)
    report.data("failures", "", len(pd.failures))
    for p, n, r in pd.failures[:20]:
        report.data("failure", f"period={n},point={p}", r)
    report.check("periodic_data_matched", f"max_period={sc.max_period}", pd.max_residual, tol)
    return report


def run_reconstruct(sc, report):
    bld = build(sc)
    space = bld.space
    rng = bld.rng
    a, b = bld.a, bld.b

    mode = _report_mode(a, min(sc.horizon, 6))
    for name, c in (("A", a), ("B", b)):
        br = c.bunching_report(min(sc.horizon, 6), mode=_report_mode(c, min(sc.horizon, 6)), seed=sc.seed)
        report.data(f"theta_hat_{name}", f"mode={br.mode}", br.theta_hat)
        report.check(f"bunched_{name}", f"horizon={br.horizon}", br.theta_hat, br.rate)

    pd_tol = 1e-10
    pd = rig.periodic_data_check(a, b, sc.max_period, q=bld.witness, tol=pd_tol)
    report.data("periodic_max_residual", f"max_period={sc.max_period}", pd.max_residual)
    if not report.check("periodic_data", f"max_period={sc.max_period}", pd.max_residual, pd_tol):
        for p, n, r in pd.failures[:10]:
            report.data("failure", f"period={n},point={p}", r)
        return report

    su_tol = 1e-8
    coh_tol = sc.tol
    if bld.anchor_period == 1:
        ev = rig.ConjugacyEvaluator(a, b, anchor=bld.anchor, tol=coh_tol * 1e-2)
        su_worst = 0.0
        for _ in range(50):
            y = sampling.random_homoclinic(space, rng, bld.anchor)
            su_worst = max(su_worst, ev.su_consistency(y))
        report.check("su_consistency", "samples=50", su_worst, su_tol)
        p_eval = ev
    else:
        red = rig.reduce_to_fixed_point(a, b, bld.anchor, bld.anchor_period, tol=coh_tol * 1e-2)
        su_worst = 0.0
        for _ in range(50):
            y = sampling.random_homoclinic(red.inner.space, rng, bld.anchor)
            su_worst = max(su_worst, red.inner.su_consistency(y))
        report.check("su_consistency_induced", "samples=50", su_worst, su_tol)
        wrap_worst = 0.0
        chain_worst = 0.0
        for _ in range(10):
            z = sampling.random_point(space, rng)
            wrap_worst = max(wrap_worst, red.wrap_residual(z))
            chain_worst = max(chain_worst, max(red.chain_residuals(z)))
        report.check("wrap_around", "samples=10", wrap_worst, 1e-9)
        report.check("chain_one_step", "samples=10", chain_worst, coh_tol)
        p_eval = red

    samples = [sampling.random_point(space, rng) for _ in range(sc.samples)]
    worst, argmax = rig.verify_cohomology(a, b, p_eval, samples, tol=coh_tol)
    report.data("cohomology_argmax", f"point={argmax}", worst)
    report.check("cohomology_residual", f"samples={sc.samples}", worst, coh_tol)
    return report


def run_verify(sc, report, p_source="twist"):
    bld = build(sc)
    rng = bld.rng
    if p_source == "twist":
        if bld.witness is None:
            raise ValueError("--p-source twist needs a scenario with a twist")
        w = bld.witness

        def p_eval(z):
            return w.value(z.window(-w.radius, w.radius + 1))

    elif p_source == "identity":
        eye = np.eye(bld.a.dim)

        def p_eval(z):
            return eye

    else:
        raise ValueError(f"bad p-source {p_source!r}")
    samples = [sampling.random_point(bld.space, rng) for _ in range(sc.samples)]
    worst, argmax = rig.verify_cohomology(bld.a, bld.b, p_eval, samples, tol=sc.tol)
    report.data("cohomology_argmax", f"point={argmax}", worst)
    report.check("cohomology_residual", f"samples={sc.samples},p={p_source}", worst, sc.tol)
    return report


VERBS = {
    "bunching": run_bunching,
    "holonomy": run_holonomy,
    "closing": run_closing,
    "reconstruct": run_reconstruct,
    "periodic-data": run_periodic_data,
    "verify": run_verify,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="cocycle-rigidity",
        description="matrix cocycles over shifts: bunching, holonomies, closing, conjugacy reconstruction",
    )
    parser.add_argument("verb", choices=sorted(VERBS))
    parser.add_argument("--scenario", help="scenario file (flat key = value, schema scenario/1)")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default="reports")
    parser.add_argument("--format", choices=("text", "records"), default="records")
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--horizon", type=int, default=None)
    parser.add_argument("--samples", type=int, default=None)
    parser.add_argument("--generator", help="generator file for the A cocycle")
    parser.add_argument("--gen-scale", type=float, default=None, dest="gen_scale")
    parser.add_argument(
        "--p-source",
        choices=("twist", "identity"),
        default="twist",
        help="conjugacy source for the verify verb",
    )
    args = parser.parse_args(argv)

    sc = _load_scenario(args)
    report = Report(args.verb, sc.to_text())
    try:
        if args.verb == "verify":
            run_verify(sc, report, p_source=args.p_source)
        else:
            VERBS[args.verb](sc, report)
    except Exception as exc:  # surface the failing stage, nonzero exit
        print(f"error in {args.verb}: {exc}", file=sys.stderr)
        return 2
    report.write(args.out)
    stream = report.records() if args.format == "records" else report.text()
    sys.stdout.write(stream)
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
