"""Command-line entry point: verification suites, tables and simulations.

Three suites with distinct pass/fail semantics:

* ``symbolic``  exact rational identities (zero residual required);
* ``numeric``   deterministic numerics against stated tolerances;
* ``mc``        seeded Monte Carlo with statistical acceptance bands.

Reports are JSON, embed the full configuration, and are byte-reproducible
for a fixed seed and build.  Exit code 0 means every check passed, 1 means
at least one failed, 2 means the run itself errored.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction


def _check(name, ok, measured=None, target=None, tolerance=None, extra=None):
    rec = {"check": name, "pass": bool(ok)}
    if measured is not None:
        rec["measured"] = measured
    if target is not None:
        rec["target"] = target
    if tolerance is not None:
        rec["tolerance"] = tolerance
    if extra:
        rec.update(extra)
    return rec


def suite_symbolic(config):
    from .halfplane import (
        HalfPlaneChart,
        witt_sweep,
        virasoro_sweep,
        delta21,
        sle_parameters,
        bracket_span,
    )
    from .hydro import HydroChart, bb_witt_sweep, bb_virasoro_sweep
    from .polynomials import MultiPoly
    from .diffop import DiffOperator
    from .variation_kernels import q_kernel, re_parts_agree

    checks = []
    span = 3
    k_test = config.get("k_test", 10)
    res = witt_sweep(span=span, n_spectators=3, k_test=k_test)
    checks.append(
        _check(
            "witt-relations",
            all(v.is_zero() for v in res.values()),
            extra={"pairs": len(res), "k_test": k_test},
        )
    )
    res = virasoro_sweep(span=span, n_spectators=3, k_test=k_test)
    checks.append(
        _check("virasoro-relations", all(v.is_zero() for v in res.values()))
    )

    ch = HalfPlaneChart(2, 6)
    S = ch.schwarzian_poly()
    ok = (
        ch.witt(0).apply_poly(S) == S * 2
        and ch.witt(1).apply_poly(S).is_zero()
        and ch.witt(2).apply_poly(S) == MultiPoly.constant(6)
    )
    checks.append(_check("schwarzian-axioms", ok))

    bpz_ok = True
    for kappa in (2, Fraction(8, 3), 3, 4):
        tau, h, c = sle_parameters(kappa)
        chb = HalfPlaneChart(3, 6, seed_weight=h, central_charge=c, tau=tau)
        lhs = chb.apply_to_section(delta21(chb))
        tgt = DiffOperator.zero()
        zn = chb.spectator_names
        for zi in zn:
            for zj in zn:
                mi = ((zi, 1), (zj, 1)) if zi != zj else ((zi, 2),)
                tgt = tgt + DiffOperator({mi: MultiPoly.constant(1)})
            tgt = tgt + DiffOperator(
                {((zi, 1),): MultiPoly((zi,), {(-1,): 1}, (zi,)) * tau}
            )
        bpz_ok = bpz_ok and (lhs - chb.apply_to_section(tgt)).is_zero()
    checks.append(_check("bpz-reduction", bpz_ok))

    res = bb_witt_sweep(span=span, n_pts=2, depth_test=k_test)
    checks.append(_check("bb-witt-relations", all(v.is_zero() for v in res.values())))
    res = bb_virasoro_sweep(span=span, n_pts=2, depth_test=k_test)
    checks.append(
        _check("bb-virasoro-relations", all(v.is_zero() for v in res.values()))
    )
    hch = HydroChart(1, 5)
    checks.append(
        _check(
            "bb-schwarzian-at-infinity",
            hch.schwarzian_at_infinity() == hch._gens["fm2"] * (-6),
        )
    )

    kern_ok = True
    for n in range(-2, -7, -1):
        q_kernel(n)  # raises unless the singularity is removable
        kern_ok = kern_ok and re_parts_agree(n)
    checks.append(_check("variation-kernels", kern_ok))

    spanned = bracket_span(HalfPlaneChart(1, 9), 5)
    checks.append(_check("bracket-span", spanned == [-1, -2, -3, -4, -5]))
    return checks


def suite_numeric(config):
    import numpy as np

    from .theta import ThetaContext, dedekind_eta, eta_log_derivative
    from .annulus import (
        AnnulusChart,
        excursion_kernel,
        excursion_kernel_image_sum,
        harmonic_measure_far,
        poisson_kernel,
        schwarzian_connection,
        v_field,
    )
    from .cylinder import (
        d_log_det_oracle,
        surgery_constant,
        virrep_annulus_check,
        zeta_det_cylinder,
        zeta_det_eta_oracle,
    )
    from .gridloops import GridDomain, cut_line_identity, discrete_loop_mass

    scale = config.get("tol_scale", 1.0)
    checks = []

    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        ctx = ThetaContext(t)
        r1 = abs(ctx.theta_at_zero(1) - 2 * math.pi * dedekind_eta(t) ** 3)
        r2 = abs(
            ctx.theta_at_zero(3) / ctx.theta_at_zero(1)
            - 12 * math.pi * eta_log_derivative(t)
        )
        worst = max(worst, r1, r2)
    checks.append(_check("theta-eta-identities", worst < 1e-8 * scale, worst, 0.0, 1e-8))

    ctx = ThetaContext(1.0)
    d = 2e-5
    z = 0.23 + 0.31j
    fd = (ThetaContext(1.0 + d).theta(z) - ThetaContext(1.0 - d).theta(z)) / (2 * d)
    fd2 = (
        ThetaContext(1.0 + 2 * d).theta(z) - ThetaContext(1.0 - 2 * d).theta(z)
    ) / (4 * d)
    heat = abs(4 * math.pi * (4 * fd - fd2) / 3 - ctx.theta(z, 2))
    checks.append(_check("heat-equation", heat < 1e-8 * scale, heat, 0.0, 1e-8))

    from .theta import weierstrass_invariants

    e1, e2 = weierstrass_invariants(ctx)
    leg = abs(e1 * 1j - e2 - 2j * math.pi)
    checks.append(_check("legendre-relation", leg < 1e-10 * scale, leg, 0.0, 1e-10))

    sym = abs(excursion_kernel(0.1, 0.62, ctx) - excursion_kernel(0.62, 0.1, ctx))
    checks.append(_check("excursion-symmetry", sym < 1e-12 * scale, sym, 0.0, 1e-12))
    pv = max(
        abs(poisson_kernel(0.23 + 1e-9j, 0.55, ctx)),
        abs(poisson_kernel(0.23 + 1j * (ctx.t / 2), 0.55, ctx)),
        abs(poisson_kernel(0.23 + 1j * (ctx.t - 1e-9), 0.55, ctx)),
    )
    checks.append(_check("poisson-boundary-vanishing", pv < 1e-9 * scale, pv, 0.0, 1e-9))

    chart = AnnulusChart(1.0, [0.2, 0.5, 0.8])
    c0 = -chart.tangent_coordinates(-2)["dz"][0]
    c0res = abs(c0 - v_field(0.2, 0.0, ctx))
    checks.append(_check("c0-diagonal", c0res < 1e-10 * scale, c0res, 0.0, 1e-10))
    dt_ok = chart.tangent_coordinates(-2)["dt"] == 2 * math.pi and all(
        chart.tangent_coordinates(n)["dt"] == 0.0 for n in (-3, -4, -5)
    )
    checks.append(_check("tangent-dt-coefficients", dt_ok))

    d1 = d_log_det_oracle(1.0)
    dm = (zeta_det_cylinder(1.001) - zeta_det_cylinder(0.999)) / 0.002
    checks.append(
        _check("cylinder-det-derivative", abs(dm - 0.5) < 1e-5 * scale, dm, 0.5, 1e-5,
               extra={"oracle": d1})
    )
    rep = virrep_annulus_check()
    checks.append(
        _check(
            "virrep-derivative-level",
            rep["spread"] < 1e-5 * scale,
            rep["spread"],
            0.0,
            1e-5,
            extra={"constant": rep["constant"]},
        )
    )
    confs = [(1.0, 0.5), (2.0, 0.7), (1.0, 0.3), (1.5, 0.75), (2.5, 1.1), (0.8, 0.37)]
    cs = [surgery_constant(ts, ss, use_mellin=True) for ts, ss in confs]
    spread = (max(cs) - min(cs)) / min(cs)
    checks.append(
        _check("surgery-constant", spread < 1e-6 * scale, spread, 0.0, 1e-6,
               extra={"values": cs})
    )

    D = GridDomain([(0, 0), (1, 0)])
    two = abs(discrete_loop_mass(D, [(0, 0)]) + math.log(15 / 16))
    checks.append(_check("two-site-loop-mass", two < 1e-14, two, 0.0, 1e-14))
    D40 = GridDomain.rectangle(40, 40)
    K1 = [(10, 10), (10, 11), (11, 10)]
    K2 = [(30, 5), (30, 6)]
    addl = abs(
        discrete_loop_mass(D40, K1 + K2)
        - discrete_loop_mass(D40, K1)
        - discrete_loop_mass(D40.subdomain(K1), K2)
    )
    lhs, rhs = cut_line_identity(D40, [(20, j) for j in range(40)])
    cut = abs(lhs - rhs)
    checks.append(_check("loop-mass-additivity-40", addl < 1e-12 * scale, addl, 0.0, 1e-12))
    checks.append(_check("cut-line-factorization-40", cut < 1e-12 * scale, cut, 0.0, 1e-12))

    rel = abs(excursion_kernel(0.15, 0.7, ctx) - excursion_kernel_image_sum(0.15, 0.7, 1.0))
    checks.append(_check("excursion-image-sum", rel < 1e-10 * scale, rel, 0.0, 1e-10))

    x = 0.37 + 0.29j
    ys = np.linspace(0, 1, 2048, endpoint=False)
    part = abs(
        float(np.mean([poisson_kernel(x, y, ctx) for y in ys]))
        + harmonic_measure_far(x, 1.0)
        - 1.0
    )
    checks.append(_check("poisson-partition-of-unity", part < 1e-8 * scale, part, 0.0, 1e-8))

    Sres = abs(
        schwarzian_connection(ctx) / 6
        - (-4 * math.pi * eta_log_derivative(1.0) - 2 * math.pi)
    )
    checks.append(_check("schwarzian-via-eta", Sres < 1e-8 * scale, Sres, 0.0, 1e-8))
    return checks


def suite_mc(config):
    from fractions import Fraction

    from .sle import (
        SLEParams,
        SemidiskHull,
        martingale_check,
        restriction_probability,
        restriction_exponent_fit,
    )
    from .gridloops import GridDomain
    from .localization import (
        consistency_residual,
        multi_sle_interaction,
        pairwise_mass_sum,
        random_tube_pair,
        random_disjoint_traces,
    )
    from .sle import make_rng

    seed = config.get("seed", 7)
    n_mc = config.get("n_samples", 100000)
    checks = []

    p83 = SLEParams(Fraction(8, 3))
    hull = SemidiskHull(1.0, 0.3)
    r = restriction_probability(p83, hull, n_mc, seed=seed)
    checks.append(
        _check(
            "sle-restriction",
            abs(r["z_score"]) <= 3.0,
            r["estimate"],
            r["target"],
            extra={"stderr": r["stderr"], "z": r["z_score"],
                   "net_rate": r["disagreement_rate"]},
        )
    )
    fit = restriction_exponent_fit((0.2, 0.3, 0.4), 1.0, max(20000, n_mc // 2), seed + 1)
    checks.append(
        _check(
            "restriction-exponent",
            abs(fit["slope"] - 0.625) <= 0.02,
            fit["slope"],
            0.625,
            0.02,
            extra={"slope_err": fit["slope_err"]},
        )
    )
    for kappa in (2, Fraction(8, 3)):
        m = martingale_check(SLEParams(kappa), 5.0, 0.5, n_mc, seed + 2, n_steps=2048)
        checks.append(
            _check(
                f"martingale-kappa-{kappa}",
                abs(m["z_score"]) <= 3.0,
                m["estimate"],
                1.0,
                extra={"stderr": m["stderr"], "z": m["z_score"]},
            )
        )
    mneg = martingale_check(
        SLEParams(2), 5.0, 0.5, n_mc, seed + 3, n_steps=2048, exponent_shift=0.1
    )
    checks.append(
        _check(
            "martingale-negative-control",
            abs(mneg["z_score"]) > 5.0,
            mneg["z_score"],
            extra={"estimate": mneg["estimate"]},
        )
    )

    rng = make_rng(seed + 5)
    sigma = GridDomain.square_annulus(18, 6)
    worst = 0.0
    for _ in range(config.get("n_tube_pairs", 100)):
        D, Dp, gamma, X, Y = random_tube_pair(sigma, rng)
        worst = max(
            worst,
            consistency_residual(sigma, D, Dp, gamma, X, Y, SLEParams(2)),
        )
    checks.append(_check("localization-consistency", worst < 1e-10, worst, 0.0, 1e-10))

    traces = random_disjoint_traces(sigma, rng, 3)
    base = pairwise_mass_sum(sigma, traces)
    perm_worst = 0.0
    order = [2, 0, 1]
    perm_worst = abs(pairwise_mass_sum(sigma, [traces[i] for i in order]) - base)
    w = multi_sle_interaction(sigma, traces, SLEParams(2))
    checks.append(
        _check("multi-sle-permutation", perm_worst < 1e-12, perm_worst, 0.0, 1e-12,
               extra={"weight": w})
    )
    return checks


SUITES = {"symbolic": suite_symbolic, "numeric": suite_numeric, "mc": suite_mc}


def run_suite(names, config):
    report = {"config": dict(config), "suites": {}}
    ok = True
    for name in names:
        checks = SUITES[name](config)
        report["suites"][name] = checks
        ok = ok and all(c["pass"] for c in checks)
    report["pass"] = ok
    return (0 if ok else 1), report


def emit_annulus_table(t, points, path):
    """CSV of kernels and tangent coordinates at the given boundary points.

    Columns: x, y, poisson(x+it/4, y), excursion(x, y), schwarzian, dt_n2.
    Bit-stable for a fixed truncation.
    """
    from .theta import ThetaContext
    from .annulus import AnnulusChart, excursion_kernel, poisson_kernel, schwarzian_connection

    ctx = ThetaContext(t)
    lines = ["x,y,poisson,excursion,schwarzian,tangent_dt_n_minus_2"]
    S = schwarzian_connection(ctx)
    for i, x in enumerate(points):
        for y in points:
            if abs(x - y) < 1e-12:
                continue
            chart = AnnulusChart(t, [x] + [p for p in points if p != x])
            P = poisson_kernel(x + 1j * t / 4, y, ctx)
            H = excursion_kernel(x, y, ctx)
            dt = chart.tangent_coordinates(-2)["dt"]
            lines.append(f"{x!r},{y!r},{P!r},{H!r},{S!r},{dt!r}")
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def dump_operator(kind, n, k, n_spectators, path):
    from .halfplane import HalfPlaneChart

    chart = HalfPlaneChart(n_spectators, k)
    op = chart.witt(n) if kind == "witt" else chart.virasoro(n)
    text = op.canonical() + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_config(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            key = key.strip().replace("-", "_")
            val = val.strip()
            try:
                out[key] = int(val)
            except ValueError:
                try:
                    out[key] = float(val)
                except ValueError:
                    out[key] = val
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(prog="virasoro", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    pv.add_argument("--seed", type=int, default=7)
    pv.add_argument("--tol-scale", type=float, default=1.0)
    pv.add_argument("--n-samples", type=int, default=100000)
    pv.add_argument("--k-test", type=int, default=10)
    pv.add_argument("--out", default=None)
    pv.add_argument("--config", default=None)

    pa = sub.add_parser("annulus", help="emit kernel tables")
    pa.add_argument("--t", type=float, required=True)
    pa.add_argument("--points", default="0.2,0.5,0.8")
    pa.add_argument("--emit", default="-")

    ps = sub.add_parser("spectral", help="cylinder determinants and surgery")
    ps.add_argument("--cylinder", type=float, required=True, metavar="T")
    ps.add_argument("--cut", type=float, default=None, metavar="S")

    pl = sub.add_parser("loops", help="discrete loop masses from a grid file")
    pl.add_argument("--grid", required=True)
    pl.add_argument("--hull", required=True, help="comma-separated x:y vertices")

    pb = sub.add_parser("bb-verify", help="Bauer-Bernard commutation relations")
    pb.add_argument("--nrange", type=int, default=3)
    pb.add_argument("--K", type=int, default=10)

    pc = sub.add_parser("verify-commutators", help="half-plane Witt/Virasoro relations")
    pc.add_argument("--kmax", type=int, default=10)
    pc.add_argument("--nrange", type=int, default=3)
    pc.add_argument("--spectators", type=int, default=3)

    pd = sub.add_parser("dump-operator", help="canonical text form of a generator")
    pd.add_argument("--kind", choices=["witt", "virasoro"], default="witt")
    pd.add_argument("--n", type=int, required=True)
    pd.add_argument("--k", type=int, default=5)
    pd.add_argument("--spectators", type=int, default=2)
    pd.add_argument("--out", default="-")

    px = sub.add_parser("sle", help="SLE Monte Carlo runs")
    px.add_argument("mode", choices=["restriction", "martingale", "localize"])
    px.add_argument("--kappa", default="8/3")
    px.add_argument("--hull", default="semidisk:1:0.3")
    px.add_argument("--n", type=int, default=100000)
    px.add_argument("--seed", type=int, default=7)
    px.add_argument("--y", type=float, default=5.0)
    px.add_argument("--T", type=float, default=0.5)
    px.add_argument("--grid", default=None)

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args):
    if args.command == "verify":
        config = {}
        if args.config:
            config.update(_load_config(args.config))
        config.setdefault("seed", args.seed)
        config.setdefault("tol_scale", args.tol_scale)
        config.setdefault("n_samples", args.n_samples)
        config.setdefault("k_test", args.k_test)
        names = list(SUITES) if args.suite == "all" else [args.suite]
        code, report = run_suite(names, config)
        text = json.dumps(report, indent=2, sort_keys=True, default=str)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return code

    if args.command == "annulus":
        pts = [float(x) for x in args.points.split(",")]
        emit_annulus_table(args.t, pts, args.emit)
        return 0

    if args.command == "spectral":
        from .cylinder import surgery_constant, zeta_det_cylinder, zeta_det_eta_oracle

        out = {
            "t": args.cylinder,
            "log_det": zeta_det_cylinder(args.cylinder),
            "eta_oracle": zeta_det_eta_oracle(args.cylinder),
        }
        if args.cut is not None:
            out["surgery_constant"] = surgery_constant(args.cylinder, args.cut)
        print(json.dumps(out, indent=2, sort_keys=True))
        return 0

    if args.command == "loops":
        from .gridloops import GridDomain, discrete_loop_mass

        dom = GridDomain.from_file(args.grid)
        hull = [tuple(int(c) for c in v.split(":")) for v in args.hull.split(",")]
        print(
            json.dumps(
                {"mass": discrete_loop_mass(dom, hull), "n_vertices": len(dom)},
                indent=2,
                sort_keys=True,
            )
        )
        return 0

    if args.command == "bb-verify":
        from .hydro import bb_virasoro_sweep, bb_witt_sweep

        w = bb_witt_sweep(span=args.nrange, depth_test=args.K)
        v = bb_virasoro_sweep(span=args.nrange, depth_test=args.K)
        ok = all(x.is_zero() for x in w.values()) and all(
            x.is_zero() for x in v.values()
        )
        print(json.dumps({"pass": ok, "pairs": len(w)}, sort_keys=True))
        return 0 if ok else 1

    if args.command == "verify-commutators":
        from .halfplane import virasoro_sweep, witt_sweep

        w = witt_sweep(span=args.nrange, n_spectators=args.spectators, k_test=args.kmax)
        v = virasoro_sweep(
            span=args.nrange, n_spectators=args.spectators, k_test=args.kmax
        )
        ok = all(x.is_zero() for x in w.values()) and all(
            x.is_zero() for x in v.values()
        )
        print(json.dumps({"pass": ok, "pairs": len(w)}, sort_keys=True))
        return 0 if ok else 1

    if args.command == "dump-operator":
        dump_operator(args.kind, args.n, args.k, args.spectators, args.out)
        return 0

    if args.command == "sle":
        from .sle import SLEParams, martingale_check, parse_hull, restriction_probability

        kappa = Fraction(args.kappa)
        if args.mode == "restriction":
            r = restriction_probability(
                SLEParams(kappa), parse_hull(args.hull), args.n, args.seed
            )
        elif args.mode == "martingale":
            r = martingale_check(SLEParams(kappa), args.y, args.T, args.n, args.seed)
        else:
            from .gridloops import GridDomain
            from .localization import disintegration_check

            dom = (
                GridDomain.from_file(args.grid)
                if args.grid
                else GridDomain.square_annulus(18, 6)
            )
            tube = _default_tube(dom)
            r = disintegration_check(
                dom, tube, (-1, 3), (18, 3), SLEParams(kappa), args.seed,
                n_samples=min(args.n, 400),
            )
        print(json.dumps(r, indent=2, sort_keys=True))
        return 0

    raise ValueError(f"unknown command {args.command}")


def _default_tube(dom):
    xs = [v[0] for v in dom.vertices]
    ys = [v[1] for v in dom.vertices]
    cx = (min(xs) + max(xs)) // 2
    top = max(ys)
    return [v for v in dom.vertices if not (v[0] == cx and v[1] > top - 6)]


if __name__ == "__main__":
    sys.exit(main())
