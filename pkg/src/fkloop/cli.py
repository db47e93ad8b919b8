"""Command-line front end: parameter tables, F_ell tables, verification
suites, Monte Carlo campaigns, enumeration dumps and bijection round trips.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 usage or
domain error.  Every emitted file starts with comment lines recording the
package version and the run configuration, so outputs are reproducible from
their own headers.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from . import analytics, enumeration, maps, walks
from .analytics import ModelParams, params_from_q


def _header_lines(**kv) -> list[str]:
    items = " ".join(f"{k}={v}" for k, v in kv.items())
    return [f"# fkloop {__version__}", f"# {items}"]


def _emit(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _params_or_exit(q: float) -> ModelParams:
    try:
        return params_from_q(q)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(2)


# ---------------------------------------------------------------------------
# params
# ---------------------------------------------------------------------------


def cmd_params(args) -> int:
    pr = _params_or_exit(args.q)
    res_c0, res_c1 = analytics.consistency_c0_c1(pr)
    lines = _header_lines(q=args.q)
    for name in ("q", "n", "p", "theta", "x_c", "gamma_plus", "gamma_minus"):
        lines.append(f"{name:12s} {getattr(pr, name):.12g}")
    lines.append(f"{'residual_c0':12s} {res_c0:.3e}")
    lines.append(f"{'residual_c1':12s} {res_c1:.3e}")
    lines.append(
        f"{'gamma_id':12s} {abs(pr.gamma_plus - 1.0 / (2.0 * pr.x_c)):.3e}"
    )
    _emit(lines, args.out)
    return 0


# ---------------------------------------------------------------------------
# ftable
# ---------------------------------------------------------------------------


def cmd_ftable(args) -> int:
    if args.lmax > 10**5:
        print("error: --lmax capped at 1e5", file=sys.stderr)
        return 2
    pr = _params_or_exit(args.q)
    lines = _header_lines(q=args.q, lmax=args.lmax, tol=args.tol)
    lines.append("ell,F_scaled")
    bad = 0
    for ell in range(args.lmax + 1):
        val = analytics.partition_F_scaled(ell, pr, tol=args.tol)
        flag = ""
        if ell == 0 and abs(val - 1.0) > max(args.tol, 1e-9):
            flag = ",NORMALISATION_FAIL"
            bad += 1
        lines.append(f"{ell},{val:.12g}{flag}")
    _emit(lines, args.out)
    return 1 if bad else 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _suite_resolvent(pr: ModelParams, report: list[str]) -> bool:
    zs = np.linspace(pr.gamma_minus, pr.gamma_plus, 52)[1:-1]
    worst = max(analytics.resolvent_equation_residual(float(z), pr) for z in zs)
    ok = worst < 1e-6
    report.append(f"resolvent equation on cut: max residual {worst:.3e} "
                  f"[{'PASS' if ok else 'FAIL'}]")
    endpoint = abs(
        analytics.resolvent_W(pr.gamma_plus, pr) - 2.0 / pr.gamma_plus
    )
    ok2 = endpoint < 1e-8
    report.append(f"W(gamma_plus) = 2/gamma_plus: residual {endpoint:.3e} "
                  f"[{'PASS' if ok2 else 'FAIL'}]")
    return ok and ok2


def _suite_wienerhopf(pr: ModelParams, report: list[str]) -> bool:
    oms = [x + 0.3j * s for x in np.linspace(-6.0, 6.0, 50) for s in (-1.0, 1.0)]
    worst = max(analytics.wiener_hopf_residual(om, pr) for om in oms)
    ok = worst < 1e-10
    report.append(f"Wiener-Hopf split on strip: max rel residual {worst:.3e} "
                  f"[{'PASS' if ok else 'FAIL'}]")
    kn = max(
        abs(analytics.kernel_K(om, pr) - analytics.kernel_K_numeric(om, pr))
        / abs(analytics.kernel_K(om, pr))
        for om in np.linspace(-4.0, 4.0, 20)
    )
    ok2 = kn < 1e-8
    report.append(f"kernel closed form vs PV integral: max rel error {kn:.3e} "
                  f"[{'PASS' if ok2 else 'FAIL'}]")
    return ok and ok2


def _suite_appendix(pr: ModelParams, report: list[str]) -> bool:
    pts = [x + 1j * y for x, y in zip(np.linspace(-3, 3, 20),
                                      np.linspace(0.4, 2.4, 20))]
    worst = max(
        abs(analytics.S_plus_numeric(om, pr) - analytics.R_plus(om, pr))
        for om in pts
    )
    ok = worst < 1e-6
    report.append(f"S_plus integral vs closed form: max error {worst:.3e} "
                  f"[{'PASS' if ok else 'FAIL'}]")
    bres = max(
        analytics.beta_identity_residual(
            1.25 - 0.25j * k, (pr.theta + s) / 2.0
        )
        for k in range(1, 6)
        for s in (1.0, -1.0)
    )
    ok2 = bres < 1e-8
    report.append(f"Beta identity: max residual {bres:.3e} "
                  f"[{'PASS' if ok2 else 'FAIL'}]")
    half = abs(analytics.R_plus(1j, pr) - 0.5)
    ok3 = half < 1e-10
    report.append(f"R_plus(i) = 1/2: residual {half:.3e} "
                  f"[{'PASS' if ok3 else 'FAIL'}]")
    return ok and ok2 and ok3


def _suite_dictionary(pr: ModelParams, report: list[str], samples: int,
                      seed: int) -> bool:
    rows = walks.verify_dictionary(pr, samples, seed)
    ok = True
    report.append("ell  ratio      sigma     z")
    for row in rows:
        z = (row["ratio"] - 1.0) / row["ratio_sigma"]
        good = abs(z) <= 4.0
        ok = ok and good
        report.append(
            f"{row['ell']:3d}  {row['ratio']:.5f}  {row['ratio_sigma']:.5f}  "
            f"{z:+.2f} [{'PASS' if good else 'FAIL'}]"
        )
    return ok


def _suite_coupling(pr: ModelParams, report: list[str], samples: int,
                    seed: int) -> bool:
    out = walks.geometric_coupling_check(pr.p, samples, seed)
    ok = out["gap_p_value"] > 1e-4
    report.append(f"geometric gap law: chi2 p-value {out['gap_p_value']:.4f} "
                  f"(mean {out['gap_mean']:.3f}) [{'PASS' if ok else 'FAIL'}]")
    all_ok = ok
    for row in out["factorization"]:
        good = row["residual_sigmas"] <= 4.0
        all_ok = all_ok and good
        report.append(
            f"factorisation ell={row['ell']}: lhs {row['lhs']:.3e} "
            f"rhs {row['rhs']:.3e} z={row['residual_sigmas']:.2f} "
            f"[{'PASS' if good else 'FAIL'}]"
        )
    return all_ok


def cmd_verify(args) -> int:
    pr = _params_or_exit(args.q)
    suites = (
        ["resolvent", "wienerhopf", "appendix", "dictionary", "coupling"]
        if args.suite == "all"
        else [args.suite]
    )
    report = _header_lines(q=args.q, seed=args.seed, samples=args.samples,
                           suite=args.suite)
    all_ok = True
    for name in suites:
        report.append(f"-- suite {name} --")
        if name == "resolvent":
            all_ok &= _suite_resolvent(pr, report)
        elif name == "wienerhopf":
            all_ok &= _suite_wienerhopf(pr, report)
        elif name == "appendix":
            all_ok &= _suite_appendix(pr, report)
        elif name == "dictionary":
            all_ok &= _suite_dictionary(pr, report, args.samples, args.seed)
        elif name == "coupling":
            all_ok &= _suite_coupling(pr, report, args.samples, args.seed)
    report.append("RESULT " + ("PASS" if all_ok else "FAIL"))
    _emit(report, args.out)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# mc
# ---------------------------------------------------------------------------


def cmd_mc(args) -> int:
    pr = _params_or_exit(args.q)
    lines = _header_lines(
        q=args.q, seed=args.seed, n_samples=args.samples,
        cap_letters=args.cap_letters, lmax=args.lmax,
        observable=args.observable,
    )
    if args.observable == "cluster":
        hist = walks.mc_cluster_perimeter(
            pr, args.samples, args.seed, ell_max=args.lmax,
            cap_letters=args.cap_letters,
        )
    elif args.observable == "loop":
        hist = walks.mc_loop_perimeter(
            pr, args.samples, args.seed, ell_max=args.lmax,
            cap_letters=args.cap_letters,
        )
    else:  # tau: unconditional hitting-time histogram
        camp = walks.run_campaign(
            pr.p, args.samples, args.seed, cap_letters=args.cap_letters,
            step_cap=args.lmax + 2,
        )
        hist = {}
        vals = camp.tau_h[camp.tau_h >= 1]
        counts = np.bincount(np.minimum(vals, args.lmax + 1),
                             minlength=args.lmax + 2)
        for ell in range(1, args.lmax + 1):
            hist[ell] = walks._binomial_estimate(
                int(counts[ell]), camp.n_runs, camp.n_censored, camp.seed
            )
    lines.append("ell,count,censored_lo,censored_hi")
    for ell in sorted(hist):
        est = hist[ell]
        lines.append(
            f"{ell},{round(est.point * est.n_total)},"
            f"{est.bracket[0]:.10g},{est.bracket[1]:.10g}"
        )
    lo, hi = 10, min(500, args.lmax)
    predicted = -(3.0 - 2.0 * pr.theta)
    if args.observable == "tau":
        predicted = -(2.0 - pr.theta)
    try:
        slope, stderr = walks.tail_slope_wls(hist, lo, hi)
        lines.append(f"# slope[{lo},{hi}] {slope:.4f} stderr {stderr:.4f} "
                     f"predicted {predicted:.4f}")
    except ValueError as exc:
        lines.append(f"# slope unavailable: {exc}")
    any_est = next(iter(hist.values()))
    cens_frac = any_est.n_censored / any_est.n_total
    if cens_frac > args.max_censored:
        lines.append(f"# WARNING censored fraction {cens_frac:.2%} exceeds "
                     f"{args.max_censored:.2%}")
    _emit(lines, args.out)
    return 0


# ---------------------------------------------------------------------------
# enumerate / roundtrip
# ---------------------------------------------------------------------------


def cmd_enumerate(args) -> int:
    lines = _header_lines(kind=args.kind, size=args.size, q=args.q,
                          k=args.k, kp=args.kp)
    if args.kind == "words":
        if args.size > enumeration.ENUMERATION_CAP:
            print("error: size exceeds enumeration cap", file=sys.stderr)
            return 2
        words = enumeration.enumerate_balanced_words(args.size)
        lines.append("word")
        lines.extend(words)
    elif args.kind == "rings":
        count = enumeration.count_rings(args.k, args.kp)
        closed = enumeration.ring_count_closed_form(args.k, args.kp)
        lines.append("k,kp,count,closed_form")
        lines.append(f"{args.k},{args.kp},{count},{closed}")
        if count != closed:
            lines.append("# DISCREPANCY between oracle and closed form")
            _emit(lines, args.out)
            return 1
    else:  # fk
        if args.size > enumeration.ENUMERATION_CAP // 2:
            print("error: size exceeds enumeration cap", file=sys.stderr)
            return 2
        word_side, _ = enumeration.finite_fk_partition(args.size, args.q)
        exact = all(isinstance(w, Fraction) for w in word_side.entries.values())
        if exact and args.format == "csv":
            lines.append("outcome,weight_num,weight_den")
            for word, w in sorted(word_side.entries.items()):
                lines.append(f"{word},{w.numerator},{w.denominator}")
        else:
            lines.append("outcome,weight_float,abs_err")
            for word, w in sorted(word_side.entries.items()):
                lines.append(f"{word},{float(w):.12g},1e-12")
    _emit(lines, args.out)
    return 0


def cmd_roundtrip(args) -> int:
    if args.kmax > 4:
        print("error: --kmax capped at 4", file=sys.stderr)
        return 2
    failures = 0
    total = 0
    for k in range(1, args.kmax + 1):
        for word in enumeration.enumerate_balanced_words(k):
            total += 1
            decorated = maps.word_to_map(word)
            back = maps.map_to_word(*decorated)
            if back != word:
                failures += 1
                print(f"MISMATCH {word} -> {back}")
    print(f"roundtrip words up to length {2 * args.kmax}: "
          f"{total - failures}/{total} ok "
          f"[{'PASS' if failures == 0 else 'FAIL'}]")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="fkloop",
        description="Self-dual FK(q) planar maps: exact solution and "
                    "Monte Carlo cross-validation.",
    )
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, samples=10**5):
        p.add_argument("--q", type=float, default=2.0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=lambda s: int(float(s)),
                       default=samples)
        p.add_argument("--cap-letters", dest="cap_letters",
                       type=lambda s: int(float(s)), default=10**7)
        p.add_argument("--out", default=None)

    p = sub.add_parser("params", help="parameter table for a given q")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("ftable", help="table of scaled boundary partition "
                                      "functions F_ell")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--lmax", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ftable)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True,
                   choices=["resolvent", "wienerhopf", "appendix",
                            "dictionary", "coupling", "all"])
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mc", help="Monte Carlo histogram campaign")
    p.add_argument("--observable", required=True,
                   choices=["cluster", "loop", "tau"])
    common(p, samples=10**6)
    p.add_argument("--lmax", type=int, default=500)
    p.add_argument("--max-censored", dest="max_censored", type=float,
                   default=0.05)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("enumerate", help="exact enumeration dumps")
    p.add_argument("--kind", required=True, choices=["words", "rings", "fk"])
    p.add_argument("--size", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--kp", type=int, default=1)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--format", choices=["csv", "float"], default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("roundtrip", help="exhaustive word/map round trip")
    p.add_argument("--kmax", type=int, default=4)
    p.set_defaults(func=cmd_roundtrip)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
