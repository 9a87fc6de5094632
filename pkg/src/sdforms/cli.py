"""Command-line interface.

Exit codes: 0 when every check passes, 1 when a mathematical check
fails, 2 on bad input or usage.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from . import curvature as curv
from .campaign import SUITES, CampaignConfig, run_campaign
from .errors import FormError
from .io import curvature_to_json, form_to_json, load_curvature, load_form, write_json
from .selfdual import (DEFAULT_TOL, classify, grossman_check, lemma22_gaps,
                       random_asd, random_skew, random_ssd, trautman_check)
from .skew import SkewForm, invariants_from_lambdas, spectrum

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _suites(text: str) -> tuple[str, ...]:
    if text == "all":
        return SUITES
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.12g}"


# -- analyze-form -------------------------------------------------------------

def analyze_form(form_path, tol: float = DEFAULT_TOL) -> tuple[dict, bool]:
    """Full self-duality analysis of the 2-form stored at ``form_path``."""
    form = load_form(form_path)
    if form.degree != 2:
        raise FormError(f"{form_path}: expected a 2-form, got degree {form.degree}")
    w = SkewForm.from_kform(form)
    report = classify(w, tol)
    spec = spectrum(w)
    inv = invariants_from_lambdas(spec.lambdas)
    gaps = lemma22_gaps(w)
    trautman = None if w.is_zero() else trautman_check(w, tol)
    grossman = grossman_check(w, tol) if w.n % 2 == 0 else None
    ok = gaps.g1 >= -tol * gaps.scale and (gaps.g2 is None or gaps.g2 >= -tol * gaps.scale)
    result = {
        "input": str(form_path),
        "dim": w.dim,
        "form": form_to_json(form),
        "spectrum": {"lambdas": spec.lambdas, "pfaffian": spec.pfaffian},
        "invariants": {"s": inv.s, "q": inv.q},
        "self_duality": report,
        "trautman": trautman,
        "grossman": grossman,
        "gaps": gaps,
        "checks_passed": bool(ok),
    }
    return result, bool(ok)


def _print_form(result: dict) -> None:
    r = result["self_duality"]
    print(f"2-form in dim {result['dim']}: {r.classification.value}")
    print(f"  lambdas        {np.array2string(result['spectrum']['lambdas'], precision=12)}")
    print(f"  pfaffian       {_fmt(r.pfaffian)}")
    print(f"  lambda spread  {_fmt(r.lambda_spread)}   matrix residual {_fmt(r.matrix_residual)}")
    t = result["trautman"]
    if t is not None:
        print(f"  trautman       k_fit {_fmt(t.k_fit)}  k_theory {_fmt(t.k_theory)}  "
              f"residual {_fmt(t.residual)}  holds {t.holds}"
              + (f" ({t.branch})" if t.branch else ""))
    if result["grossman"] is not None:
        print(f"  w^(n/2) Hodge self-dual: {result['grossman']}")
    g = result["gaps"]
    print(f"  g1 {_fmt(g.g1)}   g2 {_fmt(g.g2)}")


# -- analyze-curvature --------------------------------------------------------

def analyze_curvature_matrix(F: curv.CurvatureMatrix, tol: float = DEFAULT_TOL) -> tuple[dict, bool]:
    inv = curv.invariants(F)
    bounds = curv.all_bounds(F, tol, inv)
    ok = all(b.slack >= -tol * b.scale for b in bounds if b.applicable)
    result = {
        "dim": F.dim,
        "N": F.N,
        "invariants": {
            "f_norm_sq": inv.f_norm_sq,
            "sigma2_norm_sq": inv.sigma2_norm_sq,
            "sigma4_top": inv.sigma4_top,
            "phi": inv.phi,
            "ortho_residual": inv.ortho_residual,
            "sigma2": inv.sigma2,
            "sigma4": inv.sigma4 if inv.sigma4.degree <= F.dim else None,
        },
        "bounds": bounds,
        "checks_passed": bool(ok),
    }
    return result, bool(ok)


def analyze_curvature(path, tol: float = DEFAULT_TOL) -> tuple[dict, bool]:
    result, ok = analyze_curvature_matrix(load_curvature(path), tol)
    return {"input": str(path), **result}, ok


def _print_curvature(result: dict) -> None:
    inv = result["invariants"]
    print(f"SO({result['N']}) curvature in dim {result['dim']}")
    print(f"  <F,F> {_fmt(inv['f_norm_sq'])}   (sigma2,sigma2) {_fmt(inv['sigma2_norm_sq'])}   "
          f"*sigma4 {_fmt(inv['sigma4_top'])}   Phi {_fmt(inv['phi'])}")
    print(f"  orthonormality residual {_fmt(inv['ortho_residual'])}")
    for b in result["bounds"]:
        if not b.applicable:
            print(f"  {b.name:12s} skipped: {b.note}")
        else:
            flag = "saturated" if b.saturated else ""
            print(f"  {b.name:12s} lhs {_fmt(b.lhs):>22s}  rhs {_fmt(b.rhs):>22s}  "
                  f"slack {_fmt(b.slack):>22s}  {flag}")


# -- saturate / sample --------------------------------------------------------

def saturate(case: str, dim: int, lam: float, seed: int, fiber: int,
             tol: float = DEFAULT_TOL) -> tuple[curv.CurvatureMatrix, dict, bool]:
    """Build an equality configuration and check that it saturates its bound."""
    if dim != 8:
        raise FormError(f"saturation cases need dim 8 (sigma2^2 and sigma4 are top forms "
                        f"only there), got dim {dim}")
    if not lam > 0:
        raise FormError(f"--lambda must be positive, got {lam}")
    rng = np.random.default_rng(seed)
    w = random_ssd(dim, lam, rng)
    if case == "so4":
        if fiber < 4:
            raise FormError(f"so4 case needs --fiber >= 4, got {fiber}")
        F = curv.so4_saturating(w, tol)
        if fiber > 4:
            F = F.embed(fiber)
        expected = ("eq33", "eq35") if fiber == 4 else ("eq35",)
    elif case == "product":
        z = rng.standard_normal((fiber, fiber))
        F = curv.product_config(w, z - z.T)
        expected = ("eq32_second",)
    else:
        raise FormError(f"unknown saturation case {case!r}")
    result, ok = analyze_curvature_matrix(F, tol)
    names = {b.name: b for b in result["bounds"]}
    saturated = all(names[n].saturated for n in expected)
    result["expected_saturated"] = list(expected)
    result["case"] = case
    return F, result, ok and saturated


def _sample(kind: str, dim: int, lam: float, seed: int, fiber: int):
    rng = np.random.default_rng(seed)
    if kind == "generic":
        return form_to_json(random_skew(dim, rng).kform)
    if kind == "ssd":
        return form_to_json(random_ssd(dim, lam, rng).kform)
    if kind == "asd":
        return form_to_json(random_asd(dim, lam, rng).kform)
    return curvature_to_json(curv.random_curvature(dim, fiber, rng))


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sdforms", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"sdforms {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a seeded verification campaign")
    v.add_argument("--dim", type=int, default=8)
    v.add_argument("--fiber", type=int, default=4)
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.add_argument("--suites", type=_suites, default=SUITES,
                   help=f"comma-separated subset of {','.join(SUITES)} or 'all'")
    v.add_argument("--out", help="write the JSON report here")

    for name, help_ in (("analyze-form", "classify a 2-form file"),
                        ("analyze-curvature", "invariants and bounds of a curvature file")):
        a = sub.add_parser(name, help=help_)
        a.add_argument("path")
        a.add_argument("--tol", type=float, default=DEFAULT_TOL)
        a.add_argument("--out", help="write the JSON result here")

    s = sub.add_parser("saturate", help="write an equality configuration")
    s.add_argument("case", choices=("product", "so4"))
    s.add_argument("--dim", type=int, default=8)
    s.add_argument("--fiber", type=int, default=4)
    s.add_argument("--lambda", dest="lam", type=float, default=1.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.add_argument("--out", required=True, help="curvature file to write")

    m = sub.add_parser("sample", help="write a random form or curvature file")
    m.add_argument("--kind", choices=("generic", "ssd", "asd", "curvature"), default="generic")
    m.add_argument("--dim", type=int, default=8)
    m.add_argument("--fiber", type=int, default=4)
    m.add_argument("--lambda", dest="lam", type=float, default=1.0)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out", required=True)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (FormError, OSError) as exc:
        print(f"sdforms: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args) -> int:
    if args.command == "verify":
        cfg = CampaignConfig(dim=args.dim, fiber=args.fiber, samples=args.samples,
                             seed=args.seed, tol=args.tol, suites=args.suites).validate()
        report = run_campaign(cfg)
        timings = report["timestamp"]["timings"]
        for suite, res in report["suites"].items():
            print(f"{suite:13s} {res['passed']} passed, {res['failed']} failed "
                  f"({timings[suite]:.2f} s)")
            for name, c in res["checks"].items():
                mark = "ok  " if c["passed"] else "FAIL"
                print(f"  {mark} {name:34s} worst {_fmt(c['worst'])} "
                      f"(sample {c['worst_sample']}, threshold {c['threshold']:.1e})")
        print("PASS" if report["passed"] else "FAIL")
        if args.out:
            write_json(args.out, report)
        return EXIT_OK if report["passed"] else EXIT_FAIL

    if args.command == "analyze-form":
        result, ok = analyze_form(args.path, args.tol)
        _print_form(result)
    elif args.command == "analyze-curvature":
        result, ok = analyze_curvature(args.path, args.tol)
        _print_curvature(result)
    elif args.command == "saturate":
        F, result, ok = saturate(args.case, args.dim, args.lam, args.seed, args.fiber, args.tol)
        write_json(args.out, curvature_to_json(F))
        _print_curvature(result)
        print(f"expected saturated: {', '.join(result['expected_saturated'])} -> "
              f"{'yes' if ok else 'NO'}")
        return EXIT_OK if ok else EXIT_FAIL
    else:
        write_json(args.out, _sample(args.kind, args.dim, args.lam, args.seed, args.fiber))
        return EXIT_OK
    if args.out:
        write_json(args.out, result)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
