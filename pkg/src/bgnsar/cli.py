"""Command-line interface.

Exit codes: 0 success, 2 usage error (bad flags or parameter values),
3 data error (unreadable or empty input), 4 convergence failure. A fit that
returns without converging only yields 4 under ``--strict``; a computation
that cannot produce any result always does.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bgn, moments
from .bgn import BgnParams
from .errors import ConvergenceError, DataError, DomainError
from .mle import FitOptions, fit_bgn
from .sarfit.compare import compare
from .sarfit.io import load_region, parse_rect, write_csv
from .sarfit.mc import McConfig, mc_study, parse_sweep
from .sarfit.report import fmt, to_json, to_text
from .sarfit.stats import describe, rng_check

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CONVERGENCE = 0, 2, 3, 4


class _Usage(Exception):
    pass


def _dist_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("distribution parameters")
    g.add_argument("--alpha", type=float, default=1.0)
    g.add_argument("--beta", type=float, default=1.0)
    g.add_argument("--mu", type=float, default=0.0)
    g.add_argument("--sigma", type=float, default=1.0)
    g.add_argument("--s", type=float, default=2.0)


def _input_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input")
    g.add_argument("--input", required=True, metavar="PATH")
    g.add_argument("--format", choices=("csv", "pgm16", "raw"), default="csv")
    g.add_argument("--width", type=int)
    g.add_argument("--height", type=int)
    g.add_argument("--rect", metavar="x0,y0,w,h")
    g.add_argument("--channel", default="")


def _fit_flags(p: argparse.ArgumentParser, n_starts: int = 8) -> None:
    p.add_argument("--n-starts", type=int, default=n_starts)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--grad-tol", type=float, default=1e-6)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="unsigned 64-bit seed")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--strict", action="store_true", help="exit 4 when a fit does not converge")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bgnsar", description="Beta generalised normal tools for SAR intensity data.")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, helptext in (("pdf", "density at points"), ("cdf", "distribution function at points"),
                           ("quantile", "quantiles at probabilities")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("points", nargs="+", type=float)
        _dist_flags(p)
        _common(p)

    p = sub.add_parser("sample", help="draw a sample")
    p.add_argument("-n", "--n", type=int, default=1000)
    p.add_argument("--batch", type=int, default=0)
    _dist_flags(p)
    _common(p)

    p = sub.add_parser("moment", help="raw moment E(X^n)")
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--method", choices=("series", "quadrature"), default="series")
    _dist_flags(p)
    _common(p)

    p = sub.add_parser("fit", help="maximum likelihood fit")
    _input_flags(p)
    _fit_flags(p)
    _common(p)

    p = sub.add_parser("compare", help="fit BGN, Gamma, K and G0 and rank by AIC/AICc/BIC")
    _input_flags(p)
    _fit_flags(p)
    _common(p)

    p = sub.add_parser("describe", help="mean, median, sd and cv (percent)")
    _input_flags(p)
    _common(p)

    p = sub.add_parser("mc-study", help="Monte Carlo study of the fitted density error")
    p.add_argument("--replications", type=int, default=1000)
    p.add_argument("--sizes", default="49,121,400")
    p.add_argument("--scenario", choices=("s", "beta", "alpha"), default="s")
    p.add_argument("--sweep", default="1:5:0.5", help="start:stop:step or a comma list")
    p.add_argument("--grid-points", type=int, default=512)
    p.add_argument("--workers", type=int, default=1)
    _dist_flags(p)
    _fit_flags(p, n_starts=2)
    _common(p)

    p = sub.add_parser("rng-check", help="sampler vs cdf: KS statistic and histogram")
    p.add_argument("-n", "--n", type=int, default=100_000)
    p.add_argument("--bins", type=int, default=50)
    _dist_flags(p)
    _common(p)
    return ap


def _params(a) -> BgnParams:
    return BgnParams(a.alpha, a.beta, a.mu, a.sigma, a.s)


def _fit_opts(a) -> FitOptions:
    return FitOptions(max_iter=a.max_iter, grad_tol=a.grad_tol, n_starts=a.n_starts, seed=a.seed)


def _region(a):
    if a.format == "raw" and (a.width is None or a.height is None):
        raise _Usage("--format raw needs --width and --height")
    rect = parse_rect(a.rect) if a.rect else None
    return load_region(a.input, a.format, rect, a.channel, a.width, a.height)


def _table(header: tuple[str, str], xs, ys) -> str:
    return "\n".join([f"{header[0]}\t{header[1]}"] + [f"{fmt(x)}\t{fmt(y)}" for x, y in zip(xs, ys)])


def _run(a) -> tuple[str, bool]:
    """Rendered output and whether every fit converged."""
    cmd = a.command
    if cmd in ("pdf", "cdf", "quantile"):
        p = _params(a)
        pts = np.array(a.points, dtype=float)
        fn = {"pdf": bgn.bgn_pdf, "cdf": bgn.bgn_cdf, "quantile": bgn.bgn_quantile}[cmd]
        vals = np.atleast_1d(np.asarray(fn(pts, p), dtype=float))
        label = "p" if cmd == "quantile" else "x"
        if a.json:
            return to_json({label: pts, cmd: vals}), True
        return _table((label, cmd), pts, vals), True
    if cmd == "sample":
        if a.n < 1:
            raise _Usage("-n must be >= 1")
        vals = bgn.bgn_sample(a.n, _params(a), a.seed, a.batch).values
        if a.json:
            return to_json({"seed": a.seed, "values": vals}), True
        if a.out:
            write_csv(vals, a.out)
            return "", True
        return "\n".join(repr(float(v)) for v in vals), True
    if cmd == "moment":
        p = _params(a)
        if a.method == "series":
            v = moments.moment_series(a.order, p)
            rec = {"order": a.order, "method": "series", "value": float(v), "validated": v.validated}
        else:
            rec = {"order": a.order, "method": "quadrature", "value": moments.moment_quadrature(a.order, p)}
        if a.json:
            return to_json(rec), True
        return "\n".join(f"{k}: {fmt(v) if isinstance(v, float) else v}" for k, v in rec.items()), True
    if cmd == "fit":
        res = fit_bgn(_region(a).values, _fit_opts(a))
        return (to_json(res) if a.json else to_text(res)), res.converged
    if cmd == "compare":
        rep = compare(_region(a), _fit_opts(a))
        return (to_json(rep) if a.json else to_text(rep)), all(m.converged for m in rep.models)
    if cmd == "describe":
        d = describe(_region(a))
        return (to_json(d) if a.json else to_text(d)), True
    if cmd == "mc-study":
        try:
            sizes = tuple(int(v) for v in a.sizes.split(",") if v.strip())
        except ValueError as exc:
            raise _Usage(f"bad --sizes {a.sizes!r}") from exc
        cfg = McConfig(replications=a.replications, sample_sizes=sizes, scenario=a.scenario,
                       sweep=parse_sweep(a.sweep), base=_params(a), grid_points=a.grid_points,
                       seed=a.seed, fit=_fit_opts(a))
        table = mc_study(cfg, workers=a.workers)
        return (to_json(table) if a.json else to_text(table)), all(r.excluded == 0 for r in table.rows)
    if cmd == "rng-check":
        chk = rng_check(_params(a), a.n, a.bins, a.seed)
        return (to_json(chk) if a.json else to_text(chk)), True
    raise _Usage(f"unknown command {cmd!r}")


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, converged = _run(a)
    except _Usage as exc:
        print(f"bgnsar: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"bgnsar: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConvergenceError as exc:
        print(f"bgnsar: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except DomainError as exc:
        print(f"bgnsar: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"bgnsar: {exc}", file=sys.stderr)
        return EXIT_DATA
    if text:
        if a.out:
            with open(a.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    if a.strict and not converged:
        print("bgnsar: fit did not converge", file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
