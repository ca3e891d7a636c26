"""Command-line pipeline: generate -> train -> predict -> analyze.

Exit codes: 0 success, 1 usage error, 2 data/domain error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, io, mfdfa, model, optim, preprocess, rgarch, stats
from .errors import DataFormatError, InvalidArgumentError, QclVolError
from .qubit import CircuitParams

log = logging.getLogger("qclvol")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3

# flags whose values may start with '-' (e.g. "--lags -100:100")
_RANGE_FLAGS = ("--lags", "--segment", "--x0", "--qs", "--scales")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI integers, got {text!r}") from None
    return lo, hi


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _variant(text: str) -> str:
    aliases = {"exp": "exponential", "exponential": "exponential", "rational": "rational", "rat": "rational"}
    try:
        return aliases[text.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"variant must be exp or rational, got {text!r}") from None


# ---------------------------------------------------------------- input helpers

def load_series(path):
    """Return ``(returns, volatility, kind)`` from a data or prediction CSV."""
    cols = io.read_csv(path)
    if "r" in cols and "sigma2" in cols:
        return cols["r"], cols["sigma2"], "data"
    if "rp" in cols and "v" in cols:
        return cols["rp"], cols["v"], "prediction"
    raise DataFormatError(
        f"{path}: need columns r,sigma2 (data) or rp,v (prediction); have {', '.join(cols)}"
    )


def select_series(path, which: str, segment=None) -> np.ndarray:
    r, vol, _ = load_series(path)
    if which == "dv":
        x = preprocess.log_increments(np.maximum(vol, model.LOG_FLOOR))
    elif which == "vol":
        x = vol
    elif which == "r":
        x = r
    else:
        raise InvalidArgumentError(f"unknown series {which!r}")
    if segment is not None:
        start, length = segment
        if start < 0 or length < 1 or start + length > x.size:
            raise InvalidArgumentError(f"segment {start}:{length} outside series of length {x.size}")
        x = x[start: start + length]
    return x


def _params_file(path):
    kv = io.read_kv(path)
    try:
        p = CircuitParams(float(kv["theta"]), float(kv["lambda"]), float(kv["phi"]))
        factors = preprocess.ScaleFactors(float(kv["r_scale"]), float(kv["v_scale"]))
        x0 = model.ModelInput(float(kv["x0_r"]), float(kv["x0_sigma2"]))
    except KeyError as exc:
        raise DataFormatError(f"{path}: missing key {exc.args[0]!r}") from None
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from None
    return p, factors, x0, kv


# ---------------------------------------------------------------- subcommands

def cmd_generate(args, ctx):
    params = rgarch.RGarchParams(args.omega, args.alpha, args.beta, args.gamma)
    series = rgarch.simulate(params, args.variant, args.n, args.burn_in, args.seed)
    io.write_csv(args.out, ["t", "r", "sigma2"], [np.arange(1, len(series) + 1), series.r, series.sigma2])
    ctx["outputs"].append(args.out)
    ctx["extra"].update(series.meta)
    if args.plot:
        ctx["outputs"].append(_plot("plot_series", series.r, series.sigma2, _png(args.out)))
    print(f"wrote {len(series)} rows to {args.out}")


def cmd_train(args, ctx):
    cols = io.read_csv(args.data, required=("r", "sigma2"))
    if cols["r"].size < 2:
        raise InvalidArgumentError("training data needs at least 2 rows")
    raw = rgarch.MarketSeries(cols["r"], cols["sigma2"], {"source": str(args.data)})
    scaled, factors = preprocess.rescale(raw)
    config = optim.OptimConfig(args.max_evals, args.tolerance, args.restarts, args.seed)
    log.info("training on %d points: %d restarts x %d evals", len(scaled), config.restarts, config.max_evals)
    report = optim.minimize(model.make_objective(scaled), config, threads=args.threads)
    best = report.best_params
    fit = model.fitted(best, scaled)
    teacher = scaled.sigma2[1:]
    corr = float(np.corrcoef(fit, teacher)[0, 1]) if np.std(fit) > 0 and np.std(teacher) > 0 else float("nan")
    canon = best.canonical()
    io.write_kv(args.out, {
        "theta": canon.theta,
        "lambda": canon.lam,
        "phi": canon.phi,
        "loss": report.best_value,
        "r_scale": factors.r_scale,
        "v_scale": factors.v_scale,
        "x0_r": float(scaled.r[-1]),
        "x0_sigma2": float(scaled.sigma2[-1]),
        "n_train": len(scaled),
        "evals_used": report.evals_used,
        "seed": args.seed,
        "fit_corr": corr,
        "theta_raw": best.theta,
        "lambda_raw": best.lam,
        "phi_raw": best.phi,
    })
    fit_out = args.fit_out or Path(args.out).with_name(Path(args.out).stem + "_fit.csv")
    io.write_csv(fit_out, ["t", "teacher", "fitted"], [np.arange(2, len(scaled) + 1), teacher, fit])
    ctx["outputs"] += [args.out, fit_out]
    ctx["extra"].update({
        "best_loss": report.best_value,
        "evals_used": report.evals_used,
        "fit_corr": corr,
        "restart_initial_losses": [r.initial_value for r in report.restarts],
        "restart_final_losses": [r.best_value for r in report.restarts],
        "restart_seed_derivation": "numpy.random.SeedSequence(seed).spawn(restarts) -> PCG64 uniform[0,2pi)^3",
    })
    if args.plot:
        ctx["outputs"].append(_plot("plot_fit", teacher, fit, _png(fit_out)))
    print(f"loss={report.best_value!r} corr={corr:.4f} params=({canon.theta:.6f}, {canon.lam:.6f}, {canon.phi:.6f})")


def cmd_predict(args, ctx):
    p, factors, x0, _ = _params_file(args.params)
    if args.x0 is not None:
        x0 = model.ModelInput(*args.x0)
    scale = factors if args.return_scale == "data" else None
    pred = model.rollout(p, x0, args.n, args.seed, scale=scale)
    io.write_csv(args.out, ["t", "rp", "v"], [np.arange(1, len(pred) + 1), pred.rp, pred.v])
    ctx["outputs"].append(args.out)
    ctx["extra"].update(pred.meta)
    ctx["extra"].update({"clamp_count": pred.clamp_count, "seed": pred.seed})
    if args.plot:
        ctx["outputs"].append(_plot("plot_series", pred.rp, pred.v, _png(args.out), r_label="$r^p$", v_label="v"))
    print(f"wrote {len(pred)} rows to {args.out} (clamped returns: {pred.clamp_count})")


def cmd_crosscorr(args, ctx):
    r, vol, _ = load_series(args.input)
    lo, hi = args.lags
    res = stats.cross_correlation(r, vol, args.d, lo, hi)
    io.write_csv(args.out, ["lag", "value", "n_pairs"], [res.lags, res.values, res.n_pairs])
    ctx["outputs"].append(args.out)
    if args.plot:
        ctx["outputs"].append(_plot("plot_crosscorr", res.lags, res.values, _png(args.out), d=args.d, n=r.size))
    pos = res.window(1, min(10, hi))
    print(f"C_{args.d:g}(j) for j in [{lo},{hi}] -> {args.out}; mean C(1..10) = {pos.mean() if pos.size else float('nan'):.4f}")


def cmd_fitdecay(args, ctx):
    cols = io.read_csv(args.input, required=("lag", "value"))
    n_pairs = cols.get("n_pairs", np.zeros_like(cols["lag"]))
    cc = stats.CrossCorrResult(cols["lag"].astype(int), cols["value"], float("nan"), n_pairs.astype(int))
    fit = stats.fit_exp_decay(cc, args.j_min, args.j_max)
    io.write_csv(args.out, ["tau", "amplitude", "r_squared", "j_min", "j_max", "n_used", "ok"],
                 [[fit.tau], [fit.amplitude], [fit.r_squared], [args.j_min], [args.j_max], [fit.n_used], [int(fit.ok)]])
    ctx["outputs"].append(args.out)
    ctx["extra"].update({"tau": fit.tau, "r_squared": fit.r_squared, "ok": fit.ok})
    if args.plot:
        ctx["outputs"].append(_plot("plot_decay", cc.lags, cc.values, fit.tau, fit.amplitude, _png(args.out)))
    print(f"tau={fit.tau:.4f} amplitude={fit.amplitude:.5f} R2={fit.r_squared:.4f} lags_used={fit.n_used}")


def cmd_autocorr(args, ctx):
    x = select_series(args.input, args.series, args.segment)
    acf = stats.autocorrelation(x, args.max_lag)
    lags = np.arange(args.max_lag + 1)
    io.write_csv(args.out, ["lag", "acf"], [lags, acf])
    ctx["outputs"].append(args.out)
    if args.plot:
        ctx["outputs"].append(_plot("plot_acf", lags, acf, _png(args.out)))
    print(f"ACF(1) = {acf[1] if acf.size > 1 else float('nan'):.4f} -> {args.out}")


def _mfdfa_config(args, n):
    qs = args.qs if args.qs else tuple(mfdfa.default_qs())
    scales = args.scales if args.scales else tuple(mfdfa.default_scales(n))
    return mfdfa.MfdfaConfig(scales, qs, args.order)


def cmd_mfdfa(args, ctx):
    x = select_series(args.input, args.series, args.segment)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    res = mfdfa.hurst(x, _mfdfa_config(args, x.size), threads=args.threads)
    io.write_csv(out / "hq.csv", ["q", "h", "r2"], [res.qs, res.hq, res.fit_r2])
    io.write_csv(out / "spectrum.csv", ["q", "alpha", "f"], [res.spectrum_qs, res.alpha, res.f_alpha])
    qq, ss = np.meshgrid(res.qs, res.scales, indexing="ij")
    io.write_csv(out / "fq.csv", ["q", "s", "fq"], [qq.ravel(), ss.ravel(), res.fq.ravel()])
    ctx["outputs"] += [out / "hq.csv", out / "spectrum.csv", out / "fq.csv"]
    ctx["extra"].update({"scales": res.scales, "n": x.size, "alpha_width": res.alpha_width})
    if args.plot:
        ctx["outputs"].append(_plot("plot_mfdfa", res.qs, res.hq, res.spectrum_qs, res.alpha, res.f_alpha,
                                    out / "mfdfa.png"))
    lo, hi = res.hq[0], res.hq[-1]
    print(f"h(q_min)-h(q_max) = {lo - hi:.4f}; alpha width = {res.alpha_width:.4f} -> {out}")


def cmd_rolling_hurst(args, ctx):
    x = select_series(args.input, args.series, args.segment)
    scales = args.scales if args.scales else tuple(mfdfa.default_scales(args.window))
    config = mfdfa.MfdfaConfig(scales, (2.0,), args.order)
    rows = mfdfa.rolling_hurst(x, args.window, args.shift, config, threads=args.threads)
    starts = [s for s, _ in rows]
    h2 = [h for _, h in rows]
    io.write_csv(args.out, ["start", "h2"], [starts, h2])
    ctx["outputs"].append(args.out)
    ctx["extra"].update({"windows": len(rows), "mean_h2": float(np.mean(h2)), "scales": list(scales)})
    if args.plot:
        ctx["outputs"].append(_plot("plot_rolling", starts, h2, _png(args.out)))
    print(f"{len(rows)} windows, mean h(2) = {np.mean(h2):.4f} -> {args.out}")


def _png(csv_path):
    from .plotting import figure_path

    return figure_path(csv_path)


def _plot(name, *a, **kw):
    from . import plotting

    return getattr(plotting, name)(*a, **kw)


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qclvol", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, out_help="output CSV path"):
        p.add_argument("--out", required=True, type=Path, help=out_help)
        p.add_argument("--config", type=Path, help="key=value file; command-line flags take precedence")
        p.add_argument("--plot", type=_bool, nargs="?", const=True, default=False,
                       help="also render a PNG figure next to the output")

    g = sub.add_parser("generate", help="simulate an RGARCH return/volatility series")
    g.add_argument("--omega", type=float, default=rgarch.PAPER_PARAMS.omega)
    g.add_argument("--alpha", type=float, default=rgarch.PAPER_PARAMS.alpha)
    g.add_argument("--beta", type=float, default=rgarch.PAPER_PARAMS.beta)
    g.add_argument("--gamma", type=float, default=rgarch.PAPER_PARAMS.gamma)
    g.add_argument("--variant", type=_variant, default="exponential", help="exp (default) or rational")
    g.add_argument("--n", type=int, default=1095)
    g.add_argument("--burn-in", type=int, default=1000)
    g.add_argument("--seed", type=int, default=1)
    common(g)
    g.set_defaults(func=cmd_generate, _sub=g)

    t = sub.add_parser("train", help="fit the circuit angles to a data CSV")
    t.add_argument("--data", required=True, type=Path, help="CSV with columns t,r,sigma2")
    t.add_argument("--restarts", type=int, default=20)
    t.add_argument("--max-evals", type=int, default=2000, help="objective evaluations per restart")
    t.add_argument("--tolerance", type=float, default=1e-10, help="simplex value-spread stop")
    t.add_argument("--seed", type=int, default=1)
    t.add_argument("--threads", type=int, default=1)
    t.add_argument("--fit-out", type=Path, default=None, help="fitted-vs-teacher CSV (default <out>_fit.csv)")
    common(t, "output parameter file (key,value CSV)")
    t.set_defaults(func=cmd_train, _sub=t)

    p = sub.add_parser("predict", help="roll the trained circuit forward")
    p.add_argument("--params", required=True, type=Path)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--x0", type=_float_list, default=None, help="initial scaled input r,sigma2")
    p.add_argument("--return-scale", choices=("data", "unit"), default="data",
                   help="data: draw returns in original units then rescale; unit: rp = sqrt(v) eps")
    common(p)
    p.set_defaults(func=cmd_predict, _sub=p)

    a = sub.add_parser("analyze", help="statistical analyses of a series")
    asub = a.add_subparsers(dest="kind", required=True, parser_class=_Parser)

    def series_opts(sp, default="dv"):
        sp.add_argument("--input", required=True, type=Path)
        sp.add_argument("--series", choices=("dv", "vol", "r"), default=default,
                        help="dv = log-volatility increments")
        sp.add_argument("--segment", type=_int_range, default=None, help="START:LENGTH subsequence")

    c = asub.add_parser("crosscorr", help="return-volatility cross-correlation C_d(j)")
    c.add_argument("--input", required=True, type=Path)
    c.add_argument("--d", type=float, default=2.0)
    c.add_argument("--lags", type=_int_range, default=(-100, 100), help="LO:HI")
    common(c)
    c.set_defaults(func=cmd_crosscorr, _sub=c)

    f = asub.add_parser("fitdecay", help="exponential fit to -C(j) from a crosscorr CSV")
    f.add_argument("--input", required=True, type=Path)
    f.add_argument("--j-min", type=int, default=1)
    f.add_argument("--j-max", type=int, default=60)
    common(f)
    f.set_defaults(func=cmd_fitdecay, _sub=f)

    ac = asub.add_parser("autocorr", help="autocorrelation function")
    series_opts(ac)
    ac.add_argument("--max-lag", type=int, default=50)
    common(ac)
    ac.set_defaults(func=cmd_autocorr, _sub=ac)

    m = asub.add_parser("mfdfa", help="generalized Hurst exponents and singularity spectrum")
    series_opts(m)
    m.add_argument("--qs", type=_float_list, default=None, help="comma-separated q values")
    m.add_argument("--scales", type=_int_list, default=None, help="comma-separated segment sizes")
    m.add_argument("--order", type=int, default=1, help="detrending polynomial degree")
    m.add_argument("--threads", type=int, default=1)
    common(m, "output directory (hq.csv, spectrum.csv, fq.csv)")
    m.set_defaults(func=cmd_mfdfa, _sub=m)

    rh = asub.add_parser("rolling-hurst", help="h(2) over rolling windows")
    series_opts(rh)
    rh.add_argument("--window", type=int, default=1095)
    rh.add_argument("--shift", type=int, default=100)
    rh.add_argument("--scales", type=_int_list, default=None)
    rh.add_argument("--order", type=int, default=1)
    rh.add_argument("--threads", type=int, default=1)
    common(rh)
    rh.set_defaults(func=cmd_rolling_hurst, _sub=rh)
    return parser


def _join_range_flags(argv):
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _RANGE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _apply_config(parser, argv, args):
    """Re-parse with config-file values installed as subparser defaults."""
    sub = args._sub
    cfg = io.read_config(args.config)
    actions = {a.dest: a for a in sub._actions if a.option_strings}
    defaults = {}
    for key, raw in cfg.items():
        action = actions.get(key)
        if action is None or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for '{args.command}'")
        try:
            defaults[key] = action.type(raw) if action.type else raw
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
        if action.required:
            action.required = False
    sub.set_defaults(**defaults)
    args = parser.parse_args(argv)
    missing = [k for k, a in actions.items() if getattr(args, k, None) is None and a.dest in ("out", "data", "params", "input")]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join('--' + m.replace('_', '-') for m in missing)}")
    return args, cfg


def canonical_command(args) -> list[str]:
    """A flag list that reproduces this invocation without any config file."""
    cmd = [args.command]
    if args.command == "analyze":
        cmd.append(args.kind)
    for action in args._sub._actions:
        if not action.option_strings or action.dest in ("help", "config"):
            continue
        value = getattr(args, action.dest)
        if value is None:
            continue
        flag = next(s for s in action.option_strings if s.startswith("--"))
        if isinstance(value, tuple):
            sep = ":" if flag in ("--lags", "--segment") else ","
            value = sep.join(io._fmt(v) for v in value)
        else:
            value = io._fmt(value)
        cmd.append(f"{flag}={value}")
    return cmd


def main(argv=None) -> int:
    argv = _join_range_flags(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = {}
        if args.config is not None:
            args, cfg = _apply_config(parser, argv, args)
    except UsageError as exc:
        print(f"qclvol: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qclvol: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QclVolError as exc:
        print(f"qclvol: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    ctx = {"outputs": [], "extra": {}}
    started = time.perf_counter()
    try:
        args.func(args, ctx)
        inputs = [getattr(args, k) for k in ("data", "params", "input") if getattr(args, k, None) is not None]
        manifest = {
            "artifact": "qclvol",
            "version": __version__,
            "subcommand": args.command if args.command != "analyze" else f"analyze {args.kind}",
            "command": ["qclvol", *canonical_command(args)],
            "parameters": {k: v for k, v in vars(args).items() if not k.startswith("_") and k != "func"},
            "config_file": {"path": str(args.config), "values": cfg} if args.config else None,
            "seed": getattr(args, "seed", None),
            "inputs": {str(p): io.sha256(p) for p in inputs},
            "outputs": {str(p): io.sha256(p) for p in ctx["outputs"]},
            "diagnostics": ctx["extra"],
            "duration_seconds": time.perf_counter() - started,
        }
        io.write_manifest(args.out, manifest)
    except OSError as exc:
        print(f"qclvol: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QclVolError as exc:
        print(f"qclvol: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
