"""Command-line front end.

Subcommands: forward, laplace, spectrum, nonuniq, propc, reconstruct.
Options can come from a key=value config file (--config); explicit flags win.
Every command writes CSV/report files into --outdir and is deterministic
given its options and seed. --gnuplot additionally emits plot scripts.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import core, heat_forward, laplace, property_c, reconstruct, spectrum
from ._backend import BACKEND


def _add_common(p):
    p.add_argument("--config", help="key=value option file; explicit flags override it")
    p.add_argument("--outdir", default=".", help="output directory (created if missing)")
    p.add_argument("--gnuplot", action="store_true", help="emit gnuplot scripts next to CSVs")


def _add_grid(p, nx=401, nt=4000, T=5.0):
    p.add_argument("--nx", type=int, default=nx, help="space nodes")
    p.add_argument("--nt", type=int, default=nt, help="time steps")
    p.add_argument("--T", type=float, default=T, help="final time")


def _add_lambda_grid(p):
    p.add_argument("--lmin", type=float, default=laplace.DEFAULT_LAMBDA_MIN)
    p.add_argument("--lmax", type=float, default=laplace.DEFAULT_LAMBDA_MAX)
    p.add_argument("--nl", type=int, default=laplace.DEFAULT_LAMBDA_COUNT)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")


def _lambda_grid(args) -> np.ndarray:
    if args.spacing == "log":
        return np.geomspace(args.lmin, args.lmax, args.nl)
    return np.linspace(args.lmin, args.lmax, args.nl)


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="heatlab",
        description="1D variable-conductivity heat lab: forward solves, flux data, "
                    "spectra, completeness probes, reconstruction",
    )
    parser.add_argument("--version", action="version", version=f"heatlab ({BACKEND} kernels)")
    subs = parser.add_subparsers(dest="command", required=True)
    table = {}

    p = subs.add_parser("forward", help="forward solve; writes g.csv, h.csv, field_summary.txt")
    p.add_argument("--profile", default="const:1")
    p.add_argument("--drive", default="step:1")
    _add_grid(p)
    p.add_argument("--no-damp-first", action="store_true",
                   help="skip the implicit-Euler first step")
    _add_common(p)
    table["forward"] = p

    p = subs.add_parser("laplace", help="transform a time series; writes transform.csv")
    p.add_argument("--series", help="t,value CSV to transform")
    p.add_argument("--drive", help="named drive to sample instead of --series")
    p.add_argument("--nt", type=int, default=4000)
    p.add_argument("--T", type=float, default=40.0)
    p.add_argument("--tail", choices=("constant", "zero"), default="constant")
    _add_lambda_grid(p)
    _add_common(p)
    table["laplace"] = p

    p = subs.add_parser("spectrum", help="Neumann eigenvalues; writes spectrum.csv")
    p.add_argument("--profile", default="const:1")
    p.add_argument("--n", type=int, default=10, help="eigenvalue count (lam_0=0 included)")
    _add_common(p)
    table["spectrum"] = p

    p = subs.add_parser("nonuniq", help="mirror-profile flux comparison; writes nonuniq_report.txt")
    p.add_argument("--profile", default="affine:1,2")
    p.add_argument("--drive", default="step:1")
    _add_grid(p)
    _add_lambda_grid(p)
    _add_common(p)
    table["nonuniq"] = p

    p = subs.add_parser("propc", help="completeness probe; writes residuals.csv")
    p.add_argument("--profile1", default="const:1")
    p.add_argument("--profile2", default="const:1")
    p.add_argument("--target", default="poly:x*(1-x)",
                   help="poly:<expression in x> or a x,a CSV path")
    _add_lambda_grid(p)
    _add_common(p)
    table["propc"] = p

    p = subs.add_parser("reconstruct", help="fit a profile to flux data; writes "
                                            "recovered_profile.csv and run_report.txt")
    p.add_argument("--end", choices=("right", "left"), default="right")
    p.add_argument("--truth", help="profile generating synthetic data")
    p.add_argument("--data", help="t,value CSV of measured flux (alternative to --truth)")
    p.add_argument("--drive", default="step:1")
    p.add_argument("--init", default="const:1")
    p.add_argument("--m", type=int, default=9)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--max-iters", type=int, default=40)
    p.add_argument("--misfit-tol", type=float, default=1e-16)
    p.add_argument("--noise", type=float, default=0.0,
                   help="uniform noise amplitude as a fraction of max|data|")
    p.add_argument("--seed", type=int, default=0)
    _add_grid(p, nx=201, nt=800, T=5.0)
    _add_common(p)
    table["reconstruct"] = p

    return parser, table


def _load_config_tokens(path: str) -> list[str]:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"no such config file: {p}")
    tokens = []
    for lineno, raw in enumerate(p.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{p}:{lineno}: expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if val.lower() in ("true", "yes", "on"):
            tokens.append(flag)
        elif val.lower() in ("false", "no", "off"):
            pass
        else:
            tokens.extend([flag, val])
    return tokens


def _merge_config(argv: list[str]) -> list[str]:
    # inject config tokens right after the subcommand so explicit flags win
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ValueError("--config needs a file argument")
    tokens = _load_config_tokens(argv[i + 1])
    sub_at = next((k for k, tok in enumerate(argv) if not tok.startswith("-")), None)
    if sub_at is None:
        return argv
    return argv[: sub_at + 1] + tokens + argv[sub_at + 1:]


def _outdir(args) -> Path:
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _gnuplot_script(path: Path, csv_name: str, title: str, logy: bool = False) -> None:
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{title}'",
    ]
    if logy:
        lines.append("set logscale y")
    lines.append(f"plot '{csv_name}' using 1:2 with lines")
    path.write_text("\n".join(lines) + "\n")


def _emit_plots(args, out: Path, csv_titles: dict[str, str], logy=()) -> None:
    if not args.gnuplot:
        return
    for name, title in csv_titles.items():
        _gnuplot_script(out / (Path(name).stem + ".gp"), name, title, logy=name in logy)


def _cmd_forward(args) -> int:
    a = core.make_profile(args.profile)
    drive = heat_forward.make_drive(args.drive)
    grid = core.SpaceTimeGrid(nx=args.nx, nt=args.nt, T_final=args.T)
    field = heat_forward.solve_forward(a, drive, grid,
                                       damp_first_step=not args.no_damp_first)
    g = heat_forward.flux_right(field, a)
    h = heat_forward.flux_left(field, a)
    out = _outdir(args)
    g.to_csv(out / "g.csv")
    h.to_csv(out / "h.csv")
    summary = [
        f"profile: {a.kind}",
        f"drive: {drive.label}",
        f"grid: nx={grid.nx} nt={grid.nt} T={grid.T_final!r}",
        f"kernel backend: {BACKEND}",
        f"u range: [{float(field.u.min())!r}, {float(field.u.max())!r}]",
        f"final g: {float(g.y[-1])!r}",
        f"final h: {float(h.y[-1])!r}",
        f"steady flux estimate 1/resistance: {1.0 / core.thermal_resistance(a)!r}",
    ]
    (out / "field_summary.txt").write_text("\n".join(summary) + "\n")
    _emit_plots(args, out, {"g.csv": "right-end flux g(t)", "h.csv": "left-end flux h(t)"})
    print(f"wrote {out / 'g.csv'}, {out / 'h.csv'}, {out / 'field_summary.txt'}")
    return 0


def _cmd_laplace(args) -> int:
    if args.series:
        series = core.TimeSeries.from_csv(args.series)
    elif args.drive:
        drive = heat_forward.make_drive(args.drive)
        t = np.linspace(0.0, args.T, args.nt + 1)
        series = core.TimeSeries(t, drive(t))
    else:
        raise ValueError("laplace needs --series or --drive")
    sample = laplace.laplace_transform(series, _lambda_grid(args), tail=args.tail)
    out = _outdir(args)
    core.write_csv(out / "transform.csv", ("lambda", "value"),
                   (sample.lambdas, sample.values))
    _emit_plots(args, out, {"transform.csv": "Laplace transform"}, logy=("transform.csv",))
    print(f"wrote {out / 'transform.csv'}")
    return 0


def _cmd_spectrum(args) -> int:
    a = core.make_profile(args.profile)
    sp = spectrum.neumann_spectrum(a, args.n)
    out = _outdir(args)
    core.write_csv(out / "spectrum.csv", ("j", "lambda"),
                   (np.arange(sp.eigenvalues.size), sp.eigenvalues))
    for w in sp.gap_warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit_plots(args, out, {"spectrum.csv": "Neumann eigenvalues"})
    print(f"wrote {out / 'spectrum.csv'}")
    return 0


def _cmd_nonuniq(args) -> int:
    a = core.make_profile(args.profile)
    grid = core.SpaceTimeGrid(nx=args.nx, nt=args.nt, T_final=args.T)
    rep = reconstruct.ambiguity_experiment(a, args.drive, grid, lambdas=_lambda_grid(args))
    out = _outdir(args)
    (out / "nonuniq_report.txt").write_text(rep.to_text())
    print(rep.to_text(), end="")
    print(f"wrote {out / 'nonuniq_report.txt'}")
    return 0


def _parse_target(spec: str):
    text = spec.strip()
    if text.lower().endswith(".csv") or "/" in text:
        xs, vals = core.read_csv(text, ("x", "a"))
        return lambda x: np.interp(x, xs, vals)
    if text.startswith("poly:"):
        expr = text[len("poly:"):]
        allowed = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt,
                   "pi": np.pi, "abs": np.abs, "log": np.log}

        def fn(x, _expr=expr, _allowed=allowed):
            return eval(_expr, {"__builtins__": {}}, {**_allowed, "x": x})

        return fn
    raise ValueError(f"unrecognized target spec {spec!r}")


def _cmd_propc(args) -> int:
    a1 = core.make_profile(args.profile1)
    a2 = core.make_profile(args.profile2)
    target = _parse_target(args.target)
    dic = property_c.build_product_dictionary(a1, a2, _lambda_grid(args))
    res = property_c.completeness_residual(dic, target)
    out = _outdir(args)
    core.write_csv(out / "residuals.csv", ("N", "residual"),
                   (np.arange(1, res.residuals.size + 1), res.residuals))
    if res.dropped:
        print(f"dropped near-collinear columns (0-based): {list(res.dropped)}")
    _emit_plots(args, out, {"residuals.csv": "completeness residual r_N"},
                logy=("residuals.csv",))
    print(f"wrote {out / 'residuals.csv'}")
    return 0


def _cmd_reconstruct(args) -> int:
    grid = core.SpaceTimeGrid(nx=args.nx, nt=args.nt, T_final=args.T)
    cfg = reconstruct.ReconstructionConfig(
        m=args.m, alpha=args.alpha, max_iters=args.max_iters,
        misfit_tol=args.misfit_tol, data_end=args.end, init=args.init,
    )
    truth = core.make_profile(args.truth) if args.truth else None
    if args.data:
        data = core.TimeSeries.from_csv(args.data)
    elif truth is not None:
        field = heat_forward.solve_forward(truth, args.drive, grid)
        extract = heat_forward.flux_right if args.end == "right" else heat_forward.flux_left
        data = extract(field, truth)
    else:
        raise ValueError("reconstruct needs --truth or --data")
    if args.noise > 0.0:
        rng = np.random.default_rng(args.seed)
        amp = args.noise * np.max(np.abs(data.y))
        data = core.TimeSeries(data.t, data.y + rng.uniform(-amp, amp, data.y.shape))

    res = reconstruct.reconstruct(data, args.drive, grid, cfg)
    out = _outdir(args)
    core.profile_to_csv(res.profile, out / "recovered_profile.csv")
    lines = [
        f"data end: {args.end}",
        f"m: {args.m}  alpha: {args.alpha!r}  noise: {args.noise!r}  seed: {args.seed}",
        f"init: {args.init}",
        f"converged: {res.converged} ({res.message})",
        f"final misfit: {res.final_misfit!r}",
        "misfit history:",
    ]
    lines += [f"  {k}: {float(v)!r}" for k, v in enumerate(res.misfit_history)]
    if truth is not None:
        xs = np.linspace(0.0, 1.0, 1001)
        num = np.trapezoid((res.profile(xs) - truth(xs)) ** 2, xs)
        den = np.trapezoid(truth(xs) ** 2, xs)
        lines.append(f"relative L2 error vs truth: {float(np.sqrt(num / den))!r}")
    (out / "run_report.txt").write_text("\n".join(lines) + "\n")
    _emit_plots(args, out, {"recovered_profile.csv": "recovered conductivity"})
    print(f"wrote {out / 'recovered_profile.csv'}, {out / 'run_report.txt'}")
    return 0


_DISPATCH = {
    "forward": _cmd_forward,
    "laplace": _cmd_laplace,
    "spectrum": _cmd_spectrum,
    "nonuniq": _cmd_nonuniq,
    "propc": _cmd_propc,
    "reconstruct": _cmd_reconstruct,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, _ = build_parser()
    try:
        argv = _merge_config(argv)
        args = parser.parse_args(argv)
        return _DISPATCH[args.command](args)
    except (ValueError, FileNotFoundError, spectrum.SpectrumShortfallError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
