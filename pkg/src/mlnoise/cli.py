"""Command-line interface: generate | acf | acft | msd | validate.

Exit codes: 0 success, 1 validation failure, 2 invalid parameters,
3 no valid embedding length, 4 malformed input file.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .errors import DomainError, InputFormatError, NoValidLength
from .estimators import acf_empirical, integrate_trajectories, msd_empirical
from .generator import SeedPolicy, generate, iter_generate
from .io import RunManifest, read_batch, stream_batch_bin, write_batch_csv, write_manifest, write_series_csv
from .model import MLParams, acf_theoretical, msd_theoretical
from .spectral import DEFAULT_LADDER_CAP, plan
from .svg import line_chart

EXIT_VALIDATE = 1
EXIT_PARAMS = 2
EXIT_NO_LENGTH = 3
EXIT_INPUT = 4


def _threads_default() -> int:
    raw = os.environ.get("MLN_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"MLN_THREADS must be a positive integer, got {raw!r}") from None
    return n


def _positive_int(name, v):
    if v is None:
        return None
    if v < 1:
        raise DomainError(f"{name} must be a positive integer, got {v}")
    return v


def _add_params(p: argparse.ArgumentParser, required: bool = True):
    p.add_argument("--c", type=float, required=required, help="amplitude C (lag-0 variance is C/tau**lambda)")
    p.add_argument("--lambda", dest="lam", type=float, required=required, help="exponent in (0, 2)")
    p.add_argument("--lamda", dest="lam", type=float, help=argparse.SUPPRESS)
    p.add_argument("--tau", type=float, required=required, help="correlation time in (0, 10000] steps")


def _params(args) -> MLParams:
    missing = [f for f, v in (("--c", args.c), ("--lambda", args.lam), ("--tau", args.tau)) if v is None]
    if missing:
        raise DomainError(f"missing parameter flags: {' '.join(missing)}")
    return MLParams(args.c, args.lam, args.tau)


def _threads(args) -> int:
    n = args.threads if args.threads is not None else _threads_default()
    return _positive_int("--threads", n)


def _write_svg(path, series, **kw):
    Path(path).write_text(line_chart(series, **kw))


def cmd_generate(args) -> int:
    params = _params(args)
    N = _positive_int("--n", args.n)
    T = _positive_int("--t", args.t)
    if T < 2:
        raise DomainError(f"--t must be at least 2, got {T}")
    threads = _threads(args)
    fmt = args.format or ("bin" if str(args.out).endswith(".bin") else "csv")
    p = plan(params, T, ladder_cap=args.ladder_cap)
    seed = SeedPolicy(args.seed).resolve()
    manifest = RunManifest("generate", params.as_dict(), N, T, seed=seed, T_opt=p.T_opt, version=__version__,
                           extra={"format": fmt})
    if fmt == "bin":
        stream_batch_bin(args.out, N, T, iter_generate(p, N, T, seed, threads))
    else:
        write_batch_csv(args.out, generate(p, N, T, seed=seed, threads=threads).data, manifest)
    write_manifest(args.out, manifest)
    print(f"wrote {N} x {T} batch to {args.out} (T_opt={p.T_opt}, seed={seed})")
    return 0


def _input_params(manifest):
    if manifest and manifest.get("params"):
        return manifest["params"]
    return None


def cmd_acf(args) -> int:
    data, src = read_batch(args.input)
    threads = _threads(args)
    series = acf_empirical(data, args.tmax, args.dt, workers=threads, mode=args.mode)
    manifest = RunManifest("acf", _input_params(src), data.shape[0], data.shape[1], args.tmax, args.dt,
                           seed=(src or {}).get("seed"), T_opt=(src or {}).get("T_opt"), version=__version__,
                           extra={"input": str(args.input), "estimator": series.meta["estimator"]})
    write_series_csv(args.out, series.lags, series.values, ("lag", "acf"), manifest)
    write_manifest(args.out, manifest)
    if args.svg:
        plots = [("empirical", series.lags, series.values)]
        par = _input_params(src)
        if par:
            theo = acf_theoretical(MLParams(par["C"], par["lambda"], par["tau"]), args.tmax, args.dt)
            plots.append(("theoretical", theo.lags, theo.values))
        _write_svg(args.svg, plots, title="autocorrelation", ylabel="C(t)", markers=True)
    print(f"wrote {len(series.lags)} lags to {args.out}")
    return 0


def cmd_acft(args) -> int:
    params = _params(args)
    series = acf_theoretical(params, args.tmax, args.dt)
    manifest = RunManifest("acft", params.as_dict(), tmax=args.tmax, dt=args.dt, version=__version__)
    write_series_csv(args.out, series.lags, series.values, ("lag", "acf"), manifest)
    write_manifest(args.out, manifest)
    if args.svg:
        _write_svg(args.svg, [("theoretical", series.lags, series.values)], title="autocorrelation", ylabel="C(t)")
    print(f"wrote {len(series.lags)} lags to {args.out}")
    return 0


def cmd_msd(args) -> int:
    if args.input:
        data, src = read_batch(args.input)
        series = msd_empirical(integrate_trajectories(data), args.tmax, args.dt)
        manifest = RunManifest("msd", _input_params(src), data.shape[0], data.shape[1], args.tmax, args.dt,
                               seed=(src or {}).get("seed"), T_opt=(src or {}).get("T_opt"), version=__version__,
                               extra={"input": str(args.input), "kind": "empirical"})
    else:
        params = _params(args)
        series = msd_theoretical(params, args.tmax, args.dt)
        manifest = RunManifest("msd", params.as_dict(), tmax=args.tmax, dt=args.dt, version=__version__,
                               extra={"kind": "theoretical"})
    write_series_csv(args.out, series.times, series.values, ("time", "msd"), manifest)
    write_manifest(args.out, manifest)
    if args.svg:
        _write_svg(args.svg, [(series.kind, series.times, series.values)], title="mean squared displacement",
                   ylabel="MSD(t)", loglog=True)
    print(f"wrote {len(series.times)} times to {args.out}")
    return 0


def cmd_validate(args) -> int:
    from .validation import DEFAULT_SEED, run_all

    threads = _threads(args)
    seed = DEFAULT_SEED if args.seed is None else args.seed
    print(f"mlnoise {__version__} validation (seed={seed}, {'quick' if args.quick else 'full'})")
    rows = run_all(quick=args.quick, seed=seed, workers=threads, tol_scale=args.tol_scale,
                   progress=lambda r: print(r.line(), flush=True))
    failed = [r for r in rows if not r.passed]
    print(f"{len(rows) - len(failed)}/{len(rows)} rows passed")
    if failed:
        print("failing rows:")
        for r in failed:
            print("  " + r.line())
        return EXIT_VALIDATE
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlnoise", description="Mittag-Leffler correlated Gaussian noise")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a noise batch")
    g.add_argument("--n", type=int, required=True, help="number of sequences")
    g.add_argument("--t", type=int, required=True, help="sequence length")
    _add_params(g, required=False)
    g.add_argument("--seed", type=int, default=None, help="master seed (default: system entropy)")
    g.add_argument("--out", default="noise.csv")
    g.add_argument("--format", choices=("csv", "bin"), default=None, help="default: from --out suffix, else csv")
    g.add_argument("--threads", type=int, default=None, help="worker threads (default: $MLN_THREADS or 1)")
    g.add_argument("--ladder-cap", type=int, default=DEFAULT_LADDER_CAP, help="largest embedding length tried")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("acf", help="empirical autocorrelation of a generated batch")
    a.add_argument("--input", required=True)
    a.add_argument("--tmax", type=int, required=True)
    a.add_argument("--dt", type=int, default=1)
    a.add_argument("--mode", choices=("time", "ensemble"), default="time")
    a.add_argument("--threads", type=int, default=None)
    a.add_argument("--out", default="acf.csv")
    a.add_argument("--svg", default=None)
    a.set_defaults(func=cmd_acf)

    t = sub.add_parser("acft", help="theoretical autocorrelation")
    _add_params(t, required=False)
    t.add_argument("--tmax", type=int, required=True)
    t.add_argument("--dt", type=int, default=1)
    t.add_argument("--out", default="acft.csv")
    t.add_argument("--svg", default=None)
    t.set_defaults(func=cmd_acft)

    m = sub.add_parser("msd", help="MSD: empirical with --input, theoretical from the parameter flags")
    m.add_argument("--input", default=None)
    _add_params(m, required=False)
    m.add_argument("--tmax", type=int, required=True)
    m.add_argument("--dt", type=int, default=1)
    m.add_argument("--threads", type=int, default=None)
    m.add_argument("--out", default="msd.csv")
    m.add_argument("--svg", default=None)
    m.set_defaults(func=cmd_msd)

    v = sub.add_parser("validate", help="run the acceptance checks")
    v.add_argument("--quick", action="store_true", help="N=200 instead of 1000 for statistical rows")
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--threads", type=int, default=None)
    v.add_argument("--tol-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoValidLength as exc:
        print(f"mlnoise: error: {exc}", file=sys.stderr)
        return EXIT_NO_LENGTH
    except InputFormatError as exc:
        print(f"mlnoise: error: malformed input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        print(f"mlnoise: error: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
