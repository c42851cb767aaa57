"""Command-line driver: simulate maps, single spectra, and fit either back.

Exit codes: 0 ok, 2 input or config error, 3 I/O error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import io as wio
from .config import RunConfig, SweepConfig, load_config, paper_config
from .errors import ConfigError, FormatError, NumericalFailure
from .estimation import fit_map, fit_trace
from .estimation.fits import FitOptions
from .response import sweep, synthesize_map, trace_row

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


_UMASK = os.umask(0)
os.umask(_UMASK)
_NUMERIC_FLAGS = ("--b", "--b-mt", "--snr-db", "--f-span-khz", "--seed")


class CliError(Exception):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


def _load(spec: str | None) -> RunConfig:
    if spec is None or spec == "paper":
        return paper_config()
    try:
        return load_config(spec)
    except ConfigError as exc:
        raise CliError(EXIT_INPUT, f"config error in {spec}: {exc}") from exc
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read config {spec}: {exc}") from exc


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "seed", None) is not None:
        if args.seed < 0:
            raise CliError(EXIT_INPUT, "--seed must be >= 0")
        cfg = cfg.with_seed(args.seed)
    if getattr(args, "snr_db", None) is not None:
        cfg = cfg.with_snr(args.snr_db)
    if getattr(args, "no_noise", False):
        cfg = cfg.with_snr(None)
    span_khz = getattr(args, "f_span_khz", None)
    if span_khz is not None:
        if not span_khz > 0:
            raise CliError(EXIT_INPUT, "--f-span-khz must be > 0")
        s = cfg.sweep
        cfg = RunConfig(cfg.medium, cfg.cavity, SweepConfig(s.b_min_t, s.b_max_t, s.n_b, span_khz * 1e3, s.n_f),
                        cfg.noise, cfg.fit)
    return cfg


def _write_all(files: dict[Path, str]) -> None:
    """Write every file via a temp file and rename, so no half-written outputs remain."""
    staged = []
    try:
        for path, text in files.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            staged.append(tmp)
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.chmod(tmp, 0o666 & ~_UMASK)
        for (path, _), tmp in zip(files.items(), staged):
            os.replace(tmp, path)
    except OSError as exc:
        for tmp in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise CliError(EXIT_IO, f"cannot write output: {exc}") from exc


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from exc


def _fit_options(cfg: RunConfig | None) -> FitOptions:
    if cfg is None:
        return FitOptions()
    return cfg.fit.options(cfg.cavity.sign)


# ----------------------------------------------------------------- commands


def cmd_simulate(args) -> int:
    cfg = _apply_overrides(_load(args.config), args)
    out = Path(args.out)
    summary = Path(args.summary) if args.summary else out.with_name(out.stem + ".sweep.csv")
    b_axis, f_axis = cfg.sweep.b_axis(), cfg.sweep.f_axis()
    tmap = synthesize_map(cfg.medium, cfg.cavity, b_axis, f_axis, cfg.noise.snr_db, cfg.noise.seed, args.workers)
    res = sweep(cfg.medium, cfg.cavity, b_axis, args.workers)
    _write_all({out: wio.map_to_csv(tmap), summary: wio.summary_to_csv(res)})
    i = int(np.argmin(res.splitting))
    print(
        f"map {b_axis.size}x{f_axis.size} -> {out}; summary -> {summary}; "
        f"min splitting {res.splitting[i]:.6g} Hz at b = {b_axis[i] * 1e3:.4g} mT"
    )
    return EXIT_OK


def cmd_spectrum(args) -> int:
    if (args.b is None) == (args.b_mt is None):
        raise CliError(EXIT_INPUT, "give exactly one of --b (tesla) or --b-mt")
    b = args.b if args.b is not None else args.b_mt * 1e-3
    if not np.isfinite(b):
        raise CliError(EXIT_INPUT, "field must be finite")
    cfg = _apply_overrides(_load(args.config), args)
    f_axis = cfg.sweep.f_axis()
    row = trace_row(cfg.medium, cfg.cavity, b, f_axis, cfg.noise.snr_db, cfg.noise.seed, 0)
    out = Path(args.out)
    _write_all({out: wio.trace_to_csv(b, f_axis, row)})
    print(f"trace at b = {b * 1e3:.6g} mT, {f_axis.size} points -> {out}")
    return EXIT_OK


def cmd_fit(args) -> int:
    cfg = _load(args.config) if args.config is not None else None
    opts = _fit_options(cfg)
    f_ref = cfg.cavity.f_c if cfg is not None else 0.0
    text = _read_text(args.input)
    out = Path(args.out)
    try:
        if args.format == "map":
            tmap = wio.parse_map_csv(text, f_ref)
        else:
            b, f_axis, db = wio.parse_trace_csv(text, f_ref)
    except FormatError as exc:
        raise CliError(EXIT_INPUT, f"{args.input}: {exc}") from exc
    try:
        if args.format == "map":
            report = fit_map(tmap, opts)
        else:
            report = fit_trace(f_axis, db, b, opts, f_ref)
    except NumericalFailure as exc:
        partial = {
            "converged": False,
            "error": type(exc).__name__,
            "message": str(exc),
            "diagnostics": exc.diagnostics,
        }
        _write_all({out: wio.report_to_json(partial)})
        raise CliError(EXIT_NUMERIC, f"fit failed ({type(exc).__name__}): {exc}") from exc
    data = report.to_dict()
    _write_all({out: wio.report_to_json(data)})
    b0 = "n/a" if report.b0 is None else f"{report.b0 * 1e3:.4f} mT"
    print(
        f"g = {report.g:.1f} Hz, delta = {report.delta:.1f} Hz, "
        f"g/delta = {report.ratio_g_delta:.3f}, b0 = {b0}"
    )
    return EXIT_OK


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wgdoublet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help):
        sp.add_argument("--config", default="paper", help="JSON config path, or 'paper' for the bundled scenario")
        sp.add_argument("--out", required=True, help=out_help)
        sp.add_argument("--seed", type=int, default=None, help="override the config noise seed")

    s = sub.add_parser("simulate", help="field x frequency transmission map plus sweep summary")
    common(s, "map CSV path")
    s.add_argument("--summary", default=None, help="sweep summary CSV (default <out stem>.sweep.csv)")
    s.add_argument("--snr-db", type=float, default=None, help="override noise SNR in dB")
    s.add_argument("--no-noise", action="store_true", help="disable noise regardless of config")
    s.add_argument("--f-span-khz", type=float, default=None, help="override detuning span in kHz")
    s.add_argument("--workers", type=int, default=None, help="threads for row synthesis")
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("spectrum", help="single transmission trace at one field")
    common(t, "trace CSV path")
    t.add_argument("--b", type=float, default=None, help="field in tesla")
    t.add_argument("--b-mt", type=float, default=None, help="field in mT")
    t.add_argument("--snr-db", type=float, default=None)
    t.add_argument("--no-noise", action="store_true")
    t.add_argument("--f-span-khz", type=float, default=None)
    t.set_defaults(func=cmd_spectrum)

    f = sub.add_parser("fit", help="recover g, delta, b0 from a map or trace CSV")
    f.add_argument("input", help="map or trace CSV")
    f.add_argument("--config", default=None, help="config supplying f_c, readout sign and fit settings")
    f.add_argument("--out", required=True, help="FitReport JSON path")
    f.add_argument("--format", choices=("map", "trace"), default="map")
    f.add_argument("--seed", type=int, default=None, help="accepted for symmetry; fits are deterministic")
    f.set_defaults(func=cmd_fit)
    return p


def _join_negative_values(argv):
    # argparse mistakes values like -0.5e-3 for options
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _NUMERIC_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and (nxt[1:2].isdigit() or nxt[1:2] == "."):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_negative_values(argv))
    try:
        return args.func(args)
    except CliError as exc:
        print(f"wgdoublet: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
