"""Run configuration: JSON loading, validation with dotted key paths, serialisation."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError, WgDoubletError
from .estimation.fits import FitOptions
from .medium import EsrLine, MediumModel, PerturbationTensor
from .response import CavityModel


@dataclass(frozen=True)
class SweepConfig:
    b_min_t: float
    b_max_t: float
    n_b: int
    f_span_hz: float
    n_f: int

    def b_axis(self) -> np.ndarray:
        if self.n_b == 1:
            return np.array([self.b_min_t])
        return np.linspace(self.b_min_t, self.b_max_t, self.n_b)

    def f_axis(self) -> np.ndarray:
        return np.linspace(-0.5 * self.f_span_hz, 0.5 * self.f_span_hz, self.n_f)


@dataclass(frozen=True)
class NoiseConfig:
    snr_db: float | None = None
    seed: int = 0


@dataclass(frozen=True)
class FitConfig:
    min_prominence_db: float = 10.0
    max_iter: int = 200
    tol: float = 1e-10
    smooth_points: int = 21

    def options(self, extremum: str = "peak") -> FitOptions:
        return FitOptions(
            min_prominence_db=self.min_prominence_db,
            max_iter=self.max_iter,
            tol=self.tol,
            smooth=self.smooth_points,
            extremum=extremum,
        )


@dataclass(frozen=True)
class RunConfig:
    medium: MediumModel
    cavity: CavityModel
    sweep: SweepConfig
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    fit: FitConfig = field(default_factory=FitConfig)

    def with_seed(self, seed: int) -> "RunConfig":
        return RunConfig(self.medium, self.cavity, self.sweep, NoiseConfig(self.noise.snr_db, int(seed)), self.fit)

    def with_snr(self, snr_db: float | None) -> "RunConfig":
        return RunConfig(self.medium, self.cavity, self.sweep, NoiseConfig(snr_db, self.noise.seed), self.fit)

    def to_dict(self) -> dict:
        def tensor(t):
            return {"m11": t.m11, "m21_re": t.m21.real, "m21_im": t.m21.imag}

        m, c, s = self.medium, self.cavity, self.sweep
        return {
            "medium": {
                "epsilon": m.epsilon,
                "mu": m.mu,
                "eta": tensor(m.eta),
                "nu_static": tensor(m.nu_static),
                "lines": [
                    {"f0_hz": ln.f0, "slope_hz_per_t": ln.slope, "gamma_hz": ln.gamma, "chi0": ln.chi0, "label": ln.label}
                    for ln in m.lines
                ],
                "coupling": m.coupling,
            },
            "cavity": {
                "f_c_hz": c.f_c,
                "delta0_hz": c.delta0,
                "family": c.family.value,
                "sign": c.sign,
                "corotating": c.corotating,
                "amplitude": c.amplitude,
                "relative_phase_rad": c.relative_phase,
            },
            "sweep": {"b_min_t": s.b_min_t, "b_max_t": s.b_max_t, "n_b": s.n_b, "f_span_hz": s.f_span_hz, "n_f": s.n_f},
            "noise": {"snr_db": self.noise.snr_db, "seed": self.noise.seed},
            "fit": {
                "min_prominence_db": self.fit.min_prominence_db,
                "max_iter": self.fit.max_iter,
                "tol": self.fit.tol,
                "smooth_points": self.fit.smooth_points,
            },
        }


# ------------------------------------------------------------------ parsing


_REQUIRED = object()


class _Section:
    """Typed accessor over one JSON object that tracks its key path."""

    def __init__(self, data, path):
        if not isinstance(data, dict):
            raise ConfigError(path, "expected an object")
        self.data = data
        self.path = path
        self.seen = set()

    def key(self, name):
        return f"{self.path}.{name}" if self.path else name

    def _get(self, name, default):
        self.seen.add(name)
        if name not in self.data:
            if default is _REQUIRED:
                raise ConfigError(self.key(name), "missing required key")
            return default
        return self.data[name]

    def number(self, name, default=None, *, gt=None, ge=None, allow_none=False):
        v = self._get(name, default)
        if v is None and allow_none:
            return None
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(self.key(name), f"expected a number, got {v!r}")
        v = float(v)
        if not math.isfinite(v):
            raise ConfigError(self.key(name), "must be finite")
        if gt is not None and not v > gt:
            raise ConfigError(self.key(name), f"must be > {gt}, got {v!r}")
        if ge is not None and not v >= ge:
            raise ConfigError(self.key(name), f"must be >= {ge}, got {v!r}")
        return v

    def integer(self, name, default=None, *, ge=None):
        v = self._get(name, default)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(self.key(name), f"expected an integer, got {v!r}")
        if ge is not None and v < ge:
            raise ConfigError(self.key(name), f"must be >= {ge}, got {v!r}")
        return v

    def choice(self, name, options, default=None):
        v = self._get(name, default)
        if v not in options:
            raise ConfigError(self.key(name), f"must be one of {sorted(options)}, got {v!r}")
        return v

    def text(self, name, default=""):
        v = self._get(name, default)
        if not isinstance(v, str):
            raise ConfigError(self.key(name), f"expected a string, got {v!r}")
        return v

    def section(self, name, required=True):
        v = self._get(name, _REQUIRED if required else {})
        return _Section(v, self.key(name))

    def finish(self):
        extra = sorted(set(self.data) - self.seen)
        if extra:
            raise ConfigError(self.key(extra[0]), "unknown key")


def _tensor(sec: _Section) -> PerturbationTensor:
    m11 = sec.number("m11", 0.0)
    m21 = complex(sec.number("m21_re", 0.0), sec.number("m21_im", 0.0))
    sec.finish()
    try:
        return PerturbationTensor(m11, m21)
    except WgDoubletError as exc:
        raise ConfigError(sec.path, str(exc)) from exc


def _medium(sec: _Section) -> MediumModel:
    eps = sec.number("epsilon", 1.0, gt=0)
    mu = sec.number("mu", 1.0, gt=0)
    eta = _tensor(sec.section("eta", required=False))
    nu = _tensor(sec.section("nu_static", required=False))
    raw_lines = sec._get("lines", [])
    if not isinstance(raw_lines, list):
        raise ConfigError(sec.key("lines"), "expected an array")
    lines = []
    for i, raw in enumerate(raw_lines):
        ls = _Section(raw, f"{sec.key('lines')}[{i}]")
        lines.append(
            EsrLine(
                f0=ls.number("f0_hz", _REQUIRED, gt=0),
                slope=ls.number("slope_hz_per_t", _REQUIRED),
                gamma=ls.number("gamma_hz", _REQUIRED, gt=0),
                chi0=ls.number("chi0", _REQUIRED, ge=0),
                label=ls.text("label", ""),
            )
        )
        ls.finish()
    coupling = sec.number("coupling", 0.0)
    sec.finish()
    return MediumModel(eps, mu, eta, nu, tuple(lines), coupling)


def _cavity(sec: _Section) -> CavityModel:
    cav = CavityModel(
        f_c=sec.number("f_c_hz", _REQUIRED, gt=0),
        delta0=sec.number("delta0_hz", _REQUIRED, gt=0),
        family=sec.choice("family", {"WGH", "WGE"}, "WGH"),
        sign=sec.choice("sign", {"peak", "dip"}, "peak"),
        corotating=sec.choice("corotating", {"R", "L"}, "R"),
        amplitude=sec.number("amplitude", 1.0, gt=0),
        relative_phase=sec.number("relative_phase_rad", 0.0),
    )
    sec.finish()
    return cav


def _sweep(sec: _Section) -> SweepConfig:
    sw = SweepConfig(
        b_min_t=sec.number("b_min_t", _REQUIRED),
        b_max_t=sec.number("b_max_t", _REQUIRED),
        n_b=sec.integer("n_b", _REQUIRED, ge=1),
        f_span_hz=sec.number("f_span_hz", _REQUIRED, gt=0),
        n_f=sec.integer("n_f", _REQUIRED, ge=2),
    )
    if sw.n_b > 1 and not sw.b_min_t < sw.b_max_t:
        raise ConfigError(sec.key("b_max_t"), "must exceed b_min_t when n_b > 1")
    sec.finish()
    return sw


def _noise(sec: _Section) -> NoiseConfig:
    nz = NoiseConfig(
        snr_db=sec.number("snr_db", None, allow_none=True),
        seed=sec.integer("seed", 0, ge=0),
    )
    sec.finish()
    return nz


def _fit(sec: _Section) -> FitConfig:
    fc = FitConfig(
        min_prominence_db=sec.number("min_prominence_db", 10.0, gt=0),
        max_iter=sec.integer("max_iter", 200, ge=1),
        tol=sec.number("tol", 1e-10, ge=0),
        smooth_points=sec.integer("smooth_points", 21, ge=1),
    )
    sec.finish()
    return fc


def config_from_dict(data) -> RunConfig:
    root = _Section(data, "")
    medium = _medium(root.section("medium"))
    cavity = _cavity(root.section("cavity"))
    sweep = _sweep(root.section("sweep"))
    noise = _noise(root.section("noise", required=False))
    fit = _fit(root.section("fit", required=False))
    root.finish()
    return RunConfig(medium, cavity, sweep, noise, fit)


def parse_config(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"line {exc.lineno}: {exc.msg}") from exc
    return config_from_dict(data)


def load_config(path) -> RunConfig:
    """Read and validate a JSON config. OSError propagates for I/O failures."""
    return parse_config(Path(path).read_text())


def paper_config_text() -> str:
    return resources.files("wgdoublet").joinpath("data/paper.json").read_text()


def paper_config() -> RunConfig:
    return parse_config(paper_config_text())
