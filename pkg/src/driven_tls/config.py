"""Scenario files: one INI-style ``[scenario]`` section per file.

    [scenario]
    omega = 10
    chi1 = bessel_zero(0, 1)
    chi2 = 0
    epsilons = 0.01, 0.10, 0.20
    order = 6
    mode_cutoff = 40
    t_end = 1000 Tomega
    samples = 2001
    oracle = off
    oracle_window = 10000
    outputs = P, N, U, omega_summary
"""

import configparser
import math
import re
from dataclasses import dataclass

from .bessel import find_bessel_zero
from .errors import ConfigError
from .fourier import DEFAULT_MODES

OUTPUT_KINDS = ("P", "N", "U", "bloch", "omega_summary")
ORACLE_WINDOW_CAP = 1e4  # in driving periods
_BESSEL_ZERO = re.compile(r"^\s*bessel_zero\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
# 'Tomega' = driving period, 'TOmega' = secular period; case matters
_TIME = re.compile(r"^\s*([-+0-9.eE]+)\s*(Tomega|TOmega)?\s*$")


@dataclass(frozen=True)
class TimeSpan:
    value: float
    unit: str  # "abs", "Tomega" or "TOmega"

    def resolve(self, T_omega, T_Omega):
        if self.unit == "Tomega":
            return self.value * T_omega
        if self.unit == "TOmega":
            return self.value * T_Omega
        return self.value


@dataclass(frozen=True)
class ScenarioConfig:
    omega: float
    chi1: float
    chi2: float
    epsilons: tuple
    order: int = None
    mode_cutoff: int = DEFAULT_MODES
    t_end: TimeSpan = TimeSpan(1.0, "TOmega")
    samples: int = 1001
    oracle: str = "auto"  # on / off / auto
    oracle_window: float = ORACLE_WINDOW_CAP
    outputs: tuple = ("P", "N", "U", "omega_summary")
    chi1_text: str = None

    def __post_init__(self):
        if not self.epsilons:
            raise ConfigError("epsilons must be a non-empty list")
        if self.samples < 2:
            raise ConfigError("samples must be at least 2", samples=self.samples)
        if self.chi1 < 0:
            raise ConfigError("chi1 must be non-negative", chi1=self.chi1)
        if not self.omega > 0:
            raise ConfigError("omega must be positive", omega=self.omega)
        if self.order is not None and self.order < 1:
            raise ConfigError("order must be a positive integer", order=self.order)
        if self.mode_cutoff < 1:
            raise ConfigError("mode_cutoff must be a positive integer")
        if self.oracle not in ("on", "off", "auto"):
            raise ConfigError("oracle must be on, off or auto", oracle=self.oracle)
        if not 0 < self.oracle_window <= ORACLE_WINDOW_CAP:
            raise ConfigError("oracle_window must lie in (0, 1e4] driving periods")
        bad = [o for o in self.outputs if o not in OUTPUT_KINDS]
        if bad:
            raise ConfigError("unknown output kinds", unknown=bad)

    @property
    def phi(self):
        return self.chi1 * self.omega / 2.0

    @property
    def F0(self):
        return self.chi2 * self.omega / 2.0

    def replace(self, **kw):
        fields = dict(self.__dict__)
        fields.update(kw)
        return ScenarioConfig(**fields)


def parse_chi1(text):
    m = _BESSEL_ZERO.match(text)
    if m:
        n, k = int(m.group(1)), int(m.group(2))
        if k < 1:
            raise ConfigError("bessel_zero index k starts at 1", text=text)
        return find_bessel_zero(n, k)
    return _float(text, "chi1")


def parse_time(text):
    m = _TIME.match(text)
    if not m:
        raise ConfigError("t_end must be a number optionally followed by Tomega or TOmega", t_end=text)
    value = _float(m.group(1), "t_end")
    if not value > 0:
        raise ConfigError("t_end must be positive", t_end=text)
    return TimeSpan(value, m.group(2) or "abs")


def _float(text, key):
    try:
        x = float(text)
    except ValueError:
        raise ConfigError(f"{key} is not a number", value=text) from None
    if not math.isfinite(x):
        raise ConfigError(f"{key} must be finite", value=text)
    return x


def _int(text, key):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key} is not an integer", value=text) from None


def _list(text):
    return tuple(s.strip() for s in text.replace(";", ",").split(",") if s.strip())


def parse_config(text):
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("malformed config", detail=str(exc)) from None
    if not cp.has_section("scenario"):
        raise ConfigError("missing [scenario] section")
    sec = cp["scenario"]
    known = {
        "omega", "chi1", "chi2", "epsilons", "order", "mode_cutoff",
        "t_end", "samples", "oracle", "oracle_window", "outputs",
    }
    extra = sorted(set(sec) - known)
    if extra:
        raise ConfigError("unknown keys", keys=extra)
    for key in ("omega", "chi1", "epsilons"):
        if key not in sec:
            raise ConfigError(f"missing required key {key!r}")
    kw = {
        "omega": _float(sec["omega"], "omega"),
        "chi1": parse_chi1(sec["chi1"]),
        "chi1_text": sec["chi1"].strip(),
        "chi2": _float(sec.get("chi2", "0"), "chi2"),
        "epsilons": tuple(_float(e, "epsilons") for e in _list(sec["epsilons"])),
    }
    if "order" in sec:
        kw["order"] = _int(sec["order"], "order")
    if "mode_cutoff" in sec:
        kw["mode_cutoff"] = _int(sec["mode_cutoff"], "mode_cutoff")
    if "t_end" in sec:
        kw["t_end"] = parse_time(sec["t_end"])
    if "samples" in sec:
        kw["samples"] = _int(sec["samples"], "samples")
    if "oracle" in sec:
        kw["oracle"] = sec["oracle"].strip().lower()
    if "oracle_window" in sec:
        kw["oracle_window"] = _float(sec["oracle_window"], "oracle_window")
    if "outputs" in sec:
        kw["outputs"] = _list(sec["outputs"])
    return ScenarioConfig(**kw)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("cannot read config", path=str(path), detail=exc.strerror) from None
    return parse_config(text)
