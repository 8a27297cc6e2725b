"""Reader for the flat ``key = value`` scenario format.

Example::

    # positions in metres, "x, y"
    q_a  = 0, 0
    q_b  = 200, 0
    q_w  = 200, 200
    q_u0 = -100, 100
    q_uF = 500, 100
    H = 100
    v_max = 3
    sigma_t = 0.5
    T = 350              # any two of sigma_t, T, N
    beta_0 = -60 dB
    beta_0_over_noise = 80 dB   # or sigma_b2 / sigma_w2 with units
    rho_b = 0.1
    epsilon = 0.1
    p_hat_u = 10 mW      # scalar or a comma list of N values
    alpha = 3
    # p_a_max = 30 dBm
    # return_rule = intersection | paper

Powers accept W, mW, dBm, dBW (bare numbers are W).  Ratios accept dB or
a bare linear number.  Values are converted to linear units here and
nowhere else.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import InfeasibleScenario, Scenario, ScenarioError

POINT_KEYS = ("q_a", "q_b", "q_w", "q_u0", "q_uF")
REQUIRED = POINT_KEYS + ("H", "v_max", "beta_0", "rho_b", "epsilon")
TIME_KEYS = ("sigma_t", "T", "N")
KNOWN = set(REQUIRED) | set(TIME_KEYS) | {
    "alpha", "beta_0_over_noise", "sigma_b2", "sigma_w2", "p_hat_u", "p_a_max", "return_rule", "name",
}
RETURN_RULES = ("intersection", "paper")
GRID_TOL = 1e-9

_POWER_UNITS = {"w": 1.0, "mw": 1e-3, "uw": 1e-6}


class ScenarioParseError(ScenarioError):
    def __init__(self, message: str, line: int | None = None, source: str = "<scenario>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class ParsedScenario:
    scenario: Scenario
    options: dict = field(default_factory=dict)
    echo: dict = field(default_factory=dict)  # raw strings as written
    source: str = "<scenario>"


def _number(text: str) -> float:
    val = float(text)
    if not math.isfinite(val):
        raise ValueError(f"non-finite number {text!r}")
    return val


def _split_unit(text: str):
    m = re.fullmatch(r"\s*([-+0-9.eE]+)\s*([A-Za-z]*)\s*", text)
    if not m:
        raise ValueError(f"cannot read {text!r} as a number with optional unit")
    return _number(m.group(1)), m.group(2).lower()


def parse_power(text: str) -> float:
    """Power in W from '10 mW', '30 dBm', '-20 dBW' or a bare number of watts."""
    val, unit = _split_unit(text)
    if unit in ("", "w", "mw", "uw"):
        return val * _POWER_UNITS.get(unit or "w")
    if unit == "dbm":
        return 10.0 ** (val / 10.0) * 1e-3
    if unit == "dbw":
        return 10.0 ** (val / 10.0)
    raise ValueError(f"unknown power unit {unit!r}")


def parse_ratio(text: str) -> float:
    val, unit = _split_unit(text)
    if unit == "db":
        return 10.0 ** (val / 10.0)
    if unit == "":
        return val
    raise ValueError(f"unknown ratio unit {unit!r}")


def parse_point(text: str) -> tuple:
    parts = [p for p in re.split(r"[,\s]+", text.strip().strip("()")) if p]
    if len(parts) != 2:
        raise ValueError(f"expected 'x, y', got {text!r}")
    return (_number(parts[0]), _number(parts[1]))


def _read_lines(text: str, source: str) -> tuple[dict, dict]:
    raw, lines = {}, {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ScenarioParseError(f"expected 'key = value', got {body!r}", lineno, source)
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in KNOWN:
            raise ScenarioParseError(f"unknown key {key!r}", lineno, source)
        if key in raw:
            raise ScenarioParseError(f"duplicate key {key!r} (first set on line {lines[key]})", lineno, source)
        if not value:
            raise ScenarioParseError(f"empty value for {key!r}", lineno, source)
        raw[key] = value
        lines[key] = lineno
    return raw, lines


def _timing(raw, lines, source):
    given = [k for k in TIME_KEYS if k in raw]
    if len(given) < 2:
        raise ScenarioParseError(
            f"need two of sigma_t, T, N (missing required key {[k for k in TIME_KEYS if k not in raw][0]!r})",
            None,
            source,
        )
    def num(key):
        try:
            return _number(raw[key])
        except ValueError as exc:
            raise ScenarioParseError(f"bad value for {key!r}: {exc}", lines[key], source) from None

    sigma_t = num("sigma_t") if "sigma_t" in raw else None
    T = num("T") if "T" in raw else None
    N = None
    if "N" in raw:
        n = num("N")
        if n != int(n) or n < 1:
            raise ScenarioParseError(f"N must be a positive integer, got {raw['N']!r}", lines["N"], source)
        N = int(n)
    if sigma_t is not None and T is not None:
        ratio = T / sigma_t
        if abs(ratio - round(ratio)) > GRID_TOL * max(1.0, ratio):
            raise ScenarioParseError(
                f"T = {T:g} s is not a whole number of slots of sigma_t = {sigma_t:g} s", lines["T"], source
            )
        n_from = int(round(ratio))
        if N is not None and N != n_from:
            raise ScenarioParseError(f"N = {N} disagrees with T / sigma_t = {n_from}", lines["N"], source)
        N = n_from
    elif sigma_t is None:
        sigma_t = T / N
    return sigma_t, N


def parse_scenario_text(text: str, source: str = "<scenario>") -> ParsedScenario:
    raw, lines = _read_lines(text, source)
    for key in REQUIRED:
        if key not in raw:
            raise ScenarioParseError(f"missing required key {key!r}", None, source)

    def conv(key, fn):
        try:
            return fn(raw[key])
        except (ValueError, TypeError) as exc:
            raise ScenarioParseError(f"bad value for {key!r}: {exc}", lines[key], source) from None

    kw = {k: conv(k, parse_point) for k in POINT_KEYS}
    for key in ("H", "v_max", "rho_b", "epsilon"):
        kw[key] = conv(key, _number)
    kw["sigma_t"], kw["N"] = _timing(raw, lines, source)
    kw["beta_0"] = conv("beta_0", parse_ratio)
    if "alpha" in raw:
        kw["alpha"] = conv("alpha", _number)

    if "beta_0_over_noise" in raw:
        if "sigma_b2" in raw or "sigma_w2" in raw:
            raise ScenarioParseError(
                "give either beta_0_over_noise or sigma_b2/sigma_w2, not both", lines["beta_0_over_noise"], source
            )
        noise = kw["beta_0"] / conv("beta_0_over_noise", parse_ratio)
        kw["sigma_b2"] = kw["sigma_w2"] = noise
    else:
        for key in ("sigma_b2", "sigma_w2"):
            if key not in raw:
                raise ScenarioParseError(f"missing required key {key!r} (or beta_0_over_noise)", None, source)
            kw[key] = conv(key, parse_power)

    if "p_hat_u" in raw:
        parts = [p for p in raw["p_hat_u"].split(",") if p.strip()]
        try:
            vals = [parse_power(p) for p in parts]
        except ValueError as exc:
            raise ScenarioParseError(f"bad value for 'p_hat_u': {exc}", lines["p_hat_u"], source) from None
        if len(vals) == 1:
            kw["p_hat_u"] = vals[0]
        elif len(vals) == kw["N"]:
            kw["p_hat_u"] = np.array(vals)
        else:
            raise ScenarioParseError(
                f"p_hat_u needs 1 or N = {kw['N']} values, got {len(vals)}", lines["p_hat_u"], source
            )
    if "p_a_max" in raw:
        kw["p_a_max"] = conv("p_a_max", parse_power)

    options = {"return_rule": raw.get("return_rule", "intersection")}
    if options["return_rule"] not in RETURN_RULES:
        raise ScenarioParseError(
            f"return_rule must be one of {RETURN_RULES}, got {options['return_rule']!r}", lines["return_rule"], source
        )
    if "name" in raw:
        options["name"] = raw["name"]
    try:
        scenario = Scenario(**kw)
    except InfeasibleScenario:
        raise
    except ScenarioError as exc:
        raise ScenarioParseError(str(exc), None, source) from exc
    return ParsedScenario(scenario, options, dict(raw), source)


def load_scenario(path) -> ParsedScenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read scenario file: {exc.strerror}", None, str(path)) from None
    return parse_scenario_text(text, str(path))


def bundled_scenario_path(name: str = "paper_sec5.scn") -> Path:
    return Path(__file__).parent / "data" / name


def scenario_to_dict(scenario: Scenario) -> dict:
    """Linear-unit echo of a scenario, JSON friendly."""
    out = {}
    for name in scenario.__dataclass_fields__:
        val = getattr(scenario, name)
        if isinstance(val, np.ndarray):
            if name == "p_hat_u" and np.unique(val).size == 1:
                val = float(val[0])
            else:
                val = val.tolist() if val.ndim else float(val)
        out[name] = val
    out["T"] = scenario.T
    return out
