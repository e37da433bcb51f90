"""Run configuration: parsing, serialization and the NOOR-like preset.

Documents are sectioned ``key = value`` text::

    [run]
    mode = simulate          # simulate | stationary | verify | check-assumptions
    output = out
    preset = noor-like       # optional base configuration

    [physics]
    alpha = 1.0
    beta1 = 1.0
    beta2 = 0.7
    gamma = 1.0
    gamma_star = 0.2

    [grid]
    cells = 400

    [source]
    q = 0.41                 # number or time table "t0:v0, t1:v1, ..."
    q_profile = 0:1, 1:1.5   # spatial factor, table over x
    T_out = 0.1
    T_sky = 0.05

    [boundary]
    rho_left = 0.9
    rho_right = 0:0.9, 5:0.8
    p_left = 1.0
    p_right = 0.0

    [initial]
    rho0 = 0.9               # number or table over x

    [solver]
    epsilon = auto           # auto: eps = dx
    cfl = 0.4
    t_end = 16
    tol_elliptic = 1e-12
    output_stride = 100
    output_times = 2, 4, 8
    allow_inadmissible = false
    rho_floor = auto         # auto: gamma*/10

    [stationary]
    tol = 1e-12

Keys written before the first section header belong to ``[run]``.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace

from troughflow.model import Grid, ModelError, PlantParams, Scenario, SeparableSource, Table
from troughflow.transient import SolverConfig

MODES = ("simulate", "stationary", "verify", "check-assumptions")
PRESETS = ("noor-like",)


class ConfigError(ValueError):
    """Invalid configuration.  ``key`` is ``section.key`` when one is at fault."""

    def __init__(self, message, key=None, line=None):
        where = ""
        if line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario
    params: PlantParams
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_path: str = "out"
    mode: str = "simulate"
    stationary_tol: float = 1e-12
    preset: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}",
                              key="run.mode")
        if self.mode in ("simulate", "verify") and not self.solver.t_end > 0:
            raise ConfigError(f"mode {self.mode} needs t_end > 0", key="solver.t_end")
        if not self.stationary_tol > 0:
            raise ConfigError("stationary tolerance must be positive", key="stationary.tol")


@dataclass(frozen=True)
class PlantDataCheck:
    """Unscaled per-length powers of the NOOR I plant (W/m) used to test the
    source bound in physical units."""

    source_W_per_m: int = 4300
    conv_margin_W_per_m: int = 8904
    rad_margin_W_per_m: int = 6092
    reference_temperature_K: int = 1360
    gamma_star_ratio: float = 0.05     # low-density barrier as a fraction of rho_out

    @property
    def total_margin_W_per_m(self) -> int:
        return self.conv_margin_W_per_m + self.rad_margin_W_per_m

    @property
    def passed(self) -> bool:
        return self.source_W_per_m < self.total_margin_W_per_m

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return "\n".join([
            f"source q = {self.source_W_per_m} W/m",
            f"convective loss margin = {self.conv_margin_W_per_m} W/m",
            f"radiative loss margin = {self.rad_margin_W_per_m} W/m",
            f"barrier: gamma* = {self.gamma_star_ratio:g} rho_out "
            f"(T* = {self.reference_temperature_K} K)",
            f"{self.source_W_per_m} W/m < {self.conv_margin_W_per_m} W/m + "
            f"{self.rad_margin_W_per_m} W/m = {self.total_margin_W_per_m} W/m: {verdict}",
        ])


def preset_noor_like() -> tuple[RunConfig, PlantDataCheck]:
    """Steady-data scenario with dimensionless engineering defaults.

    The constants are not plant data; only the :class:`PlantDataCheck` record
    carries measured values.
    """
    params = PlantParams(alpha=1.0, beta1=1.0, beta2=0.7, gamma=1.0, gamma_star=0.2)
    scenario = Scenario(
        grid=Grid(400),
        q=SeparableSource(Table.constant(0.41), Table.constant(1.0)),
        T_out=0.1, T_sky=0.05,
        rho_left=0.9, rho_right=0.9,
        p_left=1.0, p_right=0.0,
        rho0=0.9,
    )
    solver = SolverConfig(t_end=16.0, output_times=(2.0, 4.0, 8.0))
    cfg = RunConfig(scenario=scenario, params=params, solver=solver, preset="noor-like")
    return cfg, PlantDataCheck()


# --- parsing ----------------------------------------------------------------

_SCHEMA = {
    "run": ("mode", "output", "preset"),
    "physics": ("alpha", "beta1", "beta2", "gamma", "gamma_star"),
    "grid": ("cells",),
    "source": ("q", "q_profile", "T_out", "T_sky"),
    "boundary": ("rho_left", "rho_right", "p_left", "p_right"),
    "initial": ("rho0",),
    "solver": ("epsilon", "cfl", "t_end", "tol_elliptic", "output_stride",
               "output_times", "allow_inadmissible", "rho_floor"),
    "stationary": ("tol",),
}

_SECTION_RE = re.compile(r"^\s*\[([^\]]*)\]")
_KEY_RE = re.compile(r"^\s*([^=:#;\s\[][^=:]*?)\s*[=:]")


def _key_lines(text: str) -> dict[str, int]:
    """Map ``section.key`` to the 1-based line where it is set."""
    lines: dict[str, int] = {}
    section = "run"
    for no, line in enumerate(text.splitlines(), 1):
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip()
            continue
        if line[:1].isspace():
            continue
        m = _KEY_RE.match(line)
        if m:
            lines[f"{section}.{m.group(1).strip()}"] = no
    return lines


def _unquote(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
        return value[1:-1]
    return value


class _Reader:
    def __init__(self, parser, lines):
        self.parser = parser
        self.lines = lines

    def fail(self, key, message):
        raise ConfigError(f"{key}: {message}", key=key, line=self.lines.get(key))

    def raw(self, section, key):
        if self.parser.has_option(section, key):
            return _unquote(self.parser.get(section, key))
        return None

    def number(self, section, key):
        raw = self.raw(section, key)
        if raw is None:
            return None
        try:
            value = float(raw)
        except ValueError:
            self.fail(f"{section}.{key}", f"expected a number, got {raw!r}")
        if not math.isfinite(value):
            self.fail(f"{section}.{key}", f"must be finite, got {raw!r}")
        return value

    def positive(self, section, key):
        value = self.number(section, key)
        if value is not None and not value > 0:
            self.fail(f"{section}.{key}", f"must be positive, got {value!r}")
        return value

    def integer(self, section, key):
        raw = self.raw(section, key)
        if raw is None:
            return None
        try:
            value = int(raw)
        except ValueError:
            self.fail(f"{section}.{key}", f"expected an integer, got {raw!r}")
        if value < 1:
            self.fail(f"{section}.{key}", f"must be a positive integer, got {value}")
        return value

    def table(self, section, key):
        raw = self.raw(section, key)
        if raw is None:
            return None
        name = f"{section}.{key}"
        if ":" not in raw:
            try:
                return Table.constant(float(raw))
            except ValueError:
                self.fail(name, f"expected a number or table 't0:v0, t1:v1, ...', got {raw!r}")
        knots, values = [], []
        for item in raw.split(","):
            parts = item.split(":")
            if len(parts) != 2:
                self.fail(name, f"malformed table entry {item.strip()!r}")
            try:
                knots.append(float(parts[0]))
                values.append(float(parts[1]))
            except ValueError:
                self.fail(name, f"malformed table entry {item.strip()!r}")
        if not all(math.isfinite(v) for v in knots + values):
            self.fail(name, "table entries must be finite")
        if any(b <= a for a, b in zip(knots, knots[1:])):
            self.fail(name, f"table abscissae must be strictly increasing, got {knots}")
        return Table(tuple(knots), tuple(values))

    def floats(self, section, key):
        raw = self.raw(section, key)
        if raw is None:
            return None
        try:
            return tuple(float(v) for v in raw.split(",") if v.strip())
        except ValueError:
            self.fail(f"{section}.{key}", f"expected comma-separated numbers, got {raw!r}")

    def boolean(self, section, key):
        if not self.parser.has_option(section, key):
            return None
        try:
            return self.parser.getboolean(section, key)
        except ValueError:
            self.fail(f"{section}.{key}", "expected true or false")


def _read_document(text: str):
    """configparser view of ``text`` and the line map; syntax errors carry line numbers."""
    offset = 0
    first = next((ln for ln in text.splitlines() if ln.strip() and ln.strip()[0] not in "#;"), "")
    if first and not _SECTION_RE.match(first):
        text = "[run]\n" + text
        offset = 1
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"syntax error: cannot parse {line}",
                          line=lineno - offset) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigError(f"syntax error: {exc.message if hasattr(exc, 'message') else exc}",
                          line=(exc.lineno or 0) - offset) from None
    except configparser.Error as exc:
        raise ConfigError(f"syntax error: {exc}") from None
    lines = {k: v - offset for k, v in _key_lines(text).items()}
    return parser, lines


def parse_config(text: str) -> RunConfig:
    """Validated :class:`RunConfig` from a configuration document."""
    parser, lines = _read_document(text)
    rd = _Reader(parser, lines)

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", key=section)
        for key in parser.options(section):
            if key not in _SCHEMA[section]:
                name = f"{section}.{key}"
                raise ConfigError(f"unknown key {name}", key=name, line=lines.get(name))

    preset = rd.raw("run", "preset")
    if preset is not None and preset not in PRESETS:
        rd.fail("run.preset", f"unknown preset {preset!r}; available: {', '.join(PRESETS)}")
    if preset is not None:
        base, _ = preset_noor_like()
    else:
        base = None

    # physics
    base_params = base.params if base else PlantParams()
    phys = {k: rd.positive("physics", k) for k in _SCHEMA["physics"]}
    phys = {k: (getattr(base_params, k) if v is None else v) for k, v in phys.items()}
    if not phys["gamma_star"] < phys["gamma"]:
        key = "physics.gamma_star"
        raise ConfigError(f"{key}: must be below physics.gamma "
                          f"({phys['gamma_star']!r} >= {phys['gamma']!r})",
                          key=key, line=lines.get(key))
    params = PlantParams(**phys)

    # grid and data
    cells = rd.integer("grid", "cells")
    bs = base.scenario if base else None
    if cells is None:
        cells = bs.grid.n_cells if bs else 100

    def pick(section, key, default):
        tab = rd.table(section, key)
        return default if tab is None else tab

    if bs is not None:
        q_time, q_prof = bs.q.time, bs.q.profile
        defaults = {name: getattr(bs, name) for name in
                    ("T_out", "T_sky", "rho_left", "rho_right", "p_left", "p_right", "rho0")}
    else:
        q_time, q_prof = Table.constant(0.0), Table.constant(1.0)
        g = Table.constant(params.gamma)
        zero = Table.constant(0.0)
        defaults = dict(T_out=zero, T_sky=zero, rho_left=g, rho_right=g,
                        p_left=zero, p_right=zero, rho0=g)
    q_time = pick("source", "q", q_time)
    q_prof = pick("source", "q_profile", q_prof)
    for name, tab in (("source.q", q_time), ("source.q_profile", q_prof)):
        if min(tab.values) < 0:
            rd.fail(name, "solar source must be non-negative")
    data = {}
    for section, keys in (("source", ("T_out", "T_sky")),
                          ("boundary", ("rho_left", "rho_right", "p_left", "p_right")),
                          ("initial", ("rho0",))):
        for key in keys:
            data[key] = pick(section, key, defaults[key])
    for key in ("rho_left", "rho_right", "rho0"):
        tab = data[key]
        section = "initial" if key == "rho0" else "boundary"
        if min(tab.values) <= 0:
            rd.fail(f"{section}.{key}", "density must be positive")
    scenario = Scenario(grid=Grid(cells), q=SeparableSource(q_time, q_prof), **data)

    # solver
    bsolv = base.solver if base else SolverConfig()
    eps_raw = rd.raw("solver", "epsilon")
    if eps_raw is None:
        epsilon = bsolv.epsilon
    elif eps_raw.lower() == "auto":
        epsilon = None
    else:
        epsilon = rd.number("solver", "epsilon")
        if epsilon < 0:
            rd.fail("solver.epsilon", f"must be non-negative, got {epsilon!r}")
    cfl = rd.positive("solver", "cfl")
    if cfl is not None and not cfl < 1:
        rd.fail("solver.cfl", f"must lie in (0, 1), got {cfl!r}")
    t_end = rd.number("solver", "t_end")
    if t_end is not None and t_end < 0:
        rd.fail("solver.t_end", f"must be non-negative, got {t_end!r}")
    tol = rd.positive("solver", "tol_elliptic")
    stride = rd.integer("solver", "output_stride")
    times = rd.floats("solver", "output_times")
    if times is not None and any(b <= a for a, b in zip(times, times[1:])):
        rd.fail("solver.output_times", "must be strictly increasing")
    allow = rd.boolean("solver", "allow_inadmissible")
    floor_raw = rd.raw("solver", "rho_floor")
    if floor_raw is None:
        rho_floor = bsolv.rho_floor
    elif floor_raw.lower() == "auto":
        rho_floor = None
    else:
        rho_floor = rd.positive("solver", "rho_floor")
    overrides = dict(cfl=cfl, t_end=t_end, tol_elliptic=tol, output_stride=stride,
                     output_times=times, allow_inadmissible=allow)
    solver = replace(bsolv, epsilon=epsilon, rho_floor=rho_floor,
                     **{k: v for k, v in overrides.items() if v is not None})

    st_tol = rd.positive("stationary", "tol")
    mode = rd.raw("run", "mode")
    output = rd.raw("run", "output")
    try:
        return RunConfig(
            scenario=scenario, params=params, solver=solver,
            output_path=output if output is not None else (base.output_path if base else "out"),
            mode=mode if mode is not None else (base.mode if base else "simulate"),
            stationary_tol=st_tol if st_tol is not None else (base.stationary_tol if base else 1e-12),
            preset=preset,
        )
    except ConfigError as exc:
        raise ConfigError(str(exc), key=exc.key, line=lines.get(exc.key)) from None
    except ModelError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# --- serialization ----------------------------------------------------------

def _fmt_table(tab) -> str:
    if not isinstance(tab, Table):
        raise ConfigError(f"cannot serialize non-tabulated input {tab!r}")
    if tab.knots == (0.0,):
        return repr(tab.values[0])
    return ", ".join(f"{k!r}:{v!r}" for k, v in zip(tab.knots, tab.values))


def serialize_config(cfg: RunConfig) -> str:
    """Text form of ``cfg``; :func:`parse_config` reads it back to an equal object."""
    sc, p, s = cfg.scenario, cfg.params, cfg.solver
    if not isinstance(sc.q, SeparableSource):
        raise ConfigError("only separable tabulated sources can be serialized")
    out = ["[run]", f"mode = {cfg.mode}", f"output = {cfg.output_path}"]
    if cfg.preset is not None:
        out.append(f"preset = {cfg.preset}")
    out += ["", "[physics]"]
    out += [f"{k} = {getattr(p, k)!r}" for k in _SCHEMA["physics"]]
    out += ["", "[grid]", f"cells = {sc.grid.n_cells}"]
    out += ["", "[source]", f"q = {_fmt_table(sc.q.time)}",
            f"q_profile = {_fmt_table(sc.q.profile)}",
            f"T_out = {_fmt_table(sc.T_out)}", f"T_sky = {_fmt_table(sc.T_sky)}"]
    out += ["", "[boundary]"]
    out += [f"{k} = {_fmt_table(getattr(sc, k))}" for k in _SCHEMA["boundary"]]
    out += ["", "[initial]", f"rho0 = {_fmt_table(sc.rho0)}"]
    out += ["", "[solver]",
            f"epsilon = {'auto' if s.epsilon is None else repr(float(s.epsilon))}",
            f"cfl = {s.cfl!r}", f"t_end = {float(s.t_end)!r}",
            f"tol_elliptic = {s.tol_elliptic!r}", f"output_stride = {s.output_stride}"]
    if s.output_times:
        out.append("output_times = " + ", ".join(repr(t) for t in s.output_times))
    out.append(f"allow_inadmissible = {'true' if s.allow_inadmissible else 'false'}")
    out.append(f"rho_floor = {'auto' if s.rho_floor is None else repr(float(s.rho_floor))}")
    out += ["", "[stationary]", f"tol = {cfg.stationary_tol!r}", ""]
    return "\n".join(out)
