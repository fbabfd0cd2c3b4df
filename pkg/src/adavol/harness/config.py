"""Experiment configuration files.

The format is INI, read with :mod:`configparser` in strict mode::

    [experiment]
    name = figure1
    record_stride = 100          ; default 100
    output_dir = figure1         ; default: the experiment name
    emit_svg = false             ; default false

    [objective]
    kind = rastrigin             ; rastrigin | quadratic | double_well
    dimension = 2

    [defaults]                   ; optional, merged under every method block
    eta = 1e-5

    [method.adavol]
    method = adavol
    beta = 1e4
    lambda = 1e4
    theta = 1
    init_mean = 1000, 1000

Unknown sections or keys are errors, and so are missing required method keys
(method, eta, beta, iterations, chains). Values may be wrapped in quotes.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, Optional

from ..diffusion import ActivationParams
from ..errors import ConfigError
from ..objective import DoubleWell, ObjectiveFunction, Quadratic, ShiftedRastrigin
from ..samplers import METHODS, SamplerConfig

__all__ = ["ObjectiveSpec", "ExperimentSpec", "parse_config", "format_config", "apply_overrides",
           "load_config"]

_OBJECTIVE_KEYS = {
    "rastrigin": {"dimension": int, "shift": float, "amplitude": float},
    "quadratic": {"dimension": int, "L": float},
    "double_well": {"tilt": float},
}
_OBJECTIVE_DEFAULTS = {
    "rastrigin": {"dimension": 2, "shift": 2.0, "amplitude": 5.0},
    "quadratic": {"dimension": 1, "L": 1.0},
    "double_well": {"tilt": 0.0},
}
_EXPERIMENT_KEYS = ("name", "record_stride", "output_dir", "emit_svg")
_METHOD_KEYS = ("method", "eta", "beta", "iterations", "chains", "seed", "lambda", "theta", "c",
                "epsilon", "gamma_exponent", "init_mean", "init_cov_scale")
_REQUIRED_METHOD_KEYS = ("method", "eta", "beta", "iterations", "chains")


@dataclass(frozen=True)
class ObjectiveSpec:
    kind: str
    params: Dict[str, float] = field(default_factory=dict)

    def build(self) -> ObjectiveFunction:
        if self.kind == "rastrigin":
            return ShiftedRastrigin(**self.params)
        if self.kind == "quadratic":
            return Quadratic(**self.params)
        return DoubleWell(**self.params)

    @property
    def dimension(self) -> int:
        return int(self.params.get("dimension", 1))


@dataclass
class ExperimentSpec:
    name: str
    objective: ObjectiveSpec
    methods: Dict[str, SamplerConfig]
    record_stride: int = 100
    output_dir: str = ""
    emit_svg: bool = False

    def __post_init__(self):
        if not self.output_dir:
            self.output_dir = self.name


class _Locator:
    """Line numbers of ``key = value`` entries, for error messages."""

    _section = re.compile(r"^\s*\[([^\]]+)\]")
    _entry = re.compile(r"^\s*([^=:;#\s][^=:]*?)\s*[=:]")

    def __init__(self, text: str):
        self.lines = {}
        section = None
        for lineno, line in enumerate(text.splitlines(), start=1):
            m = self._section.match(line)
            if m:
                section = m.group(1).strip()
                self.lines.setdefault((section, None), lineno)
                continue
            m = self._entry.match(line)
            if m and section is not None:
                self.lines[(section, m.group(1).strip().lower())] = lineno

    def where(self, section, key=None):
        lineno = self.lines.get((section, key))
        if lineno is None and key is not None:
            lineno = self.lines.get(("defaults", key))
        loc = f"[{section}]" + (f" {key}" if key else "")
        return f"{loc} (line {lineno})" if lineno else loc


def _unquote(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
        return value[1:-1].strip()
    return value


def _to_float(value, key):
    try:
        return float(_unquote(value))
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {value!r}") from None


def _to_int(value, key):
    try:
        return int(_unquote(value))
    except ValueError:
        pass
    # accept float spellings such as 2e4, but only when exact
    number = _to_float(value, key)
    if number != int(number):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return int(number)


def _to_bool(value, key):
    v = _unquote(value).lower()
    if v in configparser.RawConfigParser.BOOLEAN_STATES:
        return configparser.RawConfigParser.BOOLEAN_STATES[v]
    raise ConfigError(f"{key} must be true or false, got {value!r}")


def _to_vector(value, key):
    parts = [p for p in re.split(r"[,\s]+", _unquote(value).strip("[]() ")) if p]
    if not parts:
        raise ConfigError(f"{key} must be a comma-separated list of numbers")
    return tuple(_to_float(p, key) for p in parts)


def _read(text: str) -> configparser.RawConfigParser:
    parser = configparser.RawConfigParser(strict=True, default_section="\0none",
                                          inline_comment_prefixes=(";", "#"))
    parser.optionxform = str.lower
    try:
        parser.read_string(text, source="<config>")
    except configparser.Error as err:
        raise ConfigError(f"parse error: {err}") from None
    return parser


def apply_overrides(parser: configparser.RawConfigParser, overrides: Iterable[str]) -> None:
    """Apply ``key=value`` overrides to a parsed document in place.

    ``section.key=value`` targets one section (``method.adavol.eta=1e-4``).
    A bare key goes to [experiment] or [objective] when it belongs there,
    otherwise to every method block.
    """
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = (s.strip() for s in item.split("=", 1))
        key = key.lower()
        if "." in key:
            section, key = key.rsplit(".", 1)
            if not parser.has_section(section):
                raise ConfigError(f"override {item!r}: no section [{section}]")
            parser.set(section, key, value)
        elif key in _EXPERIMENT_KEYS:
            parser.set("experiment", key, value)
        elif parser.has_section("objective") and key in {"kind", "dimension", "shift", "amplitude", "l", "tilt"}:
            parser.set("objective", key, value)
        else:
            methods = [s for s in parser.sections() if s.startswith("method.")]
            if not methods:
                raise ConfigError(f"override {item!r}: no method blocks to apply it to")
            for section in methods:
                parser.set(section, key, value)


def parse_config(text: str, overrides: Iterable[str] = ()) -> ExperimentSpec:
    """Parse and fully validate an experiment document."""
    parser = _read(text)
    apply_overrides(parser, overrides)
    loc = _Locator(text)

    for section in parser.sections():
        if section not in ("experiment", "objective", "defaults") and not section.startswith("method."):
            raise ConfigError(f"unknown section {loc.where(section)}")
    if not parser.has_section("experiment"):
        raise ConfigError("missing [experiment] section")

    exp = dict(parser.items("experiment"))
    for key in exp:
        if key not in _EXPERIMENT_KEYS:
            raise ConfigError(f"unknown key {loc.where('experiment', key)}")
    if "name" not in exp or not _unquote(exp["name"]):
        raise ConfigError("[experiment] name is required")
    name = _unquote(exp["name"])
    stride = _to_int(exp.get("record_stride", "100"), "record_stride")
    if stride < 1:
        raise ConfigError(f"record_stride must be >= 1 at {loc.where('experiment', 'record_stride')}")
    emit_svg = _to_bool(exp.get("emit_svg", "false"), "emit_svg")
    output_dir = _unquote(exp.get("output_dir", name))

    objective = _parse_objective(parser, loc)
    n = objective.build().dimension

    defaults = dict(parser.items("defaults")) if parser.has_section("defaults") else {}
    for key in defaults:
        if key not in _METHOD_KEYS:
            raise ConfigError(f"unknown key {loc.where('defaults', key)}")
    methods = {}
    for section in parser.sections():
        if not section.startswith("method."):
            continue
        label = section[len("method."):]
        if not label:
            raise ConfigError(f"empty method name at {loc.where(section)}")
        values = {**defaults, **dict(parser.items(section))}
        methods[label] = _parse_method(section, values, n, loc)
    if not methods:
        raise ConfigError("at least one [method.NAME] section is required")
    return ExperimentSpec(name, objective, methods, stride, output_dir, emit_svg)


def _parse_objective(parser, loc) -> ObjectiveSpec:
    if not parser.has_section("objective"):
        raise ConfigError("missing [objective] section")
    items = dict(parser.items("objective"))
    kind = _unquote(items.pop("kind", ""))
    if kind not in _OBJECTIVE_KEYS:
        raise ConfigError(f"objective kind must be one of {', '.join(_OBJECTIVE_KEYS)}, "
                          f"got {kind!r} at {loc.where('objective', 'kind')}")
    allowed = {k.lower(): (k, conv) for k, conv in _OBJECTIVE_KEYS[kind].items()}
    params = dict(_OBJECTIVE_DEFAULTS[kind])
    for key, value in items.items():
        if key not in allowed:
            raise ConfigError(f"unknown key {loc.where('objective', key)} for kind {kind}")
        real_key, conv = allowed[key]
        params[real_key] = (_to_int if conv is int else _to_float)(value, key)
    spec = ObjectiveSpec(kind, params)
    try:
        spec.build()
    except ValueError as err:
        raise ConfigError(f"{loc.where('objective')}: {err}") from None
    return spec


def _parse_method(section, values, n, loc) -> SamplerConfig:
    for key in values:
        if key not in _METHOD_KEYS:
            raise ConfigError(f"unknown key {loc.where(section, key)}")
    for key in _REQUIRED_METHOD_KEYS:
        if key not in values:
            raise ConfigError(f"{section}: missing required key {key!r}")

    def field_error(key, err):
        return ConfigError(f"{err} at {loc.where(section, key)}")

    kwargs = {}
    try:
        kwargs["method"] = _unquote(values["method"])
        for key in ("eta", "beta", "epsilon", "init_cov_scale", "gamma_exponent"):
            if key in values:
                kwargs[key] = _to_float(values[key], key)
        for key in ("iterations", "chains", "seed"):
            if key in values:
                kwargs[key] = _to_int(values[key], key)
        lam = _to_float(values.get("lambda", "0"), "lambda")
        theta = _to_float(values.get("theta", "0"), "theta")
        c = _to_float(values.get("c", "0"), "c")
        kwargs["init_mean"] = _to_vector(values["init_mean"], "init_mean") if "init_mean" in values \
            else (0.0,) * n
    except ConfigError as err:
        key = str(err).split(" ", 1)[0]
        raise field_error(key, err) from None
    try:
        kwargs["activation"] = ActivationParams(lam, theta, c)
    except ValueError as err:
        key = "lambda" if "lambda" in str(err) else ("theta" if "theta" in str(err) else "c")
        raise field_error(key, err) from None
    if "gamma_exponent" not in kwargs:
        kwargs["gamma_exponent"] = n / 2
    try:
        cfg = SamplerConfig(**kwargs)
        cfg.validate(n)
    except ConfigError as err:
        key = str(err).split(" ", 1)[0]
        raise field_error(key, err) from None
    return cfg


def _num(x: float) -> str:
    return repr(float(x))


def format_config(spec: ExperimentSpec) -> str:
    """Render a spec with every value explicit; parses back to an equal spec."""
    lines = [
        "[experiment]",
        f"name = {spec.name}",
        f"record_stride = {spec.record_stride}",
        f"output_dir = {spec.output_dir}",
        f"emit_svg = {'true' if spec.emit_svg else 'false'}",
        "",
        "[objective]",
        f"kind = {spec.objective.kind}",
    ]
    for key, value in spec.objective.params.items():
        lines.append(f"{key} = {value if isinstance(value, int) else _num(value)}")
    for label, cfg in spec.methods.items():
        lines += [
            "",
            f"[method.{label}]",
            f"method = {cfg.method}",
            f"eta = {_num(cfg.eta)}",
            f"beta = {_num(cfg.beta)}",
            f"iterations = {cfg.iterations}",
            f"chains = {cfg.chains}",
            f"seed = {cfg.seed}",
            f"lambda = {_num(cfg.activation.lam)}",
            f"theta = {_num(cfg.activation.theta)}",
            f"c = {_num(cfg.activation.c)}",
            f"epsilon = {_num(cfg.epsilon)}",
            f"gamma_exponent = {_num(cfg.gamma_exponent)}",
            f"init_mean = {', '.join(_num(v) for v in cfg.init_mean)}",
            f"init_cov_scale = {_num(cfg.init_cov_scale)}",
        ]
    return "\n".join(lines) + "\n"


def load_config(path_or_name: str, overrides: Iterable[str] = ()) -> ExperimentSpec:
    """Parse a config file, or a shipped config by name (``figure1``, ``figure2``)."""
    path = Path(path_or_name)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    else:
        shipped = resources.files("adavol.configs").joinpath(f"{path_or_name}.ini")
        if not shipped.is_file():
            raise ConfigError(f"no config file or shipped config named {path_or_name!r}")
        text = shipped.read_text(encoding="utf-8")
    return parse_config(text, overrides)
