"""Experiment configuration: a strict single-document YAML mapping.

Unknown keys are rejected (typo safety). Structural constraints are hard
errors; an undersized stabilization parameter only degrades the scheme
guarantees, so it produces warnings rather than errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .lemmas import energy_kappa, mbp_kappa
from .stepping import Scheme

__all__ = ["SimConfig", "ConfigError", "Notice", "parse_config", "serialize_config", "hypothesis_notices"]


class ConfigError(ValueError):
    """Malformed or inconsistent configuration text."""


@dataclass(frozen=True)
class Notice:
    """Structured warning: a scheme-guarantee hypothesis is not met."""

    guarantee: str
    required: float
    actual: float

    @property
    def message(self) -> str:
        return (
            f"kappa = {self.actual:g} is below {self.required:g}, the threshold for the "
            f"{self.guarantee} guarantee; the run proceeds without it"
        )


@dataclass(frozen=True)
class SimConfig:
    d: int
    n: int
    m: int
    epsilon: float
    kappa: float
    tau: float
    t_end: float
    scheme: Scheme
    initial_condition: str
    ic_params: dict = field(default_factory=dict)
    monitor_stride: int = 1
    snapshot_times: tuple = ()
    output_dir: str = "."


_TOP_KEYS = {
    "grid", "m", "epsilon", "kappa", "tau", "t_end", "scheme",
    "initial_condition", "monitor_stride", "snapshot_times", "output_dir",
}
_REQUIRED_TOP = {"grid", "m", "epsilon", "kappa", "tau", "t_end", "scheme", "initial_condition", "output_dir"}


def _need_mapping(node, name):
    if not isinstance(node, dict):
        raise ConfigError(f"{name} must be a mapping, got {type(node).__name__}")
    return node


def _get_number(node, key, kind=float):
    if key not in node:
        raise ConfigError(f"missing required field {key!r}")
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field {key!r} must be a number, got {value!r}")
    if kind is int and int(value) != value:
        raise ConfigError(f"field {key!r} must be an integer, got {value!r}")
    return kind(value)


def parse_config(text: str) -> SimConfig:
    """Parse and validate configuration text; raises ConfigError on any defect."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        raise ConfigError(f"config parse error{where}: {exc}") from exc
    doc = _need_mapping(doc, "config document")

    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = _REQUIRED_TOP - set(doc)
    if missing:
        raise ConfigError(f"missing required fields: {sorted(missing)}")

    grid = _need_mapping(doc["grid"], "grid")
    extra = set(grid) - {"d", "n"}
    if extra:
        raise ConfigError(f"unknown grid keys: {sorted(extra)}")
    d = _get_number(grid, "d", int)
    n = _get_number(grid, "n", int)

    ic = _need_mapping(doc["initial_condition"], "initial_condition")
    extra = set(ic) - {"name", "params"}
    if extra:
        raise ConfigError(f"unknown initial_condition keys: {sorted(extra)}")
    if "name" not in ic or not isinstance(ic["name"], str):
        raise ConfigError("initial_condition.name must be a string")
    params = ic.get("params") or {}
    params = _need_mapping(params, "initial_condition.params")
    for key, value in params.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"initial_condition.params[{key!r}] must be a number")
    params = {str(k): float(v) for k, v in params.items()}

    scheme_raw = doc["scheme"]
    try:
        scheme = Scheme(str(scheme_raw).lower())
    except ValueError:
        names = ", ".join(s.value for s in Scheme)
        raise ConfigError(f"scheme must be one of {names}, got {scheme_raw!r}") from None

    m = _get_number(doc, "m", int)
    epsilon = _get_number(doc, "epsilon")
    kappa = _get_number(doc, "kappa")
    tau = _get_number(doc, "tau")
    t_end = _get_number(doc, "t_end")
    monitor_stride = _get_number(doc, "monitor_stride", int) if "monitor_stride" in doc else 1

    if "snapshot_times" in doc:
        raw_times = doc["snapshot_times"]
        if not isinstance(raw_times, (list, tuple)):
            raise ConfigError("snapshot_times must be a list of numbers")
        times = []
        for value in raw_times:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"snapshot_times entries must be numbers, got {value!r}")
            times.append(float(value))
        snapshot_times = tuple(times)
    else:
        snapshot_times = (0.0, t_end)

    output_dir = doc["output_dir"]
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("output_dir must be a non-empty string")

    config = SimConfig(
        d=d, n=n, m=m, epsilon=epsilon, kappa=kappa, tau=tau, t_end=t_end,
        scheme=scheme, initial_condition=ic["name"], ic_params=params,
        monitor_stride=monitor_stride, snapshot_times=snapshot_times,
        output_dir=output_dir,
    )
    _validate(config)
    return config


def _validate(c: SimConfig) -> None:
    if c.d not in (1, 2, 3):
        raise ConfigError(f"grid.d must be 1, 2 or 3, got {c.d}")
    if c.n < 1:
        raise ConfigError(f"grid.n must be >= 1, got {c.n}")
    if c.m < 2:
        raise ConfigError(f"m must be >= 2, got {c.m}")
    if c.epsilon <= 0:
        raise ConfigError(f"epsilon must be positive, got {c.epsilon}")
    if c.kappa <= 0:
        raise ConfigError(f"kappa must be positive, got {c.kappa}")
    if c.tau <= 0:
        raise ConfigError(f"tau must be positive, got {c.tau}")
    if c.t_end < 0:
        raise ConfigError(f"t_end must be >= 0, got {c.t_end}")
    if c.monitor_stride < 1:
        raise ConfigError(f"monitor_stride must be >= 1, got {c.monitor_stride}")
    for t in c.snapshot_times:
        if t < 0 or t > c.t_end:
            raise ConfigError(f"snapshot time {t} outside [0, {c.t_end}]")


def hypothesis_notices(config: SimConfig) -> list:
    """Warnings for kappa below the guarantee thresholds (never errors)."""
    notices = []
    k_mbp = mbp_kappa(config.m)
    if config.kappa < k_mbp:
        notices.append(Notice("sup-norm bound", k_mbp, config.kappa))
    k_energy = energy_kappa(config.m)
    if config.kappa < k_energy:
        notices.append(Notice("monotone energy decay", k_energy, config.kappa))
    return notices


def serialize_config(config: SimConfig) -> str:
    """Canonical YAML text; parses back to an equal SimConfig."""
    doc = {
        "grid": {"d": config.d, "n": config.n},
        "m": config.m,
        "epsilon": config.epsilon,
        "kappa": config.kappa,
        "tau": config.tau,
        "t_end": config.t_end,
        "scheme": config.scheme.value,
        "initial_condition": {
            "name": config.initial_condition,
            "params": dict(config.ic_params),
        },
        "monitor_stride": config.monitor_stride,
        "snapshot_times": list(config.snapshot_times),
        "output_dir": config.output_dir,
    }
    return yaml.safe_dump(doc, sort_keys=True, default_flow_style=False)
