"""Flat key-value experiment configuration with dotted sections.

The format is one ``key = value`` pair per line, ``#`` comments, no nesting
and no embedded code.  Unknown keys are rejected; validation collects every
violation instead of stopping at the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields as dc_fields
from typing import Any

from .blocks import BlockParams
from .experiments import KINDS
from .solver import SolverConfig


class ConfigError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("invalid configuration:\n  " + "\n  ".join(violations))
        self.violations = violations


def _parse_bool(s: str) -> bool:
    if s.lower() in ("true", "yes", "1", "on"):
        return True
    if s.lower() in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_float_list(s: str) -> tuple:
    return tuple(float(x) for x in s.split(",") if x.strip())


def _parse_int_list(s: str) -> tuple:
    return tuple(int(x) for x in s.split(",") if x.strip())


def _parse_str_list(s: str) -> tuple:
    return tuple(x.strip() for x in s.split(",") if x.strip())


@dataclass
class ExperimentConfig:
    grid_n: int = 256
    m: int = 4
    b: int = 2
    kind: str = "high"                 # high | intermediate | low | fixed_k | explicit
    nu: float | None = None            # used when kind = explicit
    fixed_k: float = 1.0
    continuation: str = "hold"
    shears_per_block: int = 8
    amplitude: float = 1.1
    dt_max: float | None = None
    steps_per_stage: int = 64
    splitting: str = "strang"
    ledger_stride: int = 4
    idle_dt: float = 1.0 / 32.0
    delta: float = 0.1
    tau: float = 0.25
    u_target: float = 1.0
    c_target: float = 0.5
    periods: int = 3
    sweep_m: tuple = (3, 4, 5, 6, 7, 8)
    sweep_kinds: tuple = ("low", "intermediate", "high")
    findnu_targets: tuple = (0.25, 0.5, 0.75)
    findnu_t_star: float = 1.0
    findnu_tol: float = 0.02
    closure_tol: float = 1e-9
    record_shells: bool = False
    snapshot_times: tuple = ()
    sample_times: tuple = ()
    out_dir: str = "out"
    threads: int = 1

    def block_params(self) -> BlockParams:
        return BlockParams(
            base=self.b,
            shears_per_block=self.shears_per_block,
            amplitude=self.amplitude,
        )

    def schedule_nu(self) -> float:
        from .experiments import viscosity_schedule

        if self.kind == "explicit":
            if self.nu is None:
                raise ConfigError(["schedule.nu: explicit kind requires a value"])
            return self.nu
        return viscosity_schedule(self.kind, self.m, self.b, k=self.fixed_k)

    def solver_config(self, nu: float | None = None) -> SolverConfig:
        return SolverConfig(
            grid_n=self.grid_n,
            nu=self.schedule_nu() if nu is None else nu,
            dt_max=self.dt_max,
            steps_per_stage=self.steps_per_stage,
            splitting=self.splitting,
            ledger_stride=self.ledger_stride,
            idle_sample_dt=self.idle_dt,
            sample_times=tuple(sorted({1.0, 1.0 + self.delta, 2.0} | set(self.sample_times))),
            snapshot_times=self.snapshot_times,
            want_shells=self.record_shells,
            closure_tol=self.closure_tol,
        )

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dc_fields(self)}


# key path -> (attribute, parser)
_SCHEMA: dict[str, tuple[str, Any]] = {
    "grid.n": ("grid_n", int),
    "schedule.m": ("m", int),
    "schedule.b": ("b", int),
    "schedule.kind": ("kind", str),
    "schedule.nu": ("nu", float),
    "schedule.fixed_k": ("fixed_k", float),
    "schedule.continuation": ("continuation", str),
    "blocks.shears": ("shears_per_block", int),
    "blocks.amplitude": ("amplitude", float),
    "solver.dt_max": ("dt_max", float),
    "solver.steps_per_stage": ("steps_per_stage", int),
    "solver.splitting": ("splitting", str),
    "solver.ledger_stride": ("ledger_stride", int),
    "solver.idle_dt": ("idle_dt", float),
    "probe.delta": ("delta", float),
    "longtime.tau": ("tau", float),
    "longtime.u_target": ("u_target", float),
    "longtime.c_target": ("c_target", float),
    "longtime.periods": ("periods", int),
    "sweep.m_list": ("sweep_m", _parse_int_list),
    "sweep.kinds": ("sweep_kinds", _parse_str_list),
    "findnu.targets": ("findnu_targets", _parse_float_list),
    "findnu.t_star": ("findnu_t_star", float),
    "findnu.tol": ("findnu_tol", float),
    "tolerances.closure": ("closure_tol", float),
    "shells.record": ("record_shells", _parse_bool),
    "snapshots.times": ("snapshot_times", _parse_float_list),
    "ledger.sample_times": ("sample_times", _parse_float_list),
    "out.dir": ("out_dir", str),
    "threads": ("threads", int),
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate; raises ConfigError carrying all violations."""
    violations: list[str] = []
    cfg = ExperimentConfig()
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            violations.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _SCHEMA:
            violations.append(f"{key}: unknown key")
            continue
        if key in seen:
            violations.append(f"{key}: duplicate key")
            continue
        seen.add(key)
        attr, parser = _SCHEMA[key]
        try:
            setattr(cfg, attr, parser(value))
        except (ValueError, TypeError) as exc:
            violations.append(f"{key}: {exc}")
    violations.extend(validate(cfg))
    if violations:
        raise ConfigError(violations)
    return cfg


def validate(cfg: ExperimentConfig) -> list[str]:
    """Re-validate every downstream guard at parse time."""
    v: list[str] = []
    if cfg.grid_n < 8 or (cfg.grid_n & (cfg.grid_n - 1)) != 0:
        v.append(f"grid.n: must be a power of two >= 8, got {cfg.grid_n}")
    if cfg.b < 2:
        v.append(f"schedule.b: base must be >= 2, got {cfg.b}")
    if cfg.m < 0:
        v.append(f"schedule.m: must be >= 0, got {cfg.m}")
    if cfg.kind not in KINDS + ("explicit",):
        v.append(f"schedule.kind: unknown kind {cfg.kind!r}")
    if cfg.kind == "explicit" and cfg.nu is None:
        v.append("schedule.nu: required when schedule.kind = explicit")
    if cfg.nu is not None and cfg.nu < 0.0:
        v.append(f"schedule.nu: must be >= 0, got {cfg.nu}")
    if cfg.continuation not in ("hold", "reversed", "periodized"):
        v.append(f"schedule.continuation: unknown {cfg.continuation!r}")
    if cfg.shears_per_block < 2 or cfg.shears_per_block % 2:
        v.append(f"blocks.shears: must be even and >= 2, got {cfg.shears_per_block}")
    if cfg.amplitude <= 0.0:
        v.append(f"blocks.amplitude: must be > 0, got {cfg.amplitude}")
    if cfg.b >= 2 and cfg.grid_n >= 8 and cfg.m >= 0:
        lam_next = cfg.b ** (cfg.m + 1)
        if lam_next > cfg.grid_n // 2:
            v.append(
                f"schedule.m: resolution guard failed, lambda_{cfg.m + 1} = {lam_next} "
                f"exceeds N/2 = {cfg.grid_n // 2}"
            )
    if cfg.dt_max is not None and cfg.dt_max <= 0.0:
        v.append(f"solver.dt_max: must be > 0, got {cfg.dt_max}")
    if cfg.steps_per_stage < 1:
        v.append(f"solver.steps_per_stage: must be >= 1, got {cfg.steps_per_stage}")
    if cfg.splitting not in ("strang", "lie"):
        v.append(f"solver.splitting: unknown {cfg.splitting!r}")
    if cfg.ledger_stride < 1:
        v.append(f"solver.ledger_stride: must be >= 1, got {cfg.ledger_stride}")
    if not 0.0 < cfg.tau < 1.0:
        v.append(f"longtime.tau: must lie in (0,1), got {cfg.tau}")
    if cfg.periods < 3:
        v.append(f"longtime.periods: need >= 3 whole periods, got {cfg.periods}")
    if not 0.0 < cfg.delta <= 1.0:
        v.append(f"probe.delta: must lie in (0,1], got {cfg.delta}")
    for e in cfg.findnu_targets:
        if not 0.0 <= e <= 1.0:
            v.append(f"findnu.targets: target {e} outside [0,1]")
    if cfg.findnu_tol <= 0.0:
        v.append(f"findnu.tol: must be > 0, got {cfg.findnu_tol}")
    if cfg.closure_tol <= 0.0:
        v.append(f"tolerances.closure: must be > 0, got {cfg.closure_tol}")
    if cfg.threads < 1:
        v.append(f"threads: must be >= 1, got {cfg.threads}")
    for kind in cfg.sweep_kinds:
        if kind not in KINDS:
            v.append(f"sweep.kinds: unknown kind {kind!r}")
    return v
