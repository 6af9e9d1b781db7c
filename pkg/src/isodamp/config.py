"""Project configuration: strict parsing, canonical serialization, hashing.

A single key-tree config file drives the analyze/design/simulate pipelines.
Validation is strict (unknown keys rejected) and every diagnostic carries
the offending field path, because the same schema is served over HTTP where
"somewhere in the body" is useless.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import yaml

from .carlson import DIFFERINTEGRATOR, SHIFTED_SUM, STAGE_KINDS, FoStage, alpha_from_order
from .lti import RationalTF, pid_tf, tf

DESIGN_MODES = ("sweep", "fit_flat")
DEFAULT_ALPHA_GRID = tuple(round(0.05 * i, 2) for i in range(1, 20))


class ConfigError(ValueError):
    """Invalid configuration; `path` points at the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path or "<root>"
        self.message = message
        super().__init__(f"{self.path}: {message}")


def _expect_mapping(data, path):
    if not isinstance(data, dict):
        raise ConfigError(path, "expected a mapping")
    return data


def _reject_unknown(data: dict, known, path):
    for key in data:
        if key not in known:
            raise ConfigError(f"{path}.{key}" if path else str(key), "unknown field")


def _number(value, path, *, minimum=None, strict_min=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, "expected a number")
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(path, "must be finite")
    if minimum is not None and v < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    if strict_min is not None and v <= strict_min:
        raise ConfigError(path, f"must be > {strict_min}")
    return v


def _number_list(value, path, *, min_len=1):
    if not isinstance(value, list) or len(value) < min_len:
        raise ConfigError(path, f"expected a list of at least {min_len} number(s)")
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _pair(value, path, *, positive=True, increasing=True):
    vals = _number_list(value, path, min_len=2)
    if len(vals) != 2:
        raise ConfigError(path, "expected exactly two numbers")
    if positive and vals[0] <= 0:
        raise ConfigError(path, "entries must be > 0")
    if increasing and not vals[0] < vals[1]:
        raise ConfigError(path, "entries must be strictly increasing")
    return (vals[0], vals[1])


@dataclass
class PlantConfig:
    num: list
    den: list
    delay: float = 0.0


@dataclass
class ControllerConfig:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0


@dataclass
class DesignConfig:
    mode: str = "sweep"
    alpha_grid: tuple = DEFAULT_ALPHA_GRID
    k_bracket: tuple = (0.1, 1e4)
    pade_order: int = 3
    flatness_band: tuple = (0.1, 10.0)
    band_points: int = 64
    cascade_stages: int = 0
    flatness_target_deg: float = 5.0
    fit_form: str = SHIFTED_SUM
    divide_gain_by_alpha: bool = False


@dataclass
class SimConfig:
    t_final: float = 30.0
    dt: Optional[float] = None  # None -> default rule at build time
    gain_multipliers: tuple = (0.8, 0.9, 1.0, 1.1, 1.2)
    iso_threshold: float = 2.0


@dataclass
class ProjectConfig:
    plant: PlantConfig
    controller: ControllerConfig
    stages: list = field(default_factory=list)
    design: DesignConfig = field(default_factory=DesignConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    outputs: str = "out"


def _parse_plant(data, path) -> PlantConfig:
    data = _expect_mapping(data, path)
    _reject_unknown(data, {"num", "den", "delay"}, path)
    if "num" not in data:
        raise ConfigError(f"{path}.num", "required")
    if "den" not in data:
        raise ConfigError(f"{path}.den", "required")
    num = _number_list(data["num"], f"{path}.num")
    den = _number_list(data["den"], f"{path}.den")
    if all(abs(c) < 1e-12 for c in den):
        raise ConfigError(f"{path}.den", "denominator must be nonzero")
    delay = _number(data.get("delay", 0.0), f"{path}.delay", minimum=0.0)
    return PlantConfig(num=num, den=den, delay=delay)


def _parse_controller(data, path) -> ControllerConfig:
    data = _expect_mapping(data, path)
    _reject_unknown(data, {"kp", "ki", "kd"}, path)
    cfg = ControllerConfig(
        kp=_number(data.get("kp", 0.0), f"{path}.kp"),
        ki=_number(data.get("ki", 0.0), f"{path}.ki"),
        kd=_number(data.get("kd", 0.0), f"{path}.kd"),
    )
    if cfg.kp == 0 and cfg.ki == 0 and cfg.kd == 0:
        raise ConfigError(path, "empty controller (all gains zero)")
    return cfg


def _parse_stage(data, path) -> FoStage:
    data = _expect_mapping(data, path)
    _reject_unknown(data, {"kind", "q", "alpha", "a", "gain_k"}, path)
    kind = data.get("kind", DIFFERINTEGRATOR)
    if kind not in STAGE_KINDS:
        raise ConfigError(f"{path}.kind", f"must be one of {', '.join(STAGE_KINDS)}")
    a = _number(data.get("a", 0.0), f"{path}.a", minimum=0.0)
    gain_k = _number(data.get("gain_k", 1.0), f"{path}.gain_k", strict_min=0.0)
    has_q, has_alpha = "q" in data, "alpha" in data
    if not has_q and not has_alpha:
        raise ConfigError(path, "stage needs q or alpha")
    try:
        if has_q:
            q = _number(data["q"], f"{path}.q")
            if abs(q) >= 1:
                raise ConfigError(f"{path}.q", "must satisfy |q| < 1")
            derived = 1.0 if q == 0 else alpha_from_order(q)
            if has_alpha:
                # keep the given pair verbatim (bit-stable round trips);
                # FoStage itself enforces consistency
                given = _number(data["alpha"], f"{path}.alpha", strict_min=0.0)
                if not math.isclose(given, derived, rel_tol=1e-6):
                    raise ConfigError(f"{path}.alpha", "inconsistent with q")
                return FoStage(kind, q, a, gain_k, given)
            return FoStage(kind, q, a, gain_k, derived)
        alpha = _number(data["alpha"], f"{path}.alpha", strict_min=0.0)
        return FoStage.from_alpha(kind, alpha, a=a, gain_k=gain_k)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_alpha_grid(value, path):
    if isinstance(value, dict):
        _reject_unknown(value, {"start", "stop", "step"}, path)
        try:
            start = _number(value["start"], f"{path}.start", strict_min=0.0)
            stop = _number(value["stop"], f"{path}.stop", strict_min=0.0)
            step = _number(value["step"], f"{path}.step", strict_min=0.0)
        except KeyError as exc:
            raise ConfigError(f"{path}.{exc.args[0]}", "required") from exc
        if stop <= start:
            raise ConfigError(path, "stop must exceed start")
        n = int(round((stop - start) / step))
        grid = tuple(round(start + i * step, 12) for i in range(n + 1) if start + i * step <= stop + 1e-12)
        return grid
    grid = tuple(_number_list(value, path))
    if any(g <= 0 for g in grid):
        raise ConfigError(path, "entries must be > 0")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(path, "entries must be strictly increasing")
    return grid


def _parse_design(data, path) -> DesignConfig:
    data = _expect_mapping(data, path)
    known = {"mode", "alpha_grid", "k_bracket", "pade_order", "flatness_band",
             "band_points", "cascade_stages", "flatness_target_deg", "fit_form",
             "divide_gain_by_alpha"}
    _reject_unknown(data, known, path)
    cfg = DesignConfig()
    if "mode" in data:
        if data["mode"] not in DESIGN_MODES:
            raise ConfigError(f"{path}.mode", f"must be one of {', '.join(DESIGN_MODES)}")
        cfg.mode = data["mode"]
    if "alpha_grid" in data:
        cfg.alpha_grid = _parse_alpha_grid(data["alpha_grid"], f"{path}.alpha_grid")
    if "k_bracket" in data:
        cfg.k_bracket = _pair(data["k_bracket"], f"{path}.k_bracket")
    if "pade_order" in data:
        order = data["pade_order"]
        if isinstance(order, bool) or not isinstance(order, int) or not 1 <= order <= 5:
            raise ConfigError(f"{path}.pade_order", "must be an integer in 1..5")
        cfg.pade_order = order
    if "flatness_band" in data:
        cfg.flatness_band = _pair(data["flatness_band"], f"{path}.flatness_band")
    if "band_points" in data:
        pts = data["band_points"]
        if isinstance(pts, bool) or not isinstance(pts, int) or pts < 16:
            raise ConfigError(f"{path}.band_points", "must be an integer >= 16")
        cfg.band_points = pts
    if "cascade_stages" in data:
        n = data["cascade_stages"]
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise ConfigError(f"{path}.cascade_stages", "must be an integer >= 0")
        cfg.cascade_stages = n
    if "flatness_target_deg" in data:
        cfg.flatness_target_deg = _number(data["flatness_target_deg"],
                                          f"{path}.flatness_target_deg", strict_min=0.0)
    if "fit_form" in data:
        if data["fit_form"] not in STAGE_KINDS:
            raise ConfigError(f"{path}.fit_form", f"must be one of {', '.join(STAGE_KINDS)}")
        cfg.fit_form = data["fit_form"]
    if "divide_gain_by_alpha" in data:
        if not isinstance(data["divide_gain_by_alpha"], bool):
            raise ConfigError(f"{path}.divide_gain_by_alpha", "must be a boolean")
        cfg.divide_gain_by_alpha = data["divide_gain_by_alpha"]
    return cfg


def _parse_sim(data, path) -> SimConfig:
    data = _expect_mapping(data, path)
    _reject_unknown(data, {"t_final", "dt", "gain_multipliers", "iso_threshold"}, path)
    cfg = SimConfig()
    if "t_final" in data:
        cfg.t_final = _number(data["t_final"], f"{path}.t_final", strict_min=0.0)
    if "dt" in data:
        cfg.dt = _number(data["dt"], f"{path}.dt", strict_min=0.0)
    if "gain_multipliers" in data:
        mults = _number_list(data["gain_multipliers"], f"{path}.gain_multipliers")
        if any(m <= 0 for m in mults):
            raise ConfigError(f"{path}.gain_multipliers", "entries must be > 0")
        cfg.gain_multipliers = tuple(mults)
    if "iso_threshold" in data:
        cfg.iso_threshold = _number(data["iso_threshold"], f"{path}.iso_threshold",
                                    strict_min=0.0)
    return cfg


def parse_config(data) -> ProjectConfig:
    """Validate a raw mapping into a ProjectConfig (strict schema)."""
    data = _expect_mapping(data, "")
    _reject_unknown(data, {"plant", "controller", "stages", "design", "sim", "outputs"}, "")
    if "plant" not in data:
        raise ConfigError("plant", "required")
    if "controller" not in data:
        raise ConfigError("controller", "required")
    plant = _parse_plant(data["plant"], "plant")
    controller = _parse_controller(data["controller"], "controller")

    stages = []
    if "stages" in data:
        if not isinstance(data["stages"], list):
            raise ConfigError("stages", "expected a list")
        stages = [_parse_stage(s, f"stages[{i}]") for i, s in enumerate(data["stages"])]

    design = _parse_design(data["design"], "design") if "design" in data else DesignConfig()
    sim = _parse_sim(data["sim"], "sim") if "sim" in data else SimConfig()

    outputs = data.get("outputs", "out")
    if not isinstance(outputs, str) or not outputs:
        raise ConfigError("outputs", "expected a non-empty string path")
    cfg = ProjectConfig(plant=plant, controller=controller, stages=stages,
                        design=design, sim=sim, outputs=outputs)
    # cross-field check: simulation dt must resolve the dead time
    dt = effective_dt(cfg)
    if plant.delay > 0 and dt > plant.delay / 10 + 1e-12:
        raise ConfigError("sim.dt", "must be <= plant.delay/10")
    return cfg


def effective_dt(cfg: ProjectConfig) -> float:
    """Configured dt, or min(0.001*t_final, delay/20) when left unset."""
    if cfg.sim.dt is not None:
        return cfg.sim.dt
    dt = 0.001 * cfg.sim.t_final
    if cfg.plant.delay > 0:
        dt = min(dt, cfg.plant.delay / 20.0)
    return dt


def load_config(path) -> ProjectConfig:
    """Load and validate a YAML/JSON config file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"unparseable config: {exc}") from exc
    return parse_config(data)


def config_to_dict(cfg: ProjectConfig) -> dict:
    """Plain-dict form of a config (the canonical round-trip representation)."""
    return {
        "plant": {"num": list(cfg.plant.num), "den": list(cfg.plant.den),
                  "delay": cfg.plant.delay},
        "controller": {"kp": cfg.controller.kp, "ki": cfg.controller.ki,
                       "kd": cfg.controller.kd},
        "stages": [s.to_dict() for s in cfg.stages],
        "design": {
            "mode": cfg.design.mode,
            "alpha_grid": list(cfg.design.alpha_grid),
            "k_bracket": list(cfg.design.k_bracket),
            "pade_order": cfg.design.pade_order,
            "flatness_band": list(cfg.design.flatness_band),
            "band_points": cfg.design.band_points,
            "cascade_stages": cfg.design.cascade_stages,
            "flatness_target_deg": cfg.design.flatness_target_deg,
            "fit_form": cfg.design.fit_form,
            "divide_gain_by_alpha": cfg.design.divide_gain_by_alpha,
        },
        "sim": {
            "t_final": cfg.sim.t_final,
            "dt": cfg.sim.dt,
            "gain_multipliers": list(cfg.sim.gain_multipliers),
            "iso_threshold": cfg.sim.iso_threshold,
        },
        "outputs": cfg.outputs,
    }


def normalize_floats(obj):
    """Round-trip floats through 12 significant digits (golden-file policy)."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return None
        return float(f"{obj:.12g}")
    if isinstance(obj, int):
        return obj
    if isinstance(obj, dict):
        return {k: normalize_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize_floats(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return normalize_floats(obj.item())
    return obj


def canonical_json(data) -> str:
    return json.dumps(normalize_floats(data), sort_keys=True, separators=(",", ":"))


def config_hash(cfg: ProjectConfig) -> str:
    """Content hash of the canonical config serialization."""
    return hashlib.sha256(canonical_json(config_to_dict(cfg)).encode()).hexdigest()


def plant_tf(cfg: ProjectConfig) -> RationalTF:
    return tf(cfg.plant.num, cfg.plant.den, cfg.plant.delay)


def controller_tf(cfg: ProjectConfig) -> RationalTF:
    return pid_tf(cfg.controller.kp, cfg.controller.ki, cfg.controller.kd)


def bundled_config_path(name: str) -> Path:
    """Path of a packaged example config (``dcmotor`` or ``foptd``)."""
    res = resources.files("isodamp").joinpath("configs", f"{name}.yaml")
    with resources.as_file(res) as p:
        return Path(p)
