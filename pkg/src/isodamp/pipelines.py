"""Analyze / design / simulate pipelines shared by the CLI and the HTTP API.

Each pipeline turns a validated ProjectConfig into a plain payload dict with
floats normalized to 12 significant digits.  The CLI writes these payloads
to CSV/JSON artifacts and the API returns them inline, so the two surfaces
are numerically identical by construction.
"""

from __future__ import annotations

import math

import numpy as np

from . import shaper as shaper_mod
from .carlson import FoStage, realize_first_order, validity_band
from .config import (
    ProjectConfig,
    config_hash,
    controller_tf,
    effective_dt,
    normalize_floats,
    plant_tf,
)
from .lti import cascade, freq_response_grid, margins, phase_deg_unwrapped, unity
from .sim import iso_damping_report

GRID_POINTS_PER_DECADE = 200
BAND_EXTENSION_DECADES = 2.0


def _bode_grid(cfg: ProjectConfig) -> np.ndarray:
    w1, w2 = cfg.design.flatness_band
    lo = w1 * 10.0 ** (-BAND_EXTENSION_DECADES)
    hi = w2 * 10.0 ** (BAND_EXTENSION_DECADES)
    n = int(math.ceil(math.log10(hi / lo) * GRID_POINTS_PER_DECADE)) + 1
    return np.geomspace(lo, hi, n)


def _stage_tfs(cfg: ProjectConfig):
    return [realize_first_order(s) for s in cfg.stages]


def _curve(label, g, ws):
    resp = freq_response_grid(g, ws)
    mag_db = 20.0 * np.log10(np.abs(resp))
    phase = np.degrees(np.unwrap(np.angle(resp)))
    return {
        "label": label,
        "omega_rad_s": [float(w) for w in ws],
        "mag_db": [float(v) for v in mag_db],
        "phase_deg": [float(v) for v in phase],
    }


def _stage_notes(cfg: ProjectConfig):
    notes = []
    band = cfg.design.flatness_band
    for i, st in enumerate(cfg.stages):
        lo, hi = validity_band(st)
        if hi < band[0] or lo > band[1]:
            notes.append(
                f"stage {i} ({st.kind}, q={st.q:.4g}): first-order validity band "
                f"[{lo:.4g}, {hi:.4g}] rad/s does not overlap the flatness band; "
                "outside it the stage acts as a plain lead/lag, not a fractional element"
            )
    return notes


def analyze_config(cfg: ProjectConfig) -> dict:
    """Frequency-domain views: labeled bode curves, margins, flatness."""
    plant = plant_tf(cfg)
    controller = controller_tf(cfg)
    stage_tfs = _stage_tfs(cfg)
    ws = _bode_grid(cfg)

    curves = [_curve("plant", plant, ws),
              _curve("plant+controller", cascade(controller, plant), ws)]
    full = cascade(controller, plant, *stage_tfs)
    if stage_tfs:
        curves.append(_curve("plant+controller+stages", full, ws))

    rep = margins(full, float(ws[0]), float(ws[-1]), len(ws))
    spread = shaper_mod.phase_flatness(full, cfg.design.flatness_band,
                                       cfg.design.band_points)
    payload = {
        "config_hash": config_hash(cfg),
        "bode": {"curves": curves},
        "margins": {
            "gain_crossover_wgc": rep.gain_crossover_wgc,
            "phase_crossover_wpc": rep.phase_crossover_wpc,
            "gain_margin": rep.gain_margin,
            "phase_margin": rep.phase_margin,
        },
        "flatness": {
            "band": list(cfg.design.flatness_band),
            "points": cfg.design.band_points,
            "spread_deg": spread,
            "target_deg": cfg.design.flatness_target_deg,
            "within_target": bool(spread <= cfg.design.flatness_target_deg),
        },
        "notes": _stage_notes(cfg),
    }
    return normalize_floats(payload)


def _per_alpha_payload(rows):
    out = []
    for r in rows:
        unbounded = r.k_m is not None and math.isinf(r.k_m)
        out.append({
            "alpha": r.alpha,
            "k_m": None if (r.k_m is None or unbounded) else r.k_m,
            "unbounded": unbounded,
            "stable": r.k_m is not None,
            "constraints_satisfied": r.constraints_satisfied,
        })
    return out


def design_config(cfg: ProjectConfig) -> dict:
    """Run the configured design mode and emit the report plus stage list."""
    plant = plant_tf(cfg)
    controller = controller_tf(cfg)

    if cfg.design.mode == "fit_flat":
        return _design_fit_flat(cfg, plant, controller)

    spec = shaper_mod.DesignSpec(
        plant=plant,
        controller=controller,
        alpha_grid=cfg.design.alpha_grid,
        k_bracket=cfg.design.k_bracket,
        flatness_band=cfg.design.flatness_band,
        pade_order=cfg.design.pade_order,
        band_points=cfg.design.band_points,
        divide_gain_by_alpha=cfg.design.divide_gain_by_alpha,
    )
    report = shaper_mod.design_alpha(spec)
    stages = [report.chosen_stage]
    notes = list(report.notes)
    flatness_after = report.flatness_after
    if cfg.design.cascade_stages > 0:
        cascade_stages = shaper_mod.flatten_cascade(
            plant, controller, report.chosen_stage, cfg.design.flatness_band,
            cfg.design.cascade_stages, target_deg=cfg.design.flatness_target_deg,
            n_points=max(cfg.design.band_points, 128),
        )
        stages += cascade_stages
        loop = cascade(controller, plant, *[realize_first_order(s) for s in stages])
        flatness_after = shaper_mod.phase_flatness(
            loop, cfg.design.flatness_band, cfg.design.band_points)
        notes.append(f"cascade appended {len(cascade_stages)} stage(s) "
                     f"within a budget of {cfg.design.cascade_stages}")

    unbounded_star = math.isinf(report.k_m_at_star)
    payload = {
        "config_hash": config_hash(cfg),
        "design": {
            "mode": "sweep",
            "alpha_star": report.alpha_star,
            "q_star": report.q_star,
            "k_m_at_star": None if unbounded_star else report.k_m_at_star,
            "margin_unbounded": unbounded_star,
            "per_alpha": _per_alpha_payload(report.per_alpha),
            "flatness_before_deg": report.flatness_before,
            "flatness_after_deg": flatness_after,
            "flatness_band": list(cfg.design.flatness_band),
            "notes": notes,
        },
        "stages": [s.to_dict() for s in stages],
    }
    return normalize_floats(payload)


REFERENCE_FIT_ORDER = 0.66  # first-order shaper order for balanced lag+delay plants


def _design_fit_flat(cfg: ProjectConfig, plant, controller) -> dict:
    loop = cascade(controller, plant)
    ws = _bode_grid(cfg)
    rep = margins(loop, float(ws[0]), float(ws[-1]), len(ws))
    if rep.gain_crossover_wgc is None:
        raise shaper_mod.DesignInfeasible(
            "no gain crossover in the analysis band; cannot place the flat stage")
    w_gc = rep.gain_crossover_wgc
    stage = shaper_mod.fit_flat_stage(plant, controller, cfg.design.fit_form, w_gc)
    slope0 = shaper_mod.phase_slope(loop, w_gc)
    slope1 = shaper_mod.phase_slope(
        cascade(loop, realize_first_order(stage)), w_gc)
    reduction = 100.0 * (1.0 - abs(slope1) / abs(slope0)) if slope0 else 0.0
    notes = [
        f"fitted fractional order magnitude {abs(stage.q):.4g}; the reference "
        f"order {REFERENCE_FIT_ORDER} for balanced lag-plus-delay plants differs "
        f"by {abs(abs(stage.q) - REFERENCE_FIT_ORDER):.4g}",
        "stage slope optimized at the controller-plus-plant gain crossover; "
        "flatness and simulation use the true dead time",
    ]
    payload = {
        "config_hash": config_hash(cfg),
        "design": {
            "mode": "fit_flat",
            "w_gc": w_gc,
            "stage_form": cfg.design.fit_form,
            "q": stage.q,
            "a": stage.a,
            "alpha": stage.alpha,
            "phase_slope_before": slope0,
            "phase_slope_after": slope1,
            "slope_reduction_pct": reduction,
            "notes": notes,
        },
        "stages": [stage.to_dict()],
    }
    return normalize_floats(payload)


def simulate_config(cfg: ProjectConfig) -> dict:
    """Step the closed loop across gain multipliers; emit traces and spread."""
    plant = plant_tf(cfg)
    controller = controller_tf(cfg)
    stage_tfs = _stage_tfs(cfg)
    shaper_tf = cascade(*stage_tfs) if stage_tfs else unity()
    dt = effective_dt(cfg)
    report = iso_damping_report(
        plant, controller, shaper_tf, list(cfg.sim.gain_multipliers),
        cfg.sim.t_final, dt, threshold=cfg.sim.iso_threshold)

    runs = []
    for mult, ov in report.runs:
        if ov is None:
            runs.append({"multiplier": mult, "diverged": True})
        else:
            runs.append({
                "multiplier": mult,
                "diverged": False,
                "overshoot_pct": ov.overshoot_pct,
                "peak_time_s": ov.peak_time,
                "settling_time_2pct_s": ov.settling_time_2pct,
                "final_value": ov.final_value,
                "settled": ov.settled,
            })
    series = [{
        "multiplier": s.gain_label,
        "t_s": [float(v) for v in s.t],
        "y": [float(v) for v in s.y],
    } for s in report.series]

    payload = {
        "config_hash": config_hash(cfg),
        "isodamping": {
            "threshold_pp": report.threshold,
            "spread_pp": report.spread,
            "passed": report.passed,
            "diverged": list(report.diverged),
            "runs": runs,
            "notes": [f"iso-damping verdict uses the configured spread threshold "
                      f"of {report.threshold:g} percentage points"],
        },
        "series": series,
        "dt": dt,
    }
    return normalize_floats(payload)
