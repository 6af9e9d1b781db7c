"""Artifact writers: delimited outputs plus optional rendered figures.

CSV and JSON files are the machine contract (deterministic, 12 significant
digits); PNG figures are an opt-in convenience rendered alongside them from
the same payloads.
"""

from __future__ import annotations

import json
from pathlib import Path

from .config import normalize_floats


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def write_json(payload, path: Path) -> None:
    data = json.dumps(normalize_floats(payload), sort_keys=True, indent=2)
    Path(path).write_text(data + "\n", encoding="utf-8")


def write_analyze(payload: dict, outdir, figures: bool = False) -> list:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    bode = outdir / "bode.csv"
    with open(bode, "w", encoding="utf-8") as fh:
        fh.write("curve,omega_rad_s,mag_db,phase_deg\n")
        for curve in payload["bode"]["curves"]:
            label = curve["label"]
            for w, m, p in zip(curve["omega_rad_s"], curve["mag_db"], curve["phase_deg"]):
                fh.write(f"{label},{_fmt(w)},{_fmt(m)},{_fmt(p)}\n")
    written.append(bode)

    margins = outdir / "margins.json"
    write_json(payload["margins"], margins)
    written.append(margins)

    flatness = outdir / "flatness.json"
    write_json(payload["flatness"], flatness)
    written.append(flatness)

    if figures:
        from .figures import render_bode

        png = outdir / "bode.png"
        render_bode(payload, png)
        written.append(png)
    return written


def write_design(payload: dict, outdir, figures: bool = False) -> list:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    design = outdir / "design.json"
    write_json(payload["design"], design)
    written.append(design)
    stages = outdir / "stages.json"
    write_json(payload["stages"], stages)
    written.append(stages)
    if figures and payload["design"].get("mode") == "sweep":
        from .figures import render_design

        png = outdir / "design.png"
        render_design(payload, png)
        written.append(png)
    return written


def write_simulate(payload: dict, outdir, figures: bool = False) -> list:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for series in payload["series"]:
        path = outdir / f"step_{_fmt(series['multiplier'])}.csv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t_s,y\n")
            for t, y in zip(series["t_s"], series["y"]):
                fh.write(f"{_fmt(t)},{_fmt(y)}\n")
        written.append(path)
    iso = outdir / "isodamping.json"
    write_json(payload["isodamping"], iso)
    written.append(iso)
    if figures:
        from .figures import render_step_overlay

        png = outdir / "steps.png"
        render_step_overlay(payload, png)
        written.append(png)
    return written
