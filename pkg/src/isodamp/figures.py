"""Matplotlib renderings of the pipeline payloads (PNG alongside the CSVs)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_bode(payload: dict, path) -> None:
    """Magnitude/phase chart with the flatness band shaded on the phase axis."""
    fig, (ax_mag, ax_ph) = plt.subplots(2, 1, figsize=(8, 7), sharex=True)
    for curve in payload["bode"]["curves"]:
        ax_mag.semilogx(curve["omega_rad_s"], curve["mag_db"], label=curve["label"])
        ax_ph.semilogx(curve["omega_rad_s"], curve["phase_deg"], label=curve["label"])
    band = payload["flatness"]["band"]
    for ax in (ax_mag, ax_ph):
        ax.axvspan(band[0], band[1], color="0.9", zorder=0)
        ax.grid(True, which="both", alpha=0.4)
    ax_mag.axhline(0.0, color="k", lw=0.8, alpha=0.6)
    ax_ph.axhline(-180.0, color="k", lw=0.8, alpha=0.6)
    ax_mag.set_ylabel("magnitude [dB]")
    ax_ph.set_ylabel("phase [deg]")
    ax_ph.set_xlabel("frequency [rad/s]")
    spread = payload["flatness"]["spread_deg"]
    ax_ph.set_title(f"phase spread over band: {spread:.3g} deg", fontsize=10)
    ax_mag.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_design(payload: dict, path) -> None:
    """Marginal gain versus alpha; unbounded entries drawn as top markers."""
    rows = payload["design"]["per_alpha"]
    alphas = [r["alpha"] for r in rows]
    finite = [(r["alpha"], r["k_m"]) for r in rows if r["k_m"] is not None]
    unbounded = [r["alpha"] for r in rows if r["unbounded"]]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if finite:
        ax.semilogy([a for a, _ in finite], [k for _, k in finite], "o-",
                    label="marginal gain")
        top = max(k for _, k in finite) * 2
    else:
        top = 1.0
    if unbounded:
        ax.plot(unbounded, [top] * len(unbounded), "^", color="tab:red",
                label="unbounded in bracket")
    star = payload["design"]["alpha_star"]
    ax.axvline(star, color="tab:green", ls="--", lw=1,
               label=f"alpha* = {star:g}")
    ax.set_xlabel("alpha")
    ax.set_ylabel("marginal gain")
    ax.grid(True, which="both", alpha=0.4)
    ax.legend(fontsize=8)
    ax.set_xlim(min(alphas) - 0.02, max(alphas) + 0.02)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_step_overlay(payload: dict, path) -> None:
    """Step traces colored by gain multiplier with the spread annotated."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for series in payload["series"]:
        ax.plot(series["t_s"], series["y"], lw=1.2,
                label=f"x{series['multiplier']:g}")
    iso = payload["isodamping"]
    spread = iso["spread_pp"]
    verdict = {True: "pass", False: "fail", None: "n/a"}[iso["passed"]]
    title = (f"overshoot spread {spread:.3g} pp "
             f"(threshold {iso['threshold_pp']:g} pp): {verdict}"
             if spread is not None else "all runs diverged")
    ax.set_title(title, fontsize=10)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("output")
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=8, title="loop gain")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
