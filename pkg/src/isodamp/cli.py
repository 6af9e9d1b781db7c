"""Batch entry point: analyze / design / simulate pipelines and the server.

Exit codes: 0 success, 2 invalid config, 3 infeasible design, 4 simulation
divergence (artifacts for surviving runs are still written).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import ConfigError, load_config
from .shaper import DesignInfeasible

EXIT_INVALID_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_DIVERGED = 4


def _load(config_path):
    try:
        return load_config(config_path)
    except ConfigError as exc:
        click.echo(f"invalid config: {exc}", err=True)
        sys.exit(EXIT_INVALID_CONFIG)
    except OSError as exc:
        click.echo(f"cannot read config: {exc}", err=True)
        sys.exit(EXIT_INVALID_CONFIG)


def _outdir(cfg, out):
    return Path(out) if out else Path(cfg.outputs)


@click.group()
def main():
    """Fractional-order phase shaper design and iso-damping verification."""


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Output directory (defaults to the config's `outputs`).")
@click.option("--figures", is_flag=True, help="Render PNG charts alongside the CSV/JSON.")
def analyze(config_path, out, figures):
    """Bode curves, margins and phase flatness of the configured loop."""
    from .pipelines import analyze_config
    from .report import write_analyze

    cfg = _load(config_path)
    try:
        payload = analyze_config(cfg)
    except ValueError as exc:
        click.echo(f"analysis failed: {exc}", err=True)
        sys.exit(EXIT_INVALID_CONFIG)
    for path in write_analyze(payload, _outdir(cfg, out), figures=figures):
        click.echo(str(path))


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.option("--figures", is_flag=True, help="Render PNG charts alongside the CSV/JSON.")
def design(config_path, out, figures):
    """Run the configured stage design (alpha sweep or flat-stage fit)."""
    from .pipelines import design_config
    from .report import write_design

    cfg = _load(config_path)
    try:
        payload = design_config(cfg)
    except DesignInfeasible as exc:
        click.echo(f"design infeasible: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    for path in write_design(payload, _outdir(cfg, out), figures=figures):
        click.echo(str(path))


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.option("--figures", is_flag=True, help="Render PNG charts alongside the CSV/JSON.")
def simulate(config_path, out, figures):
    """Step the closed loop across the configured gain multipliers."""
    from .pipelines import simulate_config
    from .report import write_simulate

    cfg = _load(config_path)
    payload = simulate_config(cfg)
    for path in write_simulate(payload, _outdir(cfg, out), figures=figures):
        click.echo(str(path))
    if payload["isodamping"]["diverged"]:
        click.echo("one or more runs diverged; see isodamping.json", err=True)
        sys.exit(EXIT_DIVERGED)


@main.command()
@click.argument("config_path", required=False,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--bind", default="127.0.0.1", show_default=True)
@click.option("--port", default=8700, show_default=True, type=int)
def serve(config_path, bind, port):
    """Start the HTTP API (and the studio, when its assets are built)."""
    from .api import serve as run_server

    run_server(bind=bind, port=port, config_path=config_path)


if __name__ == "__main__":
    main()
