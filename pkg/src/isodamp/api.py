"""Stateless HTTP JSON facade over the analyze/design/simulate pipelines.

Every request carries the full project config; responses inline the same
payloads the CLI writes to files (identical code path, identical numbers)
plus the config content hash for client-side cache keying.  Desk-scale
problems complete well under a second, so computation is synchronous with a
hard 30 s timeout.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from .config import ConfigError, parse_config
from .shaper import DesignInfeasible

COMPUTE_TIMEOUT_S = 30.0


def _studio_dist() -> Path | None:
    # repo layout: frontend/dist next to the package source tree
    here = Path(__file__).resolve()
    for base in [here.parents[2], *here.parents]:
        candidate = base / "frontend" / "dist"
        if candidate.is_dir():
            return candidate
    return None


def create_app(config_path=None) -> FastAPI:
    app = FastAPI(title="isodamp", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    pool = ThreadPoolExecutor(max_workers=4)

    default_config = None
    if config_path:
        import yaml

        default_config = yaml.safe_load(Path(config_path).read_text(encoding="utf-8"))

    def run_pipeline(fn, body):
        try:
            cfg = parse_config(body)
        except ConfigError as exc:
            return JSONResponse(status_code=400, content={
                "error": "invalid config", "path": exc.path, "message": exc.message})
        future = pool.submit(fn, cfg)
        try:
            payload = future.result(timeout=COMPUTE_TIMEOUT_S)
        except FutureTimeout:
            return JSONResponse(status_code=408, content={"error": "compute timeout"})
        except DesignInfeasible as exc:
            return JSONResponse(status_code=409, content={
                "error": "design infeasible", "message": str(exc)})
        except ValueError as exc:
            return JSONResponse(status_code=422, content={
                "error": "analysis failed", "message": str(exc)})
        status = 200
        iso = payload.get("isodamping")
        if iso and iso.get("diverged"):
            status = 207  # partial results: some gain multipliers diverged
        return JSONResponse(status_code=status, content=payload)

    @app.get("/health")
    def health():
        return PlainTextResponse("ok")

    @app.get("/config/default")
    def default_cfg():
        if default_config is None:
            return JSONResponse(status_code=404, content={"error": "no default config"})
        return JSONResponse(content=default_config)

    @app.post("/analyze")
    async def analyze(request: Request):
        from .pipelines import analyze_config

        return run_pipeline(analyze_config, await _body(request))

    @app.post("/design")
    async def design(request: Request):
        from .pipelines import design_config

        return run_pipeline(design_config, await _body(request))

    @app.post("/simulate")
    async def simulate(request: Request):
        from .pipelines import simulate_config

        return run_pipeline(simulate_config, await _body(request))

    async def _body(request: Request):
        try:
            return await request.json()
        except Exception:
            return None

    dist = _studio_dist()
    if dist is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=dist, html=True), name="studio")
    else:
        @app.get("/")
        def index():
            return PlainTextResponse(
                "isodamp API. POST /analyze, /design or /simulate with a project "
                "config as JSON. The studio front end is not built; run "
                "`npm run build` in frontend/ to enable it.")

    return app


def serve(bind: str = "127.0.0.1", port: int = 8700, config_path=None) -> None:
    import uvicorn

    uvicorn.run(create_app(config_path=config_path), host=bind, port=port,
                log_level="warning")
