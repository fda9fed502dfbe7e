"""HTTP service exposing inference and region aggregation to the UI."""

import base64
import binascii
import threading
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import images
from .aggregate import RegionSpec, multi_force_query
from .model.infer import infer
from .model.train import load_checkpoint

DEFAULT_PORT = 8787
MAX_PAYLOAD_BYTES = 1_000_000


class InferRequest(BaseModel):
    sketch: str  # base64 PNG, 1-channel
    force_xy: tuple[int, int]
    category: str | None = None


class RegionBody(BaseModel):
    cx: int
    cy: int
    radius: float = Field(gt=0)
    angle_tol_deg: float = 10.0
    max_points: int = 8


class AggregateRequest(BaseModel):
    sketch: str
    region: RegionBody
    category: str | None = None


def _decode_sketch(b64: str, resolution: int) -> np.ndarray:
    try:
        raw = base64.b64decode(b64, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise HTTPException(status_code=400, detail=f"sketch is not valid base64: {exc}")
    try:
        img = images.load_image(raw)
    except Exception as exc:  # noqa: BLE001 - malformed image payload
        raise HTTPException(status_code=400, detail=f"sketch is not a decodable PNG: {exc}")
    if img.ndim == 3:
        img = img.mean(axis=2)
    if img.shape != (resolution, resolution):
        raise HTTPException(
            status_code=422,
            detail=f"sketch must be {resolution}x{resolution} for this checkpoint",
        )
    return img


def create_app(
    checkpoints: dict[str, str | Path],
    default_category: str | None = None,
    max_payload: int = MAX_PAYLOAD_BYTES,
) -> FastAPI:
    """Build the service; `checkpoints` maps category name -> checkpoint path."""
    app = FastAPI(title="stresspix", version="1")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    bundles = {name: load_checkpoint(path) for name, path in checkpoints.items()}
    default = default_category or (sorted(bundles)[0] if bundles else None)
    # Model weights are immutable after load; the lock serializes forward
    # passes so concurrent requests stay correct on a single compute stream.
    infer_lock = threading.Lock()

    def pick_bundle(category: str | None) -> dict:
        name = category or default
        if name is None or name not in bundles:
            raise HTTPException(status_code=404, detail=f"unknown checkpoint category {name!r}")
        return bundles[name]

    @app.middleware("http")
    async def limit_payload(request: Request, call_next):
        length = request.headers.get("content-length")
        if length and int(length) > max_payload:
            from fastapi.responses import JSONResponse

            return JSONResponse(status_code=413, content={"detail": "payload too large"})
        return await call_next(request)

    @app.get("/health")
    def health():
        return {
            "status": "ok" if bundles else "degraded",
            "checkpoints": [
                {
                    "category": name,
                    "epoch": b["epoch"],
                    "resolution": b["generator_config"].resolution,
                }
                for name, b in sorted(bundles.items())
            ],
        }

    @app.post("/api/v1/infer")
    def infer_endpoint(req: InferRequest):
        bundle = pick_bundle(req.category)
        res = bundle["generator_config"].resolution
        x, y = req.force_xy
        if not (0 <= x < res and 0 <= y < res):
            raise HTTPException(status_code=422, detail=f"force_xy {req.force_xy} out of bounds")
        sketch = _decode_sketch(req.sketch, res)
        with infer_lock:
            result = infer(bundle["generator"], sketch, (x, y))
        normal_b64 = None
        if result.normal is not None:
            normal_b64 = base64.b64encode(images.encode_rgb8(result.normal)).decode()
        return {
            "normal": normal_b64,
            "stress": base64.b64encode(images.encode_gray16(result.stress)).decode(),
            "mask": base64.b64encode(images.encode_gray8(result.mask)).decode(),
            "latency_ms": result.latency_ms,
            "warnings": result.warnings,
        }

    @app.post("/api/v1/aggregate")
    def aggregate_endpoint(req: AggregateRequest):
        bundle = pick_bundle(req.category)
        res = bundle["generator_config"].resolution
        r = req.region
        if not (0 <= r.cx < res and 0 <= r.cy < res):
            raise HTTPException(status_code=422, detail=f"region center ({r.cx},{r.cy}) out of bounds")
        sketch = _decode_sketch(req.sketch, res)
        try:
            region = RegionSpec(
                center=(r.cx, r.cy),
                radius=r.radius,
                angle_tolerance_deg=r.angle_tol_deg,
                max_points=r.max_points,
            )
            with infer_lock:
                result = multi_force_query(bundle["generator"], sketch, region)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {
            "aggregated": base64.b64encode(images.encode_gray16(result.aggregated)).decode(),
            "selected_pixels": [list(p) for p in result.selected_pixels],
            "per_force_count": len(result.per_force),
            "warnings": result.base.warnings,
        }

    return app


def run(checkpoints: dict[str, str], default_category: str | None, port: int = DEFAULT_PORT):
    import uvicorn

    app = create_app(checkpoints, default_category)
    uvicorn.run(app, host="127.0.0.1", port=port)
