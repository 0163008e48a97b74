"""FastAPI inference service wrapping a loaded synthesis engine.

Uploads of any size are padded to a white square and resized to the model
resolution. Malformed payloads get a 400 with the reason; requests that need
an unloaded model get a 503. Inference is deterministic, so identical
requests produce byte-identical image payloads.
"""

import base64
import binascii
import io
import time

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from PIL import Image

from .. import __version__
from ..config import TrainingConfig
from ..data.images import ColorPhoto, SketchImage
from ..errors import ConfigurationError
from ..synthesis import SynthesisEngine
from .gallery import ReferenceGallery
from .schemas import (
    HealthResponse,
    ReferenceEntry,
    ReferencesResponse,
    SynthesisRequest,
    SynthesisResponse,
)


def _decode_png(b64_data: str, field: str) -> Image.Image:
    try:
        raw = base64.b64decode(b64_data, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise HTTPException(400, f"{field}: invalid base64 ({exc})") from exc
    try:
        img = Image.open(io.BytesIO(raw))
        img.load()
    except OSError as exc:
        raise HTTPException(400, f"{field}: cannot decode image ({exc})") from exc
    return img


def _encode_png(arr: np.ndarray) -> str:
    """Encode H×W (grayscale) or H×W×3 uint8-able [0,1] array as base64 PNG."""
    data = np.round(arr * 255.0).astype(np.uint8)
    img = Image.fromarray(data)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _normalize_upload(img: Image.Image, size: int) -> tuple[Image.Image, str]:
    """White-pad to square and resize to the model resolution."""
    if img.size == (size, size):
        return img, "none"
    w, h = img.size
    note = f"{w}x{h} -> {size}x{size}"
    if w != h:
        side = max(w, h)
        canvas = Image.new("RGB", (side, side), (255, 255, 255))
        canvas.paste(img.convert("RGB"), ((side - w) // 2, (side - h) // 2))
        img = canvas
        note += " (white aspect pad)"
    return img.resize((size, size), Image.BILINEAR), note


def create_app(engine: SynthesisEngine | None = None,
               gallery: ReferenceGallery | None = None) -> FastAPI:
    app = FastAPI(title="sketch2photo", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def _require_engine() -> SynthesisEngine:
        if engine is None:
            raise HTTPException(503, "model not loaded")
        return engine

    def _resolve_reference(request: SynthesisRequest, size: int) -> ColorPhoto | None:
        if request.reference_id and request.reference:
            raise HTTPException(400, "provide reference_id or reference, not both")
        if request.reference_id:
            if gallery is None:
                raise HTTPException(400, "no reference gallery configured")
            photo = gallery.get(request.reference_id)
            if photo is None:
                raise HTTPException(400, f"unknown reference_id {request.reference_id!r}")
            return photo
        if request.reference:
            img, _ = _normalize_upload(_decode_png(request.reference, "reference"), size)
            hwc = np.asarray(img.convert("RGB"), dtype=np.float32) / 255.0
            return ColorPhoto(np.transpose(hwc, (2, 0, 1)))
        return None

    def _run(request: SynthesisRequest) -> SynthesisResponse:
        eng = _require_engine()
        start = time.perf_counter()
        img, note = _normalize_upload(_decode_png(request.sketch, "sketch"), eng.image_size)

        if request.mode == "photo2sketch":
            hwc = np.asarray(img.convert("RGB"), dtype=np.float32) / 255.0
            photo = ColorPhoto(np.transpose(hwc, (2, 0, 1)))
            from ..data.images import to_grayscale
            gray = to_grayscale(photo)
            sketch = eng.photo_to_sketch(photo)
            grayscale_b64 = _encode_png(gray.pixels)
            color_b64 = _encode_png(sketch.pixels)
        else:
            sketch = SketchImage(np.asarray(img.convert("L"), dtype=np.float32) / 255.0)
            reference = _resolve_reference(request, eng.image_size)
            if not eng.has_content_stage:
                raise HTTPException(503, "content model not loaded")
            gray, color = eng.synthesize(sketch, reference)
            grayscale_b64 = _encode_png(gray.pixels)
            color_b64 = _encode_png(np.transpose(color.pixels, (1, 2, 0)))

        latency_ms = (time.perf_counter() - start) * 1000.0
        return SynthesisResponse(
            grayscale=grayscale_b64,
            color=color_b64,
            mode=request.mode,
            model_version=eng.model_version,
            latency_ms=latency_ms,
            preprocess=note,
        )

    @app.post("/api/synthesize", response_model=SynthesisResponse)
    def synthesize(request: SynthesisRequest) -> SynthesisResponse:
        return _run(request)

    @app.post("/api/photo2sketch", response_model=SynthesisResponse)
    def photo2sketch(request: SynthesisRequest) -> SynthesisResponse:
        return _run(request.model_copy(update={"mode": "photo2sketch"}))

    @app.get("/api/references", response_model=ReferencesResponse)
    def references() -> ReferencesResponse:
        entries = gallery.entries() if gallery is not None else []
        return ReferencesResponse(
            references=[ReferenceEntry(id=i, thumbnail=t) for i, t in entries])

    @app.get("/api/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(
            status="ok",
            model_version=engine.model_version if engine is not None else None,
        )

    return app


def serve(config: TrainingConfig) -> None:
    """Build the engine/gallery from config and run uvicorn (blocking)."""
    import uvicorn

    serve_cfg = config.serve
    if not serve_cfg.shape_checkpoint:
        raise ConfigurationError("serve.shape_checkpoint is required")
    engine = SynthesisEngine(serve_cfg.shape_checkpoint,
                             serve_cfg.content_checkpoint or None)
    gallery = None
    if serve_cfg.gallery_dir:
        gallery = ReferenceGallery(serve_cfg.gallery_dir, engine.image_size)
    app = create_app(engine, gallery)
    uvicorn.run(app, host=serve_cfg.host, port=serve_cfg.port)
