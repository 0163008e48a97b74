"""Thin HTTP client for the inference service.

Used by the CLI's --server mode; keeps all request/response encoding in one
place so the CLI and any other caller agree on the wire format.
"""

import base64
import io
from dataclasses import dataclass

import httpx
import numpy as np
from PIL import Image

from .errors import ServiceError


@dataclass(frozen=True)
class RemoteResult:
    grayscale_png: bytes
    color_png: bytes
    mode: str
    model_version: str
    latency_ms: float
    preprocess: str


def _png_bytes(path: str) -> str:
    with Image.open(path) as img:
        img.load()
        buf = io.BytesIO()
        img.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _decode(b64_data: str) -> bytes:
    return base64.b64decode(b64_data)


class ServiceClient:
    """Synchronous client for a running sketch2photo service."""

    def __init__(self, base_url: str, timeout: float = 120.0,
                 transport: httpx.BaseTransport | None = None):
        self._client = httpx.Client(base_url=base_url, timeout=timeout,
                                    transport=transport)

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _request(self, method: str, endpoint: str, **kwargs) -> httpx.Response:
        try:
            return self._client.request(method, endpoint, **kwargs)
        except httpx.HTTPError as exc:
            raise ServiceError(f"cannot reach service: {exc}") from exc

    @staticmethod
    def _checked(response: httpx.Response) -> httpx.Response:
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ServiceError(f"service error {response.status_code}: {detail}")
        return response

    def health(self) -> dict:
        return self._checked(self._request("GET", "/api/health")).json()

    def references(self) -> list[dict]:
        response = self._checked(self._request("GET", "/api/references"))
        return response.json()["references"]

    def _post(self, endpoint: str, payload: dict) -> RemoteResult:
        response = self._checked(self._request("POST", endpoint, json=payload))
        body = response.json()
        return RemoteResult(
            grayscale_png=_decode(body["grayscale"]),
            color_png=_decode(body["color"]),
            mode=body["mode"],
            model_version=body["model_version"],
            latency_ms=body["latency_ms"],
            preprocess=body["preprocess"],
        )

    def synthesize(self, sketch_path: str, reference_path: str | None = None,
                   reference_id: str | None = None) -> RemoteResult:
        payload: dict = {"sketch": _png_bytes(sketch_path)}
        if reference_path:
            payload["reference"] = _png_bytes(reference_path)
        if reference_id:
            payload["reference_id"] = reference_id
        return self._post("/api/synthesize", payload)

    def photo_to_sketch(self, photo_path: str) -> RemoteResult:
        return self._post("/api/photo2sketch", {"sketch": _png_bytes(photo_path)})


def save_png(data: bytes, path: str) -> None:
    img = Image.open(io.BytesIO(data))
    img.load()
    img.save(path, format="PNG")


def png_to_array(data: bytes) -> np.ndarray:
    """Decode PNG bytes to a float32 [0,1] array (H×W or H×W×3)."""
    img = Image.open(io.BytesIO(data))
    img.load()
    return np.asarray(img, dtype=np.float32) / 255.0
