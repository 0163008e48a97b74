"""Request/response models for the inference service. Images travel as
base64-encoded PNG strings."""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class SynthesisRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sketch: str = Field(description="Input image as base64 PNG")
    reference_id: Optional[str] = Field(
        default=None, description="Gallery id of a reference photo")
    reference: Optional[str] = Field(
        default=None, description="Reference photo as base64 PNG")
    mode: Literal["sketch2photo", "photo2sketch"] = "sketch2photo"


class SynthesisResponse(BaseModel):
    grayscale: str = Field(description="Intermediate grayscale as base64 PNG")
    color: str = Field(
        description="Synthesized photo (or sketch, in photo2sketch mode) as base64 PNG")
    mode: Literal["sketch2photo", "photo2sketch"]
    model_version: str
    latency_ms: float
    preprocess: str = Field(description="Transform applied to the upload, or 'none'")


class ReferenceEntry(BaseModel):
    id: str
    thumbnail: str = Field(description="Thumbnail as base64 PNG")


class ReferencesResponse(BaseModel):
    references: list[ReferenceEntry]


class HealthResponse(BaseModel):
    status: str
    model_version: Optional[str] = None
