"""Versioned, checksummed checkpoint files.

Layout: an 8-byte magic, a big-endian uint64 header length, a JSON header
(format version, stage, epoch, payload SHA-256), then the serialized payload
(named parameter blobs, config snapshot, RNG state). Loading verifies the
checksum before deserializing, so truncation or bit rot surfaces as an
integrity error rather than a pickle explosion; unknown format versions are
rejected explicitly. Round trips are bit-exact.
"""

import hashlib
import io
import json
import os
from dataclasses import dataclass

import torch

from .errors import CheckpointIntegrityError, UnsupportedVersionError

MAGIC = b"SK2PCKPT"
FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    stage: str
    epoch: int
    params: dict
    config: dict
    rng_state: dict


def save_checkpoint(checkpoint: Checkpoint, path) -> None:
    payload_buf = io.BytesIO()
    torch.save(
        {
            "params": checkpoint.params,
            "config": checkpoint.config,
            "rng_state": checkpoint.rng_state,
        },
        payload_buf,
    )
    payload = payload_buf.getvalue()
    header = {
        "format_version": FORMAT_VERSION,
        "stage": checkpoint.stage,
        "epoch": checkpoint.epoch,
        "payload_sha256": hashlib.sha256(payload).hexdigest(),
        "payload_size": len(payload),
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")

    path = os.fspath(path)
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(len(header_bytes).to_bytes(8, "big"))
        fh.write(header_bytes)
        fh.write(payload)
    os.replace(tmp, path)


def load_checkpoint(path) -> Checkpoint:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise CheckpointIntegrityError(f"cannot read checkpoint {path}: {exc}") from exc

    if len(blob) < len(MAGIC) + 8 or not blob.startswith(MAGIC):
        raise CheckpointIntegrityError(f"{path}: not a checkpoint file")
    header_len = int.from_bytes(blob[len(MAGIC):len(MAGIC) + 8], "big")
    header_start = len(MAGIC) + 8
    header_end = header_start + header_len
    if header_end > len(blob):
        raise CheckpointIntegrityError(f"{path}: truncated header")
    try:
        header = json.loads(blob[header_start:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointIntegrityError(f"{path}: corrupt header ({exc})") from exc

    version = header.get("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"{path}: checkpoint format version {version!r} is not supported "
            f"(expected {FORMAT_VERSION})")

    payload = blob[header_end:]
    if len(payload) != header.get("payload_size"):
        raise CheckpointIntegrityError(
            f"{path}: payload size mismatch (file truncated or padded)")
    digest = hashlib.sha256(payload).hexdigest()
    if digest != header.get("payload_sha256"):
        raise CheckpointIntegrityError(f"{path}: payload checksum mismatch")

    body = torch.load(io.BytesIO(payload), map_location="cpu", weights_only=False)
    return Checkpoint(
        stage=str(header["stage"]),
        epoch=int(header["epoch"]),
        params=body["params"],
        config=body["config"],
        rng_state=body["rng_state"],
    )


def file_digest(path, length: int = 8) -> str:
    """Short content hash of a file, for model-version strings."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:length]
