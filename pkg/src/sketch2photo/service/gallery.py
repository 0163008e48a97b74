"""Reference-photo gallery scanned once at service startup."""

import base64
import hashlib
import io
import os

from PIL import Image

from ..data.images import ColorPhoto
from ..errors import ConfigurationError, DataError

_IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg")


class ReferenceGallery:
    """Immutable id → reference photo mapping with pre-rendered thumbnails.

    Ids are content hashes, so re-scanning an unchanged directory yields the
    same ids and clients can cache by id.
    """

    def __init__(self, directory, image_size: int = 128, thumbnail_size: int = 64):
        directory = os.fspath(directory)
        if not os.path.isdir(directory):
            raise ConfigurationError(f"reference gallery directory missing: {directory}")
        self._photos: dict[str, ColorPhoto] = {}
        self._thumbnails: list[tuple[str, str]] = []
        for name in sorted(os.listdir(directory)):
            if not name.lower().endswith(_IMAGE_EXTENSIONS):
                continue
            path = os.path.join(directory, name)
            with open(path, "rb") as fh:
                item_id = hashlib.sha256(fh.read()).hexdigest()[:12]
            if item_id in self._photos:
                continue  # byte-identical duplicate
            photo = ColorPhoto.from_file(path, image_size)
            self._photos[item_id] = photo
            self._thumbnails.append((item_id, _thumbnail_b64(path, thumbnail_size)))

    def __len__(self) -> int:
        return len(self._photos)

    def entries(self) -> list[tuple[str, str]]:
        """(id, thumbnail base64 PNG) in stable filename order."""
        return list(self._thumbnails)

    def get(self, item_id: str) -> ColorPhoto | None:
        return self._photos.get(item_id)


def _thumbnail_b64(path, size: int) -> str:
    try:
        with Image.open(path) as img:
            thumb = img.convert("RGB").resize((size, size), Image.BILINEAR)
    except OSError as exc:
        raise DataError(f"{path}: cannot decode image ({exc})") from exc
    buf = io.BytesIO()
    thumb.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")
