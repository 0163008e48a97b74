from .app import create_app, serve
from .gallery import ReferenceGallery

__all__ = ["create_app", "serve", "ReferenceGallery"]
