"""Run configuration: dataclasses with trained-in defaults plus INI loading.

The config file is sectioned text (configparser syntax) with sections
``[data]``, ``[shape]``, ``[content]``, ``[eval]`` and ``[serve]``. Every
hyperparameter has a default, so an empty file (or none at all) is a valid,
fully specified run; file values override defaults and CLI flags override the
file. ``SKETCH2PHOTO_CONFIG`` names a fallback file when no ``--config`` is
given. Each run echoes its fully resolved config next to its outputs.
"""

import configparser
import dataclasses
import os
from dataclasses import dataclass, field

from .errors import ConfigurationError

ENV_CONFIG_VAR = "SKETCH2PHOTO_CONFIG"
RESOLVED_CONFIG_NAME = "resolved_config.ini"


@dataclass
class DataConfig:
    root: str = ""
    image_size: int = 128
    pen_width: int = 2
    seed: int = 0
    # Noise-sketch augmentation.
    p_complex: float = 0.2
    p_distractive: float = 0.3
    patch_size: int = 50
    mask_crop_size: int = 32
    mask_density_threshold: float = 0.15
    mask_pool_size: int = 256


@dataclass
class ShapeConfig:
    epochs: int = 500
    base_lr: float = 2e-4
    lr_constant_epochs: int = 100
    batch_size: int = 1
    adam_beta1: float = 0.5
    adam_beta2: float = 0.999
    lambda_adv: float = 1.0
    lambda_cycle: float = 10.0
    lambda_identity: float = 0.5
    base_width: int = 64
    residual_blocks: int = 9
    disc_width: int = 64
    disc_layers: int = 4
    buffer_size: int = 50


@dataclass
class ContentConfig:
    epochs: int = 200
    base_lr: float = 2e-4
    lr_constant_epochs: int = 100
    batch_size: int = 1
    adam_beta1: float = 0.5
    adam_beta2: float = 0.999
    p_reference: float = 0.2
    lambda_adv: float = 1.0
    lambda_intensity: float = 10.0
    lambda_style: float = 0.1
    lambda_content: float = 0.05
    base_width: int = 64
    residual_blocks: int = 12
    disc_width: int = 64
    disc_layers: int = 4
    buffer_size: int = 50
    style_extractor_weights: str = ""


@dataclass
class EvalConfig:
    extractor: str = "stub"
    stub_dim: int = 64
    inception_weights: str = ""
    retrieval_photo_weights: str = ""
    retrieval_sketch_weights: str = ""
    k_list: str = "1,5,10,20"
    lpips_metric: str = "l1"

    def parsed_k_list(self) -> tuple:
        try:
            ks = tuple(int(k) for k in self.k_list.replace(" ", "").split(",") if k)
        except ValueError as exc:
            raise ConfigurationError(f"bad k_list {self.k_list!r}") from exc
        if not ks or any(k <= 0 for k in ks):
            raise ConfigurationError(f"bad k_list {self.k_list!r}")
        return ks


@dataclass
class ServeConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    shape_checkpoint: str = ""
    content_checkpoint: str = ""
    gallery_dir: str = ""


_SECTION_TYPES = {
    "data": DataConfig,
    "shape": ShapeConfig,
    "content": ContentConfig,
    "eval": EvalConfig,
    "serve": ServeConfig,
}


@dataclass
class TrainingConfig:
    data: DataConfig = field(default_factory=DataConfig)
    shape: ShapeConfig = field(default_factory=ShapeConfig)
    content: ContentConfig = field(default_factory=ContentConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    serve: ServeConfig = field(default_factory=ServeConfig)

    @property
    def seed(self) -> int:
        return self.data.seed

    def validate(self) -> "TrainingConfig":
        d = self.data
        if d.image_size <= 0 or d.image_size % 4 != 0:
            raise ConfigurationError("data.image_size must be a positive multiple of 4")
        if not (0.0 <= d.p_complex and 0.0 <= d.p_distractive
                and d.p_complex + d.p_distractive <= 1.0):
            raise ConfigurationError("noise probabilities must be >= 0 and sum to <= 1")
        if d.patch_size <= 0 or d.mask_crop_size <= 0 or d.mask_pool_size <= 0:
            raise ConfigurationError("patch/crop/pool sizes must be positive")
        if not 0.0 < d.mask_density_threshold <= 1.0:
            raise ConfigurationError("mask_density_threshold must be in (0, 1]")
        for name, section in (("shape", self.shape), ("content", self.content)):
            if section.epochs <= 0 or section.base_lr <= 0:
                raise ConfigurationError(f"{name}: epochs and base_lr must be positive")
            for f in dataclasses.fields(section):
                if f.name.startswith("lambda_") and getattr(section, f.name) < 0:
                    raise ConfigurationError(f"{name}.{f.name} must be >= 0")
        if not 0.0 <= self.content.p_reference <= 1.0:
            raise ConfigurationError("content.p_reference must be in [0, 1]")
        self.eval.parsed_k_list()
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainingConfig":
        kwargs = {}
        for section, section_cls in _SECTION_TYPES.items():
            values = dict(d.get(section, {}))
            known = {f.name for f in dataclasses.fields(section_cls)}
            unknown = set(values) - known
            if unknown:
                raise ConfigurationError(
                    f"unknown option(s) in [{section}]: {', '.join(sorted(unknown))}")
            kwargs[section] = section_cls(**values)
        return cls(**kwargs).validate()

    @classmethod
    def from_ini(cls, path) -> "TrainingConfig":
        parser = configparser.ConfigParser()
        try:
            with open(path, "r", encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigurationError(f"bad config file {path}: {exc}") from exc

        cfg = cls()
        for section in parser.sections():
            if section not in _SECTION_TYPES:
                raise ConfigurationError(f"{path}: unknown section [{section}]")
            target = getattr(cfg, section)
            fields = {f.name: f for f in dataclasses.fields(target)}
            for key, raw in parser.items(section):
                if key not in fields:
                    raise ConfigurationError(f"{path}: unknown option {key!r} in [{section}]")
                setattr(target, key, _coerce(raw, type(getattr(target, key)),
                                             f"[{section}] {key}"))
        return cfg.validate()

    def to_ini(self) -> str:
        parser = configparser.ConfigParser()
        for section in _SECTION_TYPES:
            parser[section] = {}
            for f in dataclasses.fields(getattr(self, section)):
                value = getattr(getattr(self, section), f.name)
                parser[section][f.name] = str(value)
        import io
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def write_resolved(self, out_dir) -> str:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(os.fspath(out_dir), RESOLVED_CONFIG_NAME)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_ini())
        return path


def _coerce(raw: str, target_type: type, where: str):
    raw = raw.strip()
    try:
        if target_type is bool:
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigurationError(f"{where}: {exc}") from exc


def load_config(path=None) -> TrainingConfig:
    """Load from an explicit path, else $SKETCH2PHOTO_CONFIG, else defaults."""
    if path is None:
        path = os.environ.get(ENV_CONFIG_VAR) or None
    if path is None:
        return TrainingConfig().validate()
    if not os.path.exists(path):
        raise ConfigurationError(f"config file not found: {path}")
    return TrainingConfig.from_ini(path)
