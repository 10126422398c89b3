"""Pipeline configuration: every threshold in one JSON-serializable record."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Optional

from .errors import FormatError, SchemaError


@dataclass
class PipelineConfig:
    # Street topology
    snap_tol: float = 0.5
    # T-intersection repair
    t_min_separation: float = 170.0
    max_t_gap: float = 30.48  # 100 ft
    # Corner classification / connection
    corner_radius: float = 30.0
    max_connect: float = 30.48  # 100 ft
    # Crossings
    max_cross: float = 40.0
    # Annotation
    ramp_radius: float = 5.0
    construction_buffer: float = 10.0
    orphan_ramp_radius: float = 50.0
    # Assembly
    merge_tol: float = 0.01
    # Projection origin override (lon, lat); default derives from streets bbox.
    origin: Optional[list[float]] = None

    def __post_init__(self):
        for name in (
            "snap_tol", "max_t_gap", "corner_radius", "max_connect",
            "max_cross", "ramp_radius", "construction_buffer",
            "orphan_ramp_radius", "merge_tol",
        ):
            if getattr(self, name) <= 0:
                raise SchemaError(f"config {name} must be positive")
        if not (0.0 < self.t_min_separation <= 180.0):
            raise SchemaError("config t_min_separation must be in (0, 180]")
        if self.origin is not None and len(self.origin) != 2:
            raise SchemaError("config origin must be [lon, lat]")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise SchemaError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def load(cls, path: str) -> "PipelineConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise FormatError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise FormatError(f"{path} must hold a JSON object")
        return cls.from_dict(doc)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")
