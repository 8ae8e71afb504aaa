"""Run configuration shared by the pipeline, the cache and the CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path

OUTPUT_FORMATS = ("json", "csv", "markdown")


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = 128
    tol_residual: float = 1e-9
    tol_dedup: float = 1e-9
    tol_table: float = 1e-3
    tol_round: float = 1e-6
    output_format: str = "markdown"
    cache_dir: Path | None = None

    def __post_init__(self):
        if int(self.precision_bits) != self.precision_bits or self.precision_bits < 53:
            raise ValueError(f"precision_bits must be an integer >= 53, got {self.precision_bits!r}")
        for name in ("tol_residual", "tol_dedup", "tol_table", "tol_round"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"output_format must be one of {OUTPUT_FORMATS}, got {self.output_format!r}")
        if self.cache_dir is not None and not isinstance(self.cache_dir, Path):
            object.__setattr__(self, "cache_dir", Path(self.cache_dir))

    def numeric_key(self) -> dict:
        """The settings that can change computed numbers (used for cache keys)."""
        return {
            "precision_bits": self.precision_bits,
            "tol_residual": self.tol_residual,
            "tol_dedup": self.tol_dedup,
            "tol_round": self.tol_round,
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cache_dir"] = None if self.cache_dir is None else str(self.cache_dir)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})
