"""Configuration management for gmt-lab."""

import os
from pathlib import Path
from typing import Optional

import yaml
from pydantic import BaseModel, Field

DIMENSION_CAP_ENV = "GMT_LAB_DIMENSION_CAP"


class FragmentConfig(BaseModel):
    """Fragment construction."""

    default_bound: int = Field(default=4, ge=1, le=6)


class SolverConfig(BaseModel):
    """State solvers."""

    seed_limit: int = Field(default=8, ge=0)
    det_limit: Optional[int] = None
    poss_limit: Optional[int] = 64


class PolytopeConfig(BaseModel):
    """State polytope enumeration."""

    dimension_cap: int = Field(default=24, ge=0)

    def resolved_dimension_cap(self) -> int:
        """The cap, with the environment variable taking precedence over the file."""
        raw = os.environ.get(DIMENSION_CAP_ENV)
        if raw is None or not raw.strip():
            return self.dimension_cap
        try:
            return int(raw)
        except ValueError:
            return self.dimension_cap


class StructureConfig(BaseModel):
    """Structural checks."""

    weak_arity: int = Field(default=3, ge=1)
    product_search_bound: int = Field(default=9, ge=0)
    max_enumeration: int = Field(default=5000, ge=0)


class ReportConfig(BaseModel):
    """Report size limits."""

    max_witness_items: int = 20
    max_line_length: int = 200
    max_text_lines: int = 400
    truncation_message: str = "... (truncated)"


class Config(BaseModel):
    """Main configuration class."""

    fragment: FragmentConfig = Field(default_factory=FragmentConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    polytope: PolytopeConfig = Field(default_factory=PolytopeConfig)
    structure: StructureConfig = Field(default_factory=StructureConfig)
    report: ReportConfig = Field(default_factory=ReportConfig)

    @classmethod
    def load_from_file(cls, path: Optional[Path] = None) -> "Config":
        """Load configuration from YAML file."""
        if path is None:
            path = Path.home() / ".config" / "gmt_lab" / "config.yaml"

        if not path.exists():
            return cls()

        with open(path, "r") as f:
            data = yaml.safe_load(f)

        if data and "gmt_lab" in data:
            return cls(**data["gmt_lab"])

        return cls()
