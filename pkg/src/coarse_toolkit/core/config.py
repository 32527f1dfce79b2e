"""
Toolkit settings.

Settings are a frozen pydantic model. A process-wide default is returned by
`get_settings()`; `configure()` swaps it for a copy with overrides applied.
"""

import json
import os
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import SchemaError

CONFIG_ENV_VAR = "COARSE_TOOLKIT_CONFIG"


class ToolkitSettings(BaseModel):
    """Tunable constants used across the toolkit."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tolerance: float = Field(default=1e-9, ge=0.0)
    exp2_cap: float = Field(default=float(2**40), gt=1.0)
    default_seed: int = 20251215
    sigma_cap: float = Field(default=8.0, ge=0.0)
    dense_threshold: float = Field(default=0.25, gt=0.0, le=1.0)
    oracle_max_vertices: int = Field(default=300, ge=1)
    trend_threshold: float = Field(default=0.25, ge=0.0)
    output_dir: str = "reports"
    log_level: str = "INFO"

    @classmethod
    def from_file(cls, path: str) -> "ToolkitSettings":
        """Load settings from a JSON file."""
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            first = exc.errors()[0]
            pointer = "/" + "/".join(str(part) for part in first["loc"])
            raise SchemaError(first["msg"], pointer) from exc

    @classmethod
    def from_env(cls) -> "ToolkitSettings":
        """Load settings from the file named by COARSE_TOOLKIT_CONFIG, if set."""
        path = os.environ.get(CONFIG_ENV_VAR)
        if path:
            return cls.from_file(path)
        return cls()


_settings: Optional[ToolkitSettings] = None


def get_settings() -> ToolkitSettings:
    """Return the process-wide settings, loading them on first use."""
    global _settings
    if _settings is None:
        _settings = ToolkitSettings.from_env()
    return _settings


def configure(settings: Optional[ToolkitSettings] = None, **overrides: Any) -> ToolkitSettings:
    """
    Replace the process-wide settings.

    Args:
        settings: Base settings; defaults to the current ones.
        **overrides: Field values to override.

    Returns:
        The new settings.
    """
    global _settings
    base = settings or get_settings()
    _settings = base.model_copy(update=overrides) if overrides else base
    return _settings
