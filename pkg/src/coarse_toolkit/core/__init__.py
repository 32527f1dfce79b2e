# Core module initialization
from .config import ToolkitSettings, configure, get_settings
from .errors import (
    CoarseToolkitError,
    DomainError,
    PreconditionError,
    ScenarioError,
    SchemaError,
)
from .logging_setup import setup_logging
