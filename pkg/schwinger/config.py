"""
Runtime settings: oracle budgets and log level.

Values come from explicit arguments, then environment variables (a local
.env file is loaded first), then defaults.
"""
from dataclasses import dataclass, replace
from os import environ
from typing import Optional
import logging

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_MAX_DENSE = 4096
DEFAULT_MAX_GRAM = 256
DEFAULT_MAX_OPERATOR_DENSE = 64
DEFAULT_MAX_SCAN = 10_000_000
DEFAULT_MAX_PAIRS = 250_000
DEFAULT_SAMPLE_PAIRS = 1000


@dataclass(frozen=True)
class Settings:
    """
    Budgets for the verification suite.

    Attributes:
        max_dense: Largest M for dense vector oracles (O(M^2) memory)
        max_gram: Largest M for full Gram-matrix checks
        max_operator_dense: Largest M for dense operator-product oracles
        max_scan: Largest M for brute-force residue scans
        max_pairs: Largest number of label pairs checked exhaustively
        sample_pairs: Label pairs drawn when max_pairs is exceeded
        log_level: Logging level name
    """
    max_dense: int = DEFAULT_MAX_DENSE
    max_gram: int = DEFAULT_MAX_GRAM
    max_operator_dense: int = DEFAULT_MAX_OPERATOR_DENSE
    max_scan: int = DEFAULT_MAX_SCAN
    max_pairs: int = DEFAULT_MAX_PAIRS
    sample_pairs: int = DEFAULT_SAMPLE_PAIRS
    log_level: str = 'WARNING'

    def __post_init__(self):
        for name in ('max_dense', 'max_gram', 'max_operator_dense', 'max_scan',
                     'max_pairs', 'sample_pairs'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ValueError(f"Setting {name} must be a non-negative integer, got {value!r}.")
        if not isinstance(logging.getLevelName(self.log_level.upper()), int):
            raise ValueError(f"Unknown log level: {self.log_level}.")

    def with_overrides(self, **overrides) -> 'Settings':
        """Copy with every non-None override applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def _env_int(name: str, default: int) -> int:
    raw = environ.get(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"Environment variable {name} must be an integer, got {raw!r}.")


def load_settings(max_dense: Optional[int] = None, log_level: Optional[str] = None,
                  **overrides) -> Settings:
    """
    Build Settings from the environment, then apply explicit overrides.

    Environment:
        SCHWINGER_MAX_DENSE, SCHWINGER_MAX_GRAM, SCHWINGER_MAX_OPERATOR_DENSE,
        SCHWINGER_MAX_SCAN, SCHWINGER_MAX_PAIRS, SCHWINGER_LOG_LEVEL
    """
    settings = Settings(
        max_dense=_env_int('SCHWINGER_MAX_DENSE', DEFAULT_MAX_DENSE),
        max_gram=_env_int('SCHWINGER_MAX_GRAM', DEFAULT_MAX_GRAM),
        max_operator_dense=_env_int('SCHWINGER_MAX_OPERATOR_DENSE', DEFAULT_MAX_OPERATOR_DENSE),
        max_scan=_env_int('SCHWINGER_MAX_SCAN', DEFAULT_MAX_SCAN),
        max_pairs=_env_int('SCHWINGER_MAX_PAIRS', DEFAULT_MAX_PAIRS),
        log_level=environ.get('SCHWINGER_LOG_LEVEL', 'WARNING'),
    )
    settings = settings.with_overrides(max_dense=max_dense, log_level=log_level, **overrides)
    logger.debug(f"Resolved settings: {settings}")
    return settings
