import os
import logging
from typing import Optional, Tuple
from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

ENGINE_VERSION = "ramsey-shapes/1.0.0"


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name, "")
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError as e:
        logger.warning(f"⚠️ Could not parse {name}='{raw}': {e}")
        return default


def _range_env(name: str, default: Optional[Tuple[int, int]]) -> Optional[Tuple[int, int]]:
    raw = os.getenv(name, "")
    if not raw:
        return default
    try:
        lo, hi = (int(part.strip()) for part in raw.split(","))
    except ValueError as e:
        logger.warning(f"⚠️ Could not parse {name}='{raw}': {e}")
        return default
    if lo > hi:
        logger.warning(f"⚠️ {name}='{raw}' has lo > hi, using default")
        return default
    return lo, hi


class Settings:
    def __init__(self):
        # App
        self.APP_NAME: str = "ramsey-shapes"
        self.ENVIRONMENT: str = os.getenv("ENVIRONMENT", "development")
        self.LOG_LEVEL: str = os.getenv("RAMSEY_LOG_LEVEL", "INFO").upper()

        # Artifacts
        self.OUTPUT_DIR: str = os.getenv("RAMSEY_OUTPUT_DIR", "out")
        self.LEDGER_PATH: str = os.getenv(
            "RAMSEY_LEDGER_PATH", os.path.join(self.OUTPUT_DIR, "ledger.ndjson")
        )
        self.LEDGER_SECRET: str = os.getenv("RAMSEY_LEDGER_SECRET", "")

        # Search budgets
        self.MAX_NODES: int = _int_env("RAMSEY_MAX_NODES", 2_000_000)
        self.MAX_SECONDS: int = _int_env("RAMSEY_MAX_SECONDS", 60)
        # unset: scan every seed whose set fits the domain
        self.SEED_RANGE: Optional[Tuple[int, int]] = _range_env("RAMSEY_SEED_RANGE", None)
        self.MAX_MAPS: int = _int_env("RAMSEY_MAX_MAPS", 200_000)

        # Parallelism
        self.WORKERS: int = max(1, _int_env("RAMSEY_WORKERS", 1))
        self.SPLIT_DEPTH: int = max(0, _int_env("RAMSEY_SPLIT_DEPTH", 0))


# Create global settings instance
settings = Settings()
