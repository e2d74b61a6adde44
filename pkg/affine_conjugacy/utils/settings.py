import logging
import os
from dataclasses import dataclass

from dotenv import load_dotenv

# -------------------------------
# Load environment variables
# -------------------------------
load_dotenv()


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        logging.getLogger(__name__).warning("ignoring non-numeric %s=%r", name, raw)
        return default


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logging.getLogger(__name__).warning("ignoring non-integer %s=%r", name, raw)
        return default


@dataclass(frozen=True)
class Settings:
    tolerance: float = 1e-9
    samples: int = 100
    seed: int = 20240611
    sample_box: float = 2.0
    log_level: str = "WARNING"
    workers: int = 4

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            tolerance=_env_float("AFFINE_TOLERANCE", cls.tolerance),
            samples=_env_int("AFFINE_SAMPLES", cls.samples),
            seed=_env_int("AFFINE_SEED", cls.seed),
            sample_box=_env_float("AFFINE_SAMPLE_BOX", cls.sample_box),
            log_level=os.getenv("AFFINE_LOG_LEVEL", cls.log_level).upper(),
            workers=max(1, _env_int("AFFINE_WORKERS", cls.workers)),
        )


settings = Settings.from_env()
