from pathlib import Path

from dotenv import dotenv_values
from pydantic_settings import BaseSettings, SettingsConfigDict

from .exceptions import UsageError


class Settings(BaseSettings):
    """dnszipf runtime configuration"""

    # Application settings
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"

    # Bundled data
    FIXTURES_DIR: Path = Path(__file__).resolve().parent.parent / "fixtures"

    # Counting settings
    COUNT_WORKERS: int = 1
    COUNT_SHARD_SIZE: int = 50_000

    # Capture settings
    PCAP_SNAPLEN: int = 65535

    model_config = SettingsConfigDict(case_sensitive=True, env_file=".env", extra="ignore")

    @property
    def effective_log_level(self) -> str:
        if self.DEBUG and self.LOG_LEVEL.upper() == "WARNING":
            return "INFO"
        return self.LOG_LEVEL.upper()


settings = Settings()


# Detector overrides accepted in a --thresholds file, with their types
THRESHOLD_KEYS = {
    "window_size": int,
    "k_ranks": int,
    "exclude_top": int,
    "max_top_gap_flat": float,
    "max_zipf_flat": float,
    "min_rank_corr": float,
}


def load_thresholds_file(path: str | Path) -> dict:
    """Parse key=value detector overrides; unknown keys and bad values are usage errors"""
    if not Path(path).is_file():
        raise UsageError(f"Thresholds file {path} not found")

    values = {}
    for key, raw in dotenv_values(path).items():
        if key not in THRESHOLD_KEYS:
            raise UsageError(f"Unknown key {key!r} in thresholds file {path}")
        try:
            values[key] = THRESHOLD_KEYS[key](raw)
        except (TypeError, ValueError) as e:
            raise UsageError(f"Bad value {raw!r} for {key} in thresholds file {path}") from e
    return values
