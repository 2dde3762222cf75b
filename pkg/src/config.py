"""Configuration management."""

from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict
from sympy import Rational


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    # Logging
    log_level: str = "warning"

    # Lattice-core settings
    isomorphism_height_bound: int = 50

    # Reflectivity settings
    rank2_root_height: int = 1000
    vinberg_max_walls: int = 32
    vinberg_max_priority: str = "64"
    walk_max_steps: int = 256

    # Batch settings
    jobs: int = 1

    # App info
    app_version: str = "1.0.0"

    @property
    def vinberg_priority_bound(self) -> Rational:
        """Get the Vinberg priority budget as an exact rational."""
        return Rational(self.vinberg_max_priority)


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
