"""
Runtime configuration.

Values come from the environment (prefix ``BELL_``) or a ``.env`` file in the
working directory; command-line flags override them per run.
"""

from functools import lru_cache

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    """Numerical knobs and limits for the toolkit."""

    model_config = SettingsConfigDict(
        env_prefix="BELL_",
        env_file=".env",
        extra="ignore",
    )

    # Largest local dimension allowed on the density-matrix path
    oracle_cap: int = Field(default=16, ge=2)
    threads: int = Field(default=1, ge=1)

    # Threshold search
    q_tol: float = Field(default=1e-6, gt=0)
    q_min: float = Field(default=1e-3, gt=0, lt=1)
    prescan_points: int = Field(default=50, ge=3)
    xi_step: float = Field(default=0.01, gt=0, le=0.5)
    xi_limit: float = Field(default=1e-3, ge=0, le=1)
    coupling_domain: str = Field(default="strict", pattern="^(strict|extended)$")

    # Schmidt-coefficient optimizer
    gamma_max_sweeps: int = Field(default=5000, ge=1)
    gamma_initial_step: float = Field(default=0.1, gt=0)
    gamma_min_step: float = Field(default=1e-7, gt=0)
    gamma_restarts: int = Field(default=3, ge=1)

    consistency_tol: float = Field(default=1e-10, gt=0)
    log_level: str = "WARNING"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings instance."""
    return Settings()
