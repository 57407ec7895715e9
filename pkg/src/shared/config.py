from pydantic import AliasChoices, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.shared import constants


class Settings(BaseSettings):
    """
    Centralized configuration management using Pydantic Settings.
    Reads from environment variables and .env file.
    """

    # --- App Config ---
    LOG_LEVEL: str = Field(validation_alias="LOG_LEVEL", default="INFO")
    # "text" for the human-readable formatter, "json" for structured records
    LOG_FORMAT: str = Field(validation_alias=AliasChoices("LOG_FORMAT", "PURSUIT_LOG_FORMAT"), default="text")
    OUTPUT_DIR: str = Field(validation_alias="PURSUIT_OUTPUT_DIR", default="runs")

    # --- Integrator defaults (a scenario file may override rel_tol, abs_tol, mu_min) ---
    REL_TOL: float = Field(validation_alias="PURSUIT_REL_TOL", default=constants.DEFAULT_REL_TOL, gt=0)
    ABS_TOL: float = Field(validation_alias="PURSUIT_ABS_TOL", default=constants.DEFAULT_ABS_TOL, gt=0)
    MU_MIN: float = Field(validation_alias="PURSUIT_MU_MIN", default=constants.DEFAULT_MU_MIN, lt=0)
    EVENT_TOL: float = Field(validation_alias="PURSUIT_EVENT_TOL", default=constants.DEFAULT_EVENT_TOL, gt=0)

    # --- Periodic orbit search ---
    ORBIT_TOL: float = Field(validation_alias="PURSUIT_ORBIT_TOL", default=constants.ORBIT_TOL, gt=0)
    ORBIT_MAX_ITERS: int = Field(validation_alias="PURSUIT_ORBIT_MAX_ITERS", default=constants.ORBIT_MAX_ITERS, gt=0)

    # --- Export ---
    SAMPLES_PER_PI: int = Field(validation_alias="PURSUIT_SAMPLES_PER_PI", default=64, gt=0)

    # --- Verification suite ---
    VERIFY_WORKERS: int = Field(validation_alias="PURSUIT_VERIFY_WORKERS", default=4, gt=0)

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",  # Ignore undefined env vars in .env
    )

    @property
    def json_logs(self) -> bool:
        """True when structured JSON log records are requested."""
        return self.LOG_FORMAT.strip().lower() == "json"


# Singleton instance
settings = Settings()
