"""Environment-based settings."""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide defaults read from GQDLAB_* variables or a local .env file."""

    model_config = SettingsConfigDict(env_prefix="GQDLAB_", env_file=".env", extra="ignore")

    threads: int = Field(1, ge=1)
    log_level: str = "INFO"


def get_settings() -> Settings:
    return Settings()
