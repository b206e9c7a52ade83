from pydantic import ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from sympy import isprime

from topsocle.errors import ConfigurationError


class Settings(BaseSettings):
    # Arithmetic
    characteristic: int = 32003

    # Degree caps
    deg_cap: int = 24
    window_cap: int = 200
    zero_run: int = 3
    weight_bound: int = 64

    # Execution
    jobs: int = 1
    output_format: str = "csv"
    allow_inconclusive: bool = False
    log_level: str = "INFO"

    # Golden store
    database_url: str = "sqlite:///./goldens/goldens.db"

    # Application
    app_name: str = "topsocle"
    app_version: str = "1.0.0"

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="TOPSOCLE_",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("characteristic")
    @classmethod
    def validate_characteristic(cls, v):
        if v != 0 and not isprime(v):
            raise ValueError(f"characteristic must be 0 or a prime, got {v}")
        return v

    @field_validator("output_format")
    @classmethod
    def validate_output_format(cls, v):
        if v not in ("csv", "json"):
            raise ValueError("output_format must be one of: csv, json")
        return v

    @field_validator("jobs", "deg_cap", "window_cap", "zero_run", "weight_bound")
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError("must be a positive integer")
        return v


# Global settings instance; a bad environment is reported by load_settings()
try:
    settings = Settings()
except ValidationError:
    settings = Settings.model_construct()


def load_settings() -> Settings:
    """
    Re-read the environment into the global settings

    Raises:
        ConfigurationError: a TOPSOCLE_* value fails validation
    """
    try:
        fresh = Settings()
    except ValidationError as e:
        problems = "; ".join(
            f"TOPSOCLE_{str(err['loc'][0]).upper()}: {err['msg']}" for err in e.errors() if err.get("loc")
        )
        raise ConfigurationError(f"invalid settings: {problems or e}") from e
    for name in Settings.model_fields:
        setattr(settings, name, getattr(fresh, name))
    return settings


def get_database_url() -> str:
    """Get database URL for the golden store"""
    return settings.database_url


def get_characteristic() -> int:
    """Get the configured field characteristic (0 means rationals)"""
    return settings.characteristic
