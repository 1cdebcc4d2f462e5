"""Application configuration using Pydantic Settings."""

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Laboratory settings loaded from environment variables or a .env file."""

    model_config = SettingsConfigDict(
        env_prefix="CURVLAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    app_name: str = Field(default="curvature-lab")
    app_env: str = Field(default="development")

    # Tolerance ladder
    tol_structural: float = Field(default=1e-9, gt=0)
    tol_derived: float = Field(default=1e-8, gt=0)
    tol_theorem: float = Field(default=1e-6, gt=0)

    # Numerical guards
    degeneracy_epsilon: float = Field(default=1e-10, gt=0)
    division_epsilon: float = Field(default=1e-14, gt=0)
    eigen_cluster_gap: float = Field(default=1e-7, gt=0)
    contact_volume_floor: float = Field(default=1e-8, gt=0)

    # Sampling
    sampler_margin: float = Field(default=0.05, ge=0, lt=0.5)
    default_seed: int = Field(default=0)
    default_points: int = Field(default=50, ge=1)
    workers: int = Field(default=1, ge=1)

    # OpenTelemetry
    otel_enabled: bool = Field(default=False)
    otel_exporter_otlp_endpoint: str = Field(default="http://localhost:4317")
    otel_service_name: str = Field(default="curvature-lab")
    otel_traces_exporter: str = Field(default="otlp")

    # Logging
    log_level: str = Field(default="INFO")
    log_format: str = Field(default="text")

    @field_validator("log_level")
    @classmethod
    def normalize_log_level(cls, v: str) -> str:
        """Upper-case the configured log level."""
        return v.strip().upper()

    @field_validator("log_format", "otel_traces_exporter")
    @classmethod
    def normalize_choice(cls, v: str) -> str:
        """Lower-case enumerated string options."""
        return v.strip().lower()

    @property
    def is_development(self) -> bool:
        """Check if running in development mode."""
        return self.app_env == "development"


# Global settings instance
settings = Settings()
