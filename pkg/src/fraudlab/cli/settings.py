from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class LabSettings(BaseSettings):
    """Process-level defaults; command-line flags override them."""

    model_config = SettingsConfigDict(env_prefix="FRAUDLAB_", extra="ignore")

    THREADS: int = Field(1, ge=1, description="Default number of worker processes per stage")

    VERBOSITY: int = Field(0, ge=0, le=2, description="Default number of -v flags")

    NO_BARS: bool = Field(False, description="Disable progress bars, e.g. for headless runs")
