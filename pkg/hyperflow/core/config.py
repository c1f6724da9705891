from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional
from pydantic_settings import BaseSettings
from pydantic import BaseModel, Field, field_validator
import logging


def check_tol(value: str) -> str:
    try:
        tol = Fraction(value)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"loop_tol must be a rational such as 1/1000: {e}")
    if tol <= 0:
        raise ValueError("loop_tol must be positive")
    return value


class Settings(BaseSettings):
    # API Configuration
    api_host: str = Field(default="127.0.0.1")
    api_port: int = Field(default=8000)
    api_prefix: str = Field(default="/api/v1")

    # Loop evaluation
    loop_tol: str = Field(default="1/1000000000")
    loop_max_k: int = Field(default=1_000_000, ge=0)
    loop_strategy: Literal["auto", "iterate"] = Field(default="auto")
    loop_state_limit: int = Field(default=4096, gt=0)

    # Prior suites for program comparison
    suite_seed: int = Field(default=0)
    suite_random_priors: int = Field(default=16, ge=0)
    suite_max_visible: int = Field(default=4, gt=0)

    # Language
    implicit_uniform_locals: bool = Field(default=False)

    # Output
    entropy_bits: bool = Field(default=False)
    output_format: Literal["json", "text"] = Field(default="json")

    # Logging Configuration
    log_level: str = Field(default="WARNING")

    class Config:
        env_file = ".env"
        env_prefix = "HYPERFLOW_"
        case_sensitive = False
        extra = "ignore"

    @field_validator("loop_tol")
    @classmethod
    def _check_tol(cls, value: str) -> str:
        return check_tol(value)

    @property
    def tol(self) -> Fraction:
        """Loop tolerance as an exact rational."""
        return Fraction(self.loop_tol)


settings = Settings()

logging.getLogger("hyperflow").setLevel(getattr(logging, settings.log_level.upper(), logging.WARNING))


class RunConfig(BaseModel):
    """Settings for one CLI invocation or API call: global settings plus overrides."""

    command: Optional[str] = None
    inputs: List[str] = Field(default=[])
    prior: str = Field(default="uniform")
    visible: Optional[str] = None
    relation: Literal["equiv", "refine", "entropy-refine"] = Field(default="refine")
    loop_tol: str = Field(default_factory=lambda: settings.loop_tol)
    loop_max_k: int = Field(default_factory=lambda: settings.loop_max_k, ge=0)
    loop_strategy: Literal["auto", "iterate"] = Field(default_factory=lambda: settings.loop_strategy)
    loop_state_limit: int = Field(default_factory=lambda: settings.loop_state_limit, gt=0)
    seed: int = Field(default_factory=lambda: settings.suite_seed)
    random_priors: int = Field(default_factory=lambda: settings.suite_random_priors, ge=0)
    max_visible: int = Field(default_factory=lambda: settings.suite_max_visible, gt=0)
    implicit_uniform_locals: bool = Field(default_factory=lambda: settings.implicit_uniform_locals)
    bits: bool = Field(default_factory=lambda: settings.entropy_bits)
    format: Literal["json", "text"] = Field(default_factory=lambda: settings.output_format)
    explain: bool = Field(default=False)
    only: List[str] = Field(default=[])
    spaces: Dict[str, str] = Field(default={})

    @field_validator("loop_tol")
    @classmethod
    def _check_tol(cls, value: str) -> str:
        return check_tol(value)

    @classmethod
    def build(cls, **overrides: Any) -> "RunConfig":
        """Drop unset (None) overrides so the settings defaults apply."""
        return cls(**{key: value for key, value in overrides.items() if value is not None})

    @property
    def tol(self) -> Fraction:
        return Fraction(self.loop_tol)
