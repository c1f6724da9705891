from fractions import Fraction
from typing import Dict, List, Literal, Optional
from pydantic import BaseModel, Field, field_validator


class ProgramRequest(BaseModel):
    program: str = Field(..., min_length=1)
    prior: str = Field(default="uniform")
    visible: Optional[str] = None
    implicit_uniform_locals: Optional[bool] = None
    loop_strategy: Optional[Literal["auto", "iterate"]] = None
    tol: Optional[str] = None
    max_k: Optional[int] = Field(None, ge=0)

    @field_validator("tol")
    @classmethod
    def _positive_tol(cls, value: Optional[str]) -> Optional[str]:
        if value is None:
            return value
        try:
            tol = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"tol '{value}' is not a rational")
        if tol <= 0:
            raise ValueError("tol must be positive")
        return value

    class Config:
        json_schema_extra = {
            "example": {
                "program": "vis v: bool; hid h: bool; reveal {{ true @ h * (1/4), false @ 1 - h * (1/4) }}",
                "prior": "uniform",
                "visible": "true",
            }
        }


class EntropyRequest(ProgramRequest):
    bits: Optional[bool] = None


class LoopRequest(ProgramRequest):
    pass


class CompareRequest(BaseModel):
    spec: str = Field(..., min_length=1)
    impl: str = Field(..., min_length=1)
    relation: Literal["equiv", "refine", "entropy-refine"] = Field(default="refine")
    seed: Optional[int] = None
    random_priors: Optional[int] = Field(None, ge=0)
    explain: bool = Field(default=False)
    implicit_uniform_locals: Optional[bool] = None

    class Config:
        json_schema_extra = {
            "example": {
                "spec": "vis v: {0..7}; hid h: {0..7}; v := h div 2; v := v div 2",
                "impl": "vis v: {0..7}; hid h: {0..7}; v := h div 4",
                "relation": "refine",
            }
        }


class LawsRequest(BaseModel):
    only: List[str] = Field(default=[])
    spaces: Dict[str, str] = Field(default={})
    seed: Optional[int] = None
    random_priors: Optional[int] = Field(None, ge=0)
