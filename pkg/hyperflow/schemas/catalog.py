from typing import Dict, List, Literal, Optional
from pydantic import BaseModel, Field, model_validator


class Premise(BaseModel):
    """A refinement that must hold before the instance is claimed."""

    lhs: str = Field(..., min_length=1)
    rhs: str = Field(..., min_length=1)


class LawInstance(BaseModel):
    space: str = Field(..., min_length=1)
    lhs: str = Field(..., min_length=1)
    rhs: str = Field(..., min_length=1)
    premise: Optional[Premise] = None


class Law(BaseModel):
    name: str = Field(..., min_length=1)
    tag: str = Field(..., min_length=1, pattern=r"^[a-z0-9][a-z0-9_.-]*$")
    relation: Literal["equiv", "refine"]
    strict: bool = Field(default=False)
    instances: List[LawInstance] = Field(..., min_length=1)
    contexts: List[str] = Field(default=[])

    @model_validator(mode="after")
    def _check_contexts(self) -> "Law":
        for context in self.contexts:
            if context.count("$HOLE") != 1:
                raise ValueError(f"context '{context}' must contain exactly one $HOLE")
        if self.strict and self.relation != "refine":
            raise ValueError("only refinement laws can be strict")
        return self


class Catalog(BaseModel):
    spaces: Dict[str, str]
    laws: List[Law]

    @model_validator(mode="after")
    def _check_references(self) -> "Catalog":
        tags = [law.tag for law in self.laws]
        duplicates = sorted({tag for tag in tags if tags.count(tag) > 1})
        if duplicates:
            raise ValueError(f"duplicate law tags: {duplicates}")
        for law in self.laws:
            for instance in law.instances:
                if instance.space not in self.spaces:
                    raise ValueError(f"law '{law.tag}' uses unknown space '{instance.space}'")
        return self

    class Config:
        json_schema_extra = {
            "example": {
                "spaces": {"small": "vis v: {0..3}; hid h: {0..3};"},
                "laws": [
                    {
                        "name": "reveal of a constant",
                        "tag": "reveal-const",
                        "relation": "equiv",
                        "instances": [{"space": "small", "lhs": "reveal 3", "rhs": "skip"}],
                    }
                ],
            }
        }
