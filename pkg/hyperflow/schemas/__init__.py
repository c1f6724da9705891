"""Pydantic schemas: catalog input, API requests and rendered results."""

from .catalog import Catalog, Law, LawInstance
from .requests import CompareRequest, EntropyRequest, LawsRequest, LoopRequest, ProgramRequest
from .results import (
    CatalogReportSchema,
    HyperSchema,
    LeakReportSchema,
    LoopReportSchema,
    PriorSchema,
    VerdictSchema,
    WitnessSchema,
    canonical_json,
    rational,
)
