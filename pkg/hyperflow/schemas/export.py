"""JSON Schemas of every rendered object and request body."""

import json
from pathlib import Path
from typing import List

from .catalog import Catalog
from .requests import CompareRequest, EntropyRequest, LawsRequest, LoopRequest, ProgramRequest
from .results import (
    CatalogReportSchema, HyperSchema, LeakReportSchema, LoopReportSchema, VerdictSchema, WitnessSchema,
)

MODELS = [
    HyperSchema,
    WitnessSchema,
    VerdictSchema,
    LeakReportSchema,
    LoopReportSchema,
    CatalogReportSchema,
    ProgramRequest,
    EntropyRequest,
    LoopRequest,
    CompareRequest,
    LawsRequest,
    Catalog,
]


def export_schemas(out_dir: Path) -> List[Path]:
    """Dump one ``<Model>.json`` per model; returns the written paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for model in MODELS:
        path = out_dir / f"{model.__name__}.json"
        path.write_text(json.dumps(model.model_json_schema(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(path)
    return written
