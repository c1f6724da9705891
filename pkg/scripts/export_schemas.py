"""Write the JSON Schemas of every rendered object to docs/schemas/."""

from pathlib import Path

from hyperflow.schemas.export import export_schemas

OUT_DIR = Path(__file__).resolve().parents[1] / "docs" / "schemas"


if __name__ == "__main__":
    for path in export_schemas(OUT_DIR):
        print(f"wrote {path}")
