"""Harvest job specification: which models to score, over which corpus, and where
the metadata/matrix CSVs go."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class ModelSpec:
    ref: str  # hub identifier or local path, loadable by transformers Auto* classes
    family: str
    model_id: str
    params_billions: float | None = None  # overrides the count read from the model

    def __post_init__(self):
        if not self.ref:
            raise ValueError("model spec missing ref")
        if not self.family:
            raise ValueError(f"model {self.ref!r} missing family label")
        if self.params_billions is not None and self.params_billions <= 0:
            raise ValueError(f"model {self.ref!r}: params_billions override must be > 0")


@dataclass(frozen=True)
class HarvestJob:
    models: tuple[ModelSpec, ...]
    corpus: Path
    metadata_csv: Path
    matrix_csv: Path
    max_texts: int | None = None
    device: str = "cpu"
    dtype: str = "float32"

    def __post_init__(self):
        if not self.models:
            raise ValueError("job has no models")
        ids = [m.model_id for m in self.models]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate model_id in job")
        if self.max_texts is not None and self.max_texts < 1:
            raise ValueError("max_texts must be >= 1")


def load_job(path: str | Path) -> HarvestJob:
    """Parse and validate a job JSON file.

    Relative paths in the job are resolved against the job file's directory.
    """
    path = Path(path)
    spec = json.loads(path.read_text(encoding="utf-8"))
    base = path.parent

    def resolve(p: str) -> Path:
        p = Path(p)
        return p if p.is_absolute() else base / p

    models = []
    for entry in spec.get("models", []):
        if isinstance(entry, str):
            entry = {"ref": entry}
        ref = entry.get("ref", "")
        models.append(
            ModelSpec(
                ref=ref,
                family=entry.get("family", spec.get("families", {}).get(ref, "")),
                model_id=entry.get("id", Path(ref).name or ref),
                params_billions=entry.get(
                    "params_billions", spec.get("params_billions", {}).get(ref)
                ),
            )
        )
    return HarvestJob(
        models=tuple(models),
        corpus=resolve(spec["corpus"]),
        metadata_csv=resolve(spec["metadata_csv"]),
        matrix_csv=resolve(spec["matrix_csv"]),
        max_texts=spec.get("max_texts"),
        device=spec.get("device", "cpu"),
        dtype=spec.get("dtype", "float32"),
    )
