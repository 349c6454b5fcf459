"""Self-describing model files.

A fitted model bundle (basis + per-component score models + scale and
calendar origin) is stored as versioned JSON. Floats round-trip exactly:
the writer relies on shortest-repr encoding, so load(save(x)) == x.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from pathlib import Path
import numpy as np

from .curves import TimeGrid
from .errors import ModelVersionError, ParseError
from .fpca import FpcaModel
from .regress import ScoreRegressionModel

FORMAT_NAME = "loadfpca-model"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class ModelBundle:
    """Everything needed to forecast: basis, score models, scale, origin."""

    fpca: FpcaModel
    score_models: tuple[ScoreRegressionModel, ...]
    entity_id: str
    scale: float | None
    origin: dt.date
    train_start: dt.date
    train_end: dt.date


def save_model(path, bundle: ModelBundle) -> None:
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "entity_id": bundle.entity_id,
        "scale": bundle.scale,
        "origin": bundle.origin.isoformat(),
        "train_start": bundle.train_start.isoformat(),
        "train_end": bundle.train_end.isoformat(),
        "grid": list(bundle.fpca.grid.points),
        "n_train": bundle.fpca.n_train,
        "rank_deficient": bundle.fpca.rank_deficient,
        "total_variance": bundle.fpca.total_variance,
        "mean": bundle.fpca.mean.tolist(),
        "eigenvalues": bundle.fpca.eigenvalues.tolist(),
        "components": bundle.fpca.components.tolist(),
        "score_models": [
            {
                "component": m.component,
                "terms": list(m.terms),
                "columns": list(m.column_labels),
                "dropped_columns": list(m.dropped_columns),
                "beta": m.beta.tolist(),
                "rss": m.rss,
                "n_train": m.n_train,
                "aic": m.aic,
            }
            for m in bundle.score_models
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")


def load_model(path) -> ModelBundle:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, f"not valid JSON: {exc.msg}") from None
    if doc.get("format") != FORMAT_NAME:
        raise ModelVersionError(f"{path}: not a {FORMAT_NAME} file")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelVersionError(
            f"{path}: version {doc.get('version')}, this build reads {FORMAT_VERSION}"
        )
    fpca = FpcaModel(
        grid=TimeGrid(tuple(doc["grid"])),
        mean=np.array(doc["mean"]),
        components=np.array(doc["components"]),
        eigenvalues=np.array(doc["eigenvalues"]),
        total_variance=doc["total_variance"],
        n_train=doc["n_train"],
        rank_deficient=doc["rank_deficient"],
    )
    score_models = tuple(
        ScoreRegressionModel(
            component=m["component"],
            terms=tuple(m["terms"]),
            column_labels=tuple(m["columns"]),
            beta=np.array(m["beta"]),
            rss=m["rss"],
            n_train=m["n_train"],
            aic=m["aic"],
            dropped_columns=tuple(m["dropped_columns"]),
        )
        for m in doc["score_models"]
    )
    return ModelBundle(
        fpca=fpca,
        score_models=score_models,
        entity_id=doc["entity_id"],
        scale=doc["scale"],
        origin=dt.date.fromisoformat(doc["origin"]),
        train_start=dt.date.fromisoformat(doc["train_start"]),
        train_end=dt.date.fromisoformat(doc["train_end"]),
    )
