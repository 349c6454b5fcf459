import json

import numpy as np
import pytest

from loadfpca import fit, fit_score_model, normalize_by_max
from loadfpca.errors import ModelVersionError
from loadfpca.modelio import ModelBundle, load_model, save_model
from loadfpca.pipeline import build_day_descriptors

from conftest import random_set


@pytest.fixture
def bundle(rng):
    cs = random_set(rng, n=30, m=6)
    normalized = normalize_by_max(cs)
    model, scores = fit(normalized, 4)
    days = build_day_descriptors(cs.dates, {}, cs.dates[0])
    score_models = tuple(
        fit_score_model(days, scores.scores[:, k], ("month", "day_of_week"), component=k + 1)
        for k in range(4)
    )
    return ModelBundle(
        fpca=model,
        score_models=score_models,
        entity_id="E",
        scale=normalized.scale,
        origin=cs.dates[0],
        train_start=cs.dates[0],
        train_end=cs.dates[-1],
    )


class TestRoundTrip:
    def test_every_numeric_field_exact(self, tmp_path, bundle):
        path = tmp_path / "model.json"
        save_model(path, bundle)
        back = load_model(path)

        np.testing.assert_array_equal(back.fpca.mean, bundle.fpca.mean)
        np.testing.assert_array_equal(back.fpca.components, bundle.fpca.components)
        np.testing.assert_array_equal(back.fpca.eigenvalues, bundle.fpca.eigenvalues)
        assert back.fpca.total_variance == bundle.fpca.total_variance
        assert back.fpca.grid == bundle.fpca.grid
        assert back.scale == bundle.scale
        assert back.origin == bundle.origin
        for a, b in zip(back.score_models, bundle.score_models):
            assert a.terms == b.terms
            assert a.column_labels == b.column_labels
            np.testing.assert_array_equal(a.beta, b.beta)
            assert a.rss == b.rss and a.aic == b.aic

    def test_save_load_save_is_stable(self, tmp_path, bundle):
        p1, p2 = tmp_path / "m1.json", tmp_path / "m2.json"
        save_model(p1, bundle)
        save_model(p2, load_model(p1))
        assert p1.read_bytes() == p2.read_bytes()


class TestVersioning:
    def test_wrong_version_rejected(self, tmp_path, bundle):
        path = tmp_path / "model.json"
        save_model(path, bundle)
        doc = json.loads(path.read_text())
        doc["version"] = 99
        path.write_text(json.dumps(doc))
        with pytest.raises(ModelVersionError, match="99"):
            load_model(path)

    def test_foreign_json_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"hello": "world"}')
        with pytest.raises(ModelVersionError):
            load_model(path)
