"""Subject-wise splitting and versioned model artifacts."""

import json

import numpy as np
import pytest

from homevitals.errors import InputError, SplitImpossible
from homevitals.features import FeatureMatrix, FeatureVector
from homevitals.models import (
    RandomForestClassifier,
    check_feature_schema,
    document_version,
    dumps_model,
    load_document,
    load_model,
    model_document,
    save_model,
    subject_split,
)


def matrix_with_subjects(rows_per_subject, n_features=3, seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    names = tuple(f"f{i}" for i in range(n_features))
    for sid, count in rows_per_subject.items():
        for i in range(count):
            rows.append(FeatureVector(sid, str(i), names, rng.normal(size=n_features)))
    return FeatureMatrix(rows, labels=rng.integers(0, 2, size=len(rows)))


class TestSubjectSplit:
    def test_four_equal_subjects_quarter(self):
        m = matrix_with_subjects({f"S{i}": 10 for i in range(4)})
        train, test = subject_split(m, 0.25, seed=0)
        assert len(set(test.subject_ids)) == 1
        assert len(test) == 10

    def test_disjoint_for_any_seed(self):
        m = matrix_with_subjects({f"S{i}": int(5 + i) for i in range(6)})
        for seed in range(25):
            train, test = subject_split(m, 0.25, seed=seed)
            assert set(train.subject_ids) & set(test.subject_ids) == set()
            assert len(train) + len(test) == len(m)

    def test_forty_subjects_quarter(self):
        m = matrix_with_subjects({f"S{i:02d}": 10 for i in range(40)})
        train, test = subject_split(m, 0.25, seed=7)
        assert len(set(test.subject_ids)) == 10
        assert len(set(train.subject_ids)) == 30

    def test_single_subject_impossible(self):
        m = matrix_with_subjects({"S0": 20})
        with pytest.raises(SplitImpossible):
            subject_split(m)

    def test_deterministic_per_seed(self):
        m = matrix_with_subjects({f"S{i}": 8 for i in range(10)})
        a1 = subject_split(m, seed=3)[1].subject_ids
        a2 = subject_split(m, seed=3)[1].subject_ids
        assert a1 == a2


class TestSerialization:
    def test_artifact_round_trip_and_version(self, tmp_path, rng):
        X = rng.normal(size=(60, 4))
        y = (X[:, 0] > 0).astype(int)
        names = ("a", "b", "c", "d")
        forest = RandomForestClassifier(n_trees=5, seed=1).fit(X, y)
        path = tmp_path / "model.json"
        save_model(forest, names, path)
        loaded, loaded_names = load_model(path)
        assert loaded_names == names
        assert np.array_equal(loaded.predict(X), forest.predict(X))
        doc = json.loads(path.read_text())
        assert doc["format"] == "homevitals-model"
        assert doc["schema_version"] == 1
        assert len(document_version(doc)) == 12

    def test_retrain_is_byte_identical(self, rng):
        X = rng.normal(size=(50, 3))
        y = (X[:, 1] > 0).astype(int)
        blob1 = dumps_model(RandomForestClassifier(n_trees=4, seed=9).fit(X, y), ("x", "y", "z"))
        blob2 = dumps_model(RandomForestClassifier(n_trees=4, seed=9).fit(X, y), ("x", "y", "z"))
        assert blob1.encode() == blob2.encode()

    def test_schema_check(self, rng):
        X = rng.normal(size=(40, 2))
        y = (X[:, 0] > 0).astype(int)
        forest = RandomForestClassifier(n_trees=3, seed=0).fit(X, y)
        doc = model_document(forest, ("f0", "f1"))
        check_feature_schema(doc, ("f0", "f1"))
        with pytest.raises(InputError):
            check_feature_schema(doc, ("f1", "f0"))

    def test_loaded_kind_dispatch(self, rng):
        X = rng.normal(size=(30, 2))
        y = (X[:, 0] > 0).astype(int)
        forest = RandomForestClassifier(n_trees=3, seed=2).fit(X, y)
        doc = model_document(forest, ("f0", "f1"))
        clone = load_document(doc)
        assert isinstance(clone, RandomForestClassifier)
