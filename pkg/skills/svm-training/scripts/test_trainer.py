#!/usr/bin/env python3
"""
순차 소거 학습기 / 추론 / 모델 파일 테스트

사용법:
    pytest skills/svm-training/scripts/test_trainer.py
"""

import itertools
import json
import sys
from pathlib import Path

import numpy as np
import pytest

# 프로젝트 루트를 경로에 추가
project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root / "src"))

from qudit_qnn.engine import trainer  # noqa: E402
from qudit_qnn.engine.data_pipeline import pca_fit  # noqa: E402
from qudit_qnn.engine.linear_svm import SolverConfig  # noqa: E402
from qudit_qnn.engine.poly_features import FeatureMap, expand_batch  # noqa: E402
from qudit_qnn.engine.trainer import ClassAssignment, QuditClassifierModel, TrainerConfig  # noqa: E402
from qudit_qnn.exceptions import (  # noqa: E402
    ClassMissing,
    CorruptFile,
    DimensionMismatch,
    InvalidConfig,
    SchemaVersionMismatch,
)


def ring_blobs(d: int, per_class: int = 25, radius: float = 4.0, spread: float = 0.3, seed: int = 0):
    """원 위에 놓인 d개 군집 (n×2, 레이블 0…d-1)"""
    rng = np.random.default_rng(seed)
    angles = 2 * np.pi * np.arange(d) / d
    centers = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    X = np.vstack([rng.normal(c, spread, size=(per_class, 2)) for c in centers])
    y = np.repeat(np.arange(d), per_class)
    return X, y


def fit_blobs(d: int, L: int = 2, config: TrainerConfig = None, **kwargs):
    X, y = ring_blobs(d)
    fm = FeatureMap(p=2, L=L)
    model, report = trainer.fit(expand_batch(fm, X), y, d, fm, config, **kwargs)
    return model, report, X, y


def constant_model(bias: float, assignment=(0, 1)) -> QuditClassifierModel:
    """z = bias 인 d=2 모델 (p=1, L=1)"""
    return QuditClassifierModel(
        d=2,
        feature_map=FeatureMap(p=1, L=1),
        per_theta_weights=np.array([[bias, 0.0]]),
        assignment=ClassAssignment(tuple(assignment)),
    )


@pytest.mark.parametrize("d", [2, 3])
def test_blobs_are_learned(d):
    model, report, X, y = fit_blobs(d)
    assert model.d == d
    assert model.per_theta_weights.shape == (d - 1, 6)
    assert sorted(model.assignment.outcome_to_label) == list(range(d))
    assert np.mean(trainer.predict(model, X) == y) >= 0.95


@pytest.mark.parametrize("d, expected", [(3, 5), (5, 14)])
def test_optimized_fit_count(d, expected):
    model, report, X, y = fit_blobs(d)
    assert report.total_fits == expected
    assert [len(s.candidates) for s in report.steps] == list(range(d, 1, -1))
    assert np.all(trainer.predict(model, X) == y)


def test_fixed_assignment():
    d = 5
    model, report, _, _ = fit_blobs(d, config=TrainerConfig(assignment="fixed"))
    assert report.total_fits == d - 1
    assert report.steps[0].chosen_label == d - 1
    assert model.assignment.outcome_to_label == tuple(range(d))
    assert model.assignment.label_for_theta(1) == d - 1


def test_step_records():
    model, report, _, y = fit_blobs(4)
    assert [s.outcome for s in report.steps] == [3, 2, 1]
    assert report.steps[0].n_samples == y.shape[0]
    assert report.steps[1].n_samples == y.shape[0] - 25
    for step in report.steps:
        assert model.assignment.outcome_to_label[step.outcome] == step.chosen_label
        best = min(step.candidates, key=lambda c: (c.hinge_loss, c.label))
        assert best.label == step.chosen_label
    assert model.assignment.outcome_to_label[0] == report.remaining_label
    assert report.to_dict()["total_fits"] == 9


def test_removed_rows_are_never_read():
    X, y = ring_blobs(4, seed=3)
    fm = FeatureMap(p=2, L=2)
    reference, _ = trainer.fit(expand_batch(fm, X), y, 4, fm)

    features = expand_batch(fm, X)

    def poison(record, surviving):
        features[~surviving] = np.nan

    poisoned, _ = trainer.fit(features, y, 4, fm, on_step=poison)
    np.testing.assert_array_equal(poisoned.per_theta_weights, reference.per_theta_weights)
    assert poisoned.assignment == reference.assignment


def test_weights_are_scaled():
    X, y = ring_blobs(2)
    fm = FeatureMap(p=2, L=1)
    one, _ = trainer.fit(expand_batch(fm, X), y, 2, fm, TrainerConfig(scale=1.0))
    hundred, _ = trainer.fit(expand_batch(fm, X), y, 2, fm, TrainerConfig(scale=100.0))
    np.testing.assert_allclose(hundred.per_theta_weights, 100.0 * one.per_theta_weights)


def test_holdout_ordering_and_standardized_features():
    config = TrainerConfig(ordering_eval="holdout", holdout_fraction=0.3, standardize_features=True)
    model, report, X, y = fit_blobs(3, config=config)
    assert model.feature_scaling is not None
    assert report.total_fits == 5
    assert np.mean(trainer.predict(model, X) == y) >= 0.9


def test_label_errors():
    fm = FeatureMap(p=2, L=1)
    X, y = ring_blobs(3)
    features = expand_batch(fm, X)
    with pytest.raises(ClassMissing):
        trainer.fit(features, np.where(y == 2, 0, y), 3, fm)
    with pytest.raises(DimensionMismatch):
        trainer.fit(features, np.where(y == 2, 5, y), 3, fm)
    with pytest.raises(DimensionMismatch):
        trainer.fit(features[:, :2], y, 3, fm)
    with pytest.raises(InvalidConfig):
        TrainerConfig(assignment="greedy")


def test_saturated_outputs():
    # z = 0: sin = 1/2, cos² = 3/4
    sin, cos2 = trainer.predict_thetas(constant_model(0.0), np.array([0.5]))
    assert sin[0] == pytest.approx(0.5)
    assert cos2[0] == pytest.approx(0.75)
    np.testing.assert_allclose(trainer.outcome_probabilities(constant_model(0.0), [[0.5]])[0], [0.25, 0.75])

    assert trainer.predict_one(constant_model(1000.0), [0.5]) == 0
    assert trainer.predict_one(constant_model(-1000.0), [0.5]) == 1
    assert trainer.predict_one(constant_model(1000.0, assignment=(1, 0)), [0.5]) == 1


@pytest.mark.parametrize("d", [4, 5])
def test_saturated_sign_patterns(d):
    assignment = ClassAssignment(tuple(int(v) for v in np.random.default_rng(d).permutation(d)))
    for signs in itertools.product((1.0, -1.0), repeat=d - 1):
        z = 40.0 * np.array(signs)
        model = QuditClassifierModel(
            d=d,
            feature_map=FeatureMap(p=1, L=1),
            per_theta_weights=np.column_stack([z, np.zeros(d - 1)]),
            assignment=assignment,
        )
        negative = [m for m in range(1, d) if z[m - 1] < 0]
        if negative:
            outcome = assignment.theta_to_outcome(negative[0])
            expected = assignment.label_for_theta(negative[0])
        else:
            outcome, expected = 0, assignment.outcome_to_label[0]

        assert trainer.predict_one(model, [0.5]) == expected, signs
        assert assignment.label_to_outcome()[expected] == outcome
        probs = trainer.outcome_probabilities(model, [[0.5]])[0]
        assert int(np.argmax(probs)) == outcome
        assert probs[outcome] > 1 - 1e-12


def test_predict_proba_columns_are_labels():
    model = constant_model(0.0, assignment=(1, 0))
    proba = trainer.predict_proba(model, np.array([[0.1], [0.2]]))
    np.testing.assert_allclose(proba, [[0.75, 0.25], [0.75, 0.25]])
    single = trainer.predict_proba_one(model, [0.1])
    assert single.argmax() == 0


def test_proba_sums_and_input_checks():
    model, _, X, _ = fit_blobs(3)
    proba = trainer.predict_proba(model, X)
    np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-12)
    with pytest.raises(DimensionMismatch):
        trainer.predict(model, np.zeros((2, 3)))


def test_fit_inputs_with_pca():
    rng = np.random.default_rng(0)
    X, y = ring_blobs(3)
    # 잡음 열 3개 추가
    wide = np.hstack([X, 0.01 * rng.normal(size=(X.shape[0], 3))])
    pca = pca_fit(wide, 2)
    fm = FeatureMap(p=2, L=2)
    model, _ = trainer.fit_inputs(wide, y, 3, fm, pca=pca)
    assert model.input_dim == 5
    assert np.mean(trainer.predict(model, wide) == y) >= 0.95


def test_model_file_round_trip(tmp_path):
    X, y = ring_blobs(3)
    pca = pca_fit(X, 2)
    fm = FeatureMap(p=2, L=2)
    model, _ = trainer.fit_inputs(X, y, 3, fm, pca=pca, label_names=("a", "b", "c"), metadata={"note": "t"})

    path = tmp_path / "model.json"
    trainer.save_model(model, str(path))
    restored = trainer.load_model(str(path))
    np.testing.assert_array_equal(trainer.predict_proba(restored, X), trainer.predict_proba(model, X))
    assert restored.label_names == ("a", "b", "c")
    assert restored.metadata["note"] == "t"
    assert trainer.serialize(restored) == path.read_text(encoding="utf-8")

    doc = json.loads(path.read_text(encoding="utf-8"))
    assert doc["schema_version"] == trainer.SCHEMA_VERSION
    assert len(doc["thetas"]) == 2
    assert "seconds" not in json.dumps(doc["metadata"])


def test_model_file_errors():
    model = constant_model(0.5)
    data = trainer.to_dict(model)
    with pytest.raises(SchemaVersionMismatch):
        trainer.from_dict(dict(data, schema_version=99))
    broken = dict(data)
    del broken["thetas"]
    with pytest.raises(CorruptFile):
        trainer.from_dict(broken)
    with pytest.raises(CorruptFile):
        trainer.from_dict(dict(data, thetas=[[1.0, 2.0, 3.0]]))
    with pytest.raises(CorruptFile):
        trainer.deserialize("{not json")


def test_training_is_deterministic():
    a, _, _, _ = fit_blobs(3)
    b, _, _, _ = fit_blobs(3)
    assert trainer.serialize(a) == trainer.serialize(b)


def test_parallel_candidates_match_serial():
    serial, _, _, _ = fit_blobs(4)
    parallel, _, _, _ = fit_blobs(4, config=TrainerConfig(jobs=4))
    assert trainer.serialize(serial) == trainer.serialize(parallel)


def test_solver_settings_recorded():
    model, _, _, _ = fit_blobs(2, config=TrainerConfig(solver=SolverConfig(C=2.5)))
    assert model.metadata["trainer"]["svm"]["C"] == 2.5
    assert len(model.metadata["dataset_fingerprint"]) == 64


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
