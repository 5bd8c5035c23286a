#!/usr/bin/env python3
"""
선형 SVM 해법 테스트

사용법:
    pytest skills/svm-training/scripts/test_linear_svm.py

오라클은 scikit-learn SVC(kernel="linear")입니다. 같은 목적 함수(절편 비정규화, hinge)를 풉니다.
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from sklearn.svm import SVC

# 프로젝트 루트를 경로에 추가
project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root / "src"))

from qudit_qnn.engine import linear_svm  # noqa: E402
from qudit_qnn.engine.linear_svm import SolverConfig, SvmProblem, SvmSolution  # noqa: E402
from qudit_qnn.exceptions import DimensionMismatch, InvalidConfig, NonFinite, SingleClass  # noqa: E402

TIGHT = SolverConfig(C=1.0, tolerance=1e-9, max_epochs=200_000, seed=0)


def with_bias(X: np.ndarray) -> np.ndarray:
    return np.hstack([np.ones((X.shape[0], 1)), X])


def overlapping_blobs(n: int = 40, seed: int = 0):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(-0.5, 1.0, size=(n, 2)), rng.normal(0.5, 1.0, size=(n, 2))])
    y = np.concatenate([-np.ones(n), np.ones(n)])
    return with_bias(X), y


def test_two_point_example():
    X = with_bias(np.array([[1.0], [-1.0]]))
    y = np.array([1.0, -1.0])
    solution = linear_svm.train(SvmProblem(X=X, y=y, config=SolverConfig(C=10.0)))
    assert solution.converged
    assert solution.w[0] == pytest.approx(1.0, abs=1e-9)
    assert solution.b == pytest.approx(0.0, abs=1e-9)
    np.testing.assert_allclose(solution.affine_weights(), [0.0, 1.0], atol=1e-9)


def test_separable_blobs():
    rng = np.random.default_rng(1)
    X = np.vstack([rng.normal(-3, 0.5, size=(30, 2)), rng.normal(3, 0.5, size=(30, 2))])
    y = np.concatenate([-np.ones(30), np.ones(30)])
    solution = linear_svm.train(SvmProblem(X=with_bias(X), y=y))
    margins = y * linear_svm.decision_values(solution, with_bias(X))
    assert solution.converged
    assert np.all(margins > 0)


def test_matches_exact_qp_oracle():
    X, y = overlapping_blobs()
    solution = linear_svm.train(SvmProblem(X=X, y=y, config=TIGHT))
    assert solution.converged

    oracle = SVC(kernel="linear", C=TIGHT.C, tol=1e-10).fit(X[:, 1:], y)
    w_ref = oracle.coef_[0]
    b_ref = float(oracle.intercept_[0])
    ref_objective = linear_svm.primal_objective(w_ref, b_ref, X, y, TIGHT)

    assert solution.primal_objective <= ref_objective + 1e-6 * max(1.0, ref_objective)
    np.testing.assert_allclose(solution.w, w_ref, atol=1e-3)


def test_default_config_matches_oracle_on_random_problems():
    config = SolverConfig()
    worst = 0.0
    for seed in range(50):
        rng = np.random.default_rng(1000 + seed)
        y = np.where(rng.random(30) < 0.5, -1.0, 1.0)
        y[:2] = (1.0, -1.0)
        features = rng.normal(size=(30, 5)) + 0.5 * y[:, None]
        X = with_bias(features)

        solution = linear_svm.train(SvmProblem(X=X, y=y, config=config))
        oracle = SVC(kernel="linear", C=config.C, tol=1e-10).fit(features, y)
        ref_objective = linear_svm.primal_objective(oracle.coef_[0], float(oracle.intercept_[0]), X, y, config)

        assert solution.converged, f"seed={seed}"
        assert solution.epochs <= config.max_epochs
        worst = max(worst, (solution.primal_objective - ref_objective) / ref_objective)
    assert worst <= 1e-4


def test_converged_solution_bounds_its_own_gap():
    X, y = overlapping_blobs(n=60, seed=8)
    solution = linear_svm.train(SvmProblem(X=X, y=y))
    dual = -solution.objective_trace[-1]
    assert solution.converged
    assert solution.primal_objective - dual == pytest.approx(solution.duality_gap, abs=1e-9)
    assert solution.duality_gap <= SolverConfig().tolerance * dual


def test_duplicated_data_halves_c():
    X, y = overlapping_blobs(n=20, seed=2)
    original = linear_svm.train(SvmProblem(X=X, y=y, config=TIGHT))
    doubled = linear_svm.train(
        SvmProblem(
            X=np.vstack([X, X]),
            y=np.concatenate([y, y]),
            config=SolverConfig(C=TIGHT.C / 2, tolerance=1e-9, max_epochs=200_000, seed=0),
        )
    )
    np.testing.assert_allclose(doubled.w, original.w, atol=1e-3)
    assert doubled.primal_objective == pytest.approx(original.primal_objective, rel=1e-5)


def test_dual_objective_never_increases():
    X, y = overlapping_blobs(seed=3)
    solution = linear_svm.train(SvmProblem(X=X, y=y, config=SolverConfig(tolerance=1e-6, max_epochs=5000)))
    trace = np.array(solution.objective_trace)
    assert trace.shape[0] == solution.epochs
    assert np.all(np.diff(trace) <= 1e-10)


def test_label_flip_negates_solution():
    X, y = overlapping_blobs(seed=4)
    a = linear_svm.train(SvmProblem(X=X, y=y))
    b = linear_svm.train(SvmProblem(X=X, y=-y))
    np.testing.assert_allclose(b.w, -a.w, atol=1e-12)
    assert b.b == pytest.approx(-a.b, abs=1e-9)


def test_deterministic_for_seed():
    X, y = overlapping_blobs(seed=5)
    a = linear_svm.train(SvmProblem(X=X, y=y, config=SolverConfig(seed=9)))
    b = linear_svm.train(SvmProblem(X=X, y=y, config=SolverConfig(seed=9)))
    assert a.w.tobytes() == b.w.tobytes()
    assert a.b == b.b
    assert a.objective_trace == b.objective_trace


def test_not_converged_reports_flag():
    X, y = overlapping_blobs(seed=6)
    solution = linear_svm.train(SvmProblem(X=X, y=y, config=SolverConfig(tolerance=1e-12, max_epochs=1)))
    assert not solution.converged
    assert solution.epochs == 1
    assert np.all(np.isfinite(solution.w))


def test_squared_hinge_and_class_weights():
    X, y = overlapping_blobs(seed=7)
    for config in (
        SolverConfig(loss="squared_hinge", tolerance=1e-6, max_epochs=10_000),
        SolverConfig(balanced_class_weight=True, tolerance=1e-6, max_epochs=10_000),
    ):
        solution = linear_svm.train(SvmProblem(X=X, y=y, config=config))
        assert solution.converged
        accuracy = np.mean(np.sign(linear_svm.decision_values(solution, X)) == y)
        assert accuracy > 0.6


def test_validation_errors():
    X = with_bias(np.array([[0.0], [1.0]]))
    with pytest.raises(SingleClass):
        linear_svm.train(SvmProblem(X=X, y=np.array([1.0, 1.0])))
    with pytest.raises(DimensionMismatch):
        linear_svm.train(SvmProblem(X=X, y=np.array([1.0, -1.0, 1.0])))
    with pytest.raises(DimensionMismatch):
        linear_svm.train(SvmProblem(X=X, y=np.array([1.0, 0.0])))
    with pytest.raises(NonFinite):
        linear_svm.train(SvmProblem(X=with_bias(np.array([[np.nan], [1.0]])), y=np.array([1.0, -1.0])))
    with pytest.raises(InvalidConfig):
        SolverConfig(C=0.0)
    with pytest.raises(InvalidConfig):
        SolverConfig(loss="logistic")


def test_decision_values():
    solution = SvmSolution(w=np.array([2.0]), b=1.0)
    np.testing.assert_allclose(linear_svm.decision_values(solution, np.array([[1.0, 3.0], [1.0, -1.0]])), [7.0, -1.0])
    with pytest.raises(DimensionMismatch):
        linear_svm.decision_values(solution, np.array([[1.0, 3.0, 4.0]]))


def test_hinge_loss():
    assert linear_svm.hinge_loss([1.0, -1.0], [2.0, 0.5]) == pytest.approx(1.5)
    assert linear_svm.hinge_loss([1.0], [0.0]) == 1.0
    assert linear_svm.hinge_loss([], []) == 0.0
    with pytest.raises(DimensionMismatch):
        linear_svm.hinge_loss([1.0], [1.0, 2.0])


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
