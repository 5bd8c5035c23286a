"""
순차 소거 학습기

θ_1 … θ_{d-1} 을 한 단계씩 맞춥니다. 단계 m 에서는 남은 각 후보 클래스 j 에 대해
"j 이면 -1, 아니면 +1" 이진 SVM을 풀고, 같은 표본의 hinge 손실이 가장 작은 후보를
측정 결과 d-m 에 배정한 뒤 그 클래스의 표본을 제거합니다. 마지막 클래스는 결과 0 입니다.

추론은 z_m = (scale·[b, w]) · expand(pca(x)) 에서 sin θ_m = σ(z_m) 과
cos²θ_m = σ(-z_m)(1 + σ(z_m)) 만 계산하며 θ 자체는 만들지 않습니다.
"""

import hashlib
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit
from sklearn.model_selection import train_test_split

from qudit_qnn.engine import linear_svm
from qudit_qnn.engine.data_pipeline import PcaModel, pca_transform
from qudit_qnn.engine.linear_svm import SolverConfig, SvmProblem, SvmSolution
from qudit_qnn.engine.poly_features import FeatureMap, expand_batch
from qudit_qnn.engine.qudit_core import OutcomeProbabilities
from qudit_qnn.exceptions import (
    ClassMissing,
    CorruptFile,
    DegenerateStep,
    DimensionMismatch,
    InvalidConfig,
    NonFinite,
    SchemaVersionMismatch,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class TrainerConfig:
    """학습기 설정"""

    scale: float = 100.0
    assignment: str = "optimized"  # optimized | fixed
    ordering_eval: str = "train"  # train | holdout
    holdout_fraction: float = 0.2
    solver: SolverConfig = field(default_factory=SolverConfig)
    jobs: int = 1
    standardize_features: bool = False

    def __post_init__(self) -> None:
        if not self.scale > 0:
            raise InvalidConfig(f"scale > 0 이어야 합니다: {self.scale}")
        if self.assignment not in ("optimized", "fixed"):
            raise InvalidConfig(f"지원하지 않는 배정 방식: {self.assignment!r}")
        if self.ordering_eval not in ("train", "holdout"):
            raise InvalidConfig(f"지원하지 않는 순서 평가 방식: {self.ordering_eval!r}")
        if not 0 < self.holdout_fraction < 1:
            raise InvalidConfig(f"holdout_fraction은 (0, 1) 범위여야 합니다: {self.holdout_fraction}")
        if self.jobs < 1:
            raise InvalidConfig(f"jobs >= 1 이어야 합니다: {self.jobs}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scale": self.scale,
            "assignment": self.assignment,
            "ordering_eval": self.ordering_eval,
            "holdout_fraction": self.holdout_fraction,
            "standardize_features": self.standardize_features,
            "svm": {
                "C": self.solver.C,
                "tolerance": self.solver.tolerance,
                "max_epochs": self.solver.max_epochs,
                "seed": self.solver.seed,
                "loss": self.solver.loss,
                "balanced_class_weight": self.solver.balanced_class_weight,
            },
        }


@dataclass(frozen=True)
class ClassAssignment:
    """측정 결과 ↔ 클래스 레이블 전단사 (θ_m 은 항상 결과 d-m 을 담당)"""

    outcome_to_label: Tuple[int, ...]

    def __post_init__(self) -> None:
        labels = tuple(int(v) for v in self.outcome_to_label)
        if len(labels) < 2 or sorted(labels) != list(range(len(labels))):
            raise InvalidConfig(f"배정이 0…d-1 위의 전단사가 아닙니다: {labels}")
        object.__setattr__(self, "outcome_to_label", labels)

    @property
    def d(self) -> int:
        return len(self.outcome_to_label)

    def theta_to_outcome(self, m: int) -> int:
        return self.d - m

    def label_for_theta(self, m: int) -> int:
        return self.outcome_to_label[self.d - m]

    def label_to_outcome(self) -> Dict[int, int]:
        return {label: outcome for outcome, label in enumerate(self.outcome_to_label)}


@dataclass(frozen=True, eq=False)
class FeatureScaling:
    """상수항을 뺀 특성 열의 평균/표준편차 (standardize_features 전용)"""

    mean: np.ndarray
    std: np.ndarray

    def apply(self, features: np.ndarray) -> np.ndarray:
        out = np.array(features, dtype=np.float64)
        out[:, 1:] = (out[:, 1:] - self.mean) / self.std
        return out

    @classmethod
    def fit(cls, features: np.ndarray) -> "FeatureScaling":
        body = features[:, 1:]
        std = body.std(axis=0)
        std[std == 0] = 1.0
        return cls(mean=body.mean(axis=0), std=std)


@dataclass(frozen=True, eq=False)
class QuditClassifierModel:
    """학습된 qudit 분류기 (학습 후 불변)"""

    d: int
    feature_map: FeatureMap
    per_theta_weights: np.ndarray  # (d-1)×feature_count, scale 적용 완료
    assignment: ClassAssignment
    scale: float = 100.0
    pca: Optional[PcaModel] = None
    feature_scaling: Optional[FeatureScaling] = None
    label_names: Tuple[str, ...] = ()
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        weights = np.asarray(self.per_theta_weights, dtype=np.float64)
        if weights.shape != (self.d - 1, self.feature_map.size):
            raise DimensionMismatch(
                f"가중치 형상 {weights.shape} != ({self.d - 1}, {self.feature_map.size})"
            )
        if not self.scale > 0:
            raise InvalidConfig(f"scale > 0 이어야 합니다: {self.scale}")
        if self.assignment.d != self.d:
            raise DimensionMismatch(f"배정 크기 {self.assignment.d} != d={self.d}")
        weights.setflags(write=False)
        object.__setattr__(self, "per_theta_weights", weights)

    @property
    def input_dim(self) -> int:
        return self.pca.input_dim if self.pca is not None else self.feature_map.p

    def label_name(self, label: int) -> str:
        if self.label_names:
            return self.label_names[label]
        return str(label)


@dataclass(frozen=True)
class CandidateFit:
    label: int
    hinge_loss: float
    converged: bool
    epochs: int
    seconds: float


@dataclass(frozen=True)
class StepRecord:
    """단계 m 하나의 기록"""

    step: int
    outcome: int
    n_samples: int
    candidates: Tuple[CandidateFit, ...]
    chosen_label: int


@dataclass
class TrainReport:
    steps: List[StepRecord] = field(default_factory=list)
    remaining_label: int = -1
    seconds: float = 0.0

    @property
    def total_fits(self) -> int:
        return sum(len(step.candidates) for step in self.steps)

    @property
    def all_converged(self) -> bool:
        return all(c.converged for step in self.steps for c in step.candidates)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "total_fits": self.total_fits,
            "all_converged": self.all_converged,
            "remaining_label": self.remaining_label,
            "seconds": self.seconds,
            "steps": [
                {
                    "step": s.step,
                    "outcome": s.outcome,
                    "n_samples": s.n_samples,
                    "chosen_label": s.chosen_label,
                    "candidates": [c.__dict__ for c in s.candidates],
                }
                for s in self.steps
            ],
        }


StepCallback = Callable[[StepRecord, np.ndarray], None]


def dataset_fingerprint(features: np.ndarray, y: np.ndarray) -> str:
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(features, dtype=np.float64).tobytes())
    digest.update(np.ascontiguousarray(y, dtype=np.int64).tobytes())
    return digest.hexdigest()


def _check_labels(y: np.ndarray, d: int) -> None:
    if d < 2:
        raise InvalidConfig(f"d >= 2 이어야 합니다: {d}")
    present = set(np.unique(y).tolist())
    extra = sorted(v for v in present if not 0 <= v < d)
    if extra:
        raise DimensionMismatch(f"레이블은 0…{d - 1} 범위여야 합니다: {extra[:5]}")
    missing = sorted(set(range(d)) - present)
    if missing:
        raise ClassMissing(f"학습 데이터에 없는 클래스: {missing}")


def _fit_candidate(
    features: np.ndarray,
    labels: np.ndarray,
    candidate: int,
    fit_rows: np.ndarray,
    eval_rows: np.ndarray,
    solver: SolverConfig,
) -> Tuple[CandidateFit, SvmSolution]:
    binary = np.where(labels == candidate, -1.0, 1.0)
    solution = linear_svm.train(SvmProblem(X=features[fit_rows], y=binary[fit_rows], config=solver))
    yhat = linear_svm.decision_values(solution, features[eval_rows])
    loss = linear_svm.hinge_loss(binary[eval_rows], yhat)
    record = CandidateFit(
        label=int(candidate),
        hinge_loss=loss,
        converged=solution.converged,
        epochs=solution.epochs,
        seconds=solution.seconds,
    )
    return record, solution


def _split_rows(rows: np.ndarray, labels: np.ndarray, config: TrainerConfig, step: int) -> Tuple[np.ndarray, np.ndarray]:
    """(SVM 학습 행, hinge 평가 행)"""
    if config.ordering_eval == "train":
        return rows, rows
    try:
        fit_rows, eval_rows = train_test_split(
            rows,
            test_size=config.holdout_fraction,
            stratify=labels[rows],
            random_state=config.solver.seed + step,
        )
    except ValueError as e:
        logger.warning(f"단계 {step}: holdout 분할 불가 ({e}), 학습 표본으로 순서를 평가합니다")
        return rows, rows
    return np.sort(fit_rows), np.sort(eval_rows)


def fit(
    features: np.ndarray,
    y: np.ndarray,
    d: int,
    feature_map: FeatureMap,
    config: Optional[TrainerConfig] = None,
    pca: Optional[PcaModel] = None,
    label_names: Sequence[str] = (),
    on_step: Optional[StepCallback] = None,
    metadata: Optional[Dict[str, Any]] = None,
) -> Tuple[QuditClassifierModel, TrainReport]:
    """
    확장된 특성 행렬로 분류기를 학습합니다.

    Args:
        features: n×feature_count 행렬 (0번 열 상수항). 복사하지 않으며 각 단계는 남은 행만 읽습니다.
        y: 0…d-1 레이블
        d: 클래스 수
        feature_map: features를 만든 특성 맵 (모델에 기록)
        pca: 추론 시 입력에 적용할 PCA (없으면 입력을 그대로 확장)
        on_step: 단계마다 (StepRecord, 남은 행 마스크)로 호출
    """
    config = config or TrainerConfig()
    features = np.asarray(features, dtype=np.float64)
    y = np.asarray(y).astype(np.int64).reshape(-1)
    if features.ndim != 2 or features.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"특성 행 수와 레이블 수가 다릅니다: {features.shape} / {y.shape}")
    if features.shape[1] != feature_map.size:
        raise DimensionMismatch(f"특성 열 수 {features.shape[1]} != feature_count {feature_map.size}")
    _check_labels(y, d)

    started = time.perf_counter()
    scaling: Optional[FeatureScaling] = None
    fingerprint = dataset_fingerprint(features, y)
    if config.standardize_features:
        if not np.all(np.isfinite(features)):
            raise NonFinite("특성 행렬에 비유한 값이 있습니다")
        scaling = FeatureScaling.fit(features)
        features = scaling.apply(features)

    surviving = np.ones(y.shape[0], dtype=bool)
    remaining = list(range(d))
    outcome_to_label = [-1] * d
    weights = np.zeros((d - 1, feature_map.size), dtype=np.float64)
    report = TrainReport()

    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        for m in range(1, d):
            rows = np.flatnonzero(surviving)
            if len(np.unique(y[rows])) < 2:
                raise DegenerateStep(f"단계 {m}: 남은 표본에 클래스가 하나뿐입니다")
            if not np.all(np.isfinite(features[rows])):
                raise NonFinite(f"단계 {m}: 남은 표본의 특성에 비유한 값이 있습니다")

            if config.assignment == "fixed":
                candidates = [d - m]
            else:
                candidates = list(remaining)
            fit_rows, eval_rows = _split_rows(rows, y, config, m)

            results = list(
                pool.map(
                    lambda j: _fit_candidate(features, y, j, fit_rows, eval_rows, config.solver),
                    candidates,
                )
            )
            # 동률이면 작은 레이블 (candidates는 오름차순)
            best = min(range(len(results)), key=lambda i: (results[i][0].hinge_loss, results[i][0].label))
            chosen, solution = results[best]

            weights[m - 1] = solution.affine_weights() * config.scale
            outcome_to_label[d - m] = chosen.label
            remaining.remove(chosen.label)
            surviving &= y != chosen.label

            record = StepRecord(
                step=m,
                outcome=d - m,
                n_samples=int(rows.shape[0]),
                candidates=tuple(r[0] for r in results),
                chosen_label=chosen.label,
            )
            report.steps.append(record)
            logger.info(
                f"단계 {m}/{d - 1}: 클래스 {chosen.label} → 결과 {d - m} "
                f"(hinge={chosen.hinge_loss:.4f}, 후보 {len(candidates)}개, 표본 {rows.shape[0]}개)"
            )
            if on_step is not None:
                on_step(record, surviving.copy())

    outcome_to_label[0] = remaining[0]
    report.remaining_label = remaining[0]
    report.seconds = time.perf_counter() - started

    meta: Dict[str, Any] = {
        "trainer": config.to_dict(),
        "n_samples": int(y.shape[0]),
        "dataset_fingerprint": fingerprint,
        "total_fits": report.total_fits,
        "all_converged": report.all_converged,
    }
    if metadata:
        meta.update(metadata)
    if not report.all_converged:
        logger.warning("일부 SVM이 max_epochs 안에 수렴하지 않았습니다")

    model = QuditClassifierModel(
        d=d,
        feature_map=feature_map,
        per_theta_weights=weights,
        assignment=ClassAssignment(tuple(outcome_to_label)),
        scale=config.scale,
        pca=pca,
        feature_scaling=scaling,
        label_names=tuple(label_names),
        metadata=meta,
    )
    return model, report


def fit_inputs(
    X: np.ndarray,
    y: np.ndarray,
    d: int,
    feature_map: FeatureMap,
    config: Optional[TrainerConfig] = None,
    pca: Optional[PcaModel] = None,
    **kwargs: Any,
) -> Tuple[QuditClassifierModel, TrainReport]:
    """원시 입력(PCA 이전)에서 PCA 적용 → 특성 확장 → fit"""
    scores = pca_transform(pca, X) if pca is not None else np.asarray(X, dtype=np.float64)
    return fit(expand_batch(feature_map, scores), y, d, feature_map, config, pca=pca, **kwargs)


# ===========================================
# 추론
# ===========================================


def _as_batch(model: QuditClassifierModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise DimensionMismatch(f"입력 차원이 {model.input_dim}이어야 합니다: shape={X.shape}")
    return X


def affine_outputs(model: QuditClassifierModel, X: np.ndarray) -> np.ndarray:
    """z (n×(d-1))"""
    X = _as_batch(model, X)
    scores = pca_transform(model.pca, X) if model.pca is not None else X
    features = expand_batch(model.feature_map, scores)
    if model.feature_scaling is not None:
        features = model.feature_scaling.apply(features)
    return features @ model.per_theta_weights.T


def predict_thetas(model: QuditClassifierModel, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(sin θ, cos²θ), 각각 n×(d-1). 1차원 입력이면 길이 d-1 벡터."""
    single = np.asarray(X).ndim == 1
    z = affine_outputs(model, X)
    sin = expit(z)
    cos2 = expit(-z) * (1.0 + sin)
    if single:
        return sin[0], cos2[0]
    return sin, cos2


def _outcome_probs(sin: np.ndarray, cos2: np.ndarray) -> np.ndarray:
    n, steps = sin.shape
    # prefix[:, m-1] = Π_{k<m} sin²θ_k
    prefix = np.cumprod(np.hstack([np.ones((n, 1)), sin ** 2]), axis=1)
    probs = np.empty((n, steps + 1), dtype=np.float64)
    probs[:, 0] = prefix[:, steps]
    # p_{d-m} = prefix[m-1]·cos²θ_m
    probs[:, steps:0:-1] = prefix[:, :steps] * cos2
    return probs


def outcome_probabilities_from_sines(sin: np.ndarray) -> np.ndarray:
    """sin θ 값만으로 결과 확률 (검증/예시용)"""
    sin = np.atleast_2d(np.asarray(sin, dtype=np.float64))
    return _outcome_probs(sin, 1.0 - sin ** 2)


def outcome_probabilities(model: QuditClassifierModel, X: np.ndarray) -> np.ndarray:
    """측정 결과 인덱스 기준 확률 (n×d)"""
    sin, cos2 = predict_thetas(model, _as_batch(model, X))
    return _outcome_probs(sin, cos2)


def predict_proba(model: QuditClassifierModel, X: np.ndarray) -> np.ndarray:
    """클래스 레이블 기준 확률 (n×d, 열 = 레이블)"""
    outcome = outcome_probabilities(model, X)
    slot = model.assignment.label_to_outcome()
    return outcome[:, [slot[label] for label in range(model.d)]]


def predict_proba_one(model: QuditClassifierModel, x: np.ndarray) -> OutcomeProbabilities:
    return OutcomeProbabilities(probs=predict_proba(model, np.asarray(x).reshape(1, -1))[0])


def predict(model: QuditClassifierModel, X: np.ndarray) -> np.ndarray:
    """결과 확률 argmax (동률이면 작은 결과) → 레이블"""
    best = np.argmax(outcome_probabilities(model, X), axis=1)
    return np.asarray(model.assignment.outcome_to_label, dtype=np.int64)[best]


def predict_one(model: QuditClassifierModel, x: np.ndarray) -> int:
    return int(predict(model, np.asarray(x).reshape(1, -1))[0])


# ===========================================
# 모델 파일
# ===========================================


def to_dict(model: QuditClassifierModel) -> Dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "d": model.d,
        "scale": model.scale,
        "feature_map": model.feature_map.to_dict(),
        "pca": model.pca.to_dict() if model.pca is not None else None,
        "feature_scaling": (
            {"mean": model.feature_scaling.mean.tolist(), "std": model.feature_scaling.std.tolist()}
            if model.feature_scaling is not None
            else None
        ),
        "thetas": model.per_theta_weights.tolist(),
        "assignment": {"outcome_to_label": list(model.assignment.outcome_to_label)},
        "label_names": list(model.label_names),
        "metadata": model.metadata,
    }


def serialize(model: QuditClassifierModel) -> str:
    """JSON 문서 (float는 최단 왕복 표현)"""
    return json.dumps(to_dict(model), ensure_ascii=False, indent=2) + "\n"


def from_dict(data: Dict[str, Any]) -> QuditClassifierModel:
    if not isinstance(data, dict):
        raise CorruptFile("모델 파일 최상위는 객체여야 합니다")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"지원하지 않는 schema_version: {version!r} (지원: {SCHEMA_VERSION})")
    try:
        scaling = data.get("feature_scaling")
        pca = data.get("pca")
        return QuditClassifierModel(
            d=int(data["d"]),
            feature_map=FeatureMap.from_dict(data["feature_map"]),
            per_theta_weights=np.array(data["thetas"], dtype=np.float64),
            assignment=ClassAssignment(tuple(data["assignment"]["outcome_to_label"])),
            scale=float(data["scale"]),
            pca=PcaModel.from_dict(pca) if pca is not None else None,
            feature_scaling=(
                FeatureScaling(
                    mean=np.array(scaling["mean"], dtype=np.float64),
                    std=np.array(scaling["std"], dtype=np.float64),
                )
                if scaling is not None
                else None
            ),
            label_names=tuple(str(v) for v in data.get("label_names", [])),
            metadata=dict(data.get("metadata", {})),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise CorruptFile(f"모델 파일 필드 오류: {e}") from e


def deserialize(text: str) -> QuditClassifierModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise CorruptFile(f"모델 파일 JSON 파싱 실패: {e}") from e
    return from_dict(data)


def save_model(model: QuditClassifierModel, path: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(serialize(model), encoding="utf-8")
    logger.info(f"✅ 모델 저장: {path}")


def load_model(path: str) -> QuditClassifierModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise CorruptFile(f"모델 파일을 읽을 수 없습니다 ({path}): {e}") from e
    return deserialize(text)
