"""
데이터 파이프라인

- IDX / IDX-gzip 파싱 (MNIST, EMNIST 배포 형식)
- PCA (공분산 대칭 고유분해, 부호 규약 고정)
- 층화 K-fold 분할과 평가 지표
- fold별 교차 검증 (PCA는 각 fold의 학습 분할에서만 적합)
"""

import csv
import gzip
import json
import logging
import struct
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from sklearn.metrics import confusion_matrix
from sklearn.model_selection import StratifiedKFold, train_test_split

from qudit_qnn.engine.poly_features import FeatureMap, expand_batch
from qudit_qnn.exceptions import (
    BadMagic,
    ClassTooSmall,
    DimensionMismatch,
    DimensionOverflow,
    EmptySplit,
    IdxFormatError,
    InvalidConfig,
    NonFinite,
    RankDeficient,
    TruncatedPayload,
)

logger = logging.getLogger(__name__)

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
GZIP_MAGIC = b"\x1f\x8b"
MAX_IDX_ELEMENTS = 1 << 32

CSV_COLUMNS = ("dataset", "components", "neurons", "fold", "accuracy", "seconds")


# ===========================================
# IDX
# ===========================================


@dataclass(frozen=True, eq=False)
class IdxFragment:
    """IDX 파일 하나의 내용 (images: n×rows×cols, labels: n)"""

    kind: str
    data: np.ndarray

    @property
    def count(self) -> int:
        return int(self.data.shape[0])


@dataclass(frozen=True, eq=False)
class RawImageSet:
    images: np.ndarray  # n×(rows·cols) uint8
    labels: np.ndarray
    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.images.shape[0] != self.labels.shape[0]:
            raise DimensionMismatch(f"이미지 {self.images.shape[0]}개, 레이블 {self.labels.shape[0]}개")
        if self.images.ndim != 2 or self.images.shape[1] != self.rows * self.cols:
            raise DimensionMismatch(f"이미지 형상 {self.images.shape} != n×{self.rows * self.cols}")


def parse_idx(payload: bytes, kind: str) -> IdxFragment:
    """
    IDX 바이트 파싱

    Args:
        payload: 파일 내용 (gzip 매직 0x1f8b 로 시작하면 자동 해제)
        kind: "images" (0x00000803) 또는 "labels" (0x00000801)
    """
    expected = {"images": IDX_IMAGES_MAGIC, "labels": IDX_LABELS_MAGIC}.get(kind)
    if expected is None:
        raise InvalidConfig(f"kind는 images 또는 labels 여야 합니다: {kind!r}")
    if payload[:2] == GZIP_MAGIC:
        try:
            payload = gzip.decompress(payload)
        except (OSError, EOFError) as e:
            raise TruncatedPayload(f"gzip 해제 실패: {e}") from e
    if len(payload) < 4:
        raise TruncatedPayload(f"헤더가 잘렸습니다 ({len(payload)} 바이트)")

    (magic,) = struct.unpack(">I", payload[:4])
    if magic != expected:
        raise BadMagic(f"{kind} 매직 0x{expected:08x} 기대, 실제 0x{magic:08x}")
    ndims = magic & 0xFF
    header = 4 + 4 * ndims
    if len(payload) < header:
        raise TruncatedPayload(f"차원 헤더가 잘렸습니다 ({len(payload)} < {header} 바이트)")
    dims = struct.unpack(f">{ndims}I", payload[4:header])

    total = 1
    for dim in dims:
        total *= dim
    if total > MAX_IDX_ELEMENTS:
        raise DimensionOverflow(f"차원 곱 {total}이 한도 {MAX_IDX_ELEMENTS}를 초과합니다: {dims}")
    body = len(payload) - header
    if body < total:
        raise TruncatedPayload(f"페이로드 {body} 바이트 < 차원 곱 {total}")
    if body > total:
        raise IdxFormatError(f"페이로드 뒤에 {body - total} 바이트가 남았습니다")

    data = np.frombuffer(payload, dtype=np.uint8, count=total, offset=header).reshape(dims).copy()
    return IdxFragment(kind=kind, data=data)


def serialize_idx(data: np.ndarray, kind: str, compress: bool = False) -> bytes:
    """parse_idx의 역연산"""
    data = np.asarray(data, dtype=np.uint8)
    magic = IDX_IMAGES_MAGIC if kind == "images" else IDX_LABELS_MAGIC
    if (magic & 0xFF) != data.ndim:
        raise DimensionMismatch(f"{kind}는 {magic & 0xFF}차원이어야 합니다: ndim={data.ndim}")
    raw = struct.pack(f">I{data.ndim}I", magic, *data.shape) + data.tobytes()
    return gzip.compress(raw, mtime=0) if compress else raw


def read_idx_file(path: str, kind: str) -> IdxFragment:
    return parse_idx(Path(path).read_bytes(), kind)


def raw_image_set(images: IdxFragment, labels: IdxFragment) -> RawImageSet:
    _, rows, cols = images.data.shape
    return RawImageSet(
        images=images.data.reshape(images.count, rows * cols),
        labels=labels.data.astype(np.int64),
        rows=int(rows),
        cols=int(cols),
    )


# ===========================================
# Dataset
# ===========================================


@dataclass(frozen=True, eq=False)
class Dataset:
    """X: n×p 실수, y: 0…d-1 로 재배치된 레이블"""

    X: np.ndarray
    y: np.ndarray
    label_names: Tuple[str, ...]
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def d(self) -> int:
        return len(self.label_names)

    @property
    def n(self) -> int:
        return int(self.y.shape[0])


def remap_labels(labels: np.ndarray) -> Tuple[np.ndarray, Tuple[str, ...]]:
    """원본 레이블을 정렬 순서대로 0…d-1 에 대응 (EMNIST Letters 1…26 → 0…25)"""
    originals, dense = np.unique(np.asarray(labels), return_inverse=True)
    return dense.astype(np.int64), tuple(str(v) for v in originals.tolist())


def dataset_from_images(raw: RawImageSet, metadata: Optional[Dict[str, Any]] = None) -> Dataset:
    """픽셀 / 255 후 레이블 재배치"""
    y, names = remap_labels(raw.labels)
    meta = {"pixel_scale": 255, "rows": raw.rows, "cols": raw.cols}
    meta.update(metadata or {})
    return Dataset(X=raw.images.astype(np.float64) / 255.0, y=y, label_names=names, metadata=meta)


def subsample(dataset: Dataset, max_samples: Optional[int], seed: int) -> Dataset:
    """클래스 비율을 유지한 결정적 부분 표본"""
    if max_samples is None or max_samples >= dataset.n:
        return dataset
    if max_samples < 1:
        raise InvalidConfig(f"max_samples >= 1 이어야 합니다: {max_samples}")
    try:
        keep, _ = train_test_split(
            np.arange(dataset.n), train_size=max_samples, stratify=dataset.y, random_state=seed
        )
    except ValueError as e:
        # 클래스 수보다 작은 표본, 또는 한 개뿐인 클래스
        n_classes = int(np.unique(dataset.y).shape[0])
        raise ClassTooSmall(
            f"max_samples={max_samples} 로 클래스 {n_classes}개를 층화 추출할 수 없습니다: {e}"
        ) from e
    keep = np.sort(keep)
    meta = dict(dataset.metadata, max_samples=int(max_samples), subsample_size=int(keep.shape[0]))
    return Dataset(X=dataset.X[keep], y=dataset.y[keep], label_names=dataset.label_names, metadata=meta)


def save_dataset(dataset: Dataset, path: str) -> None:
    """압축 npz (픽셀 데이터는 uint8로 저장)"""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    arrays: Dict[str, Any] = {
        "y": dataset.y,
        "label_names": np.array(dataset.label_names),
        "metadata": np.array(json.dumps(dataset.metadata, sort_keys=True)),
    }
    if dataset.metadata.get("pixel_scale") == 255:
        arrays["pixels"] = np.rint(dataset.X * 255.0).astype(np.uint8)
    else:
        arrays["X"] = dataset.X
    with open(path, "wb") as f:
        np.savez_compressed(f, **arrays)
    logger.info(f"✅ 데이터셋 저장: {path} (n={dataset.n}, p={dataset.X.shape[1]}, d={dataset.d})")


def load_dataset(path: str) -> Dataset:
    """
    npz (prepare 출력) 또는 CSV (마지막 열이 레이블)를 읽습니다.
    """
    suffix = Path(path).suffix.lower()
    if suffix == ".npz":
        with np.load(path, allow_pickle=False) as data:
            if "pixels" in data:
                X = data["pixels"].astype(np.float64) / 255.0
            else:
                X = data["X"].astype(np.float64)
            y = data["y"].astype(np.int64)
            names = tuple(str(v) for v in data["label_names"].tolist())
            metadata = json.loads(str(data["metadata"])) if "metadata" in data else {}
        return Dataset(X=X, y=y, label_names=names, metadata=metadata)
    table = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    labels = table[:, -1]
    if not np.all(labels == np.rint(labels)):
        raise DimensionMismatch(f"CSV 마지막 열은 정수 레이블이어야 합니다: {path}")
    y, names = remap_labels(labels.astype(np.int64))
    return Dataset(X=table[:, :-1], y=y, label_names=names, metadata={"source": str(path)})


def load_inputs(path: str) -> np.ndarray:
    """예측 입력 행렬 (npz의 X/pixels, npy, 또는 레이블 없는 CSV)"""
    suffix = Path(path).suffix.lower()
    if suffix == ".npz":
        return load_dataset(path).X
    if suffix == ".npy":
        return np.atleast_2d(np.load(path, allow_pickle=False).astype(np.float64))
    return np.loadtxt(path, delimiter=",", comments="#", ndmin=2)


# ===========================================
# PCA
# ===========================================


@dataclass(frozen=True, eq=False)
class PcaModel:
    """mean: 길이 input_dim, components: k×input_dim (정규직교 행)"""

    mean: np.ndarray
    components: np.ndarray
    explained_variance: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        components = np.atleast_2d(np.asarray(self.components, dtype=np.float64))
        if components.shape[1] != mean.shape[0]:
            raise DimensionMismatch(f"components 열 수 {components.shape[1]} != mean 길이 {mean.shape[0]}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "components", components)

    @property
    def k(self) -> int:
        return int(self.components.shape[0])

    @property
    def input_dim(self) -> int:
        return int(self.mean.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "input_dim": self.input_dim,
        }
        if self.explained_variance is not None:
            data["explained_variance"] = np.asarray(self.explained_variance).tolist()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PcaModel":
        model = cls(
            mean=np.array(data["mean"], dtype=np.float64),
            components=np.array(data["components"], dtype=np.float64),
            explained_variance=(
                np.array(data["explained_variance"], dtype=np.float64)
                if data.get("explained_variance") is not None
                else None
            ),
        )
        if model.input_dim != int(data["input_dim"]):
            raise DimensionMismatch(f"input_dim {data['input_dim']} != mean 길이 {model.input_dim}")
        return model


def pca_fit(X: np.ndarray, k: int) -> PcaModel:
    """
    표본 공분산의 상위 k개 고유벡터

    각 성분은 절댓값이 가장 큰 원소가 양수가 되도록 부호를 고정합니다.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"2차원 행렬이 필요합니다: shape={X.shape}")
    n, p = X.shape
    if not 1 <= k <= p:
        raise InvalidConfig(f"k는 1…{p} 범위여야 합니다: {k}")
    if not np.all(np.isfinite(X)):
        raise NonFinite("PCA 입력에 비유한 값이 있습니다")
    if n <= k:
        raise RankDeficient(f"표본 수 n={n}이 k={k}보다 커야 합니다")

    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (n - 1)
    values, vectors = scipy.linalg.eigh(cov, subset_by_index=[p - k, p - 1])
    values = values[::-1]
    vectors = vectors[:, ::-1]

    top = float(values[0]) if values.size else 0.0
    threshold = max(n, p) * np.finfo(np.float64).eps * max(top, 0.0)
    positive = int(np.count_nonzero(values > threshold)) if top > 0 else 0
    if positive < k:
        raise RankDeficient(f"양의 고유값이 {positive}개뿐입니다 (k={k})")

    components = vectors.T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    logger.debug(f"PCA 적합: n={n}, p={p}, k={k}, 상위 고유값={top:.4g}")
    return PcaModel(mean=mean, components=components, explained_variance=values.copy())


def pca_transform(model: PcaModel, X: np.ndarray) -> np.ndarray:
    """(X - mean)·componentsᵀ"""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise DimensionMismatch(f"입력 열 수가 {model.input_dim}이어야 합니다: shape={X.shape}")
    return (X - model.mean) @ model.components.T


def pca_inverse_transform(model: PcaModel, scores: np.ndarray) -> np.ndarray:
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[1] != model.k:
        raise DimensionMismatch(f"점수 열 수가 k={model.k}이어야 합니다: shape={scores.shape}")
    return scores @ model.components + model.mean


# ===========================================
# Fold / 지표
# ===========================================


@dataclass(frozen=True, eq=False)
class FoldPlan:
    K: int
    assignments: np.ndarray
    seed: int

    def split(self, fold: int) -> Tuple[np.ndarray, np.ndarray]:
        """(학습 인덱스, 평가 인덱스)"""
        test = self.assignments == fold
        return np.flatnonzero(~test), np.flatnonzero(test)


def stratified_kfold(y: np.ndarray, K: int, seed: int) -> FoldPlan:
    y = np.asarray(y).reshape(-1)
    if K < 2:
        raise InvalidConfig(f"K >= 2 이어야 합니다: {K}")
    _, counts = np.unique(y, return_counts=True)
    if counts.size == 0 or counts.min() < K:
        smallest = int(counts.min()) if counts.size else 0
        raise ClassTooSmall(f"가장 작은 클래스의 표본 {smallest}개 < K={K}")
    splitter = StratifiedKFold(n_splits=K, shuffle=True, random_state=seed)
    assignments = np.empty(y.shape[0], dtype=np.int64)
    for fold, (_, test) in enumerate(splitter.split(np.zeros((y.shape[0], 1)), y)):
        assignments[test] = fold
    return FoldPlan(K=K, assignments=assignments, seed=seed)


@dataclass(frozen=True, eq=False)
class Metrics:
    accuracy: float
    per_class_accuracy: np.ndarray  # 평가 분할에 없는 클래스는 NaN
    confusion: np.ndarray
    n: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "per_class_accuracy": [None if np.isnan(v) else float(v) for v in self.per_class_accuracy],
            "confusion": self.confusion.tolist(),
            "n": self.n,
        }


def metrics_from_predictions(y_true: np.ndarray, y_pred: np.ndarray, d: int) -> Metrics:
    y_true = np.asarray(y_true).reshape(-1)
    y_pred = np.asarray(y_pred).reshape(-1)
    if y_true.shape[0] == 0:
        raise EmptySplit("평가 분할이 비어 있습니다")
    if y_true.shape != y_pred.shape:
        raise DimensionMismatch(f"길이가 다릅니다: {y_true.shape} / {y_pred.shape}")
    matrix = confusion_matrix(y_true, y_pred, labels=list(range(d)))
    support = matrix.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        per_class = np.where(support > 0, np.diag(matrix) / support, np.nan)
    accuracy = float(np.trace(matrix) / y_true.shape[0])
    return Metrics(accuracy=accuracy, per_class_accuracy=per_class, confusion=matrix, n=int(y_true.shape[0]))


def evaluate(model: Any, X: np.ndarray, y: np.ndarray) -> Metrics:
    """학습된 모델을 평가 분할에서 채점"""
    from qudit_qnn.engine import trainer

    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] == 0:
        raise EmptySplit("평가 분할이 비어 있습니다")
    return metrics_from_predictions(y, trainer.predict(model, X), model.d)


@dataclass(frozen=True)
class FoldSummary:
    mean: float
    std: float
    count: int


def summarize_folds(values: Sequence[float]) -> FoldSummary:
    """평균 ± 표본 표준편차 (분모 n-1, fold 하나면 0)"""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise EmptySplit("요약할 fold 결과가 없습니다")
    std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return FoldSummary(mean=float(np.mean(arr)), std=std, count=int(arr.size))


# ===========================================
# 교차 검증
# ===========================================


@dataclass(frozen=True)
class FoldResult:
    dataset: str
    components: int
    neurons: int
    fold: int
    accuracy: float
    seconds: float
    n_train: int
    n_test: int
    total_fits: int


@dataclass
class CvResult:
    dataset: str
    components: int
    neurons: int
    variant: str
    folds: List[FoldResult]
    weights: int
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def accuracy(self) -> FoldSummary:
        return summarize_folds([f.accuracy for f in self.folds])

    @property
    def seconds(self) -> FoldSummary:
        return summarize_folds([f.seconds for f in self.folds])

    def to_dict(self) -> Dict[str, Any]:
        acc = self.accuracy
        sec = self.seconds
        return {
            "dataset": self.dataset,
            "components": self.components,
            "neurons": self.neurons,
            "variant": self.variant,
            "weights": self.weights,
            "folds": len(self.folds),
            "accuracy_mean": acc.mean,
            "accuracy_std": acc.std,
            "seconds_mean": sec.mean,
            "seconds_total": float(sum(f.seconds for f in self.folds)),
            "metadata": self.metadata,
        }


def _run_fold(
    dataset: Dataset,
    name: str,
    plan: FoldPlan,
    fold: int,
    components: int,
    feature_map: FeatureMap,
    trainer_config: Any,
) -> FoldResult:
    from qudit_qnn.engine import trainer

    started = time.perf_counter()
    train_idx, test_idx = plan.split(fold)
    X_train = dataset.X[train_idx]
    pca = pca_fit(X_train, components) if components > 0 else None
    scores = pca_transform(pca, X_train) if pca is not None else X_train
    model, report = trainer.fit(
        expand_batch(feature_map, scores),
        dataset.y[train_idx],
        dataset.d,
        feature_map,
        trainer_config,
        pca=pca,
        label_names=dataset.label_names,
    )
    metrics = evaluate(model, dataset.X[test_idx], dataset.y[test_idx])
    seconds = time.perf_counter() - started
    logger.info(
        f"{name} k={components} L={feature_map.L} fold {fold + 1}/{plan.K}: "
        f"정확도 {metrics.accuracy * 100:.2f}% ({seconds:.2f}초)"
    )
    return FoldResult(
        dataset=name,
        components=components,
        neurons=feature_map.L,
        fold=fold,
        accuracy=metrics.accuracy,
        seconds=seconds,
        n_train=int(train_idx.shape[0]),
        n_test=int(test_idx.shape[0]),
        total_fits=report.total_fits,
    )


def cross_validate(
    dataset: Dataset,
    components: int,
    neurons: int,
    trainer_config: Any,
    folds: int = 10,
    seed: int = 0,
    variant: str = "multivariable",
    jobs: int = 1,
    name: str = "dataset",
) -> CvResult:
    """
    층화 K-fold 교차 검증

    components=0 이면 PCA 없이 원본 열을 확장합니다. fold는 jobs개 스레드에서
    병렬로 돌 수 있으며 결과는 항상 fold 순서로 모읍니다.
    """
    p = components if components > 0 else dataset.X.shape[1]
    feature_map = FeatureMap(p=p, L=neurons, variant=variant)
    plan = stratified_kfold(dataset.y, folds, seed)
    logger.info(
        f"교차 검증 시작: {name} k={components} L={neurons} ({variant}, 가중치 {feature_map.size}개, K={folds})"
    )
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        results = list(
            pool.map(
                lambda fold: _run_fold(dataset, name, plan, fold, components, feature_map, trainer_config),
                range(folds),
            )
        )
    metadata = {
        "seed": seed,
        "pca_fit": "per_fold_train_split",
        "n_samples": dataset.n,
        "classes": dataset.d,
    }
    metadata.update({k: v for k, v in dataset.metadata.items() if k in ("pooled", "max_samples", "subsample_size")})
    return CvResult(
        dataset=name,
        components=components,
        neurons=neurons,
        variant=variant,
        folds=results,
        weights=feature_map.size,
        metadata=metadata,
    )


def write_metrics_csv(path: str, results: Sequence[CvResult], include_timing: bool = True) -> None:
    """fold별 한 행 (dataset, components, neurons, fold, accuracy, seconds)"""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    columns = CSV_COLUMNS if include_timing else CSV_COLUMNS[:-1]
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for result in results:
            for row in result.folds:
                values = [row.dataset, row.components, row.neurons, row.fold, repr(row.accuracy)]
                if include_timing:
                    values.append(f"{row.seconds:.6f}")
                writer.writerow(values)


def write_summary_json(path: str, results: Sequence[CvResult], config: Optional[Dict[str, Any]] = None) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    document = {"config": config or {}, "results": [r.to_dict() for r in results]}
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, ensure_ascii=False, indent=2)
        f.write("\n")
