"""
데이터셋 목록과 보고된 참조 결과

하드코딩된 데이터셋 파일명, 클래스 수, 참조 정확도를 중앙 관리합니다.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple


# =============================================================================
# 데이터셋 목록
# =============================================================================

@dataclass(frozen=True)
class DatasetInfo:
    name: str
    classes: int
    train_images: str
    train_labels: str
    test_images: str
    test_labels: str
    label_offset: int = 0  # 원본 레이블 최솟값 (letters는 1)
    description: str = ""

    @property
    def files(self) -> Tuple[str, str, str, str]:
        return (self.train_images, self.train_labels, self.test_images, self.test_labels)


def _emnist(split: str, classes: int, label_offset: int = 0, description: str = "") -> DatasetInfo:
    prefix = f"emnist-{split}"
    return DatasetInfo(
        name=f"emnist-{split}",
        classes=classes,
        train_images=f"{prefix}-train-images-idx3-ubyte",
        train_labels=f"{prefix}-train-labels-idx1-ubyte",
        test_images=f"{prefix}-test-images-idx3-ubyte",
        test_labels=f"{prefix}-test-labels-idx1-ubyte",
        label_offset=label_offset,
        description=description,
    )


DATASETS: Dict[str, DatasetInfo] = {
    "mnist": DatasetInfo(
        name="mnist",
        classes=10,
        train_images="train-images-idx3-ubyte",
        train_labels="train-labels-idx1-ubyte",
        test_images="t10k-images-idx3-ubyte",
        test_labels="t10k-labels-idx1-ubyte",
        description="손글씨 숫자 70,000개",
    ),
    "emnist-digits": _emnist("digits", 10, description="EMNIST 숫자 280,000개"),
    "emnist-letters": _emnist("letters", 26, label_offset=1, description="EMNIST 알파벳 (대소문자 병합)"),
    "emnist-balanced": _emnist("balanced", 47, description="EMNIST 균형 47 클래스"),
    "emnist-mnist": _emnist("mnist", 10, description="EMNIST의 MNIST 호환 분할"),
    "emnist-byclass": _emnist("byclass", 62, description="EMNIST 62 클래스 (불균형)"),
    "emnist-bymerge": _emnist("bymerge", 47, description="EMNIST 47 클래스 (유사 문자 병합)"),
}


def get_dataset_info(name: str) -> Optional[DatasetInfo]:
    return DATASETS.get(name.lower())


# =============================================================================
# 다변수 Taylor ansatz 참조 결과: (components, neurons) → (정확도 %, 표준편차, 초)
# =============================================================================

ReferenceRow = Tuple[float, float, float]

REFERENCE_RESULTS: Dict[str, Dict[Tuple[int, int], ReferenceRow]] = {
    "mnist": {
        (10, 1): (77.28, 0.51, 1.79),
        (10, 2): (90.36, 0.22, 6.61),
        (10, 3): (92.69, 0.16, 33.41),
        (20, 1): (85.50, 0.39, 2.42),
        (20, 2): (96.20, 0.18, 17.43),
        (20, 3): (97.10, 0.13, 118.29),
        (30, 1): (87.53, 0.38, 3.00),
        (30, 2): (97.02, 0.14, 33.83),
        (30, 3): (97.58, 0.18, 312.93),
    },
    "emnist-digits": {
        (10, 1): (82.13, 0.66, 6.87),
        (10, 2): (92.70, 0.16, 42.86),
        (10, 3): (94.87, 0.16, 251.93),
        (20, 1): (88.52, 0.18, 12.08),
        (20, 2): (97.54, 0.09, 105.99),
        (20, 3): (98.43, 0.08, 521.11),
        (30, 1): (90.19, 0.18, 16.54),
        (30, 2): (98.37, 0.11, 182.30),
        (30, 3): (98.88, 0.07, 1449.55),
    },
    "emnist-letters": {
        (10, 1): (41.64, 0.29, 13.54),
        (10, 2): (69.04, 0.50, 89.33),
        (10, 3): (77.13, 0.30, 567.21),
        (20, 1): (54.28, 0.55, 22.40),
        (20, 2): (85.34, 0.29, 283.83),
        (20, 3): (89.09, 0.23, 2388.24),
        (30, 1): (58.51, 0.45, 30.36),
        (30, 2): (88.31, 0.21, 1055.44),
        (30, 3): (89.90, 0.24, 7067.53),
    },
    "emnist-balanced": {
        (10, 1): (28.22, 0.35, 37.35),
        (10, 2): (60.29, 0.29, 232.05),
        (10, 3): (68.75, 0.49, 1341.98),
        (20, 1): (48.30, 0.23, 59.93),
        (20, 2): (78.76, 0.21, 744.94),
        (20, 3): (81.15, 0.23, 7591.03),
        (30, 1): (53.07, 0.21, 84.79),
        (30, 2): (81.26, 0.23, 1519.69),
        (30, 3): (81.50, 0.34, 21021.78),
    },
    "emnist-mnist": {
        (10, 1): (81.04, 0.44, 1.81),
        (10, 2): (92.46, 0.27, 6.42),
        (10, 3): (94.58, 0.22, 43.79),
        (20, 1): (88.46, 0.30, 2.38),
        (20, 2): (97.24, 0.23, 17.47),
        (20, 3): (97.71, 0.18, 216.79),
        (30, 1): (90.06, 0.25, 2.93),
        (30, 2): (97.80, 0.20, 32.51),
        (30, 3): (98.12, 0.19, 303.89),
        (40, 1): (91.24, 0.32, 3.46),
        (40, 2): (97.79, 0.18, 53.96),
        (40, 3): (98.20, 0.17, 628.53),
    },
    "emnist-byclass": {
        (30, 2): (82.05, 0.15, 17091.98),
    },
    "emnist-bymerge": {
        (30, 2): (85.65, 0.10, 10020.33),
    },
}


# =============================================================================
# 비교표: 데이터셋 → (외부 기준 분류기, 표준 Taylor (std), 시간, 다변수 Taylor (std), 시간)
# 표준 Taylor 열은 variant=univariate_powers, k=30, L=3
# =============================================================================

@dataclass(frozen=True)
class ComparisonRow:
    baseline: str
    standard: Tuple[float, float]
    standard_seconds: float
    multivariable: Tuple[float, float]
    multivariable_seconds: float


COMPARISON: Dict[str, ComparisonRow] = {
    "emnist-byclass": ComparisonRow("69.71 ± 1.47", (67.26, 0.16), 2319.50, (82.05, 0.15), 17091.98),
    "emnist-bymerge": ComparisonRow("72.57 ± 1.18", (69.51, 0.13), 1320.36, (85.65, 0.10), 10020.33),
    "emnist-balanced": ComparisonRow("78.02 ± 0.92", (63.34, 0.35), 282.10, (81.50, 0.34), 21021.78),
    "emnist-letters": ComparisonRow("85.15 ± 0.12", (69.38, 0.28), 114.80, (89.90, 0.24), 7067.53),
    "emnist-mnist": ComparisonRow("96.22 ± 0.14", (93.62, 0.21), 10.75, (98.20, 0.17), 628.53),
    "emnist-digits": ComparisonRow("95.90 ± 0.40", (92.84, 0.16), 48.22, (98.88, 0.07), 1449.55),
}


def lookup_reference(dataset: str, components: int, neurons: int, variant: str = "multivariable") -> Optional[ReferenceRow]:
    """(dataset, k, L) 참조 행. 표준 Taylor 변형은 비교표의 k=30, L=3 값만 있습니다."""
    dataset = dataset.lower()
    if variant == "univariate_powers":
        row = COMPARISON.get(dataset)
        if row is None or (components, neurons) != (30, 3):
            return None
        return (row.standard[0], row.standard[1], row.standard_seconds)
    return REFERENCE_RESULTS.get(dataset, {}).get((components, neurons))
