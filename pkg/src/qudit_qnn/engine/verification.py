"""
수학적 자기 점검 모음

각 점검은 seed를 받아 무작위 θ를 뽑고 CheckResult를 돌려줍니다.
등록과 실행 순서는 registry.initialize_registry 에서 정합니다.
"""

import logging
import time
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from qudit_qnn.engine import qubit_sim
from qudit_qnn.engine.poly_features import FeatureMap, feature_count
from qudit_qnn.engine.qudit_core import (
    ThetaVector,
    b_column_closed_form,
    b_column_dense,
    build_skew_matrix,
    cayley_unitary,
    compute_aux,
    outcome_probabilities,
    output_state_closed_form,
)
from qudit_qnn.engine.trainer import outcome_probabilities_from_sines

logger = logging.getLogger(__name__)

THETA_LOW = 0.01
THETA_HIGH = np.pi - 0.01
# 행렬 경로 비교에서 건너뛰는 |s_1 - 1| 범위
DENSE_MARGIN = 1e-6

# (p, L) → 가중치 수
REFERENCE_FEATURE_COUNTS = {
    (10, 1): 11,
    (10, 2): 66,
    (10, 3): 286,
    (20, 3): 1771,
    (30, 3): 5456,
    (40, 3): 12341,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    samples: int
    detail: str = ""
    seconds: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "detail": self.detail,
            "seconds": self.seconds,
        }


def _random_theta(rng: np.random.Generator, d: int) -> ThetaVector:
    return ThetaVector(d=d, angles=rng.uniform(THETA_LOW, THETA_HIGH, size=d - 1))


def _result(name: str, errors: List[float], tolerance: float, started: float, detail: str = "") -> CheckResult:
    worst = max(errors) if errors else 0.0
    return CheckResult(
        name=name,
        passed=bool(errors) and worst <= tolerance,
        max_error=worst,
        tolerance=tolerance,
        samples=len(errors),
        detail=detail,
        seconds=time.perf_counter() - started,
    )


def check_normalization(seed: int = 0, trials: int = 10_000, max_d: int = 64, tolerance: float = 1e-12) -> CheckResult:
    """Σ_j p_j = 1 (closed form 진폭과 보조 곱 합 모두)"""
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    errors = []
    for _ in range(trials):
        theta = _random_theta(rng, int(rng.integers(2, max_d + 1)))
        probs = outcome_probabilities(theta).probs
        errors.append(max(abs(float(np.sum(probs)) - 1.0), abs(compute_aux(theta).aux_sum() - 1.0)))
    return _result("normalization", errors, tolerance, started, f"d ∈ 2…{max_d}")


def check_cayley_equivalence(
    seed: int = 0,
    trials: int = 500,
    max_d: int = 32,
    tolerance: float = 1e-10,
    denominator_offset: float = 0.0,
) -> CheckResult:
    """U(A)|0> 의 첫 열 = closed form 진폭, UᵀU = I"""
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    errors: List[float] = []
    skipped = 0
    while len(errors) < trials:
        theta = _random_theta(rng, int(rng.integers(2, max_d + 1)))
        if abs(compute_aux(theta).s[0] - 1.0) <= DENSE_MARGIN:
            skipped += 1
            continue
        U = cayley_unitary(build_skew_matrix(theta, denominator_offset=denominator_offset))
        state = output_state_closed_form(theta)
        state_error = float(np.max(np.abs(U[:, 0] - state.amplitudes)))
        ortho_error = float(np.max(np.abs(U.T @ U - np.eye(theta.d))))
        errors.append(max(state_error, ortho_error, abs(state.norm_squared - 1.0)))
    detail = f"퇴화 근방 {skipped}개 제외"
    if denominator_offset:
        detail += f", 분모 교란 {denominator_offset:g}"
    return _result("cayley_equivalence", errors, tolerance, started, detail)


def check_b_column(seed: int = 0, trials: int = 500, max_d: int = 32, tolerance: float = 1e-10) -> CheckResult:
    """(A+I)^{-1} 첫 열 closed form vs dense 해"""
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    errors: List[float] = []
    while len(errors) < trials:
        theta = _random_theta(rng, int(rng.integers(2, max_d + 1)))
        if abs(compute_aux(theta).s[0] - 1.0) <= DENSE_MARGIN:
            continue
        errors.append(float(np.max(np.abs(b_column_closed_form(theta) - b_column_dense(theta)))))
    return _result("b_column", errors, tolerance, started)


def check_qubit_equivalence(
    seed: int = 0, per_d: int = 100, max_d: int = 12, tolerance: float = 1e-12
) -> CheckResult:
    """qubit 회로 시뮬레이션의 유효 결과 확률 = qudit 확률, Invalid 질량 ≈ 0"""
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    errors = []
    for d in range(2, max_d + 1):
        for _ in range(per_d):
            theta = _random_theta(rng, d)
            sv = qubit_sim.simulate(qubit_sim.compile(theta))
            dist = qubit_sim.measurement_distribution(sv, d)
            errors.append(
                max(
                    float(np.max(np.abs(dist.entries - outcome_probabilities(theta).probs))),
                    dist.invalid,
                    abs(sv.norm - 1.0),
                )
            )
    return _result("qubit_equivalence", errors, tolerance, started, f"d ∈ 2…{max_d}")


def check_bit_ordering(tolerance: float = 1e-12) -> CheckResult:
    """d=3: cos θ_1 → |10>, sin θ_1 cos θ_2 → |01>, sin θ_1 sin θ_2 → |00>"""
    started = time.perf_counter()
    theta = ThetaVector.of([0.7, 1.1])
    amplitudes = qubit_sim.simulate(qubit_sim.compile(theta)).amplitudes
    expected = np.zeros(4)
    expected[0b00] = np.sin(0.7) * np.sin(1.1)
    expected[0b01] = np.sin(0.7) * np.cos(1.1)
    expected[0b10] = np.cos(0.7)
    return _result("bit_ordering", [float(np.max(np.abs(amplitudes - expected)))], tolerance, started)


def check_feature_counts() -> CheckResult:
    started = time.perf_counter()
    errors = []
    lines = []
    for (p, L), expected in REFERENCE_FEATURE_COUNTS.items():
        actual = feature_count(FeatureMap(p=p, L=L))
        errors.append(float(abs(actual - expected)))
        lines.append(f"(p={p}, L={L}) → {actual}" + (" ✅" if actual == expected else f" ❌ (기대 {expected})"))
    return _result("feature_counts", errors, 0.0, started, "; ".join(lines))


def check_boundary_concentration(d: int = 6, tolerance: float = 1e-12) -> CheckResult:
    """
    경계에서 확률 집중

    θ_1 = 0 이면 결과 d-1, 모든 θ = π/2 이면 결과 0 (closed form 진폭과 학습기 sin 경로 모두)
    """
    started = time.perf_counter()
    rest = np.linspace(0.3, 1.2, d - 2)
    first_zero = outcome_probabilities(ThetaVector.of(np.concatenate(([0.0], rest)))).probs
    all_right = outcome_probabilities(ThetaVector.of(np.full(d - 1, np.pi / 2))).probs
    low = outcome_probabilities_from_sines(np.zeros(d - 1))[0]
    high = outcome_probabilities_from_sines(np.ones(d - 1))[0]
    errors = [
        abs(first_zero[d - 1] - 1.0),
        abs(all_right[0] - 1.0),
        abs(low[d - 1] - 1.0),
        abs(high[0] - 1.0),
    ]
    return _result("boundary_concentration", [float(e) for e in errors], tolerance, started)


def run_checks(registry: Any, seed: int = 0, denominator_offset: float = 0.0, names: Optional[List[str]] = None) -> List[CheckResult]:
    """
    레지스트리에 등록된 점검을 순서대로 실행합니다.

    Args:
        registry: CheckRegistry
        denominator_offset: 0이 아니면 Cayley 점검의 분모를 교란 (결함 주입)
        names: 일부 점검만 실행
    """
    results = []
    for info in registry.get_all_checks().values():
        if names and info.name not in names:
            continue
        kwargs: Dict[str, Any] = dict(info.parameters)
        if info.accepts_seed:
            kwargs["seed"] = seed
        if denominator_offset and info.name == "cayley_equivalence":
            kwargs["denominator_offset"] = denominator_offset
        result = info.runner(**kwargs)
        status = "✅" if result.passed else "❌"
        logger.info(f"{status} {info.korean_name}: 최대 오차 {result.max_error:.3e} (허용 {result.tolerance:g})")
        results.append(result)
    return results
