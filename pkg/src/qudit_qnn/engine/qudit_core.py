"""
qudit 뉴런 수학 코어

θ_1…θ_{d-1} 로 매개변수화된 d차원 직교 연산자 U의 출력 상태를 계산합니다.

- closed form 경로 (정본): U|0> = Σ_ℓ s_{ℓ+1} c_ℓ |ℓ>
- 행렬 경로 (검증용 오라클): 반대칭 행렬 A → Cayley 변환 U = (A-I)(A+I)^{-1}

행렬 경로는 s_1 = 1 에서 특이하므로 추론에는 항상 closed form을 사용합니다.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np
import scipy.linalg

from qudit_qnn.exceptions import DegenerateParameter, InvalidTheta, SingularSolve, DimensionMismatch

logger = logging.getLogger(__name__)

# 행렬 경로 퇴화 임계값 |s_1 - 1|
DEGENERACY_THRESHOLD = 1e-9


@dataclass(frozen=True, eq=False)
class ThetaVector:
    """유효 네트워크 유니터리를 매개변수화하는 d-1개의 실수 각도 (라디안)"""

    d: int
    angles: np.ndarray

    def __post_init__(self) -> None:
        if self.d < 2:
            raise InvalidTheta(f"d는 2 이상이어야 합니다: d={self.d}")
        angles = np.array(self.angles, dtype=np.float64).reshape(-1)
        if angles.shape[0] != self.d - 1:
            raise InvalidTheta(f"각도 개수는 d-1={self.d - 1}이어야 합니다: {angles.shape[0]}개")
        if not np.all(np.isfinite(angles)):
            raise InvalidTheta("각도에 비유한 값이 있습니다")
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)

    @classmethod
    def of(cls, angles: Union[Iterable[float], np.ndarray]) -> "ThetaVector":
        """각도 나열로부터 d = len+1 인 ThetaVector 생성"""
        arr = np.asarray(list(angles) if not isinstance(angles, np.ndarray) else angles, dtype=np.float64)
        return cls(d=arr.shape[0] + 1, angles=arr)


@dataclass(frozen=True, eq=False)
class AuxProducts:
    """
    보조 곱 c, s (0-기반 배열)

    c[ℓ] = c_ℓ  (ℓ = 0…d-1, c_0 = 1, c_ℓ = cos θ_{d-ℓ})
    s[ℓ-1] = s_ℓ (ℓ = 1…d, s_ℓ = Π_{k=1}^{d-ℓ} sin θ_k, s_d = 1)

    c_d 는 존재하지 않는 θ_0 을 참조하므로 저장하지 않습니다.
    """

    c: np.ndarray
    s: np.ndarray

    @property
    def d(self) -> int:
        return int(self.c.shape[0])

    def c_at(self, ell: int) -> float:
        return float(self.c[ell])

    def s_at(self, ell: int) -> float:
        return float(self.s[ell - 1])

    def aux_sum(self) -> float:
        """Σ_{ℓ=1}^{d} s_ℓ² c_{ℓ-1}² (항상 1)"""
        return float(np.sum((self.s * self.c) ** 2))


@dataclass(frozen=True, eq=False)
class QuditState:
    """U|0> 의 실수 진폭 (U가 직교이므로 실수)"""

    amplitudes: np.ndarray

    @property
    def norm_squared(self) -> float:
        return float(np.sum(self.amplitudes ** 2))


@dataclass(frozen=True, eq=False)
class OutcomeProbabilities:
    """측정 결과 j 의 확률 (인덱스 = 결과/클래스 슬롯)"""

    probs: np.ndarray

    def argmax(self) -> int:
        # np.argmax는 동률일 때 가장 작은 인덱스를 반환
        return int(np.argmax(self.probs))


def compute_aux(theta: ThetaVector) -> AuxProducts:
    """보조 곱 c, s 계산"""
    d = theta.d
    sines = np.sin(theta.angles)
    # prefix[m-1] = Π_{k=1}^{m} sin θ_k
    prefix = np.cumprod(sines)
    s = np.append(prefix[::-1], 1.0)
    c = np.empty(d, dtype=np.float64)
    c[0] = 1.0
    # c_ℓ = cos θ_{d-ℓ}: ℓ=1 → θ_{d-1} (마지막), ℓ=d-1 → θ_1
    c[1:] = np.cos(theta.angles[::-1])
    return AuxProducts(c=c, s=s)


def build_skew_matrix(theta: ThetaVector, denominator_offset: float = 0.0) -> np.ndarray:
    """
    첫 행/열에만 비영 원소가 있는 반대칭 행렬 A

    A_{1ℓ} = -A_{ℓ1} = s_ℓ c_{ℓ-1} / (s_1 - 1), 2 <= ℓ <= d

    Args:
        theta: 각도 벡터
        denominator_offset: 분모에 더하는 교란값 (결함 주입 전용, 기본 0)
    """
    aux = compute_aux(theta)
    s1 = aux.s[0]
    if abs(s1 - 1.0) <= DEGENERACY_THRESHOLD:
        raise DegenerateParameter(
            f"|s_1 - 1| = {abs(s1 - 1.0):.3e} <= {DEGENERACY_THRESHOLD:g}: closed form 경로를 사용하세요"
        )
    d = theta.d
    A = np.zeros((d, d), dtype=np.float64)
    row = aux.s[1:] * aux.c[1:] / (s1 - 1.0 + denominator_offset)
    A[0, 1:] = row
    A[1:, 0] = -row
    return A


def cayley_unitary(A: np.ndarray) -> np.ndarray:
    """
    Cayley 변환 U = (A-I)(A+I)^{-1}

    (A-I)와 (A+I)^{-1}는 가환이므로 U = solve(A+I, A-I) 로 계산합니다 (명시적 역행렬 없음).
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"정방 행렬이 필요합니다: shape={A.shape}")
    eye = np.eye(A.shape[0])
    try:
        U = scipy.linalg.solve(A + eye, A - eye)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SingularSolve(f"(A+I) 선형 해법 실패: {e}") from e
    if not np.all(np.isfinite(U)):
        raise SingularSolve("(A+I) 선형 해법 결과에 비유한 값이 있습니다")
    return U


def output_state_closed_form(theta: ThetaVector) -> QuditState:
    """amplitudes[ℓ] = s_{ℓ+1} c_ℓ (모든 θ에서 정의됨)"""
    aux = compute_aux(theta)
    return QuditState(amplitudes=aux.s * aux.c)


def outcome_probabilities(theta: ThetaVector) -> OutcomeProbabilities:
    """p_j = amplitudes[j]² (p_{d-1} = cos²θ_1)"""
    amplitudes = output_state_closed_form(theta).amplitudes
    return OutcomeProbabilities(probs=amplitudes ** 2)


def b_column_closed_form(theta: ThetaVector) -> np.ndarray:
    """
    B = (A+I)^{-1} 의 첫 열

    B_{11} = (1 - s_1)/2, B_{ℓ1} = -s_ℓ c_{ℓ-1}/2 (ℓ >= 2)
    """
    aux = compute_aux(theta)
    s1 = aux.s[0]
    if abs(s1 - 1.0) <= DEGENERACY_THRESHOLD:
        raise DegenerateParameter(
            f"|s_1 - 1| = {abs(s1 - 1.0):.3e} <= {DEGENERACY_THRESHOLD:g}: B 열을 행렬 경로와 비교할 수 없습니다"
        )
    column = -0.5 * aux.s * aux.c
    column[0] = 0.5 * (1.0 - s1)
    return column


def b_column_dense(theta: ThetaVector) -> np.ndarray:
    """(A+I)X = I 의 dense 해에서 첫 열 (오라클)"""
    A = build_skew_matrix(theta)
    eye = np.eye(theta.d)
    try:
        B = scipy.linalg.solve(A + eye, eye)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SingularSolve(f"(A+I) 선형 해법 실패: {e}") from e
    return B[:, 0]


def is_degenerate(theta: ThetaVector) -> bool:
    return abs(compute_aux(theta).s[0] - 1.0) <= DEGENERACY_THRESHOLD
