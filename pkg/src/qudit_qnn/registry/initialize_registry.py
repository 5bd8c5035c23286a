"""
수학 자기 점검 레지스트리 초기화
"""

from qudit_qnn.engine import verification
from qudit_qnn.registry.check_registry import CheckRegistry


def initialize_registry() -> CheckRegistry:
    registry = CheckRegistry()

    # ===========================================
    # qudit 코어 (3개)
    # ===========================================

    registry.register_check(
        name="normalization",
        korean_name="확률 정규화",
        description="""
무작위 θ 10,000개 (d ∈ 2…64, θ ∈ (0.01, π-0.01))에서 결과 확률 합과
보조 곱 합 Σ s_ℓ² c_{ℓ-1}² 이 1과 1e-12 이내로 일치하는지 확인합니다.
""",
        runner=verification.check_normalization,
        parameters={"trials": 10_000, "max_d": 64, "tolerance": 1e-12},
        linked_checks=["cayley_equivalence", "boundary_concentration"],
    )

    registry.register_check(
        name="cayley_equivalence",
        korean_name="Cayley 경로 동치",
        description="""
반대칭 행렬의 Cayley 변환 U의 첫 열이 closed form 출력 상태와 1e-10 이내로 같고
U가 직교인지 확인합니다. 분모 교란(결함 주입) 시 실패해야 합니다.
""",
        runner=verification.check_cayley_equivalence,
        parameters={"trials": 500, "max_d": 32, "tolerance": 1e-10},
        linked_checks=["normalization", "b_column"],
    )

    registry.register_check(
        name="b_column",
        korean_name="(A+I)⁻¹ 첫 열",
        description="""
B = (A+I)⁻¹ 첫 열의 closed form과 dense 선형 해를 1e-10 이내로 비교합니다.
""",
        runner=verification.check_b_column,
        parameters={"trials": 500, "max_d": 32, "tolerance": 1e-10},
        linked_checks=["cayley_equivalence"],
    )

    # ===========================================
    # qubit 회로 (2개)
    # ===========================================

    registry.register_check(
        name="qubit_equivalence",
        korean_name="qubit 회로 동치",
        description="""
d ∈ 2…12 각각 무작위 θ 100개에 대해 qubit 회로 상태벡터의 유효 결과 확률이
qudit 확률과 1e-12 이내로 같고 Invalid 질량이 1e-12 미만인지 확인합니다.
""",
        runner=verification.check_qubit_equivalence,
        parameters={"per_d": 100, "max_d": 12, "tolerance": 1e-12},
        linked_checks=["bit_ordering"],
    )

    registry.register_check(
        name="bit_ordering",
        korean_name="비트 순서",
        description="d=3 손 계산 사례로 가장 나중 qubit이 최하위 비트인지 확인합니다.",
        runner=verification.check_bit_ordering,
        accepts_seed=False,
        linked_checks=["qubit_equivalence"],
    )

    # ===========================================
    # 특성 / 추론 (2개)
    # ===========================================

    registry.register_check(
        name="feature_counts",
        korean_name="가중치 수",
        description="다변수 특성 맵 가중치 수가 11/66/286/1771/5456/12341 과 정확히 같은지 확인합니다.",
        runner=verification.check_feature_counts,
        accepts_seed=False,
    )

    registry.register_check(
        name="boundary_concentration",
        korean_name="경계 집중",
        description="sin θ가 0 또는 1로 포화될 때 확률이 결과 d-1 또는 0에 모이는지 확인합니다.",
        runner=verification.check_boundary_concentration,
        accepts_seed=False,
        linked_checks=["normalization"],
    )

    return registry
