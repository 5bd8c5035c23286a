"""
qubit 회로 시뮬레이션 도구
"""

import logging
from typing import Annotated, List, Optional

import numpy as np
from mcp.types import TextContent

from qudit_qnn.engine import qubit_sim
from qudit_qnn.engine.qudit_core import ThetaVector
from qudit_qnn.server import mcp
from qudit_qnn.utils.formatters import format_distribution

logger = logging.getLogger(__name__)


def resolve_theta(theta: Optional[List[float]], d: Optional[int], seed: int = 0) -> ThetaVector:
    """명시한 각도 또는 시드 고정 무작위 각도 (θ ∈ (0.01, π-0.01))"""
    if theta:
        return ThetaVector.of(theta)
    if d is None:
        raise ValueError("theta 또는 d 중 하나가 필요합니다")
    rng = np.random.default_rng(seed)
    return ThetaVector(d=d, angles=rng.uniform(0.01, np.pi - 0.01, size=d - 1))


def simulate_text(theta: ThetaVector) -> str:
    circuit = qubit_sim.compile(theta)
    dist = qubit_sim.measurement_distribution(qubit_sim.simulate(circuit), theta.d)
    return format_distribution(dist, qubit_sim.gate_count_report(circuit))


@mcp.tool(name="qudit_simulate_circuit", description="""θ를 qubit 회로로 컴파일해 상태벡터로 시뮬레이션합니다.

매개변수:
- theta: 각도 목록 (라디안, 길이 d-1)
- d: theta 생략 시 무작위 각도의 차원 (2~24)
- seed: 무작위 각도 시드

사용 예시: qudit_simulate_circuit(d=5)""")
def qudit_simulate_circuit(
    theta: Annotated[Optional[List[float]], "각도 목록 (라디안)"] = None,
    d: Annotated[Optional[int], "무작위 θ의 차원"] = None,
    seed: Annotated[int, "무작위 θ 시드"] = 0,
) -> TextContent:
    try:
        text = simulate_text(resolve_theta(theta, d, seed))
    except Exception as e:
        logger.error(f"회로 시뮬레이션 실패: {e}")
        text = f"회로를 시뮬레이션할 수 없습니다: {e}"
    return TextContent(type="text", text=text)
