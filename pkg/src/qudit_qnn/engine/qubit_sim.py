"""
qudit 연산자의 qubit 회로 구현

d-1개 qubit, 게이트 k는 qubit k에 R_y(π - 2θ_k)를 걸고 qubit 1…k-1 이 모두 |0> 일 때만 작동합니다.
결과는 one-hot 부호로 읽습니다: 모두 0 → 항목 0, 2^{j-1} → 항목 j, 그 외는 Invalid.

비트 순서: qubit q 는 결과 인덱스의 비트 (n - q) 입니다 (가장 나중 qubit이 최하위 비트).
상태벡터는 [2]*n 텐서로 보며 qubit q 가 축 q-1 입니다.
"""

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from qudit_qnn.engine.qudit_core import ThetaVector
from qudit_qnn.exceptions import DimensionMismatch, DimensionTooLarge, InvalidTheta

logger = logging.getLogger(__name__)

MAX_SIM_DIMENSION = 24


@dataclass(frozen=True)
class RyGate:
    """controls 의 qubit이 모두 |0> 일 때 target 에 R_y(angle)"""

    target: int
    angle: float
    controls: FrozenSet[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "controls", frozenset(int(c) for c in self.controls))
        if self.target in self.controls:
            raise DimensionMismatch(f"target {self.target}이 controls에 포함되어 있습니다")
        if self.target < 1 or any(c < 1 for c in self.controls):
            raise DimensionMismatch("qubit 인덱스는 1부터 시작합니다")

    @property
    def arity(self) -> int:
        return len(self.controls)

    def matrix(self) -> np.ndarray:
        c, s = np.cos(self.angle / 2.0), np.sin(self.angle / 2.0)
        return np.array([[c, -s], [s, c]])

    def to_dict(self) -> Dict[str, Any]:
        return {"target": self.target, "angle": self.angle, "controls": sorted(self.controls)}


@dataclass(frozen=True)
class QubitCircuit:
    qubits: int
    gates: Tuple[RyGate, ...]

    def __post_init__(self) -> None:
        for gate in self.gates:
            if gate.target > self.qubits or any(c > self.qubits for c in gate.controls):
                raise DimensionMismatch(f"게이트 인덱스가 qubit 수 {self.qubits}를 넘습니다: {gate}")

    @property
    def d(self) -> int:
        return self.qubits + 1


@dataclass(frozen=True, eq=False)
class Statevector:
    """2^n 실수 진폭 (R_y 가 실수 행렬이므로 위상 없음)"""

    amplitudes: np.ndarray
    qubits: int

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return self.amplitudes ** 2


@dataclass(frozen=True, eq=False)
class MeasurementDistribution:
    entries: np.ndarray  # 항목 0…d-1 확률
    invalid: float

    def to_dict(self) -> Dict[str, Any]:
        return {"entries": self.entries.tolist(), "invalid": self.invalid}


@dataclass(frozen=True)
class GateCountReport:
    d: int
    arities: Tuple[int, ...]
    arity_sum: int
    controlled_ops: int
    x_conjugations: int  # 빈 제어마다 앞뒤 X 한 쌍

    @property
    def elementary_estimate(self) -> int:
        return self.controlled_ops + self.x_conjugations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "arities": list(self.arities),
            "arity_sum": self.arity_sum,
            "controlled_ops": self.controlled_ops,
            "x_conjugations": self.x_conjugations,
            "elementary_estimate": self.elementary_estimate,
        }


def compile(theta: ThetaVector) -> QubitCircuit:  # noqa: A001
    """게이트 k: target k, angle π - 2θ_k, 빈 제어 {1…k-1}"""
    if theta.d > MAX_SIM_DIMENSION:
        raise DimensionTooLarge(f"d={theta.d} > {MAX_SIM_DIMENSION}: 상태벡터가 너무 큽니다")
    gates = tuple(
        RyGate(target=k, angle=float(np.pi - 2.0 * theta.angles[k - 1]), controls=frozenset(range(1, k)))
        for k in range(1, theta.d)
    )
    return QubitCircuit(qubits=theta.d - 1, gates=gates)


def _apply(state: np.ndarray, gate: RyGate) -> None:
    n = state.ndim
    index: List[Any] = [slice(None)] * n
    for control in gate.controls:
        index[control - 1] = 0
    index[gate.target - 1] = 0
    zero = tuple(index)
    index[gate.target - 1] = 1
    one = tuple(index)

    c, s = np.cos(gate.angle / 2.0), np.sin(gate.angle / 2.0)
    a0 = state[zero].copy()
    a1 = state[one].copy()
    state[zero] = c * a0 - s * a1
    state[one] = s * a0 + c * a1


def simulate(circuit: QubitCircuit, initial: Optional[np.ndarray] = None) -> Statevector:
    """|0…0> (또는 initial)에서 게이트를 순서대로 적용"""
    n = circuit.qubits
    if initial is None:
        state = np.zeros(2 ** n, dtype=np.float64)
        state[0] = 1.0
    else:
        state = np.array(initial, dtype=np.float64).reshape(-1)
        if state.shape[0] != 2 ** n:
            raise DimensionMismatch(f"초기 상태 길이 {state.shape[0]} != 2^{n}")
    tensor = state.reshape([2] * n)
    for gate in circuit.gates:
        _apply(tensor, gate)
    return Statevector(amplitudes=tensor.reshape(-1), qubits=n)


def bitstring(index: int, qubits: int) -> str:
    """qubit 1이 왼쪽 끝"""
    return format(index, f"0{qubits}b")


def outcome_map(d: int) -> Dict[str, int]:
    """유효한 비트열 → qudit 항목 (목록에 없는 비트열은 Invalid)"""
    if d < 2:
        raise InvalidTheta(f"d >= 2 이어야 합니다: {d}")
    n = d - 1
    mapping = {bitstring(0, n): 0}
    for j in range(1, d):
        mapping[bitstring(1 << (j - 1), n)] = j
    return mapping


def decode_outcome(index: int, d: int) -> Optional[int]:
    """결과 인덱스 → 항목, Invalid 이면 None"""
    if index == 0:
        return 0
    if index < (1 << (d - 1)) and index & (index - 1) == 0:
        return index.bit_length()
    return None


def measurement_distribution(sv: Statevector, d: int) -> MeasurementDistribution:
    if sv.qubits != d - 1:
        raise DimensionMismatch(f"qubit 수 {sv.qubits} != d-1={d - 1}")
    probs = sv.probabilities()
    valid = np.array([0] + [1 << (j - 1) for j in range(1, d)], dtype=np.int64)
    invalid_mask = np.ones(probs.shape[0], dtype=bool)
    invalid_mask[valid] = False
    return MeasurementDistribution(entries=probs[valid].copy(), invalid=float(np.sum(probs[invalid_mask])))


def gate_count_report(circuit: QubitCircuit) -> GateCountReport:
    arities = tuple(gate.arity for gate in circuit.gates)
    total = sum(arities)
    return GateCountReport(
        d=circuit.d,
        arities=arities,
        arity_sum=total,
        controlled_ops=len(circuit.gates),
        x_conjugations=2 * total,
    )


def quadratic_fit(ds: Sequence[int], counts: Sequence[float]) -> Tuple[float, float]:
    """counts ≈ c·d² 최소제곱 계수 c 와 최대 상대 잔차"""
    d = np.asarray(ds, dtype=np.float64)
    t = np.asarray(counts, dtype=np.float64)
    c = float(np.sum(t * d ** 2) / np.sum(d ** 4))
    scale = np.maximum(np.abs(t), 1.0)
    return c, float(np.max(np.abs(t - c * d ** 2) / scale))


def circuit_to_json(circuit: QubitCircuit) -> str:
    return json.dumps([gate.to_dict() for gate in circuit.gates], indent=2) + "\n"


def circuit_from_json(text: str) -> QubitCircuit:
    gates = tuple(
        RyGate(target=int(g["target"]), angle=float(g["angle"]), controls=frozenset(g["controls"]))
        for g in json.loads(text)
    )
    qubits = max((max([g.target, *g.controls]) for g in gates), default=0)
    return QubitCircuit(qubits=qubits, gates=gates)
