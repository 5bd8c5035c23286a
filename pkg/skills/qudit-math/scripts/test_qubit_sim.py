#!/usr/bin/env python3
"""
qubit 회로 시뮬레이션 테스트

사용법:
    pytest skills/qudit-math/scripts/test_qubit_sim.py
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# 프로젝트 루트를 경로에 추가
project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root / "src"))

from qudit_qnn.engine import qubit_sim  # noqa: E402
from qudit_qnn.engine.qudit_core import ThetaVector, outcome_probabilities  # noqa: E402
from qudit_qnn.exceptions import DimensionMismatch, DimensionTooLarge, InvalidTheta  # noqa: E402


def test_compile_structure():
    theta = ThetaVector.of([0.1, 0.2, 0.3, 0.4])
    circuit = qubit_sim.compile(theta)
    assert circuit.qubits == 4
    assert circuit.d == 5
    assert [g.target for g in circuit.gates] == [1, 2, 3, 4]
    assert [sorted(g.controls) for g in circuit.gates] == [[], [1], [1, 2], [1, 2, 3]]
    assert circuit.gates[2].angle == pytest.approx(np.pi - 0.6)


def test_bit_ordering_d3():
    theta = ThetaVector.of([0.7, 1.1])
    amplitudes = qubit_sim.simulate(qubit_sim.compile(theta)).amplitudes
    assert amplitudes[0b10] == pytest.approx(np.cos(0.7))
    assert amplitudes[0b01] == pytest.approx(np.sin(0.7) * np.cos(1.1))
    assert amplitudes[0b00] == pytest.approx(np.sin(0.7) * np.sin(1.1))
    assert amplitudes[0b11] == pytest.approx(0.0, abs=1e-15)


def test_outcome_map():
    assert qubit_sim.outcome_map(3) == {"00": 0, "01": 1, "10": 2}
    assert qubit_sim.outcome_map(4) == {"000": 0, "001": 1, "010": 2, "100": 3}
    with pytest.raises(InvalidTheta):
        qubit_sim.outcome_map(1)


def test_decode_outcome():
    assert qubit_sim.decode_outcome(0, 4) == 0
    assert qubit_sim.decode_outcome(1, 4) == 1
    assert qubit_sim.decode_outcome(4, 4) == 3
    assert qubit_sim.decode_outcome(3, 4) is None
    assert qubit_sim.decode_outcome(8, 4) is None


@pytest.mark.parametrize("d", [2, 3, 6, 10])
def test_distribution_matches_qudit(d):
    rng = np.random.default_rng(d)
    for _ in range(20):
        theta = ThetaVector(d=d, angles=rng.uniform(0.01, np.pi - 0.01, size=d - 1))
        sv = qubit_sim.simulate(qubit_sim.compile(theta))
        dist = qubit_sim.measurement_distribution(sv, d)
        np.testing.assert_allclose(dist.entries, outcome_probabilities(theta).probs, atol=1e-12)
        assert dist.invalid <= 1e-12
        assert sv.norm == pytest.approx(1.0, abs=1e-12)


def test_invalid_mass_from_other_initial_state():
    theta = ThetaVector.of([0.7, 1.1])
    initial = np.zeros(4)
    initial[0b11] = 1.0
    sv = qubit_sim.simulate(qubit_sim.compile(theta), initial=initial)
    dist = qubit_sim.measurement_distribution(sv, 3)
    assert dist.invalid == pytest.approx(np.sin(0.7) ** 2)
    assert np.sum(dist.entries) + dist.invalid == pytest.approx(1.0)


def test_simulate_errors():
    circuit = qubit_sim.compile(ThetaVector.of([0.3, 0.4]))
    with pytest.raises(DimensionMismatch):
        qubit_sim.simulate(circuit, initial=np.ones(3))
    with pytest.raises(DimensionMismatch):
        qubit_sim.measurement_distribution(qubit_sim.simulate(circuit), 4)
    with pytest.raises(DimensionTooLarge):
        qubit_sim.compile(ThetaVector(d=30, angles=np.full(29, 0.5)))


def test_gate_count_report():
    report = qubit_sim.gate_count_report(qubit_sim.compile(ThetaVector(d=5, angles=np.full(4, 0.5))))
    assert report.arities == (0, 1, 2, 3)
    assert report.arity_sum == 6
    assert report.controlled_ops == 4
    assert report.x_conjugations == 12
    assert report.elementary_estimate == 16


def test_gate_count_grows_quadratically():
    ds = list(range(2, 25))
    counts = [
        qubit_sim.gate_count_report(qubit_sim.compile(ThetaVector(d=d, angles=np.full(d - 1, 0.5)))).elementary_estimate
        for d in ds
    ]
    # (d-1)²
    assert counts == [(d - 1) ** 2 for d in ds]
    c, _ = qubit_sim.quadratic_fit(ds, counts)
    assert 0.5 < c < 1.5


def test_circuit_json():
    circuit = qubit_sim.compile(ThetaVector.of([0.3, 0.4, 0.5]))
    restored = qubit_sim.circuit_from_json(qubit_sim.circuit_to_json(circuit))
    assert restored == circuit


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
