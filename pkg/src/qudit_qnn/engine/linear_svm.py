"""
soft-margin 선형 SVM

    min_{w,b} ½‖w‖² + C Σ max(0, 1 - y_i(w·x_i + b))

절편 b는 정규화하지 않습니다. 따라서 쌍대 문제에 등식 제약 Σ y_i α_i = 0 이 생기고,
liblinear식 단일 좌표 갱신 대신 제약 방향을 따르는 두 좌표(쌍) 갱신을 사용합니다.

에폭마다 전체 기울기로 위반 집합 I_up / I_low 를 점수순으로 정렬하고,
k번째 위반 쌍 (I_up[k], I_low[k]) 를 차례로 정확히 최소화합니다. 첫 쌍은 최대 위반 쌍이며,
나머지 쌍도 갱신 직전의 w로 기울기를 다시 계산합니다. 동점은 시드 고정 난수 순위로 정합니다.

멈춤 조건은 상대 쌍대 간극 (P(w, b) - D(α)) <= tolerance · D(α) 입니다.
D(α) <= P* 이므로 멈춘 해의 목적 함수는 최적값의 (1 + tolerance) 배 이내입니다.

특성 행렬의 0번 열은 상수항이며 w가 아니라 b로 전달됩니다.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from numba import njit

from qudit_qnn.exceptions import DimensionMismatch, InvalidConfig, NonFinite, SingleClass

logger = logging.getLogger(__name__)

LOSSES = ("hinge", "squared_hinge")


@dataclass(frozen=True)
class SolverConfig:
    """SVM 해법 설정"""

    C: float = 1.0
    tolerance: float = 1e-4
    max_epochs: int = 1000
    seed: int = 0
    loss: str = "hinge"
    balanced_class_weight: bool = False

    def __post_init__(self) -> None:
        if not self.C > 0:
            raise InvalidConfig(f"C > 0 이어야 합니다: {self.C}")
        if not self.tolerance > 0:
            raise InvalidConfig(f"tolerance > 0 이어야 합니다: {self.tolerance}")
        if self.max_epochs < 1:
            raise InvalidConfig(f"max_epochs >= 1 이어야 합니다: {self.max_epochs}")
        if self.loss not in LOSSES:
            raise InvalidConfig(f"지원하지 않는 손실: {self.loss!r}")


@dataclass(frozen=True, eq=False)
class SvmProblem:
    """이진 부분 문제 (X: n×m, 0번 열 상수항 / y: ±1)"""

    X: np.ndarray
    y: np.ndarray
    config: SolverConfig = field(default_factory=SolverConfig)


@dataclass(frozen=True, eq=False)
class SvmSolution:
    """단항식 가중치 w (상수항 제외)와 절편 b"""

    w: np.ndarray
    b: float
    converged: bool = True
    epochs: int = 0
    kkt_gap: float = 0.0
    duality_gap: float = 0.0
    primal_objective: float = 0.0
    objective_trace: Tuple[float, ...] = ()
    seconds: float = 0.0

    def affine_weights(self) -> np.ndarray:
        """[b, w_1, …] (특성 행렬 열 순서와 동일)"""
        return np.concatenate(([self.b], self.w))


@njit(nogil=True, cache=False)
def _violating_pairs(X, y, alpha, w, upper, diag, score, up_order, low_order):  # pragma: no cover - numba
    m = X.shape[1]
    for k in range(min(up_order.shape[0], low_order.shape[0])):
        i = up_order[k]
        j = low_order[k]
        if score[i] <= score[j]:
            break
        if i == j:
            continue
        wi = 0.0
        wj = 0.0
        curv = diag[i] + diag[j]
        for t in range(m):
            wi += w[t] * X[i, t]
            wj += w[t] * X[j, t]
            diff = X[i, t] - X[j, t]
            curv += diff * diff
        gi = wi - y[i] + y[i] * diag[i] * alpha[i]
        gj = wj - y[j] + y[j] * diag[j] * alpha[j]

        # α_i + y_i δ ∈ [0, U_i], α_j - y_j δ ∈ [0, U_j]
        if y[i] > 0:
            lo = -alpha[i]
            hi = upper[i] - alpha[i]
        else:
            lo = alpha[i] - upper[i]
            hi = alpha[i]
        if y[j] > 0:
            lo = max(lo, alpha[j] - upper[j])
            hi = min(hi, alpha[j])
        else:
            lo = max(lo, -alpha[j])
            hi = min(hi, upper[j] - alpha[j])

        if curv > 1e-12:
            step = -(gi - gj) / curv
        elif gi < gj:
            step = hi
        elif gi > gj:
            step = lo
        else:
            continue
        if step < lo:
            step = lo
        elif step > hi:
            step = hi
        if step == 0.0:
            continue

        ai = alpha[i] + y[i] * step
        aj = alpha[j] - y[j] * step
        alpha[i] = min(max(ai, 0.0), upper[i])
        alpha[j] = min(max(aj, 0.0), upper[j])
        for t in range(m):
            w[t] += step * (X[i, t] - X[j, t])


def _sample_costs(y: np.ndarray, config: SolverConfig) -> np.ndarray:
    costs = np.full(y.shape[0], config.C, dtype=np.float64)
    if config.balanced_class_weight:
        n = y.shape[0]
        for label in (-1.0, 1.0):
            mask = y == label
            costs[mask] *= n / (2.0 * np.count_nonzero(mask))
    return costs


def _working_sets(
    margins: np.ndarray, y: np.ndarray, alpha: np.ndarray, upper: np.ndarray, diag: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(점수 -y_t ∇f_t, I_up 마스크, I_low 마스크)"""
    # -y_t ∇f_t = y_t - w·x_t - y_t D_t α_t
    score = y - margins - y * diag * alpha
    below = alpha < upper
    above = alpha > 0
    up = (below & (y > 0)) | (above & (y < 0))
    low = (below & (y < 0)) | (above & (y > 0))
    return score, up, low


def _kkt_state(
    score: np.ndarray, up: np.ndarray, low: np.ndarray, alpha: np.ndarray, upper: np.ndarray
) -> Tuple[float, float]:
    """(m(α) - M(α), KKT 절편 추정치)"""
    m_up = float(np.max(score[up])) if np.any(up) else -np.inf
    m_low = float(np.min(score[low])) if np.any(low) else np.inf
    free = (alpha < upper) & (alpha > 0)
    if np.any(free):
        bias = float(np.mean(score[free]))
    else:
        bias = 0.5 * (m_up + m_low)
    return m_up - m_low, bias


def _violation_order(indices: np.ndarray, keys: np.ndarray, rank: np.ndarray) -> np.ndarray:
    """keys 오름차순, 동점은 rank 순"""
    return indices[np.lexsort((rank[indices], keys[indices]))]


def _optimal_intercept_interval(u: np.ndarray, y: np.ndarray, costs: np.ndarray) -> Tuple[float, float]:
    """
    w 고정 시 Σ c_i max(0, 1 - y_i(u_i + b)) 를 최소화하는 b 구간 [lo, hi]

    꺾임점 t_i = y_i - u_i 에서 좌/우 기울기 부호로 구간을 찾습니다.
    """
    t = y - u
    neg = y < 0
    t_neg, c_neg = t[neg], costs[neg]
    t_pos, c_pos = t[~neg], costs[~neg]
    order_n = np.argsort(t_neg, kind="stable")
    order_p = np.argsort(t_pos, kind="stable")
    t_neg, c_neg = t_neg[order_n], c_neg[order_n]
    t_pos, c_pos = t_pos[order_p], c_pos[order_p]
    cum_n = np.concatenate(([0.0], np.cumsum(c_neg)))
    cum_p = np.concatenate(([0.0], np.cumsum(c_pos)))
    total_p = cum_p[-1]

    slope_right = cum_n[np.searchsorted(t_neg, t, side="right")] - (
        total_p - cum_p[np.searchsorted(t_pos, t, side="right")]
    )
    slope_left = cum_n[np.searchsorted(t_neg, t, side="left")] - (
        total_p - cum_p[np.searchsorted(t_pos, t, side="left")]
    )
    lo = float(np.min(t[slope_right >= 0]))
    hi = float(np.max(t[slope_left <= 0]))
    return lo, max(lo, hi)


def _intercept(estimate: float, margins: np.ndarray, y: np.ndarray, costs: np.ndarray, loss: str) -> float:
    """hinge는 KKT 추정치를 최적 절편 구간으로 당기고, squared_hinge는 추정치를 그대로 씁니다."""
    if loss != "hinge":
        return estimate
    lo, hi = _optimal_intercept_interval(margins, y, costs)
    return min(max(estimate, lo), hi)


def _primal_value(w: np.ndarray, margins: np.ndarray, y: np.ndarray, costs: np.ndarray, loss: str) -> float:
    slack = np.maximum(0.0, 1.0 - y * margins)
    if loss == "squared_hinge":
        slack = slack ** 2
    return float(0.5 * np.dot(w, w) + np.dot(costs, slack))


def primal_objective(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, config: SolverConfig) -> float:
    """½‖w‖² + Σ c_i loss_i (X는 상수항 열을 포함)"""
    return _primal_value(w, X[:, 1:] @ w + b, y, _sample_costs(y, config), config.loss)


def _validate(problem: SvmProblem) -> Tuple[np.ndarray, np.ndarray]:
    X = np.asarray(problem.X, dtype=np.float64)
    y = np.asarray(problem.y, dtype=np.float64).reshape(-1)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"X 행 수와 y 길이가 다릅니다: X={X.shape}, y={y.shape}")
    if X.shape[1] < 1:
        raise DimensionMismatch("X에는 최소한 상수항 열이 필요합니다")
    if not np.all(np.isfinite(X)):
        raise NonFinite("특성 행렬에 비유한 값이 있습니다")
    if not np.all((y == 1.0) | (y == -1.0)):
        raise DimensionMismatch("레이블은 -1 또는 +1 이어야 합니다")
    if np.all(y > 0) or np.all(y < 0):
        raise SingleClass("이진 SVM에는 두 레이블이 모두 필요합니다")
    return X, y


def train(problem: SvmProblem) -> SvmSolution:
    """위반 쌍 좌표 하강으로 soft-margin SVM을 풉니다 (시드가 같으면 결과가 비트 단위로 동일)."""
    config = problem.config
    X, y = _validate(problem)
    started = time.perf_counter()

    features = np.ascontiguousarray(X[:, 1:])
    n = features.shape[0]
    costs = _sample_costs(y, config)
    if config.loss == "squared_hinge":
        upper = np.full(n, np.inf)
        diag = 0.5 / costs
    else:
        upper = costs
        diag = np.zeros(n)

    alpha = np.zeros(n)
    w = np.zeros(features.shape[1])
    rng = np.random.default_rng(config.seed)
    trace: List[float] = []
    converged = False
    kkt_gap = np.inf
    duality_gap = np.inf
    bias = 0.0
    epochs = 0

    margins = np.zeros(n)
    score, up, low = _working_sets(margins, y, alpha, upper, diag)
    for epoch in range(1, config.max_epochs + 1):
        epochs = epoch
        rank = rng.permutation(n)
        up_order = _violation_order(np.flatnonzero(up), -score, rank)
        low_order = _violation_order(np.flatnonzero(low), score, rank)
        _violating_pairs(features, y, alpha, w, upper, diag, score, up_order, low_order)
        if not np.all(np.isfinite(w)):
            raise NonFinite("SVM 해법 중 가중치가 발산했습니다")

        margins = features @ w
        score, up, low = _working_sets(margins, y, alpha, upper, diag)
        kkt_gap, estimate = _kkt_state(score, up, low, alpha, upper)
        objective = float(0.5 * np.dot(w, w) + 0.5 * np.dot(diag, alpha ** 2) - np.sum(alpha))
        trace.append(objective)

        bias = _intercept(estimate, margins, y, costs, config.loss)
        dual = -objective
        duality_gap = _primal_value(w, margins + bias, y, costs, config.loss) - dual
        if dual > 0 and duality_gap <= config.tolerance * dual:
            converged = True
            break

    if not (np.isfinite(bias) and np.all(np.isfinite(w))):
        raise NonFinite("SVM 해가 유한하지 않습니다")

    if not converged:
        logger.warning(
            f"SVM 미수렴: {epochs} 에폭 후 쌍대 간극={duality_gap:.3e}, KKT gap={kkt_gap:.3e} "
            f"(tolerance={config.tolerance:g})"
        )
    else:
        logger.debug(f"SVM 수렴: {epochs} 에폭, 쌍대 간극={duality_gap:.3e}, KKT gap={kkt_gap:.3e}")

    return SvmSolution(
        w=w,
        b=float(bias),
        converged=converged,
        epochs=epochs,
        kkt_gap=float(kkt_gap),
        duality_gap=float(duality_gap),
        primal_objective=primal_objective(w, float(bias), X, y, config),
        objective_trace=tuple(trace),
        seconds=time.perf_counter() - started,
    )


def decision_values(solution: SvmSolution, X: np.ndarray) -> np.ndarray:
    """ŷ_i = w·x_i + b (상수항 열은 b로만 기여)"""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != solution.w.shape[0] + 1:
        raise DimensionMismatch(
            f"특성 열 수가 맞지 않습니다: 기대 {solution.w.shape[0] + 1}, 실제 {X.shape}"
        )
    return X[:, 1:] @ solution.w + solution.b


def hinge_loss(y: np.ndarray, yhat: np.ndarray) -> float:
    """Σ max(0, 1 - y_i ŷ_i), 인덱스 오름차순 누적"""
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    yhat = np.asarray(yhat, dtype=np.float64).reshape(-1)
    if y.shape != yhat.shape:
        raise DimensionMismatch(f"길이가 다릅니다: y={y.shape}, ŷ={yhat.shape}")
    if y.shape[0] == 0:
        return 0.0
    terms = np.maximum(0.0, 1.0 - y * yhat)
    return float(np.add.accumulate(terms)[-1])
