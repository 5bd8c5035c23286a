"""
활성화 ansatz의 단항식 특성 맵

- multivariable: 차수 L 이하의 모든 단항식 (다변수 Taylor 전개), 가중치 수 C(L+p, p)
- univariate_powers: 좌표별 거듭제곱 [1, x, x∘x, …, x^∘L], 가중치 수 1 + L·p

단항식은 비감소 변수 인덱스 튜플로 표현하며, 차수 오름차순 후 사전식으로 정렬합니다.
상수항 ()이 항상 첫 번째입니다.
"""

import logging
import math
import sys
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Tuple

import numpy as np

from qudit_qnn.exceptions import DimensionMismatch, FeatureOverflow, InvalidConfig, NonFinite

logger = logging.getLogger(__name__)

MonomialIndex = Tuple[int, ...]


class FeatureVariant(str, Enum):
    MULTIVARIABLE = "multivariable"
    UNIVARIATE_POWERS = "univariate_powers"


@dataclass(frozen=True)
class FeatureMap:
    """p개 입력에 대한 차수 L 단항식 확장 명세"""

    p: int
    L: int
    variant: FeatureVariant = FeatureVariant.MULTIVARIABLE

    def __post_init__(self) -> None:
        if self.p < 1 or self.L < 1:
            raise InvalidConfig(f"p >= 1, L >= 1 이어야 합니다: p={self.p}, L={self.L}")
        object.__setattr__(self, "variant", FeatureVariant(self.variant))

    @property
    def size(self) -> int:
        return feature_count(self)

    def to_dict(self) -> dict:
        return {"p": self.p, "L": self.L, "variant": self.variant.value}

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureMap":
        return cls(p=int(data["p"]), L=int(data["L"]), variant=FeatureVariant(data["variant"]))


def feature_count(feature_map: FeatureMap) -> int:
    """상수항을 포함한 가중치(특성) 개수"""
    if feature_map.variant is FeatureVariant.MULTIVARIABLE:
        count = math.comb(feature_map.L + feature_map.p, feature_map.p)
    else:
        count = 1 + feature_map.L * feature_map.p
    if count > sys.maxsize:
        raise FeatureOverflow(f"특성 개수가 정수 범위를 초과합니다: p={feature_map.p}, L={feature_map.L}")
    return count


@lru_cache(maxsize=64)
def _monomials(p: int, L: int, variant: FeatureVariant) -> Tuple[MonomialIndex, ...]:
    if variant is FeatureVariant.MULTIVARIABLE:
        result = []
        for degree in range(L + 1):
            result.extend(combinations_with_replacement(range(p), degree))
        return tuple(result)
    powers: list = [()]
    for degree in range(1, L + 1):
        powers.extend((j,) * degree for j in range(p))
    return tuple(powers)


def enumerate_monomials(feature_map: FeatureMap) -> Tuple[MonomialIndex, ...]:
    """결정적 순서의 단항식 목록 (길이 = feature_count)"""
    feature_count(feature_map)
    return _monomials(feature_map.p, feature_map.L, feature_map.variant)


@lru_cache(maxsize=64)
def _parent_plan(p: int, L: int, variant: FeatureVariant) -> Tuple[np.ndarray, np.ndarray]:
    """
    각 단항식 i (i >= 1)에 대해 (부모 열, 곱할 변수)를 구합니다.

    부모는 마지막 인덱스를 뺀 단항식이며 항상 더 앞에 나옵니다.
    """
    monomials = _monomials(p, L, variant)
    position = {mono: i for i, mono in enumerate(monomials)}
    parents = np.zeros(len(monomials), dtype=np.int64)
    variables = np.zeros(len(monomials), dtype=np.int64)
    for i, mono in enumerate(monomials[1:], start=1):
        parents[i] = position[mono[:-1]]
        variables[i] = mono[-1]
    return parents, variables


def expand_batch(feature_map: FeatureMap, X: np.ndarray) -> np.ndarray:
    """n×p 행렬의 각 행을 확장한 n×feature_count 행렬"""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != feature_map.p:
        raise DimensionMismatch(f"입력 열 수가 p={feature_map.p}와 다릅니다: shape={X.shape}")
    n = X.shape[0]
    m = feature_count(feature_map)
    out = np.empty((n, m), dtype=np.float64)
    out[:, 0] = 1.0
    if feature_map.variant is FeatureVariant.UNIVARIATE_POWERS:
        p = feature_map.p
        for degree in range(1, feature_map.L + 1):
            start = 1 + (degree - 1) * p
            out[:, start:start + p] = X ** degree
    else:
        parents, variables = _parent_plan(feature_map.p, feature_map.L, feature_map.variant)
        for i in range(1, m):
            np.multiply(out[:, parents[i]], X[:, variables[i]], out=out[:, i])
    if not np.all(np.isfinite(out)):
        raise NonFinite("확장된 특성에 비유한 값이 있습니다")
    return out


def expand(feature_map: FeatureMap, x: np.ndarray) -> np.ndarray:
    """길이 p 벡터 하나를 확장"""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != feature_map.p:
        raise DimensionMismatch(f"입력 길이가 p={feature_map.p}와 다릅니다: {x.shape[0]}")
    return expand_batch(feature_map, x[np.newaxis, :])[0]


def monomial_degrees(feature_map: FeatureMap) -> np.ndarray:
    return np.array([len(mono) for mono in enumerate_monomials(feature_map)], dtype=np.int64)
