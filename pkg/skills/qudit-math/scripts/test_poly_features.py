#!/usr/bin/env python3
"""
단항식 특성 맵 테스트

사용법:
    pytest skills/qudit-math/scripts/test_poly_features.py
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# 프로젝트 루트를 경로에 추가
project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root / "src"))

from qudit_qnn.engine.poly_features import (  # noqa: E402
    FeatureMap,
    FeatureVariant,
    enumerate_monomials,
    expand,
    expand_batch,
    feature_count,
    monomial_degrees,
)
from qudit_qnn.exceptions import DimensionMismatch, FeatureOverflow, InvalidConfig, NonFinite  # noqa: E402


@pytest.mark.parametrize(
    "p, L, expected",
    [(10, 1, 11), (10, 2, 66), (10, 3, 286), (20, 3, 1771), (30, 3, 5456), (40, 3, 12341)],
)
def test_multivariable_counts(p, L, expected):
    assert feature_count(FeatureMap(p=p, L=L)) == expected


def test_univariate_counts():
    assert feature_count(FeatureMap(p=30, L=3, variant="univariate_powers")) == 91
    assert FeatureMap(p=10, L=1, variant=FeatureVariant.UNIVARIATE_POWERS).size == 11


def test_monomial_order():
    fm = FeatureMap(p=2, L=2)
    assert enumerate_monomials(fm) == ((), (0,), (1,), (0, 0), (0, 1), (1, 1))
    np.testing.assert_array_equal(monomial_degrees(fm), [0, 1, 1, 2, 2, 2])


def test_expand_multivariable():
    np.testing.assert_allclose(expand(FeatureMap(p=2, L=2), [2.0, 3.0]), [1, 2, 3, 4, 6, 9])


def test_expand_univariate_powers():
    fm = FeatureMap(p=2, L=2, variant="univariate_powers")
    assert enumerate_monomials(fm) == ((), (0,), (1,), (0, 0), (1, 1))
    np.testing.assert_allclose(expand(fm, [2.0, 3.0]), [1, 2, 3, 4, 9])


def test_expand_batch_matches_monomials():
    fm = FeatureMap(p=3, L=3)
    rng = np.random.default_rng(0)
    X = rng.normal(size=(5, 3))
    features = expand_batch(fm, X)
    assert features.shape == (5, 20)
    for col, mono in enumerate(enumerate_monomials(fm)):
        expected = np.prod(X[:, list(mono)], axis=1) if mono else np.ones(5)
        np.testing.assert_allclose(features[:, col], expected, rtol=1e-12)


def test_expand_errors():
    fm = FeatureMap(p=2, L=2)
    with pytest.raises(DimensionMismatch):
        expand(fm, [1.0, 2.0, 3.0])
    with pytest.raises(NonFinite):
        expand_batch(fm, np.array([[1e200, 1e200]]))
    with pytest.raises(InvalidConfig):
        FeatureMap(p=0, L=2)


def test_feature_overflow():
    with pytest.raises(FeatureOverflow):
        feature_count(FeatureMap(p=1_000_000, L=1_000))


def test_feature_map_dict():
    fm = FeatureMap(p=4, L=2, variant="univariate_powers")
    assert fm.to_dict() == {"p": 4, "L": 2, "variant": "univariate_powers"}
    assert FeatureMap.from_dict(fm.to_dict()) == fm


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
