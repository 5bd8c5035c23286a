"""
자기 점검 / 특성 수 도구
"""

import logging
from typing import Annotated, Any, List, Optional

from mcp.types import TextContent

from qudit_qnn.engine.poly_features import FeatureMap, feature_count
from qudit_qnn.engine.verification import run_checks
from qudit_qnn.server import mcp
from qudit_qnn.utils.ctx_helper import with_context
from qudit_qnn.utils.formatters import format_check_results

logger = logging.getLogger(__name__)


def verify_text(qudit_ctx: Any, seed: int = 0, checks: Optional[List[str]] = None) -> str:
    results = run_checks(qudit_ctx.registry, seed=seed, names=checks)
    return format_check_results(results)


def feature_count_text(p: int, L: int, variant: str = "multivariable") -> str:
    feature_map = FeatureMap(p=p, L=L, variant=variant)
    return f"p={p}, L={L}, {feature_map.variant.value}: 가중치 {feature_count(feature_map)}개 (상수항 포함)"


@mcp.tool(name="qudit_verify", description="""qudit 수학 자기 점검을 실행합니다.

매개변수:
- seed: 무작위 θ 시드 (기본 0)
- checks: 실행할 점검 이름 목록 (생략하면 전체)
  normalization, cayley_equivalence, b_column, qubit_equivalence, bit_ordering, feature_counts, boundary_concentration

사용 예시: qudit_verify(checks=["feature_counts"])""")
def qudit_verify(
    seed: Annotated[int, "무작위 θ 시드"] = 0,
    checks: Annotated[Optional[List[str]], "점검 이름 목록"] = None,
) -> TextContent:
    try:
        text = with_context("qudit_verify", lambda c: verify_text(c, seed, checks))
    except Exception as e:
        logger.error(f"자기 점검 실패: {e}")
        text = f"자기 점검 중 오류가 발생했습니다: {e}"
    return TextContent(type="text", text=text)


@mcp.tool(name="qudit_feature_count", description="""특성 맵의 가중치 수를 계산합니다.

매개변수:
- p: 입력 차원 (PCA 성분 수)
- L: 뉴런 수 (다항식 차수)
- variant: multivariable (기본) 또는 univariate_powers

사용 예시: qudit_feature_count(p=10, L=2) → 66""")
def qudit_feature_count(
    p: Annotated[int, "입력 차원"],
    L: Annotated[int, "뉴런 수 (차수)"],
    variant: Annotated[str, "multivariable | univariate_powers"] = "multivariable",
) -> TextContent:
    try:
        text = feature_count_text(p, L, variant)
    except Exception as e:
        text = f"가중치 수를 계산할 수 없습니다: {e}"
    return TextContent(type="text", text=text)
