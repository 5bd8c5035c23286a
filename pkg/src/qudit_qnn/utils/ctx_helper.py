"""
MCP 컨텍스트 헬퍼 유틸리티
"""

import logging
from typing import Any, Callable

logger = logging.getLogger(__name__)


def with_context(tool_name: str, func: Callable[[Any], Any]) -> Any:
    """
    서버 QuditContext (lifespan 중이면 lifespan 컨텍스트, 아니면 fallback)를 func에 넘깁니다.

    Raises:
        RuntimeError: 사용할 컨텍스트가 없을 때
    """
    logger.info(f"📌 Tool: {tool_name} 호출됨")

    from qudit_qnn.server import get_global_context

    qudit_ctx = get_global_context()
    if qudit_ctx is None:
        raise RuntimeError("QuditContext가 초기화되지 않았습니다")
    return func(qudit_ctx)
