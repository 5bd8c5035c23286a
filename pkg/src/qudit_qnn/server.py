"""
qudit 신경망 분류기 MCP 서버

지원하는 도구:
- 자기 점검 (qudit_verify)
- 특성 수 계산 (qudit_feature_count)
- 모델 정보 / 예측 (qudit_model_info, qudit_predict)
- qubit 회로 시뮬레이션 (qudit_simulate_circuit)
"""

import importlib
import logging
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass, field, replace
from typing import AsyncIterator, Dict, Optional

from fastmcp import FastMCP

from qudit_qnn.config import engine_config, mcp_config, setup_logging
from qudit_qnn.engine import trainer
from qudit_qnn.engine.trainer import QuditClassifierModel
from qudit_qnn.registry import CheckRegistry, initialize_registry

setup_logging(replace(engine_config, log_level=mcp_config.log_level))
logger = logging.getLogger(__name__)

# 전역 QuditContext 저장소 (fallback용)
_global_context: Optional["QuditContext"] = None
_context_lock = threading.Lock()


@dataclass
class QuditContext:
    """서버 공용 컨텍스트 (로드된 모델 캐시와 점검 레지스트리)"""

    registry: CheckRegistry = field(default_factory=initialize_registry)
    models: Dict[str, QuditClassifierModel] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def get_model(self, path: str) -> QuditClassifierModel:
        """경로별로 한 번만 읽어 캐시합니다."""
        with self._lock:
            model = self.models.get(path)
        if model is None:
            model = trainer.load_model(path)
            with self._lock:
                self.models[path] = model
            logger.info(f"✅ 모델 캐시: {path} (d={model.d})")
        return model


def set_global_context(ctx: Optional[QuditContext]) -> None:
    global _global_context
    with _context_lock:
        _global_context = ctx


def get_global_context() -> Optional[QuditContext]:
    with _context_lock:
        return _global_context


def _preload(ctx: QuditContext) -> None:
    for path in mcp_config.model_paths:
        try:
            ctx.get_model(path)
        except Exception as e:
            logger.warning(f"⚠️ 모델 사전 로드 실패 ({path}): {e}")


@asynccontextmanager
async def qudit_lifespan(app: FastMCP) -> AsyncIterator[QuditContext]:
    """서버 라이프사이클 관리"""
    logger.info(f"Server Name: {mcp_config.server_name}, Transport: {mcp_config.transport}")
    ctx = QuditContext()
    _preload(ctx)
    set_global_context(ctx)
    try:
        yield ctx
    finally:
        global _global_context
        with _context_lock:
            _global_context = None
        logger.info("Shutting down qudit-qnn FastMCP server...")


# fallback 컨텍스트 (lifespan 밖에서 도구를 직접 부를 때)
set_global_context(QuditContext())

mcp = FastMCP(
    mcp_config.server_name,
    instructions="Single-qudit quantum neural network classifier: self-checks, model inspection, prediction, circuit simulation",
    lifespan=qudit_lifespan,
)

tool_modules = [
    "verify_tools",
    "model_tools",
    "circuit_tools",
]

_loaded_count = 0
for module_name in tool_modules:
    try:
        importlib.import_module(f"qudit_qnn.tools.{module_name}")
        _loaded_count += 1
    except Exception as e:
        logger.error(f"❌ Failed to load tool module {module_name}: {type(e).__name__}: {e}")
logger.info(f"🔧 도구 모듈 로딩 완료: {_loaded_count}/{len(tool_modules)}개")


def main(transport: Optional[str] = None) -> None:
    """메인 서버 실행 함수"""
    transport = transport or mcp_config.transport
    if transport == "http":
        logger.info(f"Starting server with HTTP transport on http://{mcp_config.host}:{mcp_config.port}")
        mcp.run(transport="streamable-http", host=mcp_config.host, port=mcp_config.port)
    else:
        mcp.run()


if __name__ == "__main__":
    main()
