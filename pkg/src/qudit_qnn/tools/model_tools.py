"""
학습된 모델 조회 / 예측 도구
"""

import json
import logging
from typing import Annotated, Any, List

import numpy as np
from mcp.types import TextContent

from qudit_qnn.engine import trainer
from qudit_qnn.server import mcp
from qudit_qnn.utils.ctx_helper import with_context
from qudit_qnn.utils.formatters import format_model_info

logger = logging.getLogger(__name__)


def model_info_text(qudit_ctx: Any, model_path: str) -> str:
    model = qudit_ctx.get_model(model_path)
    text = format_model_info(model)
    meta = model.metadata
    if meta:
        text += "metadata: " + json.dumps(meta, ensure_ascii=False, sort_keys=True) + "\n"
    return text


def predict_text(qudit_ctx: Any, model_path: str, rows: List[List[float]], proba: bool = False) -> str:
    model = qudit_ctx.get_model(model_path)
    X = np.asarray(rows, dtype=np.float64)
    labels = trainer.predict(model, X)
    result: List[dict] = []
    probabilities = trainer.predict_proba(model, X) if proba else None
    for i, label in enumerate(labels):
        item = {"label": model.label_name(int(label))}
        if probabilities is not None:
            item["proba"] = {model.label_name(j): float(p) for j, p in enumerate(probabilities[i])}
        result.append(item)
    return json.dumps(result, ensure_ascii=False)


@mcp.tool(name="qudit_model_info", description="""학습된 모델 파일의 구조를 보여줍니다.

매개변수:
- model_path: 모델 JSON 경로 (train 명령 출력)

사용 예시: qudit_model_info(model_path="runs/model.json")""")
def qudit_model_info(
    model_path: Annotated[str, "모델 JSON 경로"],
) -> TextContent:
    try:
        text = with_context("qudit_model_info", lambda c: model_info_text(c, model_path))
    except Exception as e:
        logger.error(f"모델 정보 조회 실패: {e}")
        text = f"모델을 읽을 수 없습니다: {e}"
    return TextContent(type="text", text=text)


@mcp.tool(name="qudit_predict", description="""입력 행을 분류합니다.

매개변수:
- model_path: 모델 JSON 경로
- rows: 입력 벡터 목록 (각 행의 길이는 모델 입력 차원, PCA 이전 값)
- proba: true면 클래스별 확률도 반환

사용 예시: qudit_predict(model_path="runs/model.json", rows=[[0.1, 0.2]])""")
def qudit_predict(
    model_path: Annotated[str, "모델 JSON 경로"],
    rows: Annotated[List[List[float]], "입력 행 목록"],
    proba: Annotated[bool, "클래스별 확률 포함"] = False,
) -> TextContent:
    try:
        text = with_context("qudit_predict", lambda c: predict_text(c, model_path, rows, proba))
    except Exception as e:
        logger.error(f"예측 실패: {e}")
        text = f"예측 중 오류가 발생했습니다: {e}"
    return TextContent(type="text", text=text)
