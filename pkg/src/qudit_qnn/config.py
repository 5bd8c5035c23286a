"""
qudit-qnn 설정

환경변수(.env 포함)에서 엔진/서버 설정을 읽고, 실험 실행 설정(RunConfig)을
JSON 파일과 무손실로 주고받습니다.
"""

import os
import json
import logging
import sys
from dataclasses import dataclass, field, asdict, fields
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, cast
from dotenv import load_dotenv

from qudit_qnn.exceptions import InvalidConfig

load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


@dataclass
class EngineConfig:
    """엔진 공통 설정 (로그, 캐시, 병렬도)"""

    log_level: str = "INFO"
    log_format: str = DEFAULT_LOG_FORMAT
    log_file: str = ""  # 비어 있으면 파일 핸들러 없음

    # 데이터셋 캐시 디렉토리 (비어 있으면 utils.data_processor 규칙으로 결정)
    cache_dir: str = ""

    jobs: int = 1
    request_timeout: int = 60

    @classmethod
    def from_env(cls) -> "EngineConfig":
        return cls(
            log_level=os.getenv("QUDIT_LOG_LEVEL", "INFO"),
            log_format=os.getenv("LOG_FORMAT", DEFAULT_LOG_FORMAT),
            log_file=os.getenv("LOG_FILE", ""),
            cache_dir=os.getenv("QUDIT_QNN_CACHE_DIR", ""),
            jobs=int(os.getenv("QUDIT_JOBS", "1")),
            request_timeout=int(os.getenv("REQUEST_TIMEOUT", "60")),
        )


@dataclass
class MCPConfig:
    """MCP 서버 설정"""

    host: str = "0.0.0.0"
    port: int = 8001
    log_level: str = "INFO"
    server_name: str = "qudit-qnn-mcp"
    transport: Literal["stdio", "http"] = "stdio"
    model_paths: List[str] = field(default_factory=list)

    @classmethod
    def from_env(cls) -> "MCPConfig":
        models = os.getenv("QUDIT_MODELS", "")
        return cls(
            host=os.getenv("HOST", "0.0.0.0"),
            port=int(os.getenv("PORT", "8001")),
            log_level=os.getenv("LOG_LEVEL", "INFO"),
            server_name=os.getenv("MCP_SERVER_NAME", "qudit-qnn-mcp"),
            transport=cast(Literal["stdio", "http"], os.getenv("TRANSPORT", "stdio")),
            model_paths=[p.strip() for p in models.split(",") if p.strip()],
        )


def setup_logging(config: EngineConfig) -> None:
    """루트 로거를 stderr(+선택적 파일)로 설정합니다."""
    level = getattr(logging, config.log_level.upper(), logging.INFO)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if config.log_file:
        handlers.append(logging.FileHandler(config.log_file, encoding="utf-8"))
    logging.basicConfig(level=level, format=config.log_format, handlers=handlers, force=True)
    # numba 컴파일 로그는 DEBUG에서도 과도함
    logging.getLogger("numba").setLevel(logging.WARNING)


# ===========================================
# 실험 실행 설정
# ===========================================

VARIANTS = ("multivariable", "univariate_powers")
ASSIGNMENT_MODES = ("optimized", "fixed")
LOSSES = ("hinge", "squared_hinge")
ORDERING_EVALS = ("train", "holdout")


@dataclass
class RunConfig:
    """
    prepare/train/cv 명령이 공유하는 실행 설정

    모든 필드는 같은 이름의 CLI 플래그로 덮어쓸 수 있습니다.
    components=0 이면 PCA 없이 원본 특성 열을 그대로 확장합니다.
    """

    dataset: str = "mnist"
    data_paths: Tuple[str, ...] = ()
    components: Tuple[int, ...] = (10,)
    neurons: Tuple[int, ...] = (2,)
    variant: str = "multivariable"
    C: float = 1.0
    scale: float = 100.0
    folds: int = 10
    seed: int = 0
    assignment: str = "optimized"
    max_samples: Optional[int] = None
    output_dir: str = "runs"

    # 소거 실험(ablation) 스위치
    loss: str = "hinge"
    tolerance: float = 1e-4
    max_epochs: int = 1000
    balanced_class_weight: bool = False
    standardize_features: bool = False
    ordering_eval: str = "train"
    holdout_fraction: float = 0.2
    pool_splits: bool = True
    jobs: int = 1

    def validate(self) -> "RunConfig":
        """범위를 벗어난 필드가 있으면 InvalidConfig를 발생시킵니다."""
        problems: List[str] = []
        if not self.components:
            problems.append("components가 비어 있습니다")
        for k in self.components:
            if not 0 <= k <= 784:
                problems.append(f"components={k} (허용: 0~784)")
        if not self.neurons:
            problems.append("neurons가 비어 있습니다")
        for L in self.neurons:
            if not 1 <= L <= 10:
                problems.append(f"neurons={L} (허용: 1~10)")
        if self.variant not in VARIANTS:
            problems.append(f"variant={self.variant!r} (허용: {VARIANTS})")
        if self.assignment not in ASSIGNMENT_MODES:
            problems.append(f"assignment={self.assignment!r} (허용: {ASSIGNMENT_MODES})")
        if self.loss not in LOSSES:
            problems.append(f"loss={self.loss!r} (허용: {LOSSES})")
        if self.ordering_eval not in ORDERING_EVALS:
            problems.append(f"ordering_eval={self.ordering_eval!r} (허용: {ORDERING_EVALS})")
        if not self.C > 0:
            problems.append(f"C={self.C} (C > 0 필요)")
        if not self.scale > 0:
            problems.append(f"scale={self.scale} (scale > 0 필요)")
        if self.folds < 2:
            problems.append(f"folds={self.folds} (2 이상 필요)")
        if not self.tolerance > 0:
            problems.append(f"tolerance={self.tolerance} (0보다 커야 함)")
        if self.max_epochs < 1:
            problems.append(f"max_epochs={self.max_epochs} (1 이상 필요)")
        if self.jobs < 1:
            problems.append(f"jobs={self.jobs} (1 이상 필요)")
        if not 0 < self.holdout_fraction < 1:
            problems.append(f"holdout_fraction={self.holdout_fraction} (0과 1 사이)")
        if self.max_samples is not None and self.max_samples < 1:
            problems.append(f"max_samples={self.max_samples} (1 이상 필요)")
        if problems:
            raise InvalidConfig("잘못된 실행 설정: " + "; ".join(problems))
        return self

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        # JSON에는 튜플이 없으므로 리스트로 기록
        for key in ("data_paths", "components", "neurons"):
            data[key] = list(data[key])
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidConfig(f"알 수 없는 설정 필드: {unknown}")
        values = dict(data)
        for key in ("data_paths", "components", "neurons"):
            if key in values:
                raw = values[key]
                if isinstance(raw, (str, int)):
                    raw = [raw]
                values[key] = tuple(raw)
        return cls(**values)

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """None이 아닌 값만 덮어쓴 새 설정을 반환합니다."""
        data = self.to_dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.from_dict(data)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidConfig(f"설정 파일 JSON 파싱 실패 ({path}): {e}") from e
        if not isinstance(data, dict):
            raise InvalidConfig(f"설정 파일 최상위는 객체여야 합니다: {path}")
        return cls.from_dict(data)

    def save(self, path: str) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, ensure_ascii=False, indent=2)
            f.write("\n")


# 설정 인스턴스 생성
engine_config = EngineConfig.from_env()
mcp_config = MCPConfig.from_env()
