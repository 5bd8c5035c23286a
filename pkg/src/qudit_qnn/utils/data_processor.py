"""
데이터셋 캐시 관리 유틸리티
"""

import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from qudit_qnn.engine.data_pipeline import (
    Dataset,
    RawImageSet,
    dataset_from_images,
    raw_image_set,
    read_idx_file,
    subsample,
)
from qudit_qnn.exceptions import DatasetNotFound, DimensionMismatch, InvalidConfig
from qudit_qnn.utils.reference_tables import DatasetInfo, get_dataset_info

logger = logging.getLogger(__name__)


def get_cache_dir() -> str:
    """
    데이터셋 캐시 디렉토리
    Priority:
    1. QUDIT_QNN_CACHE_DIR 환경변수
    2. 프로젝트 data 디렉토리 (./data)
    3. OS 사용자 캐시 디렉토리
    4. /tmp
    """
    # 1. 환경변수 우선
    cache_dir = os.environ.get("QUDIT_QNN_CACHE_DIR")
    if cache_dir:
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        return cache_dir

    # 2. 프로젝트 내 data 디렉토리
    try:
        project_root = Path(__file__).resolve().parent.parent.parent.parent  # utils -> qudit_qnn -> src -> root
        data_dir = project_root / "data"
        data_dir.mkdir(parents=True, exist_ok=True)
        return str(data_dir)
    except OSError:
        pass

    # 3. OS별 사용자 캐시 디렉토리
    if sys.platform == "win32":
        local_appdata = os.environ.get("LOCALAPPDATA") or os.path.expanduser("~\\AppData\\Local")
        cache_dir = os.path.join(local_appdata, "qudit-qnn-cache")
    else:
        cache_dir = os.path.expanduser("~/.cache/qudit-qnn")
    try:
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        return cache_dir
    except OSError:
        pass

    # 4. /tmp (최후의 수단)
    tmp_cache = os.path.join(tempfile.gettempdir(), "qudit-qnn-cache")
    Path(tmp_cache).mkdir(parents=True, exist_ok=True)
    return tmp_cache


def locate_file(cache_dir: str, stem: str) -> Path:
    """stem 또는 stem.gz 를 찾습니다 (하위 디렉토리 포함)."""
    root = Path(cache_dir)
    for candidate in (root / stem, root / f"{stem}.gz"):
        if candidate.is_file():
            return candidate
    for pattern in (stem, f"{stem}.gz"):
        found = sorted(root.rglob(pattern))
        if found:
            return found[0]
    raise DatasetNotFound(f"{cache_dir}에서 {stem}(.gz) 파일을 찾을 수 없습니다")


def locate_dataset(info: DatasetInfo, cache_dir: str) -> Dict[str, Path]:
    return {
        "train_images": locate_file(cache_dir, info.train_images),
        "train_labels": locate_file(cache_dir, info.train_labels),
        "test_images": locate_file(cache_dir, info.test_images),
        "test_labels": locate_file(cache_dir, info.test_labels),
    }


def load_registered_dataset(
    name: str,
    cache_dir: Optional[str] = None,
    pool: bool = True,
    max_samples: Optional[int] = None,
    seed: int = 0,
) -> Dataset:
    """
    캐시 디렉토리의 IDX 파일로 Dataset을 만듭니다.

    Args:
        name: DATASETS 키 (mnist, emnist-digits, …)
        pool: 공식 학습/평가 분할을 합칠지 여부 (False면 학습 분할만)
        max_samples: 층화 부분 표본 크기
    """
    info = get_dataset_info(name)
    if info is None:
        raise InvalidConfig(f"알 수 없는 데이터셋: {name!r}")
    cache_dir = cache_dir or get_cache_dir()
    paths = locate_dataset(info, cache_dir)
    logger.info(f"📂 {info.name} 읽는 중: {cache_dir}")

    train = raw_image_set(read_idx_file(str(paths["train_images"]), "images"), read_idx_file(str(paths["train_labels"]), "labels"))
    images, labels = train.images, train.labels
    if pool:
        test = raw_image_set(read_idx_file(str(paths["test_images"]), "images"), read_idx_file(str(paths["test_labels"]), "labels"))
        images = np.concatenate([images, test.images])
        labels = np.concatenate([labels, test.labels])

    raw = RawImageSet(images=images, labels=labels, rows=train.rows, cols=train.cols)
    dataset = dataset_from_images(raw, {"dataset": info.name, "pooled": pool, "label_offset": info.label_offset})
    if dataset.d != info.classes:
        raise DimensionMismatch(f"{info.name}: 클래스 {dataset.d}개 (기대 {info.classes}개)")
    dataset = subsample(dataset, max_samples, seed)
    logger.info(f"✅ {info.name}: n={dataset.n}, d={dataset.d}, 픽셀 {raw.rows}×{raw.cols}")
    return dataset
