"""
데이터셋 다운로드 도우미

사용자가 넘긴 URL만 내려받습니다. 임시 파일에 스트리밍한 뒤 원자적으로 이름을 바꿉니다.
"""

import logging
import os
import tempfile
from pathlib import Path
from typing import Optional
from urllib.parse import urlparse

import requests

from qudit_qnn.config import engine_config
from qudit_qnn.exceptions import FetchError

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1 << 16


def fetch(url: str, dest_dir: str, filename: Optional[str] = None, timeout: Optional[int] = None, overwrite: bool = False) -> Path:
    """
    URL을 dest_dir에 내려받습니다. 이미 있으면 다시 받지 않습니다.

    Returns:
        저장된 파일 경로
    """
    name = filename or Path(urlparse(url).path).name
    if not name:
        raise FetchError(f"URL에서 파일명을 알 수 없습니다: {url}")
    target = Path(dest_dir) / name
    if target.exists() and not overwrite:
        logger.info(f"캐시 사용: {target}")
        return target
    target.parent.mkdir(parents=True, exist_ok=True)

    timeout = timeout or engine_config.request_timeout
    fd, tmp_name = tempfile.mkstemp(prefix=f".{name}.", dir=str(target.parent))
    try:
        with os.fdopen(fd, "wb") as f, requests.get(url, stream=True, timeout=timeout) as response:
            response.raise_for_status()
            for chunk in response.iter_content(chunk_size=CHUNK_SIZE):
                if chunk:
                    f.write(chunk)
        os.replace(tmp_name, target)
    except requests.exceptions.RequestException as e:
        Path(tmp_name).unlink(missing_ok=True)
        raise FetchError(f"다운로드 실패 ({url}): {e}") from e
    except OSError as e:
        Path(tmp_name).unlink(missing_ok=True)
        raise FetchError(f"파일 저장 실패 ({target}): {e}") from e

    logger.info(f"✅ 다운로드 완료: {target} ({target.stat().st_size} 바이트)")
    return target
