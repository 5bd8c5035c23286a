#!/usr/bin/env python3
"""
IDX 파싱 / 데이터셋 캐시 테스트

사용법:
    pytest skills/data-pipeline/scripts/test_idx_and_datasets.py
"""

import gzip
import struct
import sys
from pathlib import Path

import numpy as np
import pytest
import requests

# 프로젝트 루트를 경로에 추가
project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root / "src"))

from qudit_qnn.engine import data_pipeline  # noqa: E402
from qudit_qnn.engine.data_pipeline import Dataset  # noqa: E402
from qudit_qnn.exceptions import (  # noqa: E402
    BadMagic,
    ClassTooSmall,
    DatasetNotFound,
    DimensionOverflow,
    FetchError,
    IdxFormatError,
    InvalidConfig,
    TruncatedPayload,
)
from qudit_qnn.utils import data_processor, dataset_fetch  # noqa: E402
from qudit_qnn.utils.reference_tables import DATASETS  # noqa: E402

LABELS_PAYLOAD = struct.pack(">II", 0x00000801, 3) + bytes([7, 2, 1])
IMAGES_PAYLOAD = struct.pack(">IIII", 0x00000803, 1, 2, 2) + bytes([0, 1, 2, 3])


def test_parse_labels():
    fragment = data_pipeline.parse_idx(LABELS_PAYLOAD, "labels")
    assert fragment.count == 3
    np.testing.assert_array_equal(fragment.data, [7, 2, 1])


def test_parse_images():
    fragment = data_pipeline.parse_idx(IMAGES_PAYLOAD, "images")
    assert fragment.data.shape == (1, 2, 2)
    np.testing.assert_array_equal(fragment.data[0], [[0, 1], [2, 3]])


def test_gzip_is_transparent():
    fragment = data_pipeline.parse_idx(gzip.compress(LABELS_PAYLOAD), "labels")
    np.testing.assert_array_equal(fragment.data, [7, 2, 1])


def test_serialize_matches_hand_built_bytes():
    assert data_pipeline.serialize_idx(np.array([7, 2, 1]), "labels") == LABELS_PAYLOAD
    assert data_pipeline.serialize_idx(np.arange(4).reshape(1, 2, 2), "images") == IMAGES_PAYLOAD
    compressed = data_pipeline.serialize_idx(np.array([7, 2, 1]), "labels", compress=True)
    assert compressed == data_pipeline.serialize_idx(np.array([7, 2, 1]), "labels", compress=True)


def test_trailing_byte_is_rejected():
    with pytest.raises(IdxFormatError) as excinfo:
        data_pipeline.parse_idx(LABELS_PAYLOAD + b"\x00", "labels")
    assert excinfo.type is IdxFormatError


@pytest.mark.parametrize(
    "payload, kind, error",
    [
        (LABELS_PAYLOAD, "images", BadMagic),
        (LABELS_PAYLOAD[:-1], "labels", TruncatedPayload),
        (LABELS_PAYLOAD[:6], "labels", TruncatedPayload),
        (b"\x00\x00", "labels", TruncatedPayload),
        (struct.pack(">IIII", 0x00000803, 65536, 65536, 2), "images", DimensionOverflow),
    ],
)
def test_malformed_payloads(payload, kind, error):
    with pytest.raises(error):
        data_pipeline.parse_idx(payload, kind)


def test_unknown_kind():
    with pytest.raises(InvalidConfig):
        data_pipeline.parse_idx(LABELS_PAYLOAD, "pixels")


def test_remap_labels_letters():
    y, names = data_pipeline.remap_labels(np.array([1, 26, 3, 1]))
    np.testing.assert_array_equal(y, [0, 2, 1, 0])
    assert names == ("1", "3", "26")


def test_dataset_npz_round_trip(tmp_path):
    raw = data_pipeline.RawImageSet(
        images=np.array([[0, 255, 128, 64], [1, 2, 3, 4]], dtype=np.uint8),
        labels=np.array([5, 9]),
        rows=2,
        cols=2,
    )
    dataset = data_pipeline.dataset_from_images(raw, {"dataset": "toy"})
    assert dataset.X.max() == 1.0
    path = tmp_path / "toy.npz"
    data_pipeline.save_dataset(dataset, str(path))
    restored = data_pipeline.load_dataset(str(path))
    np.testing.assert_array_equal(restored.X, dataset.X)
    np.testing.assert_array_equal(restored.y, [0, 1])
    assert restored.label_names == ("5", "9")
    assert restored.metadata["dataset"] == "toy"


def test_load_dataset_csv(tmp_path):
    path = tmp_path / "rows.csv"
    path.write_text("0.5,1.0,3\n0.1,0.2,7\n", encoding="utf-8")
    dataset = data_pipeline.load_dataset(str(path))
    np.testing.assert_allclose(dataset.X, [[0.5, 1.0], [0.1, 0.2]])
    np.testing.assert_array_equal(dataset.y, [0, 1])
    assert dataset.label_names == ("3", "7")


def test_subsample_is_stratified_and_deterministic():
    X = np.arange(200, dtype=np.float64).reshape(100, 2)
    y = np.repeat([0, 1], 50)
    dataset = Dataset(X=X, y=y, label_names=("0", "1"))
    a = data_pipeline.subsample(dataset, 20, seed=3)
    b = data_pipeline.subsample(dataset, 20, seed=3)
    assert a.n == 20
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(np.bincount(a.y), [10, 10])
    assert a.metadata["subsample_size"] == 20
    assert data_pipeline.subsample(dataset, None, seed=3) is dataset


def test_subsample_too_small_for_classes():
    X = np.arange(200, dtype=np.float64).reshape(100, 2)
    dataset = Dataset(X=X, y=np.repeat(np.arange(10), 10), label_names=tuple(str(c) for c in range(10)))
    with pytest.raises(ClassTooSmall, match="클래스 10개"):
        data_pipeline.subsample(dataset, 5, seed=0)
    with pytest.raises(InvalidConfig):
        data_pipeline.subsample(dataset, 0, seed=0)

    lonely = Dataset(X=X[:11], y=np.array([0] * 10 + [1]), label_names=("0", "1"))
    with pytest.raises(ClassTooSmall):
        data_pipeline.subsample(lonely, 6, seed=0)


def write_mnist_like(cache_dir: Path, per_split: int = 4) -> None:
    info = DATASETS["mnist"]
    rng = np.random.default_rng(0)
    for images_name, labels_name in ((info.train_images, info.train_labels), (info.test_images, info.test_labels)):
        labels = np.arange(per_split * 10) % 10
        images = rng.integers(0, 256, size=(labels.shape[0], 28, 28))
        (cache_dir / f"{images_name}.gz").write_bytes(data_pipeline.serialize_idx(images, "images", compress=True))
        (cache_dir / labels_name).write_bytes(data_pipeline.serialize_idx(labels, "labels"))


def test_load_registered_dataset(tmp_path):
    write_mnist_like(tmp_path)
    pooled = data_processor.load_registered_dataset("mnist", str(tmp_path))
    assert pooled.n == 80
    assert pooled.d == 10
    assert pooled.X.shape == (80, 784)
    assert pooled.metadata["pooled"] is True

    train_only = data_processor.load_registered_dataset("mnist", str(tmp_path), pool=False)
    assert train_only.n == 40


def test_registered_dataset_errors(tmp_path):
    with pytest.raises(InvalidConfig):
        data_processor.load_registered_dataset("cifar", str(tmp_path))
    with pytest.raises(DatasetNotFound):
        data_processor.load_registered_dataset("mnist", str(tmp_path))


def test_cache_dir_from_env(tmp_path, monkeypatch):
    target = tmp_path / "cache"
    monkeypatch.setenv("QUDIT_QNN_CACHE_DIR", str(target))
    assert data_processor.get_cache_dir() == str(target)
    assert target.is_dir()


class FakeResponse:
    """requests.get(stream=True) 응답 대역"""

    def __init__(self, body: bytes, status: int = 200):
        self.body = body
        self.status = status

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def raise_for_status(self):
        if self.status >= 400:
            raise requests.exceptions.HTTPError(f"{self.status} error")

    def iter_content(self, chunk_size: int):
        for start in range(0, len(self.body), chunk_size):
            yield self.body[start:start + chunk_size]


def test_fetch_writes_file_once(tmp_path, monkeypatch):
    calls = []

    def fake_get(url, stream, timeout):
        calls.append((url, timeout))
        return FakeResponse(LABELS_PAYLOAD)

    monkeypatch.setattr(dataset_fetch.requests, "get", fake_get)
    url = "https://example.org/files/train-labels-idx1-ubyte"
    path = dataset_fetch.fetch(url, str(tmp_path), timeout=5)
    assert path == tmp_path / "train-labels-idx1-ubyte"
    assert path.read_bytes() == LABELS_PAYLOAD
    assert calls == [(url, 5)]

    # 이미 있으면 다시 받지 않음
    assert dataset_fetch.fetch(url, str(tmp_path)) == path
    assert len(calls) == 1


def test_fetch_http_error_leaves_no_file(tmp_path, monkeypatch):
    monkeypatch.setattr(dataset_fetch.requests, "get", lambda url, stream, timeout: FakeResponse(b"", 404))
    with pytest.raises(FetchError):
        dataset_fetch.fetch("https://example.org/missing.gz", str(tmp_path))
    assert list(tmp_path.iterdir()) == []
    with pytest.raises(FetchError):
        dataset_fetch.fetch("https://example.org/", str(tmp_path))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
