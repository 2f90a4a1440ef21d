import struct

import numpy as np
import pytest

from gmextract.writer import write_feature_file


def test_header_layout(tmp_path):
    path = tmp_path / "f.gmfeat"
    write_feature_file(np.arange(6, dtype=np.float32).reshape(2, 3), path)
    raw = path.read_bytes()
    magic, dtype_code, count, dim = struct.unpack_from("<8sIQQ", raw)
    assert magic == b"GMFEAT01"
    assert dtype_code == 1
    assert (count, dim) == (2, 3)
    assert len(raw) == 28 + 2 * 3 * 4
    assert np.frombuffer(raw, dtype="<f4", offset=28).tolist() == [0, 1, 2, 3, 4, 5]


def test_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        write_feature_file(np.empty((0, 4), dtype=np.float32), tmp_path / "e")


def test_rejects_non_finite(tmp_path):
    rows = np.array([[1.0, np.nan]], dtype=np.float32)
    with pytest.raises(ValueError):
        write_feature_file(rows, tmp_path / "n")
