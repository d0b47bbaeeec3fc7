import json

import numpy as np
import pytest

from rocsbb.core import RocSurfaceEstimate, default_grid
from rocsbb.io import (
    TMT_SHA256,
    DataParseError,
    format_float,
    load_csv,
    load_tmt,
    read_surface_csv,
    sha256_file,
    tmt_path,
    write_json,
    write_surface_csv,
)


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_two_per_group(self, tmp_path):
        p = write(tmp_path, "group,value\n1,0.5\n2,1.5\n3,2.5\n1,0.1\n2,1.1\n3,2.1\n")
        s = load_csv(p)
        assert s.sizes == (2, 2, 2)
        np.testing.assert_array_equal(s.y1, [0.5, 0.1])

    def test_missing_group_names_label(self, tmp_path):
        p = write(tmp_path, "g,v\nlow,1\nmid,2\n")
        with pytest.raises(DataParseError, match="'high'"):
            load_csv(p, "g", "v", ["low", "mid", "high"])

    def test_unparseable_value_line(self, tmp_path):
        p = write(tmp_path, "group,value\n1,1\n2,abc\n3,3\n")
        with pytest.raises(DataParseError) as info:
            load_csv(p)
        assert info.value.line == 3

    def test_unknown_label(self, tmp_path):
        p = write(tmp_path, "group,value\n1,1\n4,2\n")
        with pytest.raises(DataParseError, match="line 3"):
            load_csv(p)

    def test_missing_column(self, tmp_path):
        p = write(tmp_path, "grp,value\n1,1\n")
        with pytest.raises(DataParseError, match="group"):
            load_csv(p)

    def test_mapping_labels(self, tmp_path):
        p = write(tmp_path, "group,value\nD,9\nU,1\nMCI,5\n")
        s = load_csv(p, label_map={"U": 1, "MCI": 2, "D": 3})
        assert (s.y1[0], s.y2[0], s.y3[0]) == (1, 5, 9)


class TestTmt:
    def test_sizes(self):
        assert load_tmt().sizes == (170, 52, 23)

    def test_checksum(self):
        assert sha256_file(tmt_path()) == TMT_SHA256


class TestWriters:
    def test_surface_round_trip(self, tmp_path, rng):
        grid = default_grid(13)
        v = np.sort(np.sort(rng.random((13, 13)), axis=0)[::-1], axis=1)[:, ::-1]
        surf = RocSurfaceEstimate(grid, v)
        path = tmp_path / "s.csv"
        write_surface_csv(path, surf)
        back = read_surface_csv(path)
        np.testing.assert_array_equal(back.values, surf.values)
        assert back.grid == grid
        lines = path.read_bytes().split(b"\n")
        assert lines[0] == b"p1,p3,rocs" and b"\r" not in path.read_bytes()
        assert lines[2].startswith(format_float(grid.p1_points[0]).encode())

    def test_format_float_lossless(self, rng):
        for x in rng.random(100) * 10.0 ** rng.integers(-20, 20, 100):
            assert float(format_float(x)) == x

    def test_json_nan_becomes_null(self, tmp_path):
        path = tmp_path / "x.json"
        write_json(path, {"a": float("nan"), "b": np.float64(0.5), "c": (1, 2)})
        assert json.loads(path.read_text()) == {"a": None, "b": 0.5, "c": [1, 2]}
