import io
import json

import numpy as np
import pandas as pd
import pytest

from nclp.embedding import SubspaceBasis
from nclp.exceptions import InvalidParameter, NotNormalized, ReportIOError
from nclp.serializers import (
    density_to_dict,
    dumps_json,
    dumps_records,
    load_basis,
    load_density,
    load_matrix,
    matrix_from_dict,
    read_json,
    read_records,
    repro_path,
    save_basis,
    save_density,
    save_matrix,
    write_records,
    write_repro,
)
from tests.helpers import random_matrix

RECORD = {
    "check_name": "diff-inequality",
    "trial": 3,
    "inputs_digest": "0123456789abcdef",
    "lhs": 1.0,
    "rhs": 2.0,
    "slack": 1.0,
    "tolerance": 1e-9,
    "verdict": "pass",
    "seed": 7,
    "p_q_params": [3.0],
    "notes": ["xi=1", "boundary exponent p=2"],
}


class TestMatrixFiles:
    def test_save_and_load(self, tmp_path):
        x = random_matrix(0, 3)
        save_matrix(tmp_path / "x.json", x)
        np.testing.assert_array_equal(load_matrix(tmp_path / "x.json"), x)

    def test_layout(self, tmp_path):
        save_matrix(tmp_path / "x.json", np.array([[1.0, 2j], [0.0, -1.0]]))
        data = json.loads((tmp_path / "x.json").read_text())
        assert data == {"dim": 2, "entries": [[1.0, 0.0], [0.0, 2.0], [0.0, 0.0], [-1.0, 0.0]]}

    def test_seventeen_digits(self, tmp_path):
        save_matrix(tmp_path / "x.json", np.array([[0.1]]))
        assert "0.10000000000000001" in (tmp_path / "x.json").read_text()
        assert load_matrix(tmp_path / "x.json")[0, 0] == 0.1

    def test_flat_and_nested_layouts(self):
        flat = {"dim": 2, "entries": [[1, 0], [0, 2], [3, 0], [0, -1]]}
        nested = {"dim": 2, "entries": [[[1, 0], [0, 2]], [[3, 0], [0, -1]]]}
        expected = np.array([[1, 2j], [3, -1j]])
        np.testing.assert_array_equal(matrix_from_dict(flat), expected)
        np.testing.assert_array_equal(matrix_from_dict(nested), expected)

    def test_dumps_keeps_other_fields(self, two_level):
        data = json.loads(dumps_json({"inputs": {"d": density_to_dict(two_level)}, "note": "x"}))
        assert data["note"] == "x"
        assert data["inputs"]["d"]["blocks"] == {"values": [0.25, 0.75], "ranks": [1, 1]}
        assert len(data["inputs"]["d"]["entries"]) == 4

    def test_shape_mismatch(self):
        with pytest.raises(InvalidParameter):
            matrix_from_dict({"dim": 3, "entries": [[[1.0, 0.0]]]})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ReportIOError):
            load_matrix(tmp_path / "missing.json")

    def test_bad_json(self, tmp_path):
        (tmp_path / "bad.json").write_text("{not json")
        with pytest.raises(InvalidParameter):
            read_json(tmp_path / "bad.json")


class TestDensityFiles:
    def test_save_and_load(self, tmp_path, density):
        save_density(tmp_path / "d.json", density)
        loaded = load_density(tmp_path / "d.json")
        np.testing.assert_allclose(loaded.matrix, density.matrix, atol=1e-14)
        np.testing.assert_allclose(loaded.blocks.values, density.blocks.values, rtol=1e-12)

    def test_unnormalized_rejected(self, tmp_path, two_level):
        data = density_to_dict(two_level)
        data["entries"][0][0] = 0.5
        (tmp_path / "d.json").write_text(json.dumps(data))
        with pytest.raises(NotNormalized):
            load_density(tmp_path / "d.json")


def test_basis_manifest(tmp_path):
    basis = SubspaceBasis((random_matrix(1, 3), random_matrix(2, 3)))
    save_basis(tmp_path / "basis.json", basis)
    assert json.loads((tmp_path / "basis.json").read_text()) == {"vectors": ["basis-0.json", "basis-1.json"]}
    loaded = load_basis(tmp_path / "basis.json")
    assert len(loaded) == 2
    np.testing.assert_array_equal(loaded.vectors[1], basis.vectors[1])


def test_manifest_without_vectors(tmp_path):
    (tmp_path / "basis.json").write_text("{}")
    with pytest.raises(InvalidParameter):
        load_basis(tmp_path / "basis.json")


class TestReports:
    def test_repro_path(self, tmp_path):
        assert repro_path(tmp_path / "run.ndjson", "araki-kosaki", 12) == \
            tmp_path / "run.ndjson.repro" / "araki-kosaki-12.json"

    def test_write_repro(self, tmp_path):
        path = write_repro(tmp_path / "run.ndjson", {**RECORD, "verdict": "fail"}, {"a": np.eye(2)})
        data = json.loads(path.read_text())
        assert data["record"]["verdict"] == "fail"
        assert data["inputs"]["a"]["dim"] == 2

    def test_ndjson_round_trip(self, tmp_path):
        write_records(tmp_path / "run.ndjson", [RECORD, {**RECORD, "trial": 4}])
        assert [r["trial"] for r in read_records(tmp_path / "run.ndjson")] == [3, 4]

    def test_csv(self):
        table = pd.read_csv(io.StringIO(dumps_records([RECORD], "csv")))
        assert list(table["check_name"]) == ["diff-inequality"]
        assert table.loc[0, "notes"] == "xi=1;boundary exponent p=2"

    def test_unknown_format(self):
        with pytest.raises(InvalidParameter):
            dumps_records([RECORD], "xml")
