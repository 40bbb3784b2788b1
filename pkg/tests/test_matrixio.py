import json

import numpy as np
import pytest

from kframes import MatrixFormatError
from kframes.matrixio import (
    load_matrix,
    matrix_from_obj,
    matrix_to_obj,
    save_matrix,
    vector_from_obj,
)


class TestJsonFormat:
    def test_round_trip(self):
        mat = np.array([[1.5, -2.0, 0.0], [0.25, 1e-8, 7.0]])
        again = matrix_from_obj(matrix_to_obj(mat))
        np.testing.assert_array_equal(again, mat)

    def test_missing_keys(self):
        with pytest.raises(MatrixFormatError):
            matrix_from_obj({"rows": 1, "data": [[1.0]]})

    def test_row_count_mismatch(self):
        with pytest.raises(MatrixFormatError):
            matrix_from_obj({"rows": 2, "cols": 1, "data": [[1.0]]})

    def test_ragged_rows(self):
        with pytest.raises(MatrixFormatError):
            matrix_from_obj({"rows": 2, "cols": 2, "data": [[1.0, 2.0], [3.0]]})

    def test_non_numeric_entry(self):
        with pytest.raises(MatrixFormatError):
            matrix_from_obj({"rows": 1, "cols": 2, "data": [[1.0, "x"]]})

    def test_non_finite_rejected(self):
        with pytest.raises(MatrixFormatError):
            matrix_from_obj({"rows": 1, "cols": 1, "data": [[float("inf")]]})

    def test_bad_dimensions(self):
        with pytest.raises(MatrixFormatError):
            matrix_from_obj({"rows": 0, "cols": 2, "data": []})


class TestFileRoundTrips:
    def test_json_file(self, tmp_path):
        mat = np.array([[2.0, 0.5], [-1.0, 3.0]])
        path = tmp_path / "m.json"
        save_matrix(mat, path)
        np.testing.assert_array_equal(load_matrix(path), mat)

    def test_csv_file(self, tmp_path):
        mat = np.array([[1.0, 2.0, 3.0], [0.1, 0.2, 0.3]])
        path = tmp_path / "m.csv"
        save_matrix(mat, path)
        np.testing.assert_array_equal(load_matrix(path), mat)

    def test_csv_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.0,2.0\n\n3.0,4.0\n")
        np.testing.assert_array_equal(
            load_matrix(path), [[1.0, 2.0], [3.0, 4.0]]
        )

    def test_csv_empty_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("\n")
        with pytest.raises(MatrixFormatError):
            load_matrix(path)

    def test_keyed_load(self, tmp_path):
        path = tmp_path / "sys.json"
        obj = {"F": matrix_to_obj(np.eye(2)), "K": matrix_to_obj(np.zeros((2, 2)))}
        path.write_text(json.dumps(obj))
        np.testing.assert_array_equal(load_matrix(path, key="F"), np.eye(2))
        with pytest.raises(MatrixFormatError):
            load_matrix(path, key="G")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(MatrixFormatError):
            load_matrix(path)


class TestVectorFromObj:
    def test_flat_array(self):
        np.testing.assert_array_equal(
            vector_from_obj([1.0, 2.0, 3.0]), [1.0, 2.0, 3.0]
        )

    def test_column_matrix(self):
        obj = {"rows": 3, "cols": 1, "data": [[1.0], [2.0], [3.0]]}
        np.testing.assert_array_equal(vector_from_obj(obj), [1.0, 2.0, 3.0])

    def test_row_matrix(self):
        obj = {"rows": 1, "cols": 2, "data": [[4.0, 5.0]]}
        np.testing.assert_array_equal(vector_from_obj(obj), [4.0, 5.0])

    def test_rejects_full_matrix(self):
        obj = {"rows": 2, "cols": 2, "data": [[1.0, 0.0], [0.0, 1.0]]}
        with pytest.raises(MatrixFormatError):
            vector_from_obj(obj)

    def test_rejects_nested_array(self):
        with pytest.raises(MatrixFormatError):
            vector_from_obj([[1.0], [2.0]])
