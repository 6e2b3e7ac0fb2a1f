import json

import numpy as np
import pytest

from unitarity_kit.errors import ParseError, ShapeMismatch
from unitarity_kit.generators import haar_unitary, random_pure_state
from unitarity_kit.mapfile import (
    KIND_BIPARTITE_MAP,
    KIND_STATE,
    KIND_SUPEROPERATOR,
    load_map_file,
    parse_map_data,
    save_map_file,
)


def test_bipartite_map_round_trip(tmp_path):
    m = haar_unitary(6, seed=1)
    path = tmp_path / "map.json"
    save_map_file(path, KIND_BIPARTITE_MAP, (2, 3), m)
    loaded = load_map_file(path)
    assert loaded.kind == KIND_BIPARTITE_MAP
    assert loaded.shape == (2, 3)
    np.testing.assert_array_equal(loaded.array, m)


def test_superoperator_round_trip(tmp_path):
    m = haar_unitary(9, seed=2)
    path = tmp_path / "super.json"
    save_map_file(path, KIND_SUPEROPERATOR, 3, m)
    loaded = load_map_file(path)
    assert loaded.kind == KIND_SUPEROPERATOR
    assert loaded.shape == 3
    np.testing.assert_array_equal(loaded.array, m)


def test_state_round_trip(tmp_path):
    v = random_pure_state(6, seed=3)
    path = tmp_path / "state.json"
    save_map_file(path, KIND_STATE, (2, 3), v)
    loaded = load_map_file(path)
    assert loaded.kind == KIND_STATE
    np.testing.assert_array_equal(loaded.array, v)


def test_rejects_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{oops")
    with pytest.raises(ParseError):
        load_map_file(path)


def test_rejects_missing_file():
    with pytest.raises(ParseError):
        load_map_file("/nonexistent/nowhere.json")


def test_rejects_unknown_kind():
    with pytest.raises(ParseError):
        parse_map_data({"kind": "channel", "shape": 2, "matrix": []})


def test_rejects_bad_shape_field():
    with pytest.raises(ParseError):
        parse_map_data({"kind": "state", "shape": [2, 2, 2], "matrix": [[1.0, 0.0]]})
    with pytest.raises(ParseError):
        parse_map_data({"kind": "state", "shape": True, "matrix": [[1.0, 0.0]]})


def test_rejects_malformed_entries():
    with pytest.raises(ParseError):
        parse_map_data({"kind": "state", "shape": 2, "matrix": [[1.0], [0.0, 0.0]]})
    with pytest.raises(ParseError):
        parse_map_data({"kind": "state", "shape": 2, "matrix": [["a", 0.0], [0.0, 0.0]]})


def test_rejects_non_finite_entries():
    with pytest.raises(ParseError):
        parse_map_data(
            {"kind": "state", "shape": 2, "matrix": [[float("nan"), 0.0], [0.0, 0.0]]}
        )


def test_rejects_state_with_wrong_length():
    with pytest.raises(ShapeMismatch):
        parse_map_data({"kind": "state", "shape": [2, 2], "matrix": [[1.0, 0.0]] * 3})


def test_rejects_scalar_shape_for_bipartite_map():
    with pytest.raises(ShapeMismatch):
        parse_map_data(
            {"kind": "bipartite_map", "shape": 4, "matrix": [[[1.0, 0.0]] * 4] * 4}
        )


def test_rejects_list_shape_for_superoperator():
    with pytest.raises(ShapeMismatch):
        parse_map_data(
            {"kind": "superoperator", "shape": [2, 2], "matrix": [[[1.0, 0.0]] * 4] * 4}
        )


def test_rejects_wrong_matrix_size():
    with pytest.raises(ShapeMismatch):
        parse_map_data(
            {"kind": "bipartite_map", "shape": [2, 2], "matrix": [[[1.0, 0.0]] * 3] * 3}
        )


def test_files_are_plain_decimal_json(tmp_path):
    path = tmp_path / "plain.json"
    save_map_file(path, KIND_STATE, 2, np.array([1.0, 0.0], dtype=complex))
    data = json.loads(path.read_text())
    assert data["matrix"] == [[1.0, 0.0], [0.0, 0.0]]
