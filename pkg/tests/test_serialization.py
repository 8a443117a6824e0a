import json

import numpy as np
import pytest

from mrbctl import serialization as io


def test_dumps_formatting():
    text = io.dumps({"b": 0.1, "a": [1, 2.0, True, None], "c": np.float64(1e-20), "d": float("nan")})
    assert text.index('"b"') < text.index('"a"')
    assert "0.10000000000000001" in text and "2.0" in text and "9.9999999999999995e-21" in text
    js = json.loads(text)
    assert js["a"] == [1, 2.0, True, None] and js["d"] is None


def test_body_from_json_variants():
    b = io.body_from_json({"C": [[2, 0, 0], [0, 1, 0], [0, 0, 3]]})
    np.testing.assert_array_equal(b.eigenvalues, [1, 2, 3])
    with pytest.raises(io.InputError, match="flat list"):
        io.body_from_json({"eigenvalues": [[1, 2, 3]]})
    with pytest.raises(io.InputError, match="numeric"):
        io.body_from_json({"C": "abc"})


def test_skew_list_rejects_single_matrix():
    with pytest.raises(io.InputError, match="single matrix"):
        io.skew_list_from_json([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    with pytest.raises(io.InputError, match=r"directions\[1\]"):
        io.skew_list_from_json({"directions": [{"n": 3, "coords": [1, 0, 0]}, {"n": 3}]})


def test_schedule_loading(tmp_path):
    p = tmp_path / "s.json"
    p.write_text("[1, 2, 3]")
    assert io.load_schedule(p).shape == (1, 3)
    p.write_text('{"values": [[1, null]]}')
    with pytest.raises(io.InputError):
        io.load_schedule(p)
