import pytest

import dot_export
from errors import ModelError
from kripke import KripkeModel


def test_m0_edges(m0):
    edges = dot_export.edge_list(m0)
    loops = [e for e in edges if e[0] == e[1]]
    both = [e for e in edges if e[3]]
    assert len(loops) == 8
    assert all(e[2] == ("a", "b", "c") for e in loops)
    assert len(both) == 12
    assert len(edges) == 20


def test_m0_dot_text(m0):
    text = "".join(dot_export.to_dot(m0, point="ABC"))
    assert text.count("dir=both") == 12
    assert text.count('[label="a,b,c"]') == 8
    assert '"ABC" [label="ABC\\n{ma,mb,mc}" peripheries=2];' in text
    assert '"0" [label="0\\n{}"];' in text
    assert text.rstrip().endswith("}")


def test_one_way_arrows_keep_direction(mcp):
    edges = dot_export.edge_list(mcp.model)
    assert ("Areal", "AB", ("b",), False) in edges
    assert ("Areal", "AC", ("c",), False) in edges


def test_single_world_without_relations():
    model = KripkeModel("one", ("a",), ("p",), ("w",), valuation={"p": {"w"}})
    assert dot_export.edge_list(model) == []
    lines = list(dot_export.to_dot(model))
    assert sum("->" in line for line in lines) == 0


def test_output_is_deterministic(m0):
    assert list(dot_export.to_dot(m0)) == list(dot_export.to_dot(m0))


def test_write_dot(m0, tmp_path):
    path = dot_export.write_dot(m0, str(tmp_path / "m0.dot"), point="A")
    with open(path, encoding="utf-8") as f:
        assert f.read() == "".join(dot_export.to_dot(m0, "A"))


def test_write_dot_rejects_unknown_point(m0, tmp_path):
    with pytest.raises(ModelError):
        dot_export.write_dot(m0, str(tmp_path / "m0.dot"), point="ZZ")
