import json

import pytest

from ultrarigid.fixtures import pulled_tight, two_vertex_fixed
from ultrarigid.framework_io import (
    FrameworkFileError,
    dump_framework,
    framework_to_dict,
    load_framework,
    parse_framework,
)

DOCUMENT = {
    "dim": 2,
    "vertices": [{"id": "a", "p": ["0", "1/2"]}, {"id": "b", "p": [1, "-3/4"]}],
    "lattice": [["1", "0"], ["1/5", "1"]],
    "edges": [{"tail": "a", "head": "b", "gamma": [0, 0]}, {"tail": "b", "head": "b", "gamma": [1, -1]}],
    "model": "fixed-lattice",
}


@pytest.mark.parametrize("factory", [pulled_tight, two_vertex_fixed])
def test_round_trip(factory, tmp_path):
    fw = factory()
    path = tmp_path / "fw.json"
    path.write_text(dump_framework(fw))
    again = load_framework(path)
    assert again == fw
    assert dump_framework(again) == dump_framework(fw)


def test_parse_document():
    fw = parse_framework(DOCUMENT)
    assert fw.model == "fixed-lattice"
    assert fw.graph.labels == ("a", "b")
    assert fw.graph.edges[1].color == (1, -1)
    assert framework_to_dict(fw) == {**DOCUMENT, "vertices": [{"id": "a", "p": ["0", "1/2"]},
                                                              {"id": "b", "p": ["1", "-3/4"]}]}


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d["vertices"][0].update(p=[0.5, "0"]),
        lambda d: d["vertices"][0].update(p=["1.5", "0"]),
        lambda d: d["vertices"][0].update(p=["1/0", "0"]),
        lambda d: d["lattice"].pop(),
        lambda d: d["edges"][0].update(head="z"),
        lambda d: d["edges"][0].update(gamma=[0.0, 1]),
        lambda d: d["edges"][0].update(gamma=[0]),
        lambda d: d.update(model="rigid"),
        lambda d: d.pop("dim"),
        lambda d: d["vertices"].append({"id": "a", "p": [0, 0]}),
    ],
)
def test_malformed_documents(mutate):
    doc = json.loads(json.dumps(DOCUMENT))
    mutate(doc)
    with pytest.raises(FrameworkFileError):
        parse_framework(doc)


def test_bad_json_and_missing_file(tmp_path):
    with pytest.raises(FrameworkFileError):
        parse_framework("{not json")
    with pytest.raises(FrameworkFileError):
        load_framework(tmp_path / "missing.json")
