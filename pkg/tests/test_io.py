import json

import pytest

from starlab import io
from starlab.equiv import Equivalence
from starlab.cochain import MultiDiffOp
from starlab.formal import NuSeries, parse_polynomial
from starlab.kontsevich import kontsevich_star
from starlab.poisson import linear_poisson, poisson_from_json, so3


def test_star_round_trip():
    s = kontsevich_star(linear_poisson(so3()), 2)
    doc = json.loads(io.dumps(io.star_to_json(s)))
    back = io.star_from_json(doc)
    assert back.cochains == s.cochains and back.poisson == s.poisson


def test_equivalence_round_trip():
    E = Equivalence(2, [MultiDiffOp(1, 2, [(parse_polynomial("x1", 2), ((0, 2),))])], [2, "1/3"])
    back = io.equivalence_from_json(json.loads(io.dumps(io.equivalence_to_json(E))))
    assert back == E


def test_series_lie_and_poisson_documents():
    s = NuSeries([parse_polynomial("x1 x2", 2), parse_polynomial("1/2", 2)], 1, 2)
    assert io.series_from_document(json.loads(io.dumps(io.series_document(s)))) == s
    doc = io.lie_document(so3())
    assert doc["schema"] == "starlab/v1" and doc["dim"] == 3
    P = linear_poisson(so3())
    assert poisson_from_json(io.poisson_document(P)) == P


def test_schema_checks():
    with pytest.raises(io.SchemaError):
        io.star_from_json({"schema": "starlab/v0"})
    with pytest.raises(io.SchemaError):
        io.star_from_json({"schema": "starlab/v1", "kind": "equivalence"})
    with pytest.raises(io.SchemaError):
        io.check_schema([1, 2])


def test_dumps_is_canonical():
    assert io.dumps({"b": 1, "a": [1, 2]}) == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'
