import json

import numpy as np
import pytest

from oskit.errors import InputError
from oskit.numcore import crandn, random_unitary, span, unit_matrix
from oskit.spaces import (
    amplify,
    dump_document,
    from_matrices,
    generated_tro,
    is_tro,
    linking_algebra,
    load_matrix,
    load_space,
    nondegenerate_reduce,
    parse_pattern,
    pattern_space,
    read_space,
    write_space,
)

E = unit_matrix


def test_parse_pattern():
    assert parse_pattern("CCC/00C/00C").tolist() == [[1, 1, 1], [0, 0, 1], [0, 0, 1]]
    with pytest.raises(InputError):
        parse_pattern("CC/C")


def test_staircase_basics():
    x = pattern_space("CCC/00C/00C")
    assert x.dim == 5
    assert x.is_nondegenerate()
    assert not is_tro(x.space)
    assert generated_tro(x).dim == 9


def test_degenerate_space_reduces():
    x = from_matrices([E(3, 3, 0, 1)])
    assert not x.is_nondegenerate()
    red = nondegenerate_reduce(x)
    assert (red.space.h, red.space.k, red.space.dim) == (1, 1, 1)
    assert x.space.contains(red.lift(red.space.basis[0]))


def test_linking_algebra():
    link = linking_algebra(from_matrices([E(2, 2, 0, 1)]))
    assert link.dim == 4 and link.is_closed()
    col = pattern_space("C/C")
    assert linking_algebra(col).dim == 9


def test_amplify_dimension():
    x = pattern_space("CCC/00C/00C")
    ax = amplify(x, 2)
    assert (ax.h, ax.k, ax.dim) == (6, 6, 20)
    with pytest.raises(InputError):
        amplify(x, 0)


def test_rotated_tro_is_tro():
    rng = np.random.default_rng(3)
    u, v = random_unitary(3, rng), random_unitary(2, rng)
    x = from_matrices([u @ E(3, 2, 0, 0) @ v.conj().T, u @ E(3, 2, 0, 1) @ v.conj().T])
    assert is_tro(x.space)


def test_document_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    mats = list(crandn((2, 2, 3), rng))
    path = tmp_path / "x.osj"
    x = from_matrices(mats, name="rand")
    write_space(path, x, mats)
    y = read_space(path)
    assert y.name == "rand" and (y.h, y.k) == (2, 3)
    assert y.space.equals(x.space)
    doc = json.loads(path.read_text())
    back = np.array([[complex(*e) for e in row] for row in doc["basis"][0]])
    assert np.array_equal(back, mats[0])  # 17 significant digits survive exactly


def test_document_name_defaults_to_stem(tmp_path):
    path = tmp_path / "corner.osj"
    path.write_text(dump_document("", 1, 1, [np.ones((1, 1))]))
    assert read_space(path).name == "corner"


@pytest.mark.parametrize("doc, where", [
    ('{"ambient": {"h": 1, "k": 1}, "basis": [[[[1, "a"]]]]}', "entry (0,0)"),
    ('{"ambient": {"h": 1, "k": 2}, "basis": [[[[1, 0]]]]}', "row 0"),
    ('{"ambient": {"h": 2, "k": 1}, "basis": [[[[1, 0]]]]}', "basis[0]"),
    ('{"ambient": {"h": 1, "k": 1}, "basis": [[[[1]]]]}', "[re, im]"),
    ('{"ambient": {"h": -1, "k": 1}, "basis": []}', "'h'"),
    ('{"basis": []}', "ambient"),
    ('not json', "invalid JSON"),
])
def test_malformed_documents_report_location(doc, where):
    with pytest.raises(InputError, match=None) as info:
        load_space(doc)
    assert where in str(info.value)


def test_nonfinite_entry_rejected():
    doc = {"ambient": {"h": 1, "k": 1}, "basis": [[[[float("inf"), 0]]]]}
    with pytest.raises(InputError, match="non-finite"):
        load_space(doc)


def test_load_matrix_forms():
    m = load_matrix({"ambient": {"h": 1, "k": 2}, "matrix": [[[1, 0], [0, 2]]]})
    assert np.allclose(m, [[1, 2j]])
    with pytest.raises(InputError):
        load_matrix({"ambient": {"h": 1, "k": 1}, "basis": []})


def test_span_of_document_is_orthonormal():
    x = load_space({"ambient": {"h": 2, "k": 2},
                    "basis": [[[[1, 0], [1, 0]], [[0, 0], [0, 0]]], [[[2, 0], [2, 0]], [[0, 0], [0, 0]]]]})
    assert x.dim == 1
    assert span(x.basis).gram_error() < 1e-14
