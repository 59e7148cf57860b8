import json
from fractions import Fraction

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from gwords.cli import bundled_matrix_path
from gwords.constructions import hijo_example
from gwords.linalg_core import RationalMatrix
from gwords.matfile import matrix_from_dict, matrix_to_dict, read_matrix, write_matrix

fractions = st.fractions(max_denominator=10**12)


@given(st.lists(fractions, min_size=9, max_size=9))
def test_rational_roundtrip_is_exact(vals):
    M = RationalMatrix(tuple(tuple(vals[3 * i:3 * i + 3]) for i in range(3)))
    assert matrix_from_dict(json.loads(json.dumps(matrix_to_dict(M)))) == M


def test_rational_file_roundtrip(tmp_path):
    M = RationalMatrix(((Fraction(1, 3), Fraction(-7, 10**15)), (Fraction(-7, 10**15), 2)))
    write_matrix(tmp_path / "r.json", M)
    assert read_matrix(tmp_path / "r.json") == M


def test_float_roundtrip(tmp_path, rng):
    M = rng.standard_normal((4, 4))
    write_matrix(tmp_path / "f.json", M)
    np.testing.assert_array_equal(read_matrix(tmp_path / "f.json"), M)


def test_nested_rows_accepted():
    M = matrix_from_dict({"n": 2, "mode": "rational", "entries": [["1/2", "1"], ["1", "3"]]})
    assert M[0, 0] == Fraction(1, 2)


def test_rationals_serialized_as_strings():
    d = matrix_to_dict(RationalMatrix(((Fraction(1, 3), 0), (0, 1))))
    assert d["entries"] == ["1/3", "0", "0", "1"]


def test_bundled_pair_is_published_pair():
    A, B = hijo_example()
    assert read_matrix(bundled_matrix_path("eq2_A.json")) == A
    assert read_matrix(bundled_matrix_path("eq2_B.json")) == B
