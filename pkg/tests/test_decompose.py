import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oskit.algebras import kadison_extreme_test
from oskit.decompose import construct_extreme_point, ideal_decompose, smith_decompose
from oskit.errors import InputError, NotExtremeError
from oskit.generators import planted_tro
from oskit.numcore import adjoint, op_norm, unit_matrix
from oskit.spaces import from_matrices, pattern_space
from oskit.structure import cstar_test, ideal_test

E = unit_matrix


def test_smith_of_full_matrices():
    sm = smith_decompose(pattern_space("CC/CC"))
    assert sm.rectangles == [(2, 2)] and sm.multiplicities == [1]
    assert sm.block_isometry_check


def test_smith_of_rectangle_pair():
    sm = smith_decompose(pattern_space("CC0/00C/00C"))
    assert sorted(sm.rectangles) == [(1, 2), (2, 1)]
    assert sm.residual < 1e-10


def test_smith_detects_multiplicity():
    # {diag(a, a)} is M_1 twice
    x = from_matrices([np.eye(2)])
    sm = smith_decompose(x)
    assert sm.rectangles == [(1, 1)] and sm.multiplicities == [2]


def test_smith_requires_tro():
    with pytest.raises(InputError, match="not TRO-closed"):
        smith_decompose(pattern_space("CCC/00C/00C"))


def test_smith_round_trip_on_planted():
    rng = np.random.default_rng(4)
    x, rects = planted_tro(rng, [(1, 2), (2, 2)])
    sm = smith_decompose(x, seed=1)
    assert sorted(sm.rectangles) == sorted(rects)
    m = x.space.random_element(rng)
    assert op_norm(sm.from_blocks(sm.to_blocks(m)) - m) < 1e-10


def test_extreme_point_examples():
    assert np.allclose(construct_extreme_point(pattern_space("CC/CC")), np.eye(2))
    assert np.allclose(construct_extreme_point(pattern_space("CC/CC/CC")), np.eye(3, 2))
    with pytest.raises(InputError):
        construct_extreme_point(from_matrices([], 2, 2))


def test_decompose_square_is_all_two_sided():
    rep = ideal_decompose(pattern_space("CC/CC"))
    assert rep.passed and rep.part_dims == (4, 0, 0)


def test_decompose_tall_rectangle_is_all_left():
    rep = ideal_decompose(pattern_space("CC/CC/CC"))
    assert rep.passed and rep.part_dims == (0, 6, 0)


def test_decompose_wide_rectangle_is_all_right():
    rep = ideal_decompose(pattern_space("CCC/CCC"))
    assert rep.passed and rep.part_dims == (0, 0, 6)


def test_decompose_mixed_sum():
    rep = ideal_decompose(pattern_space("CC0/00C/00C"))
    assert rep.passed and rep.part_dims == (0, 2, 2)
    for v in rep.verifications:
        assert v.passed, v.name


def test_decompose_rejects_non_extreme():
    with pytest.raises(NotExtremeError, match="not an extreme point"):
        ideal_decompose(pattern_space("CC/CC"), E(2, 2, 0, 0))


def test_alternative_iota_also_verifies():
    x = pattern_space("CC0/00C/00C")
    rep = ideal_decompose(x, alt_iota=True)
    assert rep.passed and rep.alt_iota


def test_parts_are_ideals_and_cstar():
    rng = np.random.default_rng(6)
    x, _ = planted_tro(rng, [(2, 2), (3, 1), (1, 2)])
    rep = ideal_decompose(x, seed=2)
    assert rep.passed
    assert rep.part_dims == (4, 3, 2)
    xl = from_matrices(list(rep.parts["L"].basis), x.h, x.k)
    xt = from_matrices(list(rep.parts["T"].basis), x.h, x.k)
    xr = from_matrices(list(rep.parts["R"].basis), x.h, x.k)
    assert ideal_test(xl, adjoint(rep.e @ rep.q), "left").is_ideal
    assert ideal_test(xr, adjoint(rep.e @ rep.q2), "right").is_ideal
    assert cstar_test(xt, adjoint(rep.e @ rep.q1)).is_cstar
    assert kadison_extreme_test(x.space, rep.e).extreme


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_part_dimensions_do_not_depend_on_seed(seed):
    rng = np.random.default_rng(seed)
    x, rects = planted_tro(rng, max_total=7)
    rep = ideal_decompose(x, seed=seed, samples=20, amp_samples=3)
    assert rep.passed
    t = sum(l * k for l, k in rects if l == k)
    left = sum(l * k for l, k in rects if l > k)
    right = sum(l * k for l, k in rects if l < k)
    assert rep.part_dims == (t, left, right)


def test_block_sum_with_given_extreme_point():
    x = pattern_space("CC000/CC000/00C00/00C00/000CC")
    e = E(5, 5, 0, 0) + E(5, 5, 1, 1) + E(5, 5, 2, 2) + E(5, 5, 4, 3)
    assert kadison_extreme_test(x.space, e).extreme
    rep = ideal_decompose(x, e)
    assert rep.passed and rep.part_dims == (4, 2, 2)
    assert rep.parts["T"].space.equals(pattern_space("CC000/CC000/00000/00000/00000").space)
    assert rep.parts["L"].space.equals(pattern_space("00000/00000/00C00/00C00/00000").space)
    assert rep.parts["R"].space.equals(pattern_space("00000/00000/00000/00000/000CC").space)


def test_row_plus_column_extreme_point():
    x = pattern_space("CC0/00C/00C")
    e = E(3, 3, 0, 0) + E(3, 3, 1, 2)
    assert kadison_extreme_test(x.space, e).extreme
