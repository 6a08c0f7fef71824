import numpy as np
import pytest

from oskit.errors import DegenerateSpectrumError, InputError
from oskit.numcore import adjoint, random_unitary, unit_matrix
from oskit.spaces import from_matrices, linking_algebra, pattern_space
from oskit.wedderburn import block_decompose, block_residual, center, commutant, star_algebra

E = unit_matrix


def full(n):
    return [E(n, n, i, j) for i in range(n) for j in range(n)]


def amplified(m, n, rng):
    """``U (I_m (x) M_n) U^*``: one block of size n with multiplicity m."""
    u = random_unitary(m * n, rng)
    return [u @ np.kron(np.eye(m), b) @ adjoint(u) for b in full(n)]


def test_full_matrix_algebra_is_one_block():
    bs = block_decompose(star_algebra(full(3)))
    assert bs.blocks == [(1, 3)]
    assert bs.residual < 1e-10


def test_diagonal_algebra_splits_into_scalars():
    a = star_algebra([E(3, 3, i, i) for i in range(3)])
    assert block_decompose(a).blocks == [(1, 1)] * 3
    assert center(a).dim == 3


def test_multiplicity_is_detected():
    a = star_algebra(amplified(2, 2, np.random.default_rng(1)))
    bs = block_decompose(a, seed=3)
    assert bs.blocks == [(2, 2)]
    assert commutant(a).dim == 4
    assert center(a).dim == 1


def test_direct_sum_with_null_space():
    rng = np.random.default_rng(5)
    u = random_unitary(6, rng)
    mats = []
    for b in full(2):
        c = np.zeros((6, 6), dtype=complex)
        c[:2, :2] = b
        mats.append(u @ c @ adjoint(u))
    mats.append(u @ E(6, 6, 2, 2) @ adjoint(u))
    bs = block_decompose(star_algebra(mats))
    assert bs.blocks == [(1, 2), (1, 1)]
    assert bs.null_range == (3, 6)


def test_dimension_accounting_and_assemble_is_inverse():
    rng = np.random.default_rng(9)
    mats = amplified(1, 2, rng)
    u = random_unitary(5, rng)
    big = [u @ np.pad(b, ((0, 3), (0, 3))) @ adjoint(u) for b in mats]
    big.append(u @ np.diag([0, 0, 1, 1, 1]) @ adjoint(u))
    a = star_algebra(big)
    bs = block_decompose(a)
    assert sum(s * s for _, s in bs.blocks) == a.dim
    assert sum(m * s for m, s in bs.blocks) + bs.null_range[1] - bs.null_range[0] == 5
    for b in a.basis:
        assert np.allclose(bs.assemble(bs.parts(b)), b)


def test_decomposing_a_block_again_is_trivial():
    rng = np.random.default_rng(2)
    a = star_algebra(amplified(1, 3, rng) + [])
    bs = block_decompose(a)
    inner = star_algebra([bs.parts(b)[0] for b in a.basis])
    assert block_decompose(inner).blocks == [(1, 3)]


def test_block_structure_is_seed_independent():
    rng = np.random.default_rng(11)
    mats = amplified(2, 1, rng)
    link = linking_algebra(pattern_space("CC0/00C/00C"))
    shapes = {tuple(block_decompose(link, seed=s).blocks) for s in range(10)}
    assert len(shapes) == 1
    shapes = {tuple(block_decompose(star_algebra(mats), seed=s).blocks) for s in range(10)}
    assert shapes == {((2, 1),)}


def test_linking_algebra_of_rectangle_pair():
    link = linking_algebra(pattern_space("CC0/00C/00C"))
    bs = block_decompose(link)
    assert sorted(bs.blocks) == [(1, 3), (1, 3)]
    assert block_residual(bs, link.basis) < 1e-10


def test_non_algebra_is_rejected():
    with pytest.raises(InputError, match="not a \\*-algebra"):
        block_decompose(star_algebra([E(2, 2, 0, 1)]))


def test_no_tries_raises_with_seed_trail():
    with pytest.raises(DegenerateSpectrumError) as info:
        block_decompose(star_algebra(full(2)), max_tries=0)
    assert info.value.seeds == []


def test_zero_algebra():
    a = star_algebra(np.zeros((0, 2, 2)), n=2)
    bs = block_decompose(a)
    assert bs.blocks == [] and bs.null_range == (0, 2)


def test_degenerate_operator_space_linking_algebra():
    x = from_matrices([E(2, 2, 0, 1)])
    bs = block_decompose(linking_algebra(x))
    assert bs.blocks == [(1, 2)]
