import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oskit.errors import InputError
from oskit.generators import rotated_pattern_space
from oskit.multipliers import (
    compute_multipliers,
    compute_ter,
    local_unitary_class,
    qm_violation,
    quasi_multipliers,
)
from oskit.numcore import adjoint, unit_matrix
from oskit.spaces import from_matrices, pattern_space

E = unit_matrix
STAIRCASE = "CCC/00C/00C"


def mask(sub):
    return sub.pattern().astype(int).tolist()


def test_staircase_multipliers():
    ms = compute_multipliers(pattern_space(STAIRCASE))
    assert ms.qm.dim == 8
    assert mask(ms.qm) == [[1, 1, 1], [1, 1, 1], [0, 1, 1]]
    assert ms.lm.dim == 7 and ms.rm.dim == 7
    assert ms.semantics == "embedding-relative QM"


def test_dual_pattern_qm():
    qm = quasi_multipliers(pattern_space("CCC/CCC/0CC"))
    assert qm.dim == 5
    assert mask(qm) == [[1, 1, 1], [0, 0, 1], [0, 0, 1]]


def test_qm_of_full_matrices():
    assert quasi_multipliers(pattern_space("CCC/CCC/CCC")).dim == 9


def test_qm_of_column_space_is_everything():
    assert quasi_multipliers(pattern_space("C/C")).dim == 2


def test_ter_of_staircase():
    ter = compute_ter(pattern_space(STAIRCASE))
    assert ter.is_tro and ter.space.dim == 4
    assert mask(ter.space) == [[1, 1, 0], [0, 0, 1], [0, 0, 1]]


def test_block_matrix_qm_is_full():
    # QM of [M2 M2; M2 M2] inside M_4 is all of M_4
    assert quasi_multipliers(pattern_space("CCCC/CCCC/CCCC/CCCC")).dim == 16


def test_local_unitary_classes():
    col = pattern_space("C/C")
    c = local_unitary_class(col, np.array([[1, 0]]))
    assert c.is_right and not c.is_left
    m2 = pattern_space("CC/CC")
    assert local_unitary_class(m2, np.eye(2)).is_both
    with pytest.raises(InputError):
        local_unitary_class(m2, np.eye(3))


def test_local_class_is_relative_to_supports():
    # degenerate space: E11 in M_2; z = E11 is unitary on the supports
    x = from_matrices([E(2, 2, 0, 0)])
    assert local_unitary_class(x, E(2, 2, 0, 0)).is_both


def test_qm_violation_reports_pair():
    x = pattern_space(STAIRCASE)
    worst, pair = qm_violation(x, E(3, 3, 2, 0))
    assert worst > 0.5 and pair is not None
    assert qm_violation(x, np.eye(3))[0] < 1e-12


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), h=st.integers(1, 3), k=st.integers(1, 3))
def test_qm_elements_multiply_into_x(seed, h, k):
    rng = np.random.default_rng(seed)
    x, u, v, m = rotated_pattern_space(rng, h, k)
    qm = quasi_multipliers(x)
    for z in qm.basis:
        assert qm_violation(x, z)[0] < 1e-8
    # rotating the space rotates its quasi-multipliers
    unrot = quasi_multipliers(from_matrices([adjoint(u) @ b @ v for b in x.basis], h, k))
    assert unrot.dim == qm.dim
    for z in qm.basis:
        assert unrot.contains(adjoint(v) @ z @ u)
