"""Quasi-multipliers, algebrizations and ternary structure of concrete operator spaces."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateSpectrumError,
    InputError,
    InternalConsistencyError,
    NotContractiveError,
    NotExtremeError,
    NotQuasiMultiplierError,
    NotTROError,
    OskitError,
)
from .numcore import DEFAULT_TOL, Subspace, Tolerances, span  # noqa: E402
from .spaces import (  # noqa: E402
    OperatorSpace,
    StarAlgebra,
    from_matrices,
    generated_tro,
    linking_algebra,
    load_space,
    pattern_space,
    read_space,
)
from .multipliers import compute_multipliers, compute_ter, local_unitary_class, quasi_multipliers  # noqa: E402
from .algebras import (  # noqa: E402
    algebrize,
    check_one_sided_identity,
    check_quasi_identity,
    classify_algebrization,
    extreme_probe,
    find_identities,
    haagerup_upper_inequality,
    kadison_extreme_test,
)
from .structure import cstar_isomorphism, cstar_test, ideal_test  # noqa: E402
from .wedderburn import block_decompose, commutant  # noqa: E402
from .decompose import construct_extreme_point, ideal_decompose, smith_decompose  # noqa: E402
