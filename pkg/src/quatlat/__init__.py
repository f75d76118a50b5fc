"""Exact arithmetic for definite rational quaternion algebras, their maximal
orders, E8-isometric O-lattices and the ternary lattices attached to orders."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .quat import (  # noqa: F401
    INFINITY,
    Order,
    QuaternionAlgebra,
    QuatElement,
    Sublattice,
    algebra_from_pair,
    different,
    enumerate_by_norm,
    find_pi_lambda,
    hilbert_symbol,
    is_maximal,
    left_principal,
    maximalize,
    order_from_basis,
    order_generated_by,
    principal_different_witness,
    right_principal,
    unit_group,
)
from .lattice import (  # noqa: F401
    QeModule,
    SubgroupSpec,
    ZLattice,
    dual,
    gauss_sum,
    glue,
    is_anisotropic,
    is_isometric,
    is_isotropic,
    minimum,
    residue,
    roots,
    short_vectors_gram,
    shortest_vectors,
)
from .hamiltonian import (  # noqa: F401
    E8Report,
    HamiltonianBinaryForm,
    OLattice,
    OrbitReport,
    build_glue_lattice,
    build_lambda_lattice,
    count_root_pairs,
    form_from_obasis,
    form_minimum,
    orbit_report,
    verify_gamma2,
)
from .ternary import (  # noqa: F401
    TableRow,
    TernaryLattice,
    Theorem25Report,
    class_number,
    deuring_check,
    enumerate_R,
    enumerate_S,
    gauss_factorization,
    genus_symbols,
    in_R,
    in_S,
    is_admissible,
    m_transform,
    order_from_ternary,
    table,
    theorem25_report,
    trace_zero_lattice,
)
from .catalog import load_preset, parse_order_document, preset_names  # noqa: F401
