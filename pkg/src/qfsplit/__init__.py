"""qfsplit: quasi-F-split heights of hypersurfaces and complete intersections
over prime fields, via Fedder-type coefficient and chain criteria."""

from .rings import (
    EXPONENT_LIMIT,
    ExponentOverflowError,
    Grading,
    HomogeneityError,
    ParseError,
    Polynomial,
    PolynomialRing,
    PrimeField,
    RingError,
    capped_multiply,
    check_homogeneous,
    coefficient_of,
    multiply,
    parse_polynomial,
    power,
    serialize_polynomial,
)
from .witt import W2Element, delta1, delta1_multinomial, teichmuller, w2_add, w2_mul, w2_neg
from .frobenius import (
    FreeModuleVector,
    FrobCoordinates,
    bracket_power,
    frobenius_compose,
    frobenius_decompose,
    in_max_ideal_frobenius_power,
    iterated_u,
    psi2_eval,
    theta,
    u_map,
)
from .groebner import (
    Budget,
    BudgetExceededError,
    Ideal,
    ModuleOrder,
    buchberger,
    colon_ideal,
    frobenius_module_intersect_keru,
    ideal_equal,
    ideal_membership,
    intersect_ideals,
    module_buchberger,
    normal_form,
)
from .criteria import (
    Certificate,
    ChainStep,
    HeightResult,
    enclosure_closure,
    fedder_fsplit,
    height,
    height_graded_cy,
    height_local,
    non_qfs_quick,
    product_witness,
    qfs_decide,
    result_to_json,
    verify_certificate,
    verify_infinity_certificate,
    verify_witness_chain,
)
from .strata import (
    FamilyContext,
    StrataPolynomials,
    degree_monomials,
    delta1_tilde,
    is_smooth_at_rational_points,
    search_height,
    strata_polynomials,
)

__version__ = "0.1.0"
