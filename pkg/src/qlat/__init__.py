"""qlat: exact arithmetic for lattice-class trees, local orders in 2x2
matrix algebras, their branches and spinor images, and — over Q and
quadratic fields — spinor class fields and selectivity of suborder genera.

Everything is computed over exact rationals; no floating point anywhere.
"""

from .branches import (
    Empty,
    Fan,
    Full,
    Shape,
    ThickApartment,
    ThickPath,
    ThickRay,
    branch_of_order,
    classify_single,
    deepen,
    diameter,
    eichler_envelope,
    embeds_in_level,
    enumerate_branch,
    intersect_shapes,
    mu_margin,
    shape_margin,
    shape_member,
)
from .bt_tree import (
    End,
    Vertex,
    ball,
    canonical_vertex,
    distance,
    end_from_vector,
    export_dot,
    geodesic,
    neighbors,
    standard_vertex,
)
from .errors import (
    AlgebraNotSplit,
    BudgetExceeded,
    EmbeddingInfeasible,
    EmptyShape,
    InfiniteUnsupported,
    NotFinite,
    NotShiftedEichler,
    QlatError,
    ResourceLimit,
    SchemaError,
    SingularMatrix,
    Unbounded,
    UnsupportedField,
)
from .exact_padic import Mat2, legendre, unit_part, valuation
from .global_classfield import (
    BaseField,
    Genus,
    PrimeIdeal,
    QuatAlgebra,
    RepField,
    SigmaField,
    is_local_square,
    is_unramified_or_split,
    narrow_ray_class_group,
    parse_place_key,
    rep_field_comm_quadratic,
    rep_field_rank3,
    rep_field_rank4,
    selectivity_ratio,
    spinor_class_field,
)
from .local_orders import (
    LocalOrder,
    ShiftedEichler,
    decompose_shifted_eichler,
    has_unramified_residue_field,
    order_closure,
    shift_order,
    three_maximal_orders,
)
from .quadforms import ClassGroup, QForm, class_group, fundamental_unit, prime_form
from .spinor_local import SpinorImage, odd_pair_oracle, spinor_image

__version__ = "0.1.0"

__all__ = [
    "AlgebraNotSplit",
    "BaseField",
    "BudgetExceeded",
    "ClassGroup",
    "EmbeddingInfeasible",
    "Empty",
    "EmptyShape",
    "End",
    "Fan",
    "Full",
    "Genus",
    "InfiniteUnsupported",
    "LocalOrder",
    "Mat2",
    "NotFinite",
    "NotShiftedEichler",
    "PrimeIdeal",
    "QForm",
    "QlatError",
    "QuatAlgebra",
    "RepField",
    "ResourceLimit",
    "SchemaError",
    "Shape",
    "ShiftedEichler",
    "SigmaField",
    "SingularMatrix",
    "SpinorImage",
    "ThickApartment",
    "ThickPath",
    "ThickRay",
    "Unbounded",
    "UnsupportedField",
    "Vertex",
    "ball",
    "branch_of_order",
    "canonical_vertex",
    "class_group",
    "classify_single",
    "decompose_shifted_eichler",
    "deepen",
    "diameter",
    "distance",
    "eichler_envelope",
    "embeds_in_level",
    "end_from_vector",
    "enumerate_branch",
    "export_dot",
    "fundamental_unit",
    "geodesic",
    "has_unramified_residue_field",
    "intersect_shapes",
    "is_local_square",
    "is_unramified_or_split",
    "legendre",
    "mu_margin",
    "narrow_ray_class_group",
    "neighbors",
    "odd_pair_oracle",
    "order_closure",
    "parse_place_key",
    "prime_form",
    "rep_field_comm_quadratic",
    "rep_field_rank3",
    "rep_field_rank4",
    "selectivity_ratio",
    "shape_margin",
    "shape_member",
    "shift_order",
    "spinor_class_field",
    "spinor_image",
    "standard_vertex",
    "three_maximal_orders",
    "unit_part",
    "valuation",
]
