"""gpdkit: finite groupoids, their convolution *-algebras and matrix
representations, and the two-layer algebra of selective measurements."""

from . import algebra, constructors, groupoid, representation, schwinger, speclang
from .algebra import AlgebraElement, convolve, delta, involute, structure_constants, unit_element, zero_element
from .constructors import (
    ActionSpec,
    GroupTable,
    action_groupoid,
    cyclic_group,
    disjoint_union,
    group_as_groupoid,
    pair_groupoid,
    restrict,
    symmetric_group,
)
from .groupoid import (
    Component,
    FiniteGroupoid,
    GroupoidTables,
    IsotropyGroup,
    OrbitPartition,
    ValidationReport,
    Violation,
    build,
    compose,
    decompose,
    is_connected,
    is_principal,
    isotropy_group,
    orbits,
    validate,
)
from .representation import (
    Representation,
    apply_fundamental,
    apply_regular,
    check_cstar_identity,
    check_star_rep,
    fundamental_matrices,
    fundamental_matrix,
    fundamental_rep,
    module_roundtrip_check,
    operator_norm,
    regular_rep,
)
from .schwinger import (
    CellAggregate,
    EventSpace,
    Frame,
    Measurement,
    TwoCell,
    build_event_space,
    check_exchange,
    compose_measurements,
    elementary_aggregate,
    hcomp,
    measurement,
    represent_cells,
    total_groupoid,
    two_cell,
    vcomp,
)

__version__ = "0.1.0"
