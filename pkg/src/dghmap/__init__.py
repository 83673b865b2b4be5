"""Generalized 3x+1 maps, the path structure solver, and path statistics."""

from .core import (
    COLLATZ,
    FIVE_X_PLUS_ONE,
    THREE_X_MINUS_ONE,
    MapParams,
    check_domain,
    parse_h_spec,
    path,
    residue_set_E,
    step,
    stopping_time,
    trajectory,
    validate_params,
)
from .structure import (
    PathSpec,
    PrefixRepresentation,
    ResidueTriple,
    StructureSolution,
    bezout_pair,
    enumerate_members,
    extend,
    image_of,
    prefix_representations,
    solve_base,
    solve_structure,
    verify_solution,
)

__version__ = "0.1.0"
