"""Dominance move (DoM) between multi- and many-objective solution sets."""

from dommove.biobjective import dom_biobjective, inward_neighbor
from dommove.errors import (
    CsvFormatError,
    DegenerateInstanceError,
    DimensionMismatchError,
    DomError,
    EmptySetError,
    InstanceTooLargeError,
    LPParseError,
    NegativeCoordinateError,
)
from dommove.geometry import (
    PointSet,
    ReducedInstance,
    dominates,
    group_cost,
    pareto_filter,
    reduce_instance,
    weakly_dominates,
)
from dommove.indicators import hypervolume, igd
from dommove.mip import MipModel, build_model, export_lp, parse_lp
from dommove.solver import (
    DomCertificate,
    SolveOptions,
    SolveStats,
    dominance_move,
    evaluate_assignment,
    solve_bb,
    solve_bruteforce,
    verify_certificate,
)

__version__ = "0.1.0"
