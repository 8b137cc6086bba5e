"""Group-valued flows on finite multigraphs and periodic infinite graphs."""

from .coloring import (
    EdgeColoring,
    coloring_to_flow,
    expand_to_cubic,
    expand_to_regular,
    find_semi_coloring,
    flow_to_coloring,
    is_semi_coloring,
    semi3_iff_z4,
)
from .contraction import CutFamily, contract, exhaustion_quotient, push_flow, verify_cut_sandwich
from .eulerian import find_spanning_eulerian, hamilton_shadow_flow, supereulerian_flow
from .flows import (
    EdgeAssignment,
    count_flows,
    find_flow,
    find_k_flow,
    k_flow_iff_zk,
    order_equivalence,
    verify_flow,
)
from .graph import Multigraph, enumerate_cuts, oriented_cut
from .groups import FiniteAbelianGroup, alphabet_all, alphabet_nonzero, group_make, parse_group
from .infinite import No, YesUpTo, check_infinite, load_fixture, replay_certificate
from .presentation import PeriodicPresentation
from .tension import check_infinite_tension, find_tension, is_potential_difference, tension_from_potential, verify_tension

__all__ = [name for name, obj in dict(globals()).items() if not name.startswith("_") and not isinstance(obj, type(__import__("sys")))]
