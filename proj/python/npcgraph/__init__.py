"""Exact feasibility decisions for nonpositively curved chain graph-manifolds."""

from ._npc import (
    Instance,
    NpcError,
    check_witness,
    cross_check,
    decide,
    max_curvature,
    parse_instance,
    render_svg,
    run_cli,
    sectional_curvatures,
    shear_family,
    witness,
)

__all__ = [
    "Instance",
    "NpcError",
    "check_witness",
    "cross_check",
    "decide",
    "max_curvature",
    "parse_instance",
    "render_svg",
    "run_cli",
    "sectional_curvatures",
    "shear_family",
    "witness",
]
