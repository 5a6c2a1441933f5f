"""Numerical geometry of doubly warped product spacetimes.

Thin python layer over the C++ core: base manifolds and grids, warp and
potential presets, spacelike graph hypersurfaces with two independent mean
curvature routes, identity residual checks, rigidity probes, the flat
Lorentzian cylinder checks, and the batch runner.
"""

from _dwarp import (
    BaseGrid,
    BaseManifold,
    ConfigError,
    GraphHypersurface,
    NonCompactBase,
    Spacetime,
    SpacelikeViolation,
    StabilityViolation,
    StaticPotential,
    WarpFunction,
    asymptotic_probe,
    bump_graph,
    check_identities,
    cylinder,
    extrema_battery,
    find_totally_geodesic_slice,
    list_presets,
    parabolicity_classifier,
    probe_compact_rigidity,
    random_graph,
    run_config,
    run_config_file,
    slice_graph,
    slice_seeking_flow,
    static_cmc_battery,
)

__all__ = [
    "BaseGrid",
    "BaseManifold",
    "ConfigError",
    "GraphHypersurface",
    "NonCompactBase",
    "Spacetime",
    "SpacelikeViolation",
    "StabilityViolation",
    "StaticPotential",
    "WarpFunction",
    "asymptotic_probe",
    "bump_graph",
    "check_identities",
    "cylinder",
    "extrema_battery",
    "find_totally_geodesic_slice",
    "list_presets",
    "parabolicity_classifier",
    "probe_compact_rigidity",
    "random_graph",
    "run_config",
    "run_config_file",
    "slice_graph",
    "slice_seeking_flow",
    "static_cmc_battery",
]
