"""Wulff-type variational shapes for partition and plane-partition
asymptotics, with exact counting."""

from .special_fns import CONSTANTS, lobachevsky, ronkin_f, sigma2
from .entropy import (
    ETA_SKYSCRAPER,
    ETA_YOUNG,
    TensionFunction,
    eta_skyscraper,
    eta_young,
    homogeneous_extension,
    mollify,
)
from .wulff import (
    ConvexShape,
    CubeProblem,
    build_inner_shape,
    build_wulff_shape,
    dual_tension,
    duality_residual,
    enclosed_volume,
    functional_value,
    projection_area,
    scaled_maximizer,
    solve_dilatation,
    wulff_minimizer,
)
from .shapes import (
    SimplexPoint,
    cerf_kenyon_point,
    facet_densities,
    hausdorff_distance,
    support_identity_residual,
    vershik_point,
)
from .counting import (
    asymptotic_report,
    brute_force_partitions,
    brute_force_plane_partitions,
    partition_table,
    plane_partition_table,
)

__all__ = [
    "CONSTANTS", "lobachevsky", "ronkin_f", "sigma2",
    "ETA_SKYSCRAPER", "ETA_YOUNG", "TensionFunction", "eta_skyscraper", "eta_young",
    "homogeneous_extension", "mollify",
    "ConvexShape", "CubeProblem", "build_inner_shape", "build_wulff_shape", "dual_tension",
    "duality_residual", "enclosed_volume", "functional_value", "projection_area",
    "scaled_maximizer", "solve_dilatation", "wulff_minimizer",
    "SimplexPoint", "cerf_kenyon_point", "facet_densities", "hausdorff_distance",
    "support_identity_residual", "vershik_point",
    "asymptotic_report", "brute_force_partitions", "brute_force_plane_partitions",
    "partition_table", "plane_partition_table",
]
