"""Multitwist maps on ring families around a self-similar Cantor set.

Library surface: build the cell tree (`fractal`), place round rings and
assemble the multitwist map and its unwinding path (`multitwist`), factor
the map into small-distortion pieces (`multitwist.decompose`), and verify
every claim numerically (`verify`).  `mtx.cli` drives the same pipeline
from the command line.
"""

from .errors import (
    BudgetExceededError,
    CapacityError,
    ClearanceError,
    DegenerateMapError,
    DomainError,
    EndpointMismatchError,
    EstimationError,
    GlueMismatchError,
    PlacementError,
    SchemaError,
)
from .fractal import (
    BASE_RECT,
    CantorApprox,
    CellTree,
    IfsSpec,
    assouad_dim_formula,
    build_cells,
    homogeneity_estimate,
    ud_tree_certificate,
)
from .geom import (
    Annulus,
    ConvexPolygon,
    Disk,
    Rectangle,
    RealLinearMap,
    Similarity,
    affine_distortion,
    convex_hull,
    gather_convex,
    set_diameter,
    set_distance,
)
from .kernel import backend_name
from .multitwist import (
    DecomposeConfig,
    FactorList,
    MultitwistMap,
    RingFamily,
    decompose,
    decompose_dim1,
    gather_path,
    gather_unwind_path,
    multitwist_map,
    place_rings,
    unwind_path,
)
from .paths import (
    Map2,
    Path,
    PLCurve,
    annulus_rotation_path,
    concat,
    compose_isometric,
    dehn_twist,
    dehn_twist_path,
    example_nonpath,
    glue,
    restrict,
    reverse,
    strip_path,
    translate_path,
    triangle_path,
)
from .thicken import SquareSet, boundary_curves, components, squares_meeting, thicken
from .verify import (
    DistortionReport,
    ProbeTable,
    collapse_delta,
    collar_modulus,
    composition_residual,
    distortion_estimate,
    path_probe,
    round_ring_modulus,
)

__version__ = "0.1.0"
