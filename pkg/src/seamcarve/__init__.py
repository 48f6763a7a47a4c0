"""Content-aware image resizing with interchangeable seam-search backends."""

from .carver import (
    CarveConfig,
    CarveReport,
    carve_to_height,
    carve_to_width,
    enlarge_to_height,
    enlarge_to_width,
    insert_seam,
    remove_object,
    remove_seam,
    resize,
)
from .energy import (
    ForwardCosts,
    apply_mask,
    energy_e1,
    energy_e2,
    energy_entropy,
    energy_hog,
    forward_costs,
)
from .raster import load_image, save_image, to_grayscale, transpose
from .solvers import (
    CostTable,
    SolverKind,
    brute_force_seam,
    dp_seam,
    dp_seam_forward,
    find_seam,
    greedy_seam,
    parallel_dp_seam,
    seam_cost,
)

__version__ = "0.1.0"
