"""Random planar polygons as points of the Grassmannian G_2(R^n).

A 2-plane spanned by an orthonormal frame ``(u, v)`` in R^n gives a closed
polygon of perimeter 2 with edges ``(u_i^2 - v_i^2, 2 u_i v_i)``. The
uniform measure on the Grassmannian induces the symmetric measure on
polygon space; for triangles it reduces to the uniform measure on S^2.
"""

from .exceptions import *  # noqa: F401,F403
from .grassmann import (
    Frame,
    PluckerMatrix,
    ProjectionMatrix,
    SignSignature,
    plucker_coordinates,
    plucker_from_frame,
    projection_from_frame,
    projection_from_plucker,
    recover_frame,
    sign_signature,
)
from .hyperoctahedral import (
    SignedPermutation,
    act_on_frame,
    base_cell_signature,
    count_cells_n4,
    count_chambers,
    cyclic_shift,
    negation,
    orbit_of_signature,
    positive_chamber_signature,
    reversal,
    stabilizer_of_signature,
)
from .montecarlo import EXPERIMENTS, EstimateReport, cell_occupancy_report, estimate
from .polygons import (
    PolygonClass,
    PolygonShape,
    classify_polygon,
    convex_fraction_exact,
    polygon_from_frame,
    positivity,
)
from .quadcells import build_quad_cell_table, congruent, flag_mean, log_interpolate_cellpath
from .sampling import SampleStream, sample_frame, sample_frames, sample_sphere, sample_spheres
from .triangles import (
    TriangleClass,
    TriangleShape,
    canonical_triangle,
    obtuse_probability_exact,
    rotation_orbit_trace,
    triangle_from_sphere,
    triangle_quantities,
)
from .estimators import (
    FlagMean,
    PluckerTransformer,
    PolygonTransformer,
    ProjectionTransformer,
    QuadrilateralClassifier,
    SignCellEncoder,
)

__version__ = "0.1.0"
