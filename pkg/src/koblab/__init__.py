"""koblab: invariant-distance numerics on model domains in C^n.

Exact Kobayashi/Poincare distances, automorphisms and hyperbolic balls;
certified Lempert-function estimation on smooth convex domains; holomorphic
iteration with Wolff-point location; horosphere geometry; Bergman-kernel,
Berezin-transform and Carleson-measure experiments; a CLI front end.
"""

from .domains import (ConvexSmooth, EllipsoidConstraint, EuclideanBall,
                      HalfspaceConstraint, HalfPlane, Polydisk, UnitBall,
                      UnitDisk, ball_as_convex, domain_from_json)
from .errors import (DomainError, InternalCheckError, KoblabError, ParseError,
                     StabilityError, UnsupportedDomainError)
from .geometry import (AutomorphismClass, BoundaryEstimateConstants,
                       DiskAutomorphism, TangentVector, ball_automorphism,
                       ball_log_bounds, boundary_distance,
                       disk_automorphism_apply, disk_automorphism_classify,
                       fit_boundary_constants, geodesic_point,
                       kobayashi_ball_disk_params, kobayashi_distance,
                       poincare_distance, poincare_metric_norm)

__version__ = "0.1.0"
