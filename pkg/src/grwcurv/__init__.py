"""Higher-order mean curvatures of spacelike graphs in warped products, and the
operators and maximum-principle machinery built on them."""
from __future__ import annotations

from .errors import (ConfigurationError, GeometryError, NumericError, PreconditionError,
                     RangeError)
from .geometry import (OPPOSITE, SAME, GraphHypersurface, WarpedProduct, build_frames,
                       curvature_report, lr_height_verify, make_warp, steady_state)
from .maxprin import (ModelManifold, TestFunction, phi_transform_check,
                      comparison_functions, sequence_limits, maximizing_sequence,
                      square_distance_check)
from .square import PhiField, box_exponential_audit, phi_from_curvature, square
from .symfunc import (Spectrum, elem_sym, mean_curvature, newton_maclaurin_check,
                      newton_transform, trace_identities)

__version__ = "0.1.0"
