"""Nonsmooth analysis of gauges, minimal time functions and infimal convolutions."""
from .convex_bodies import NormBall, Singleton, VPolytope, body_norm, support, support_many
from .errors import DimensionError, DomainEmptyError, InputError, PreconditionError
from .fields import (
    GaugeField, HalfspaceIntersection, Indicator, NormField, Perturbed, PointCloud, ShiftedArg, Sum, Table,
    Union, VPolytopeRegion, Zero, calm_constant, domain_sample, field_eval, field_eval_many,
)
from .gauge import Gauge, coercivity_constant, gauge_eval, gauge_eval_bisection, polar_contains
from .infconv import (
    ConvexProgram, DomainUnreachableWarning, ExactEnumeration, GridSearch, InfConvolution, distance_function,
    infconv_eval, is_in_S0, minimal_time, minimal_time_function, perturbed_distance, perturbed_minimal_time,
)
from .subdiff import (
    Frechet, Holder, Member, NonMember, SamplingPlan, Undetermined, alpha_factor, boundary_polygon_2d,
    frechet_test, holder_test, normal_cone_contains, rhs_frechet, rhs_holder,
)
from .verifier import run_suite

__version__ = "0.1.0"
