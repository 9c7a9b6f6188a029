"""Stochastic trace estimation with mutually unbiased bases."""

from .analysis import (analytic_variance, enumerate_variance, projector_check,
                       worst_case_variance)
from .estimators import (EstimatorKind, ProbeVector, TraceEstimate, draw_probe,
                         estimate_trace, random_bits_required, single_shot)
from .graphs import (Graph, adjacency_oracle, estimate_triangles, exact_triangle_count,
                     parse_snap_edge_list)
from .mub import (MubFamily, generate_mub_family, is_prime, mub_vector,
                  next_prime_at_least, verify_mub_family)
from .oracle import (DenseOracle, QuadraticFormOracle, SparseOracle, as_oracle,
                     dense_quad_form, padded_oracle, power_oracle, sparse_quad_form)
from .rng import RandomStream

__version__ = "0.1.0"
