"""Slope stability of split bundles, a lattice gauge model on the flat torus,
Yang-Mills descent, and a toy Kähler reduction."""

from .slope import BundleSum, RankDegree, StableAtom, atom, bundle, is_semistable, is_stable, slope
from .filtration import destabilizer, hn_filtration, hn_type, jh_filtration, mu_max, shatz_polygon
from .lattice import ConnectionField, GridSpec, TangentField, curvature, random_connection
from .flow import FlowConfig, FlowTrace, central_residual, run_flow, ym_energy, ym_gradient

__version__ = "0.1.0"
