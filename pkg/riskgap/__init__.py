"""
riskgap

Property tests, learners and risk bounds for deciding when a learned
representation lowers the risk of a downstream classifier.
"""

from riskgap.bound_calc import BoundReport, alpha_max, cluster_bounds, manifold_bounds
from riskgap.cluster_pipeline import cluster_feature_map, cluster_property_test
from riskgap.grid import GridSpec
from riskgap.manifold_pipeline import manifold_feature_map, manifold_property_test

__version__ = "0.1.0"
__all__ = [
    "BoundReport",
    "GridSpec",
    "alpha_max",
    "cluster_bounds",
    "cluster_feature_map",
    "cluster_property_test",
    "manifold_bounds",
    "manifold_feature_map",
    "manifold_property_test",
]
