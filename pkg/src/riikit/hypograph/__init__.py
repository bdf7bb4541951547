"""Hypograph trees and thick/thin partitions of piecewise-linear boundary data."""

from .field import (Arc, Component, Domain1D, ESegment, FieldError, MixedFieldError, Order, PiecewiseScalarField,
                    PointNotInHypograph, RadiusProfile, compare_segments, e_segment, segment_leq)
from .forest import CycleError, is_stable, stable_forest_reduce
from .levels import ExpThreshold, LevelInterval, StepThreshold
from .thick import (BoundsReport, PartitionParams, SegmentTooShort, dense_disk_assignment, discretize_thick_levels,
                    thick_components, thick_thin_partition, thicken, thickened_hypograph, verify_cardinality_bounds)
from .tree import HypographPartition, ThinNeck, TreeClass, tree_partition

__all__ = [
    "Arc", "Component", "Domain1D", "ESegment", "FieldError", "MixedFieldError", "Order", "PiecewiseScalarField",
    "PointNotInHypograph", "RadiusProfile", "compare_segments", "e_segment", "segment_leq", "CycleError",
    "is_stable", "stable_forest_reduce", "ExpThreshold", "LevelInterval", "StepThreshold", "BoundsReport",
    "PartitionParams", "SegmentTooShort", "dense_disk_assignment", "discretize_thick_levels", "thick_components",
    "thick_thin_partition", "thicken", "thickened_hypograph", "verify_cardinality_bounds", "HypographPartition",
    "ThinNeck", "TreeClass", "tree_partition",
]
