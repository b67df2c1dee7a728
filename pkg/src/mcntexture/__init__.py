"""Multilayer complex-network color-texture descriptors.

An RGB image becomes a 3-layer pixel network (one layer per channel, edges
within a spatial radius weighted by intensity contrast and distance); the
degree and clustering topology of its thresholded evolution, split into
within- and between-channel subnets, yields the texture features.
"""

__version__ = "0.1.0"

from .classify import EvalReport, ShrinkageLDA, color_statistics, lda_fit, loo_evaluate
from .dataset import (
    Manifest,
    ManifestEntry,
    load_image,
    load_manifest,
    save_png,
    scan_class_tree,
    split_grid,
    tile_tree,
    write_manifest,
)
from .descriptor import (
    ExtractionConfig,
    FeatureLayout,
    MCNDescriptor,
    extract,
    extract_batch,
    feature_layout,
    feature_length,
)
from .measures import (
    MeasureField,
    StatBlock,
    clustering_field,
    degree_field,
    measure_fields,
    render_measure_map,
    stats,
)
from .network import (
    PixelNetwork,
    apply_threshold,
    build_network,
    edge_weight,
    split_within_between,
)
from .stencil import NeighborhoodStencil, build_stencil
from .thresholds import (
    EdgeWeightHistogram,
    ThresholdPlan,
    edge_weight_histogram,
    estimate_plan,
    lower_limit,
    threshold_set,
    upper_limit_mean_degree,
    upper_limit_quantile,
)

__all__ = [
    "EvalReport",
    "ShrinkageLDA",
    "color_statistics",
    "lda_fit",
    "loo_evaluate",
    "Manifest",
    "ManifestEntry",
    "load_image",
    "load_manifest",
    "save_png",
    "scan_class_tree",
    "split_grid",
    "tile_tree",
    "write_manifest",
    "ExtractionConfig",
    "FeatureLayout",
    "MCNDescriptor",
    "extract",
    "extract_batch",
    "feature_layout",
    "feature_length",
    "MeasureField",
    "StatBlock",
    "clustering_field",
    "degree_field",
    "measure_fields",
    "render_measure_map",
    "stats",
    "PixelNetwork",
    "apply_threshold",
    "build_network",
    "edge_weight",
    "split_within_between",
    "NeighborhoodStencil",
    "build_stencil",
    "EdgeWeightHistogram",
    "ThresholdPlan",
    "edge_weight_histogram",
    "estimate_plan",
    "lower_limit",
    "threshold_set",
    "upper_limit_mean_degree",
    "upper_limit_quantile",
]
