"""Keyframe-based visual summaries of day-long egocentric photostreams.

The pipeline: per-frame feature vectors are clustered bottom-up on
Euclidean distance, the dendrogram cut into visual clusters, the
clusters refined into temporally coherent events by division and
fusion, and each event represented by one selected keyframe.
"""

from .backends import active_backend_name
from .clustering import (
    DEFAULT_CUTOFF,
    Dendrogram,
    LinkageMethod,
    agglomerate,
    cut,
    pairwise_distances,
    segment,
)
from .datamodel import (
    SPEC_VERSION,
    DistanceMatrix,
    Event,
    EventSegmentation,
    FrameDescriptor,
    Photostream,
    Selection,
    SelectionMethod,
    Summary,
    SummaryParameters,
    ValidationError,
    load_ground_truth,
    load_manifest,
    load_summary,
    read_features,
    read_label_csv,
    segmentation_from_labels,
    write_features,
    write_label_csv,
    write_manifest,
    write_segmentation,
    write_summary,
)
from .evaluation import (
    JaccardReport,
    SynthConfig,
    compare_division_fusion,
    jaccard,
    suggested_cutoff,
    sweep_cutoff,
    synth_generate,
)
from .ingest import HistogramConfig, extract_histogram, l2_normalize
from .keyframes import (
    ConvergenceError,
    TransitionMatrix,
    min_distance_keyframe,
    random_keyframe,
    random_walk_keyframe,
    similarity_matrix,
    stationary_distribution,
    summarize,
    uniform_summary,
)
from .render import ContactSheet, render_html, render_manifest
from .temporal import (
    DEFAULT_MIN_EVENT_DURATION,
    FusionConfig,
    divide,
    fuse,
    refine,
)

__version__ = "0.1.0"

__all__ = [
    "ContactSheet",
    "ConvergenceError",
    "DEFAULT_CUTOFF",
    "DEFAULT_MIN_EVENT_DURATION",
    "Dendrogram",
    "DistanceMatrix",
    "Event",
    "EventSegmentation",
    "FrameDescriptor",
    "FusionConfig",
    "HistogramConfig",
    "JaccardReport",
    "LinkageMethod",
    "Photostream",
    "SPEC_VERSION",
    "Selection",
    "SelectionMethod",
    "Summary",
    "SummaryParameters",
    "SynthConfig",
    "TransitionMatrix",
    "ValidationError",
    "active_backend_name",
    "agglomerate",
    "compare_division_fusion",
    "cut",
    "divide",
    "extract_histogram",
    "fuse",
    "jaccard",
    "l2_normalize",
    "load_ground_truth",
    "load_manifest",
    "load_summary",
    "min_distance_keyframe",
    "pairwise_distances",
    "random_keyframe",
    "random_walk_keyframe",
    "read_features",
    "read_label_csv",
    "refine",
    "render_html",
    "render_manifest",
    "segment",
    "segmentation_from_labels",
    "similarity_matrix",
    "stationary_distribution",
    "suggested_cutoff",
    "summarize",
    "sweep_cutoff",
    "synth_generate",
    "uniform_summary",
    "write_features",
    "write_label_csv",
    "write_manifest",
    "write_segmentation",
    "write_summary",
]
