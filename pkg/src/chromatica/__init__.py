from .constants import (
    PRACTICAL_DEGREE_LIMIT,
    EXTENDED_DEGREE_LIMIT,
    TORUS_PERIOD,
    DEGREE_TABLE,
    CSV_HEADER,
    DEFAULT_WORK_THRESHOLD,
    DEFAULT_BOOTSTRAP_REPS,
)
from .keycalc import (
    Key,
    Mode,
    all_keys,
    degree,
    enharmonic_class,
    format_key,
    key_for_degree,
    parse_key,
    raw_degree,
    relative_key,
)
from .corpus import (
    Composer,
    Corpus,
    Diagnostic,
    IngestOptions,
    Provenance,
    Work,
    composer_works,
    corpus_to_json,
    ingest_csv,
    ingest_json,
    load_corpus,
    partition_by_mode,
    save_corpus_json,
    slice_by_year,
    validate,
)
from .diagram import (
    DiagramPoint,
    ModeFraction,
    Normalization,
    TorusMetricConfig,
    Weighting,
    aggregate_point,
    composer_points,
    mode_fractions,
    preference_ratio,
    torus_distance,
    weighted_point,
    weights_from_distribution,
)
from .stats import (
    Candidate,
    ClusterCut,
    ClusterResult,
    DegreeDistribution,
    DegreeHistogram,
    GofResult,
    Linkage,
    Metric,
    Scale,
    centroid,
    cluster,
    cvm_statistic,
    cvm_test,
    distribution,
    histogram,
    mode_peak,
    mode_peaks,
)
from .career import Trajectory, TrajectorySample, largest_deltas, trajectory, trajectory_deltas
from .render import LabelPolicy, Overlay, PlotKind, PlotSpec, default_spec, render
from .utils import (
    get_example_corpus_filename,
    get_mozart_1761_filename,
    get_degree_table_corpus_filename,
    is_corpus_csv,
)
from .exceptions import (
    ChromaticaError,
    ChromaticaIOError,
    KeyNotationError,
    MalformedKey,
    ExtendedRangeKey,
    FileUnreadable,
    SchemaMismatch,
    RowError,
    UnknownComposer,
    EmptyCatalog,
    NoDatedWorks,
    MissingWeight,
    EmptyMode,
    EmptyHistogram,
    EmptyPointSet,
    TooFewSamples,
    DegenerateSamples,
    TooFewPoints,
    InvalidArgument,
    InvalidCut,
    MismatchedSpec,
)

__all__ = [
    "PRACTICAL_DEGREE_LIMIT",
    "EXTENDED_DEGREE_LIMIT",
    "TORUS_PERIOD",
    "DEGREE_TABLE",
    "CSV_HEADER",
    "DEFAULT_WORK_THRESHOLD",
    "DEFAULT_BOOTSTRAP_REPS",
    "Key",
    "Mode",
    "all_keys",
    "degree",
    "enharmonic_class",
    "format_key",
    "key_for_degree",
    "parse_key",
    "raw_degree",
    "relative_key",
    "Composer",
    "Corpus",
    "Diagnostic",
    "IngestOptions",
    "Provenance",
    "Work",
    "composer_works",
    "corpus_to_json",
    "ingest_csv",
    "ingest_json",
    "load_corpus",
    "partition_by_mode",
    "save_corpus_json",
    "slice_by_year",
    "validate",
    "DiagramPoint",
    "ModeFraction",
    "Normalization",
    "TorusMetricConfig",
    "Weighting",
    "aggregate_point",
    "composer_points",
    "mode_fractions",
    "preference_ratio",
    "torus_distance",
    "weighted_point",
    "weights_from_distribution",
    "Candidate",
    "ClusterCut",
    "ClusterResult",
    "DegreeDistribution",
    "DegreeHistogram",
    "GofResult",
    "Linkage",
    "Metric",
    "Scale",
    "centroid",
    "cluster",
    "cvm_statistic",
    "cvm_test",
    "distribution",
    "histogram",
    "mode_peak",
    "mode_peaks",
    "Trajectory",
    "TrajectorySample",
    "largest_deltas",
    "trajectory",
    "trajectory_deltas",
    "LabelPolicy",
    "Overlay",
    "PlotKind",
    "PlotSpec",
    "default_spec",
    "render",
    "get_example_corpus_filename",
    "get_mozart_1761_filename",
    "get_degree_table_corpus_filename",
    "is_corpus_csv",
    "ChromaticaError",
    "ChromaticaIOError",
    "KeyNotationError",
    "MalformedKey",
    "ExtendedRangeKey",
    "FileUnreadable",
    "SchemaMismatch",
    "RowError",
    "UnknownComposer",
    "EmptyCatalog",
    "NoDatedWorks",
    "MissingWeight",
    "EmptyMode",
    "EmptyHistogram",
    "EmptyPointSet",
    "TooFewSamples",
    "DegenerateSamples",
    "TooFewPoints",
    "InvalidArgument",
    "InvalidCut",
    "MismatchedSpec",
]
