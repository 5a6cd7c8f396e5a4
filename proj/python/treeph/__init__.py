"""Persistent-homology features and statistics for embedded vessel trees."""

from ._treeph import (
    DegenerateError,
    DuplicateError,
    EmbeddedTree,
    InfiniteDistanceError,
    ParseError,
    PersistenceDiagram,
    ReferenceError,
    SubjectError,
    analyze,
    bottleneck,
    compute_diagrams,
    diagram,
    diproperm,
    hausdorff,
    heatmap,
    parse_tree,
    pca,
    pearson,
    persistence0,
    persistence_vector,
    read_tree,
    residualize,
    rips_persistence1,
    subsample,
    synth,
    total_length,
    tree_loops,
    tree_persistence0,
    wasserstein,
)

__all__ = [name for name in dir() if not name.startswith("_")]
