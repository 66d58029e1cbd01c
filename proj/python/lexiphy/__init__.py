"""Cognate detection and lexical phylogenetics."""

from ._core import (
    LexiphyError,
    __version__,
    bcubed,
    detect,
    edit_distance,
    emit_newick,
    gqd,
    log_likelihood,
    normalized_edit_distance,
    run_chain,
    sca_distance,
    simulate,
    sound_classes,
    tokenize,
    topology_count,
    transition_matrix,
)

__all__ = [
    "LexiphyError",
    "__version__",
    "bcubed",
    "detect",
    "edit_distance",
    "emit_newick",
    "gqd",
    "log_likelihood",
    "normalized_edit_distance",
    "run_chain",
    "sca_distance",
    "simulate",
    "sound_classes",
    "tokenize",
    "topology_count",
    "transition_matrix",
]
