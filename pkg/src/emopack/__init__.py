"""emopack: a corpus-to-tensor data pipeline for speech emotion recognition."""

__version__ = "0.1.0"

from emopack.corpus import (
    EMOTIONS,
    NEUTRAL_INDEX,
    DomainTable,
    LabelMapping,
    RawSample,
    Sample,
    assign_domains,
    harmonize,
    load_manifest,
    split_train_val,
)
from emopack.errors import ConfigError, DataError, InvariantError

__all__ = [
    "EMOTIONS",
    "NEUTRAL_INDEX",
    "DomainTable",
    "LabelMapping",
    "RawSample",
    "Sample",
    "assign_domains",
    "harmonize",
    "load_manifest",
    "split_train_val",
    "ConfigError",
    "DataError",
    "InvariantError",
]
