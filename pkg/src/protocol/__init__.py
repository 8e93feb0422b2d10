"""实验协议：清单、身份划分、配对、LOOQ 与 P×K 采样"""

from .manifest import load_manifest, parse_manifest, validate_manifest, write_manifest
from .pairing import looq_trials, pair_images, read_pairings, repeated_pairings, write_pairings
from .sampling import pk_batches
from .splits import SPLIT_SIZES, fold_sizes, make_folds, read_split, split_identities, write_split

__all__ = [
    "load_manifest",
    "parse_manifest",
    "validate_manifest",
    "write_manifest",
    "split_identities",
    "make_folds",
    "fold_sizes",
    "SPLIT_SIZES",
    "write_split",
    "read_split",
    "pair_images",
    "repeated_pairings",
    "looq_trials",
    "write_pairings",
    "read_pairings",
    "pk_batches",
]
