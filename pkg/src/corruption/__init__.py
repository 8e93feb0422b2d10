"""腐蚀基准模块"""

from .kinds import SeverityTable, applicable_kinds, load_severity_table
from .functional import CORRUPTION_FUNCTIONS, plasma_fractal
from .policy import apply_corruption, corrupt_image, corrupt_pair, draw_corruption, replay_record
from .records import RECORD_LOG_NAME, read_records, write_records
from .dataset import CorruptionRunResult, ItemError, corrupt_dataset, corrupted_path, replay_records

__all__ = [
    "SeverityTable", "applicable_kinds", "load_severity_table",
    "CORRUPTION_FUNCTIONS", "plasma_fractal",
    "apply_corruption", "corrupt_image", "corrupt_pair", "draw_corruption", "replay_record",
    "RECORD_LOG_NAME", "read_records", "write_records",
    "CorruptionRunResult", "ItemError", "corrupt_dataset", "corrupted_path", "replay_records",
]
