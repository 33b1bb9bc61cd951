# Copyright 2025 Tsung-Han Chang. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""CSV and markdown output of sweep results."""

from collections.abc import Sequence
from dataclasses import asdict, fields, is_dataclass
from pathlib import Path
from typing import Any

import pandas as pd

from thc_threshold_bandit.harness.sweep import SweepRow
from thc_threshold_bandit.observability import LogLevel, logger

CSV_COLUMNS = ["policy", "n", "delay", "success_rate", "mean_max_pending", "mean_pending_ratio", "reps"]


def rows_to_dataframe(rows: Sequence[SweepRow]) -> pd.DataFrame:
    """Sweep rows as a DataFrame sorted by (policy, n, delay).

    Args:
        rows (Sequence[SweepRow]): Sweep rows.

    Returns:
        pd.DataFrame: One row per cell with the CSV columns.
    """
    ordered = sorted(rows, key=lambda row: (row.policy, row.n, row.delay))
    return pd.DataFrame([asdict(row) for row in ordered], columns=CSV_COLUMNS)


def emit_csv(rows: Sequence[SweepRow], path: str | Path) -> None:
    """Write sweep rows as CSV with reals at 6 significant digits.

    Args:
        rows (Sequence[SweepRow]): Sweep rows.
        path (str | Path): Output file; parent directories are created.

    Raises:
        OSError: If the file cannot be written, with the path in the message.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        rows_to_dataframe(rows).to_csv(path, index=False, float_format="%.6g", lineterminator="\n")
    except OSError as exception:
        logger.highlight(level=LogLevel.ERROR, message=f"[Report] Failed to write {path}: {exception}")
        raise OSError(f"Failed to write {path}: {exception}") from exception
    logger.info("[Report] Wrote %d rows to %s", len(rows), path)


def render_markdown(records: Sequence[Any]) -> str:
    """Render dataclass records as a markdown table.

    Args:
        records (Sequence[Any]): Dataclass instances of one type.

    Returns:
        str: The table, or an empty string when there is nothing to show.
    """
    if not records:
        return ""
    first = records[0]
    if not is_dataclass(first):
        raise TypeError(f"Expected dataclass records, got {type(first).__name__}")
    columns = [field_.name for field_ in fields(first)]
    dataframe = pd.DataFrame([asdict(record) for record in records], columns=columns)
    return str(dataframe.to_markdown(index=False, floatfmt=".4g"))
