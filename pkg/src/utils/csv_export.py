"""
CSV and metadata export for toolkit results
Deterministic output: 15 significant digits, LF line endings, sorted metadata keys
"""

import csv
import json
import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 15


def format_number(value: Any, precision: int = DEFAULT_PRECISION) -> str:
    """
    Format a cell value

    Args:
        value: Number, string, None or bool
        precision: Significant digits for floats

    Returns:
        str: Cell text; None and NaN become an empty cell
    """
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return ''
        return f"{float(value):.{precision}g}"
    return str(value)


def write_csv(output_file: Union[str, Path], fieldnames: Sequence[str],
              rows: Iterable[Mapping[str, Any]], precision: int = DEFAULT_PRECISION) -> Path:
    """
    Write rows to a CSV file

    Args:
        output_file: Output CSV filename
        fieldnames: Column order
        rows: Dictionaries keyed by column name; missing keys become blank cells
        precision: Significant digits for floats

    Returns:
        Path: The written file
    """
    output_path = Path(output_file)
    if output_path.parent and not output_path.parent.exists():
        output_path.parent.mkdir(parents=True, exist_ok=True)

    count = 0
    with open(output_path, 'w', newline='') as csvfile:
        writer = csv.DictWriter(csvfile, fieldnames=list(fieldnames), lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({name: format_number(row.get(name), precision) for name in fieldnames})
            count += 1

    logger.info(f"Wrote {count} rows to {output_path}")
    return output_path


def write_complex_columns(output_file: Union[str, Path], columns: Dict[str, np.ndarray],
                          precision: int = DEFAULT_PRECISION) -> Path:
    """
    Write parallel arrays as CSV columns

    Complex arrays are split into re_<name> and im_<name> unless the name already
    carries a re_/im_ prefix.

    Args:
        output_file: Output CSV filename
        columns: Ordered mapping of column name to 1-D array
        precision: Significant digits

    Returns:
        Path: The written file
    """
    fieldnames: List[str] = []
    data: Dict[str, np.ndarray] = {}
    for name, array in columns.items():
        array = np.asarray(array)
        if np.iscomplexobj(array):
            fieldnames.extend([f"re_{name}", f"im_{name}"])
            data[f"re_{name}"] = array.real
            data[f"im_{name}"] = array.imag
        else:
            fieldnames.append(name)
            data[name] = array

    lengths = {len(array) for array in data.values()}
    if len(lengths) > 1:
        raise ValueError(f"column lengths differ: {sorted(lengths)}")

    n_rows = lengths.pop() if lengths else 0
    rows = ({name: data[name][i] for name in fieldnames} for i in range(n_rows))
    return write_csv(output_file, fieldnames, rows, precision)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, 'value') and hasattr(value, 'name'):
        return value.value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return value


def write_metadata(output_file: Union[str, Path], metadata: Mapping[str, Any],
                   suffix: str = '.meta.json') -> Optional[Path]:
    """
    Save run parameters next to a CSV file

    Args:
        output_file: The CSV the metadata describes
        metadata: Parameters to record
        suffix: Appended to the CSV filename

    Returns:
        Path of the sidecar, or None if it could not be written
    """
    sidecar = Path(str(output_file) + suffix)
    try:
        with open(sidecar, 'w', newline='') as f:
            json.dump(_jsonable(dict(metadata)), f, indent=2, sort_keys=True)
            f.write('\n')
        return sidecar
    except OSError as e:
        logger.error(f"Error saving metadata: {e}")
        return None
