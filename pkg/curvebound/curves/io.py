# curves/io.py

from pathlib import Path
from typing import List, Union

import numpy as np

from ..errors import SchemaError


def read_point_table(path: Union[str, Path]) -> np.ndarray:
    """Read whitespace-separated point coordinates, one point per line; '#' starts a comment"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SchemaError(f"cannot read point table {path}: {e}")

    rows: List[List[float]] = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            row = [float(tok) for tok in line.split()]
        except ValueError:
            raise SchemaError(f"non-numeric entry in {path}", line=lineno)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SchemaError(f"expected {width} coordinates, got {len(row)} in {path}", line=lineno)
        rows.append(row)

    if not rows:
        raise SchemaError(f"point table {path} holds no points")
    return np.array(rows)
