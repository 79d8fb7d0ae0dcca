"""CSV reader and writer for grid paths.

Format: a ``t,value`` header, then one row per grid point sorted by t.
Values may be ``inf`` or ``-inf`` (boundary files). Numbers are written
with 17 significant digits so a write/read cycle is bit-exact.
"""

import csv
import logging
from pathlib import Path

import numpy as np

from .errors import CsvFormatError, PathDomainError
from .pathkit import GridPath, TimeGrid

logger = logging.getLogger(__name__)

HEADER = "t,value"


def format_number(x: float) -> str:
    """Decimal with 17 significant digits; ``inf``/``-inf`` for infinities."""
    return format(float(x), ".17g")


class PathReader:
    """Parses one path CSV file."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def _parse_number(self, text: str, lineno: int, column: str) -> float:
        text = text.strip()
        try:
            value = float(text)
        except ValueError:
            raise CsvFormatError(lineno, f"{column} is not a number: {text!r}", str(self.path))
        if np.isnan(value):
            raise CsvFormatError(lineno, f"{column} is NaN", str(self.path))
        return value

    def read_rows(self) -> tuple[list[float], list[float]]:
        """Return the (t, value) columns, checking structure line by line."""
        times: list[float] = []
        values: list[float] = []
        with open(self.path, encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != HEADER.split(","):
                raise CsvFormatError(1, f"expected header {HEADER!r}", str(self.path))
            for fields in reader:
                lineno = reader.line_num
                if not any(field.strip() for field in fields):
                    continue
                if len(fields) != 2:
                    raise CsvFormatError(lineno, f"expected 2 fields, got {len(fields)}", str(self.path))
                t = self._parse_number(fields[0], lineno, "t")
                v = self._parse_number(fields[1], lineno, "value")
                if not np.isfinite(t):
                    raise CsvFormatError(lineno, "t must be finite", str(self.path))
                if not times and t != 0.0:
                    raise CsvFormatError(lineno, f"first time must be 0, got {t!r}", str(self.path))
                if times and t <= times[-1]:
                    raise CsvFormatError(lineno, f"t={t!r} is not after t={times[-1]!r}", str(self.path))
                times.append(t)
                values.append(v)
            last_line = reader.line_num
        if len(times) < 2:
            raise CsvFormatError(last_line, "a path needs at least 2 rows", str(self.path))
        return times, values

    def parse(self) -> GridPath:
        times, values = self.read_rows()
        try:
            path = GridPath(TimeGrid(np.array(times)), np.array(values))
        except PathDomainError as e:
            raise CsvFormatError(2, str(e), str(self.path)) from e
        logger.debug("read %d points from %s", len(path), self.path)
        return path


def read_path(path: str | Path) -> GridPath:
    return PathReader(path).parse()


def path_to_csv(path: GridPath) -> str:
    rows = [HEADER]
    for t, v in zip(path.points.tolist(), path.values.tolist()):
        rows.append(f"{format_number(t)},{format_number(v)}")
    return "\n".join(rows) + "\n"


def write_path(path: GridPath, dest: str | Path) -> Path:
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    dest.write_text(path_to_csv(path), encoding="utf-8")
    logger.debug("wrote %d points to %s", len(path), dest)
    return dest
