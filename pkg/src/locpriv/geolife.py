"""GPS log ingestion: PLT parsing, grid binning, and the corpus format.

PLT files carry one fix per line after a fixed 6-line header:
``lat,lon,0,altitude_feet,days_since_1899-12-30,YYYY-MM-DD,HH:MM:SS``.
Binned trajectories persist as one line per record,
``user_id<TAB>cell,cell,...``, which keeps corpora diffable and easy to
check by hand.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import FileUnreadable, HeaderTooShort, WriteFailed
from .grid import CellId, GridSpec

logger = logging.getLogger(__name__)

PLT_HEADER_LINES = 6
INVALID_ALTITUDE = -777.0


@dataclass(frozen=True)
class GpsRecord:
    """One GPS fix.

    ``timestamp_days`` counts days since 1899-12-30 (fractional part is the
    time of day); ``altitude_ft`` of -777 marks a missing altitude.
    """

    latitude: float
    longitude: float
    altitude_ft: float
    timestamp_days: float
    date: str
    time: str

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} out of range")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} out of range")


def parse_plt(path: str | Path) -> list[GpsRecord]:
    """Parse one PLT file, skipping its 6 header lines.

    Malformed data lines (wrong field count, unparsable numbers, impossible
    coordinates) are dropped; their count is logged as a single warning per
    file.  Blank lines are ignored silently.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileUnreadable(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    if len(lines) < PLT_HEADER_LINES:
        raise HeaderTooShort(
            f"{path}: expected {PLT_HEADER_LINES} header lines, got {len(lines)}"
        )
    records: list[GpsRecord] = []
    malformed = 0
    for line in lines[PLT_HEADER_LINES:]:
        line = line.strip()
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != 7:
            malformed += 1
            continue
        try:
            records.append(
                GpsRecord(
                    latitude=float(fields[0]),
                    longitude=float(fields[1]),
                    altitude_ft=float(fields[3]),
                    timestamp_days=float(fields[4]),
                    date=fields[5],
                    time=fields[6],
                )
            )
        except ValueError:
            malformed += 1
    if malformed:
        logger.warning("%s: skipped %d malformed lines", path, malformed)
    return records


def bin_trajectories(
    groups: list[tuple[str, list[GpsRecord]]],
    grid: GridSpec,
    gap_seconds: float = 1200.0,
) -> list[tuple[str, list[CellId]]]:
    """Turn per-file GPS fixes into grid-cell records.

    Fixes outside the grid's bounding box are dropped.  A record splits
    wherever consecutive kept fixes are more than ``gap_seconds`` apart, and
    consecutive fixes in the same cell collapse to one entry.  Empty
    segments vanish; a user may therefore contribute several records.
    """
    out: list[tuple[str, list[CellId]]] = []
    for user_id, fixes in groups:
        segment: list[CellId] = []
        last_t: float | None = None
        for fix in fixes:
            cell = grid.cell_for_point(fix.latitude, fix.longitude)
            if cell is None:
                continue
            if (
                last_t is not None
                and (fix.timestamp_days - last_t) * 86400.0 > gap_seconds
            ):
                if segment:
                    out.append((user_id, segment))
                segment = []
            if not segment or segment[-1] != cell:
                segment.append(cell)
            last_t = fix.timestamp_days
        if segment:
            out.append((user_id, segment))
    return out


def write_corpus(records: list[tuple[str, list[CellId]]], path: str | Path) -> None:
    """Write records as ``user_id<TAB>cell,cell,...`` lines."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for user_id, cells in records:
                fh.write(f"{user_id}\t{','.join(str(c) for c in cells)}\n")
    except OSError as exc:
        raise WriteFailed(f"cannot write {path}: {exc}") from exc


def read_corpus(path: str | Path) -> list[tuple[str, list[CellId]]]:
    """Read records written by ``write_corpus``."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileUnreadable(f"cannot read {path}: {exc}") from exc
    records: list[tuple[str, list[CellId]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            user_id, cells_csv = line.split("\t")
            cells = [int(c) for c in cells_csv.split(",") if c]
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: bad corpus line") from exc
        records.append((user_id, cells))
    return records
