"""Result table serialization.

The wide format is one CSV row per (algorithm, k, path_length) with the
fixed header below.  The long format unpivots the six statistics into
(metric, value) pairs for plotting tools.  Floats are written with their
shortest round-tripping representation, so identical rows always serialize
to identical bytes and a read-back reproduces the rows exactly.
"""

from __future__ import annotations

from pathlib import Path

from .errors import WriteFailed
from .simulation import ResultRow

CSV_HEADER = (
    "algorithm,k,path_length,mean_cell_entropy,mean_transition_entropy,"
    "mean_protection_rate,stddev_cell_entropy,stddev_transition_entropy,"
    "stddev_protection_rate,repetitions"
)
LONG_HEADER = "algorithm,k,path_length,metric,value"

_METRIC_FIELDS = (
    "mean_cell_entropy",
    "mean_transition_entropy",
    "mean_protection_rate",
    "stddev_cell_entropy",
    "stddev_transition_entropy",
    "stddev_protection_rate",
)


def format_results(rows: list[ResultRow], fmt: str = "csv") -> str:
    """Render rows to the named format ('csv' wide table or 'long')."""
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in rows:
            lines.append(
                f"{r.algorithm},{r.k},{r.path_length},"
                f"{r.mean_cell_entropy!r},{r.mean_transition_entropy!r},"
                f"{r.mean_protection_rate!r},{r.stddev_cell_entropy!r},"
                f"{r.stddev_transition_entropy!r},{r.stddev_protection_rate!r},"
                f"{r.repetitions}"
            )
    elif fmt == "long":
        lines = [LONG_HEADER]
        for r in rows:
            for name in _METRIC_FIELDS:
                lines.append(
                    f"{r.algorithm},{r.k},{r.path_length},{name},"
                    f"{getattr(r, name)!r}"
                )
    else:
        raise ValueError(f"unknown result format {fmt!r}")
    return "\n".join(lines) + "\n"


def emit_results(
    rows: list[ResultRow], path: str | Path, fmt: str = "csv"
) -> None:
    """Write rows to ``path``; byte-stable for identical rows."""
    text = format_results(rows, fmt)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise WriteFailed(f"cannot write {path}: {exc}") from exc


def read_results(path: str | Path) -> list[ResultRow]:
    """Parse a wide-format results file back into rows."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: missing results header")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        f = line.split(",")
        rows.append(
            ResultRow(
                algorithm=f[0],
                k=int(f[1]),
                path_length=int(f[2]),
                mean_cell_entropy=float(f[3]),
                mean_transition_entropy=float(f[4]),
                mean_protection_rate=float(f[5]),
                stddev_cell_entropy=float(f[6]),
                stddev_transition_entropy=float(f[7]),
                stddev_protection_rate=float(f[8]),
                repetitions=int(f[9]),
            )
        )
    return rows
