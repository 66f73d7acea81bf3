"""
Diagnostics tables for the command line.

- `convergence_table`: bound, spectral norm of G_B and the delta to the previous bound.
- `cusp_table`: λ and the largest component magnitude at τ = iλ(1, …, 1).
- `residual_table`: generator word, bound and transformation residual.
- `print_table`: pretty-print a table (stdout unless a stream is given).
- `write_table`: write a table as CSV.
"""
import csv
import logging
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

from .linalg import spectral_norm
from .poincare import ConvergenceReport

logger = logging.getLogger(__name__)

Table = Tuple[List[str], List[List[Any]]]


def _cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6e}"
    return str(value)


def format_table(headers: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """
    Render rows as aligned text columns, or a notice if there are none.

    Args:
        headers: Column names.
        rows: Row values; floats are shown in scientific notation.

    Returns:
        str: The rendered table.
    """
    cells = [[_cell(v) for v in row] for row in rows]
    if not cells:
        return "(empty table)"
    widths = [max(len(h), *(len(row[i]) for row in cells)) for i, h in enumerate(headers)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(headers, widths))]
    lines.append("-" * len(lines[0]))
    lines.extend("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells)
    return "\n".join(lines)


def print_table(headers: Sequence[str], rows: Iterable[Sequence[Any]], file: Optional[TextIO] = None) -> None:
    print(format_table(headers, rows), file=file)


def write_table(path: Union[str, Path], headers: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write a CSV file with full-precision numbers."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(list(headers))
        for row in rows:
            writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    logger.info("wrote table %s", path)


def convergence_table(report: ConvergenceReport) -> Table:
    rows = [[row.bound, spectral_norm(row.value), row.delta] for row in report.rows]
    return ["bound", "norm", "delta"], rows


def cusp_table(lambdas: Sequence[float], magnitudes: Sequence[float]) -> Table:
    return ["lambda", "max_abs"], [[float(lam), float(m)] for lam, m in zip(lambdas, magnitudes)]


def residual_table(entries: Sequence[Tuple[str, Optional[float], float]]) -> Table:
    """Rows of (generator word, bound or None, residual)."""
    return ["gamma", "bound", "residual"], [[word, bound, float(res)] for word, bound, res in entries]
