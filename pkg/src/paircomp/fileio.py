"""File formats: comparison pair lists, ratio matrix grids, result tables.

All files are UTF-8 CSV with dot decimal separators and LF newlines; floats
are written with 17 significant digits so that emit(parse(file)) reproduces
the numbers bit for bit.  Item indices are 1-based in files and 0-based in
memory.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

from .core import IPCM, DataMatrix, RECIPROCITY_TOL
from .errors import (
    BadDiagonal,
    BadHeader,
    DuplicatePair,
    NegativeCount,
    NonPositiveEntry,
    NotReciprocal,
    ParseError,
)
from .graphs import GraphClass, properties
from .simulation import MEASURE_NAMES, SimulationSummary

PAIRS_HEADER = ("i", "j", "worse", "better")
RESULTS_HEADER = (
    "n",
    "perturb",
    "model",
    "graph_id",
    "edges",
    "canonical_code",
    "measure",
    "mean",
    "stddev",
    "num_sims",
    "excluded",
)

#: Reciprocity tolerance applied when loading ratio matrices from files.
FILE_RECIPROCITY_TOL = 1e-9


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _rows_of(source: str | Path | TextIO) -> list[list[str]]:
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    return [row for row in csv.reader(io.StringIO(text)) if row]


def _parse_float(cell: str, where: str) -> float:
    try:
        value = float(cell.strip())
    except ValueError:
        raise ParseError(f"{where}: cannot parse {cell.strip()!r} as a number") from None
    if math.isnan(value):
        raise ParseError(f"{where}: NaN is not a valid value")
    return value


def parse_pairs(source: str | Path | TextIO, n: int | None = None) -> DataMatrix:
    """Read a comparison list with header ``i,j,worse,better``; one row per
    pair with 1-based indices i < j.  The item count is the largest index
    seen unless ``n`` overrides it."""
    rows = _rows_of(source)
    if not rows or tuple(c.strip().lower() for c in rows[0]) != PAIRS_HEADER:
        raise BadHeader(f"expected header {','.join(PAIRS_HEADER)!r}")
    entries: dict[tuple[int, int], tuple[float, float]] = {}
    highest = 0
    for number, row in enumerate(rows[1:], start=2):
        where = f"row {number}"
        if len(row) != 4:
            raise ParseError(f"{where}: expected 4 fields, got {len(row)}")
        try:
            i, j = int(row[0]), int(row[1])
        except ValueError:
            raise ParseError(f"{where}: indices must be integers") from None
        if not 1 <= i < j:
            raise ParseError(f"{where}: indices must satisfy 1 <= i < j, got ({i}, {j})")
        worse = _parse_float(row[2], where)
        better = _parse_float(row[3], where)
        if worse < 0 or better < 0:
            raise NegativeCount(f"{where}: comparison amounts must be nonnegative")
        pair = (i - 1, j - 1)
        if pair in entries:
            raise DuplicatePair(f"{where}: pair ({i}, {j}) appears twice")
        entries[pair] = (worse, better)
        highest = max(highest, j)
    count = n if n is not None else highest
    if count < 1:
        raise ParseError("cannot infer the item count from an empty file; pass n")
    if highest > count:
        raise ParseError(f"index {highest} exceeds the declared item count {count}")
    return DataMatrix(count, entries)


def emit_pairs(data: DataMatrix) -> str:
    lines = [",".join(PAIRS_HEADER)]
    for (i, j), (worse, better) in sorted(data.entries.items()):
        lines.append(f"{i + 1},{j + 1},{_fmt(worse)},{_fmt(better)}")
    return "\n".join(lines) + "\n"


def parse_pcm(
    source: str | Path | TextIO, reciprocity_tol: float = FILE_RECIPROCITY_TOL
) -> IPCM:
    """Read an n-by-n grid of positive ratios; ``*`` marks an unknown entry,
    the diagonal must be 1, and a_ji must equal 1/a_ij within
    ``reciprocity_tol`` (relative).  Entries are kept exactly as printed
    unless they satisfy the file tolerance but not the stricter in-memory
    one, in which case the lower triangle is recomputed from the upper."""
    rows = _rows_of(source)
    n = len(rows)
    if n == 0:
        raise ParseError("empty matrix file")
    raw: dict[tuple[int, int], float] = {}
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ParseError(f"row {i + 1}: expected {n} cells, got {len(row)}")
        for j, cell in enumerate(row):
            cell = cell.strip()
            where = f"cell ({i + 1}, {j + 1})"
            if i == j:
                if cell == "*":
                    raise BadDiagonal(f"{where}: diagonal entries must be 1")
                if abs(_parse_float(cell, where) - 1.0) > 1e-12:
                    raise BadDiagonal(f"{where}: diagonal entries must be 1")
                continue
            if cell == "*":
                continue
            value = _parse_float(cell, where)
            if not (value > 0 and math.isfinite(value)):
                raise NonPositiveEntry(f"{where}: ratios must be positive and finite")
            raw[(i, j)] = value
    entries: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            upper, lower = raw.get((i, j)), raw.get((j, i))
            if upper is None and lower is None:
                continue
            if upper is None or lower is None:
                raise NotReciprocal(
                    f"cells ({i + 1}, {j + 1}) and ({j + 1}, {i + 1}): one side is missing"
                )
            if abs(upper * lower - 1.0) > reciprocity_tol:
                raise NotReciprocal(
                    f"cells ({i + 1}, {j + 1}) and ({j + 1}, {i + 1}) are not reciprocal"
                )
            if abs(upper * lower - 1.0) > RECIPROCITY_TOL:
                lower = 1.0 / upper
            entries[(i, j)] = upper
            entries[(j, i)] = lower
    return IPCM(n, entries)


def emit_pcm(pcm: IPCM) -> str:
    lines = []
    for i in range(pcm.n):
        cells = []
        for j in range(pcm.n):
            if i == j:
                cells.append("1")
            elif (i, j) in pcm.entries:
                cells.append(_fmt(pcm.entries[(i, j)]))
            else:
                cells.append("*")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Simulation result tables


@dataclass(frozen=True)
class ResultRow:
    """One (structure, measure) line of a results table."""

    n: int
    perturb: float
    model: str
    graph_id: int
    edges: int
    canonical_code: str
    measure: str
    mean: float
    stddev: float
    num_sims: int
    excluded: int

    def graph_class(self) -> GraphClass:
        return GraphClass(
            n=self.n,
            canonical_code=int(self.canonical_code, 16),
            edge_count=self.edges,
            id=self.graph_id,
        )


def results_rows(summary: SimulationSummary) -> list[ResultRow]:
    config = summary.config
    rows = []
    for cls in summary.classes:
        for measure in MEASURE_NAMES:
            stats = summary.stats[(cls.id, measure)]
            rows.append(
                ResultRow(
                    n=config.n,
                    perturb=config.perturb,
                    model=config.model.value,
                    graph_id=cls.id,
                    edges=cls.edge_count,
                    canonical_code=cls.code_hex,
                    measure=measure,
                    mean=stats.mean,
                    stddev=stats.stddev,
                    num_sims=config.num_sims,
                    excluded=config.num_sims - stats.count,
                )
            )
    return rows


def write_results(summary: SimulationSummary, out: TextIO) -> None:
    out.write(",".join(RESULTS_HEADER) + "\n")
    for row in results_rows(summary):
        out.write(
            f"{row.n},{_fmt(row.perturb)},{row.model},g{row.graph_id},{row.edges},"
            f"{row.canonical_code},{row.measure},{_fmt(row.mean)},{_fmt(row.stddev)},"
            f"{row.num_sims},{row.excluded}\n"
        )


def read_results(source: str | Path | TextIO) -> list[ResultRow]:
    rows = _rows_of(source)
    if not rows or tuple(c.strip() for c in rows[0]) != RESULTS_HEADER:
        raise BadHeader(f"expected header {','.join(RESULTS_HEADER)!r}")

    def stat(cell: str, where: str) -> float:
        # NaN is legitimate here: a cell whose every replication was excluded.
        try:
            return float(cell.strip())
        except ValueError:
            raise ParseError(f"{where}: cannot parse {cell.strip()!r} as a number") from None

    parsed = []
    for number, row in enumerate(rows[1:], start=2):
        where = f"row {number}"
        if len(row) != len(RESULTS_HEADER):
            raise ParseError(f"{where}: expected {len(RESULTS_HEADER)} fields")
        label = row[3].strip()
        if not label.startswith("g") or not label[1:].isdigit():
            raise ParseError(f"{where}: graph_id must look like g12, got {label!r}")
        measure = row[6].strip()
        if measure not in MEASURE_NAMES:
            raise ParseError(f"{where}: unknown measure {measure!r}")
        parsed.append(
            ResultRow(
                n=int(row[0]),
                perturb=_parse_float(row[1], where),
                model=row[2].strip(),
                graph_id=int(label[1:]),
                edges=int(row[4]),
                canonical_code=row[5].strip(),
                measure=measure,
                mean=stat(row[7], where),
                stddev=stat(row[8], where),
                num_sims=int(row[9]),
                excluded=int(row[10]),
            )
        )
    return parsed


def results_json(summary: SimulationSummary) -> str:
    payload = [
        {
            "n": r.n,
            "perturb": r.perturb,
            "model": r.model,
            "graph_id": f"g{r.graph_id}",
            "edges": r.edges,
            "canonical_code": r.canonical_code,
            "measure": r.measure,
            "mean": r.mean,
            "stddev": r.stddev,
            "num_sims": r.num_sims,
            "excluded": r.excluded,
        }
        for r in results_rows(summary)
    ]
    return json.dumps(payload, indent=2) + "\n"


def graphs_json(classes: Iterable[GraphClass]) -> str:
    """Catalog entries with 1-based edge lists and structural properties."""
    payload = []
    for cls in classes:
        member = cls.member()
        props = properties(member)
        payload.append(
            {
                "id": cls.label,
                "n": cls.n,
                "edge_count": cls.edge_count,
                "canonical_code": cls.code_hex,
                "edges": [[i + 1, j + 1] for i, j in member.sorted_edges()],
                "properties": {
                    "degree_sequence": list(props.degree_sequence),
                    "is_regular": props.is_regular,
                    "is_bipartite": props.is_bipartite,
                    "is_star": props.is_star,
                    "is_spanning_tree": props.is_spanning_tree,
                    "diameter": props.diameter,
                },
            }
        )
    return json.dumps(payload, indent=2) + "\n"
