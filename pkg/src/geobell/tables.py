"""Reference violation-ratio tables: layout, reference values, and recomputation."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

from .asymptotics import limit_ratio_complex
from .lhv import DEFAULT_RESTARTS, violation_ratio
from .scenario import INFINITE, Scenario

THREADS_ENV = "GEOBELL_THREADS"
_L_COLS = (2, 3, 4, 5, 6)


@dataclass(frozen=True)
class TableSpec:
    table_id: str
    rows: tuple  # d values
    cols: tuple  # L values, or N values when col_kind == "N"
    strategy: str
    state: str = "unbiased"
    n: int | None = None
    fixed_l: int | None = None
    col_kind: str = "L"
    reference: dict = field(default_factory=dict)  # (d, col) -> printed value
    suspect: dict = field(default_factory=dict)  # (d, col) -> reason

    def scenario(self, d, col) -> Scenario:
        if self.col_kind == "N":
            return Scenario(col, d, self.fixed_l, self.state, self.strategy)
        return Scenario(self.n, d, col, self.state, self.strategy)

    def column_label(self, col) -> str:
        if col == INFINITE:
            return f"{self.col_kind}=inf"
        return f"{self.col_kind}={col}"


def _grid(rows, values, cols=_L_COLS):
    out = {}
    for d, vals in zip(rows, values):
        for col, v in zip(cols, vals):
            if v is not None:
                out[(d, col)] = v
    return out


_T1 = [
    [1.414, 1.299, 1.268, 1.255, 1.248],
    [1.170, 1.116, 1.101, 1.094, 1.090],
    [1.119, 1.077, 1.064, 1.059, 1.056],
    [1.098, 1.061, 1.050, 1.045, 1.043],
    [1.087, 1.053, 1.043, 1.038, 1.036],
]
_T2 = [
    [2.000, 1.688, 1.941, 1.844, 1.939],
    [1.404, 1.289, 1.388, 1.351, 1.387],
    [1.293, 1.209, 1.281, 1.255, 1.281],
    [1.249, 1.176, 1.239, 1.216, 1.239],
    [1.225, 1.159, 1.216, 1.196, 1.216],
]
_T2A = [
    [2.828, 2.923, 2.971, 2.996, 3.010],
    [1.658, 1.692, 1.707, 1.714, 1.718],
    [1.470, 1.493, 1.503, 1.508, 1.510],
    [1.397, 1.416, 1.424, None, None],
    [None] * 5,
]
_T3 = [
    [1.414, 1.299, 1.268, 1.255, 1.248, None],
    [1.170, 1.116, 1.001, 1.094, 1.090, None],
    [0.975, 0.982, 0.986, 0.988, 0.989, 0.991],
    [0.939, 0.948, 0.951, 0.953, 0.954, 0.956],
    [0.929, 0.936, 0.939, 0.939, 0.940, 0.942],
]
_T4 = [
    [2.000, 1.688, 1.941, 1.844, 1.939, 1.938],
    [1.277, 1.289, 1.356, 1.351, 1.373, 1.387],
    [1.056, 1.086, 1.109, 1.113, 1.119, 1.128],
    [0.988, 1.010, 1.022, 1.026, 1.029, 1.034],
    [0.962, 0.978, 0.986, 0.988, 0.990, 0.994],
]
_T6 = [
    [0.770, 0.889],
    [0.863, 0.976],
    [0.911, 1.020],
    [0.940, 1.047],
    [0.959, 1.064],
    [0.973, 1.077],
]

_D26 = (2, 3, 4, 5, 6)
_L_INF = _L_COLS + (INFINITE,)

TABLES = {
    "1": TableSpec("1", _D26, _L_COLS, "real", n=2, reference=_grid(_D26, _T1)),
    "2": TableSpec("2", _D26, _L_COLS, "real", n=3, reference=_grid(_D26, _T2)),
    "2a": TableSpec("2a", _D26, _L_COLS, "real", n=4, reference=_grid(_D26, _T2A)),
    "3": TableSpec(
        "3", _D26, _L_INF, "complex", n=2,
        reference=_grid(_D26, _T3, _L_INF),
        suspect={(3, 4): "reference lists 1.001; row pattern suggests 1.101"},
    ),
    "4": TableSpec("4", _D26, _L_INF, "complex", n=3, reference=_grid(_D26, _T4, _L_INF)),
    "6": TableSpec(
        "6", (3, 4, 5, 6, 7, 8), (2, 3), "dichotomic", state="biased",
        fixed_l=2, col_kind="N", reference=_grid((3, 4, 5, 6, 7, 8), _T6, (2, 3)),
    ),
}


def round3(x: float) -> str:
    """Three decimals, halves rounded away from zero."""
    return str(Decimal(repr(float(x))).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


@dataclass
class Cell:
    d: int
    col: object
    value: float
    reference: float | None
    suspect: str | None = None


def _threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def compute_cell(spec: TableSpec, d, col, restarts=DEFAULT_RESTARTS, seed=0) -> Cell:
    if col == INFINITE:
        value = limit_ratio_complex(d, spec.n)
    else:
        value = violation_ratio(spec.scenario(d, col), restarts=restarts, seed=seed).ratio
    return Cell(d, col, value, spec.reference.get((d, col)), spec.suspect.get((d, col)))


def compute_table(table_id: str, restarts=DEFAULT_RESTARTS, seed=0, threads=None) -> list:
    """All cells of a table in row-major layout order."""
    spec = TABLES[table_id]
    coords = [(d, c) for d in spec.rows for c in spec.cols]
    threads = threads or _threads()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(lambda dc: compute_cell(spec, *dc, restarts, seed), coords))
    return [compute_cell(spec, d, c, restarts, seed) for d, c in coords]


def table_csv(table_id: str, cells) -> str:
    """CSV in the reference layout; "*" marks cells without a reference value."""
    spec = TABLES[table_id]
    by_pos = {(c.d, c.col): c for c in cells}
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["d"] + [spec.column_label(c) for c in spec.cols] + ["note"])
    for d in spec.rows:
        fields, notes = [str(d)], []
        for col in spec.cols:
            cell = by_pos[(d, col)]
            text = round3(cell.value)
            if cell.reference is None:
                text += "*"
            fields.append(text)
            if cell.suspect:
                notes.append(f"{spec.column_label(col)}: computed {round3(cell.value)}; {cell.suspect}")
        fields.append("; ".join(notes))
        out.writerow(fields)
    return buf.getvalue()
