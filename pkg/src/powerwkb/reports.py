"""Benchmark tables and figure data series.

Tables compare exact, fitted and Bohr-Sommerfeld energies for the
linear, quartic and sextic potentials; figure series tabulate the
relative ground-state deviation and the WKB correction gamma.  All
output is byte-stable: values are rounded half-even at the printed
precision before serialization.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from importlib import metadata
from typing import Sequence

from .bohr_sommerfeld import bse_energy, deviation, gamma_from_energy, square_well_energies
from .errors import ConvergenceError
from .fitting import eval_energy_fit, eval_gamma0_vs_m, preset
from .spectral import Engine, default_tolerance, exact_spectrum
from .special_math import PotentialSpec


class TablePreset(str, enum.Enum):
    TABLE_I = "TABLE_I"
    TABLE_II = "TABLE_II"
    TABLE_III = "TABLE_III"
    CUSTOM = "CUSTOM"


class OutputFormat(str, enum.Enum):
    CSV = "CSV"
    JSON = "JSON"
    MARKDOWN = "MARKDOWN"


class FigureId(str, enum.Enum):
    FIG1 = "FIG1"
    FIG2 = "FIG2"
    FIG3 = "FIG3"
    FIG4 = "FIG4"


COLUMNS = ("E_exact", "E_fit", "E_bs", "AD", "RD", "gamma")

_LONG_ROWS = (0, 1, 2, 3, 4, 5, 10, 15, 20, 25, 50, 75, 100)
_SHORT_ROWS = (0, 1, 2, 3, 4, 5, 10, 20, 50, 100)

PRESET_ROWS: dict[TablePreset, tuple[float, tuple[int, ...]]] = {
    TablePreset.TABLE_I: (1.0, _LONG_ROWS),
    TablePreset.TABLE_II: (4.0, _SHORT_ROWS),
    TablePreset.TABLE_III: (6.0, _SHORT_ROWS),
}

# energy-fit preset used for the E_fit column, by exponent
ENERGY_FIT_PRESETS = {1.0: "linear_energy", 4.0: "quartic_energy", 6.0: "sextic_energy"}

FIGURE_M_GRID = (1, 2, 3, 4, 6, 8, 10, 12, 15, 20, 30, 40)
FIGURE_N_MAX = 40


class ReportError(RuntimeError):
    """A solver failure while building a report row; names the (m, N) involved."""


@dataclass(frozen=True)
class TableRequest:
    preset: TablePreset = TablePreset.TABLE_I
    m: float | None = None
    N_list: tuple[int, ...] = ()
    columns: tuple[str, ...] = ("E_exact", "E_fit", "E_bs", "AD", "RD")
    format: OutputFormat = OutputFormat.CSV
    tol: float | None = None
    engine: Engine = Engine.DVR

    def __post_init__(self) -> None:
        object.__setattr__(self, "preset", TablePreset(self.preset))
        object.__setattr__(self, "format", OutputFormat(self.format))
        object.__setattr__(self, "engine", Engine(self.engine))
        unknown = [c for c in self.columns if c not in COLUMNS]
        if unknown:
            raise ValueError(f"unknown columns {unknown}; choose from {COLUMNS}")
        if self.preset is TablePreset.CUSTOM:
            if self.m is None or not self.N_list:
                raise ValueError("CUSTOM tables need m and N_list")
        else:
            m, rows = PRESET_ROWS[self.preset]
            object.__setattr__(self, "m", m)
            object.__setattr__(self, "N_list", rows)
        if any(int(N) != N or N < 0 for N in self.N_list):
            raise ValueError("N_list must hold non-negative integers")
        object.__setattr__(self, "N_list", tuple(int(N) for N in self.N_list))
        if "E_fit" in self.columns and float(self.m) not in ENERGY_FIT_PRESETS:
            raise ValueError(f"no energy fit is available for m={self.m}")


@dataclass(frozen=True)
class TableRow:
    N: int
    E_exact: float
    E_fit: float | None
    E_bs: float
    AD: float
    RD: float
    gamma: float


@dataclass(frozen=True)
class FigureRequest:
    figure_id: FigureId
    format: OutputFormat = OutputFormat.CSV
    tol: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "figure_id", FigureId(self.figure_id))
        object.__setattr__(self, "format", OutputFormat(self.format))


@dataclass(frozen=True)
class FigureData:
    figure_id: FigureId
    columns: tuple[str, ...]
    rows: list[tuple]
    meta: dict = field(default_factory=dict)


# ----------------------------------------------------------- formatting


def format_fixed(x: float, decimals: int = 4) -> str:
    """Round half-even on the exact binary value, ``decimals`` places."""
    q = Decimal(1).scaleb(-decimals)
    return str(Decimal(x).quantize(q, rounding=ROUND_HALF_EVEN))


def format_sci(x: float, digits: int = 2) -> str:
    """Scientific notation with ``digits`` significant figures, e.g. -9.7e-2."""
    d = Decimal(x)
    if d == 0:
        return "0." + "0" * (digits - 1) + "e0"
    # Decimal formatting rounds half-even and writes exponents unpadded
    return format(d, f".{digits - 1}e")


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


# ---------------------------------------------------------------- tables


def _spectrum(m: float, n_levels: int, tol: float | None, engine: Engine = Engine.DVR) -> list[float]:
    try:
        return list(exact_spectrum(PotentialSpec(m), n_levels, tol, engine).energies)
    except ConvergenceError as exc:
        raise ReportError(f"exact spectrum failed for m={m}, N<={n_levels - 1}: {exc}") from exc


def table_rows(req: TableRequest) -> list[TableRow]:
    """Full-precision rows for a table request, in the requested order."""
    spec = PotentialSpec(float(req.m))
    energies = _spectrum(spec.m, max(req.N_list) + 1, req.tol, req.engine)
    fit_name = ENERGY_FIT_PRESETS.get(spec.m)
    fit = preset(fit_name) if fit_name else None
    rows = []
    for N in req.N_list:
        E = energies[N]
        E_bs = bse_energy(spec, N)
        dev = deviation(E, E_bs)
        rows.append(
            TableRow(
                N=N,
                E_exact=E,
                E_fit=eval_energy_fit(fit, N) if fit else None,
                E_bs=E_bs,
                AD=dev.abs_dev,
                RD=dev.rel_dev,
                gamma=gamma_from_energy(spec, N, E),
            )
        )
    return rows


def _format_cell(column: str, value: float | None) -> str:
    if value is None:
        return ""
    if column in ("AD", "RD"):
        return format_sci(value)
    if column == "gamma":
        return format_fixed(value, 8)
    return format_fixed(value, 4)


def write_rows(columns: Sequence[str], cells: list[list[str]], fmt: OutputFormat, meta: dict) -> str:
    if fmt is OutputFormat.CSV:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(cells)
        return buf.getvalue()
    if fmt is OutputFormat.JSON:
        rows = [
            {c: (None if v == "" else (int(v) if c in ("N", "m") and v.isdigit() else float(v))) for c, v in zip(columns, row)}
            for row in cells
        ]
        return json.dumps({"metadata": meta, "rows": rows}, indent=2, sort_keys=False) + "\n"
    lines = ["| " + " | ".join(columns) + " |", "|" + "|".join("---" for _ in columns) + "|"]
    lines += ["| " + " | ".join(row) + " |" for row in cells]
    return "\n".join(lines) + "\n"


def render_table(req: TableRequest) -> str:
    """Table as CSV, JSON or Markdown text with the printed precision."""
    rows = table_rows(req)
    columns = ("N",) + tuple(req.columns)
    cells = [[str(r.N)] + [_format_cell(c, getattr(r, c)) for c in req.columns] for r in rows]
    meta = {
        "m": req.m,
        "engine": req.engine.value,
        "tolerance": req.tol if req.tol is not None else default_tolerance(max(req.N_list)),
        "version": _version(),
    }
    return write_rows(columns, cells, req.format, meta)


# --------------------------------------------------------------- figures


def emit_figure_data(req: FigureRequest) -> FigureData:
    """Data series behind one figure; gamma values come from exact spectra."""
    fid = req.figure_id
    if fid is FigureId.FIG1:
        rows = []
        for m in FIGURE_M_GRID:
            spec = PotentialSpec(float(m))
            E0 = _spectrum(spec.m, 1, req.tol)[0]
            rows.append((m, deviation(E0, bse_energy(spec, 0)).rel_dev))
        limit = 1.0 - square_well_energies(0, "BS") / square_well_energies(0, "EXACT")
        return FigureData(fid, ("m", "RD_ground"), rows, {"limit_m_to_infinity": limit})
    if fid is FigureId.FIG2:
        rows = []
        for m in FIGURE_M_GRID:
            spec = PotentialSpec(float(m))
            E = _spectrum(spec.m, 2, req.tol)
            rows.append(
                (m, gamma_from_energy(spec, 0, E[0]), gamma_from_energy(spec, 1, E[1]), eval_gamma0_vs_m(m))
            )
        return FigureData(fid, ("m", "gamma_0", "gamma_1", "gamma_0_fit"), rows, {"limit_m_to_infinity": 0.5})
    n_levels = FIGURE_N_MAX + 1
    if fid is FigureId.FIG3:
        series = {}
        for m in (4.0, 6.0):
            spec = PotentialSpec(m)
            E = _spectrum(m, n_levels, req.tol)
            series[m] = [gamma_from_energy(spec, N, E[N]) for N in range(n_levels)]
        rows = [(N, series[4.0][N], series[6.0][N]) for N in range(n_levels)]
        return FigureData(fid, ("N", "gamma_m4", "gamma_m6"), rows)
    spec = PotentialSpec(1.0)
    E = _spectrum(1.0, n_levels, req.tol)
    rows = [(N, "even" if N % 2 == 0 else "odd", gamma_from_energy(spec, N, E[N])) for N in range(n_levels)]
    return FigureData(fid, ("N", "parity", "gamma"), rows)


def _fig_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return format_sci(value, 12) if abs(value) < 1e-3 else format_fixed(value, 12)


def render_figure_data(data: FigureData, fmt: OutputFormat | str = OutputFormat.CSV) -> str:
    fmt = OutputFormat(fmt)
    cells = [[_fig_cell(v) for v in row] for row in data.rows]
    if fmt is OutputFormat.JSON:
        rows = [
            {c: (v if isinstance(v, (str, int)) else float(_fig_cell(v))) for c, v in zip(data.columns, row)}
            for row in data.rows
        ]
        meta = {"figure": data.figure_id.value, "version": _version(), **data.meta}
        return json.dumps({"metadata": meta, "rows": rows}, indent=2) + "\n"
    return write_rows(data.columns, cells, fmt, {})

