"""One-dimensional steady-state parameter scans with CSV output.

Rows are solved independently (optionally in a process pool), gathered back
into axis order, and never abort the sweep: a failed solve is recorded in
the row's status column.  The CSV schema is fixed; the plotting component
depends on the column names:

    <axis>, <axis>_over_g, status, n_max_used, residual,
    mean_n, r, ratio31, P0 ... P<n_report>

'#'-prefixed metadata lines carry the resolved base parameters, the axis,
and the package version.  Undefined ratios (P(1) underflow) are written as
empty fields, never as 0 or inf.
"""

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import SystemParams
from .observables import photon_distribution
from .solve import steady_state_autotruncate, steady_state_for

SWEEP_AXES = ("delta_lx", "gamma_phi", "kappa")


@dataclass(frozen=True)
class SweepSpec:
    base: SystemParams
    axis: str
    points: np.ndarray
    n_max: int | None = None        # None -> per-row autotruncation
    n_max_start: int = 8
    n_report: int = 6

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"axis must be one of {SWEEP_AXES}")
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or len(pts) == 0 or np.any(np.diff(pts) <= 0):
            raise ValueError("points must be a non-empty, strictly increasing 1-D array")
        object.__setattr__(self, "points", pts)


@dataclass
class SweepRow:
    axis_value: float
    status: str
    n_max_used: int
    residual: float
    mean_n: float
    r: float | None
    ratio31: float | None
    probs: np.ndarray


@dataclass
class SweepTable:
    spec: SweepSpec
    rows: list = field(default_factory=list)

    def column(self, name):
        if name == "axis":
            return np.array([row.axis_value for row in self.rows])
        return np.array([getattr(row, name) if getattr(row, name) is not None else np.nan
                         for row in self.rows])


def linear_grid(start: float, stop: float, intervals: int) -> np.ndarray:
    return np.linspace(start, stop, intervals + 1)


def log_grid(start: float, stop: float, points: int) -> np.ndarray:
    if start <= 0 or stop <= start:
        raise ValueError("log grid needs 0 < start < stop")
    return np.geomspace(start, stop, points)


def refine_grid(base: np.ndarray, windows) -> np.ndarray:
    """Insert denser points inside (lo, hi, factor) windows.

    The refined step inside each window is the base step divided by the
    factor, anchored at the window's lower edge; duplicates are dropped.
    """
    grids = [base]
    step = base[1] - base[0]
    for lo, hi, factor in windows:
        grids.append(np.arange(lo, hi + step / (2 * factor), step / factor))
    merged = np.unique(np.concatenate(grids))
    keep = np.ones(len(merged), dtype=bool)
    keep[1:] = np.diff(merged) > 1e-12 * max(abs(merged[0]), abs(merged[-1]), 1.0)
    return merged[keep]


def _solve_row(args):
    spec, value = args
    params = spec.base.replace(**{spec.axis: float(value)})
    try:
        if spec.n_max is None:
            result, dist = steady_state_autotruncate(params, spec.n_max_start)
        else:
            result = steady_state_for(params, spec.n_max)
            dist = photon_distribution(result.rho_ss)
    except Exception as exc:  # failures live in the row, never abort the sweep
        return SweepRow(axis_value=float(value), status=f"error:{type(exc).__name__}",
                        n_max_used=0, residual=np.nan, mean_n=np.nan,
                        r=None, ratio31=None,
                        probs=np.full(spec.n_report + 1, np.nan))
    probs = np.zeros(spec.n_report + 1)
    upto = min(spec.n_report + 1, len(dist.probs))
    probs[:upto] = dist.probs[:upto]
    return SweepRow(axis_value=float(value), status="ok",
                    n_max_used=result.n_max_used, residual=result.residual,
                    mean_n=dist.mean_n, r=dist.r, ratio31=dist.ratio31, probs=probs)


def run_sweep(spec: SweepSpec, *, workers: int = 1) -> SweepTable:
    """Solve every point of the spec; deterministic row order by axis value."""
    jobs = [(spec, value) for value in spec.points]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_solve_row, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        rows = [_solve_row(job) for job in jobs]
    return SweepTable(spec=spec, rows=rows)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return "nan" if np.isnan(value) else repr(float(value))
    return str(value)


def write_csv(table: SweepTable, path, metadata: dict | None = None) -> None:
    spec = table.spec
    meta = {"axis": spec.axis, "unit_system": spec.base.unit_system,
            "n_report": spec.n_report}
    meta.update(spec.base.as_dict())
    if metadata:
        meta.update(metadata)
    header = [spec.axis, f"{spec.axis}_over_g", "status", "n_max_used", "residual",
              "mean_n", "r", "ratio31"] + [f"P{n}" for n in range(spec.n_report + 1)]
    with open(path, "w", newline="") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in table.rows:
            writer.writerow(
                [_fmt(row.axis_value), _fmt(row.axis_value / spec.base.g), row.status,
                 row.n_max_used, _fmt(row.residual), _fmt(row.mean_n),
                 _fmt(row.r), _fmt(row.ratio31)] + [_fmt(p) for p in row.probs])


def read_csv(path):
    """Parse a sweep CSV back into (metadata, header, rows of floats-or-None)."""
    meta, header, rows = {}, None, []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value
                continue
            cells = next(csv.reader([line]))
            if header is None:
                header = cells
                continue
            parsed = []
            for cell in cells:
                if cell == "":
                    parsed.append(None)
                elif cell == "ok" or cell.startswith("error:"):
                    parsed.append(cell)
                else:
                    try:
                        parsed.append(float(cell))
                    except ValueError:
                        parsed.append(cell)
            rows.append(parsed)
    return meta, header, rows
