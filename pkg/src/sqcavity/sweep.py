"""Scenarios, parameter sweeps and CSV output."""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .model import BathKind, BathSpec, SystemParams
from .observables import DEFAULT_THRESHOLD, PhotonDistribution, mean_photon, photon_distribution
from .solver import SolveReport, SolverError, converged_steady_state

__all__ = [
    "ValidationError",
    "PointError",
    "ScenarioName",
    "SweepAxis",
    "SweepGrid",
    "Scenario",
    "SweepResult",
    "SPECTRUM_COLUMNS",
    "MAP_COLUMNS",
    "DISTRIBUTION_COLUMNS",
    "run_spectrum",
    "run_map",
    "run_distribution",
    "distribution_result",
    "with_squeezing",
    "local_maxima",
    "emit_csv",
    "to_csv_text",
    "format_value",
]

SPECTRUM_COLUMNS = ("delta_c_over_g", "mean_photon", "mean_photon_thermal", "delta_n")
MAP_COLUMNS = ("r", "delta_c_over_g", "delta_n")
DISTRIBUTION_COLUMNS = ("n", "p_n")


class ValidationError(ValueError):
    """A scenario or configuration breaks one of its invariants."""


class PointError(SolverError):
    """Solver failure at one grid point; ``point`` names the coordinates."""

    def __init__(self, point: dict, cause: Exception):
        self.point = point
        self.cause = cause
        where = ", ".join(f"{k}={v!r}" for k, v in point.items())
        super().__init__(f"{type(cause).__name__} at {where}: {cause}")


class ScenarioName(str, enum.Enum):
    EMPTY_THERMAL = "EmptyThermal"
    EMPTY_SQUEEZED = "EmptySqueezed"
    ATOM_THERMAL = "AtomThermal"
    ATOM_SQUEEZED = "AtomSqueezed"
    ATOM_COHERENT_THERMAL = "AtomCoherentThermal"
    ATOM_COHERENT_SQUEEZED = "AtomCoherentSqueezed"

    @property
    def has_atom(self) -> bool:
        return self.value.startswith("Atom")

    @property
    def coherent(self) -> bool:
        return "Coherent" in self.value

    @property
    def squeezed(self) -> bool:
        return self.value.endswith("Squeezed")


@dataclass(frozen=True)
class SweepAxis:
    param: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.param not in ("delta_c", "r"):
            raise ValidationError(f"sweep parameter must be delta_c or r, got {self.param!r}")
        if not self.start < self.stop:
            raise ValidationError(f"sweep start {self.start} must be below stop {self.stop}")
        if self.points < 2:
            raise ValidationError(f"sweep needs at least 2 points, got {self.points}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.points - 1)


@dataclass(frozen=True)
class SweepGrid:
    """Two-dimensional (r, delta_c) grid; rows run r-major."""

    delta_c: SweepAxis
    r: SweepAxis

    def __post_init__(self):
        if self.delta_c.param != "delta_c" or self.r.param != "r":
            raise ValidationError("grid axes must be (delta_c, r)")
        if self.r.start < 0:
            raise ValidationError(f"r axis must be >= 0, got start {self.r.start}")


@dataclass(frozen=True)
class Scenario:
    """A named physical setup with its sweep and numerical controls.

    ``params.delta_c`` is the detuning used when nothing is swept.
    """

    name: ScenarioName
    params: SystemParams
    sweep: SweepAxis | SweepGrid | None = None
    n_max: int = 15
    threshold: float = DEFAULT_THRESHOLD
    tol: float = 1e-6

    def __post_init__(self):
        name = ScenarioName(self.name)
        object.__setattr__(self, "name", name)
        p = self.params
        if not name.has_atom and p.g != 0:
            raise ValidationError(f"{name.value} requires g = 0, got g={p.g}")
        if name.has_atom and not p.g > 0:
            raise ValidationError(f"{name.value} requires g > 0")
        if name.coherent and not p.eta > 0:
            raise ValidationError(f"{name.value} requires eta > 0")
        want = BathKind.SQUEEZED_VACUUM if name.squeezed else BathKind.THERMAL
        if p.bath.kind is not want:
            raise ValidationError(f"{name.value} requires a {want.value} bath, got {p.bath.kind.value}")
        if self.n_max < 1:
            raise ValidationError(f"n_max must be >= 1, got {self.n_max}")
        if not 0 <= self.threshold:
            raise ValidationError(f"threshold must be >= 0, got {self.threshold}")

    @property
    def include_atom(self) -> bool:
        return self.name.has_atom


def with_squeezing(s: Scenario, r: float) -> Scenario:
    """Copy of ``s`` at squeezing ``r``; thermal scenarios get ``nbar = sinh^2 r``."""
    if r < 0:
        raise ValidationError(f"r must be >= 0, got {r}")
    bath = BathSpec.squeezed(r, s.params.bath.phi) if s.name.squeezed else BathSpec.thermal(np.sinh(r) ** 2)
    return replace(s, params=replace(s.params, bath=bath))


@dataclass
class SweepResult:
    """Ordered table of sweep rows.

    ``reports[i]`` holds the solve reports behind ``rows[i]`` (main solve
    first, reference solve second when there is one).
    """

    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    reports: list[tuple[SolveReport, ...]] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([np.nan if row[i] is None else row[i] for row in self.rows], dtype=float)

    def all_reports(self) -> list[SolveReport]:
        return [rep for group in self.reports for rep in group]


# --- point solves -----------------------------------------------------------
# Module-level so they pickle for process pools.


@dataclass(frozen=True)
class _Task:
    params: SystemParams
    reference: SystemParams | None
    n_max: int
    tol: float
    include_atom: bool
    point: tuple


def _solve_task(task: _Task) -> tuple[float, float | None, tuple[SolveReport, ...]]:
    try:
        rho, rep = converged_steady_state(task.params, task.n_max, task.tol, task.include_atom)
        main = mean_photon(rho)
        if task.reference is None:
            return main, None, (rep,)
        rho_ref, rep_ref = converged_steady_state(task.reference, task.n_max, task.tol, task.include_atom)
        return main, mean_photon(rho_ref), (rep, rep_ref)
    except SolverError as exc:
        raise PointError(dict(task.point), exc) from exc


def _run(tasks: Sequence[_Task], workers: int | None) -> list:
    if not workers or workers == 1 or len(tasks) < 2:
        return [_solve_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(tasks) // (4 * workers))
        return list(pool.map(_solve_task, tasks, chunksize=chunk))


def _twin(p: SystemParams) -> SystemParams | None:
    if p.bath.kind is BathKind.SQUEEZED_VACUUM:
        return replace(p, bath=p.bath.thermal_twin())
    return None


def _map_reference(p: SystemParams) -> SystemParams:
    # thermal maps measure the change caused by the probe
    if p.bath.kind is BathKind.SQUEEZED_VACUUM:
        return replace(p, bath=p.bath.thermal_twin())
    return replace(p, eta=0.0)


def _ratio(delta_c: float, g: float) -> float:
    return delta_c / g if g else math.nan


def run_spectrum(s: Scenario, workers: int | None = None) -> SweepResult:
    """Mean photon number across the detuning axis of ``s``.

    Squeezed scenarios also solve the matched thermal twin at each point and
    record the difference.  With ``g = 0`` a raw ``delta_c`` column leads the
    table because the normalized detuning is undefined.
    """
    axis = s.sweep
    if not isinstance(axis, SweepAxis) or axis.param != "delta_c":
        raise ValidationError("run_spectrum needs a delta_c sweep axis")
    g = s.params.g
    tasks = []
    for dc in axis.values():
        p = replace(s.params, delta_c=float(dc))
        tasks.append(_Task(p, _twin(p), s.n_max, s.tol, s.include_atom, (("delta_c", float(dc)),)))
    columns = SPECTRUM_COLUMNS if g else ("delta_c",) + SPECTRUM_COLUMNS
    result = SweepResult(columns)
    for task, (main, ref, reps) in zip(tasks, _run(tasks, workers)):
        dc = task.params.delta_c
        row = (_ratio(dc, g), main, ref, None if ref is None else main - ref)
        result.rows.append(row if g else (dc,) + row)
        result.reports.append(reps)
    return result


def run_map(s: Scenario, grid: SweepGrid | None = None, workers: int | None = None) -> SweepResult:
    """Excess photon number over the (r, delta_c) grid, r-major.

    Squeezed scenarios subtract the matched thermal twin.  Thermal scenarios
    subtract the same thermal system without the probe.
    """
    grid = grid if grid is not None else s.sweep
    if not isinstance(grid, SweepGrid):
        raise ValidationError("run_map needs a (delta_c, r) grid")
    if not s.params.g > 0:
        raise ValidationError("maps are normalized by g and need g > 0")
    g = s.params.g
    tasks = []
    for r in grid.r.values():
        base = with_squeezing(s, float(r)).params
        for dc in grid.delta_c.values():
            p = replace(base, delta_c=float(dc))
            point = (("r", float(r)), ("delta_c", float(dc)))
            tasks.append(_Task(p, _map_reference(p), s.n_max, s.tol, s.include_atom, point))
    result = SweepResult(MAP_COLUMNS)
    for task, (main, ref, reps) in zip(tasks, _run(tasks, workers)):
        r = dict(task.point)["r"]
        result.rows.append((r, _ratio(task.params.delta_c, g), main - ref))
        result.reports.append(reps)
    return result


def run_distribution(s: Scenario, delta_c: float | None = None, n_report: int | None = None):
    """Photon-number probabilities ``P_0 .. P_n_report`` at one detuning.

    Returns ``(distribution, report)``.  ``delta_c`` defaults to the scenario
    detuning and ``n_report`` to ``s.n_max``.
    """
    n_report = s.n_max if n_report is None else n_report
    if not 0 <= n_report <= s.n_max:
        raise ValidationError(f"n_report must lie in 0..{s.n_max}, got {n_report}")
    dc = s.params.delta_c if delta_c is None else float(delta_c)
    p = replace(s.params, delta_c=dc)
    try:
        rho, rep = converged_steady_state(p, s.n_max, s.tol, s.include_atom)
    except SolverError as exc:
        raise PointError({"delta_c": dc}, exc) from exc
    full = photon_distribution(rho)
    return PhotonDistribution(full.probs[: n_report + 1].copy()), rep


def distribution_result(P: PhotonDistribution, report: SolveReport | None = None) -> SweepResult:
    rows = [(n, float(p)) for n, p in enumerate(P.probs)]
    return SweepResult(DISTRIBUTION_COLUMNS, rows, [(report,)] if report else [])


def local_maxima(values: Iterable[float]) -> np.ndarray:
    """Indices of interior points strictly above both neighbours."""
    y = np.asarray(list(values), dtype=float)
    if len(y) < 3:
        return np.array([], dtype=int)
    inner = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])
    return np.flatnonzero(inner) + 1


# --- CSV ------------------------------------------------------------------------


def format_value(value) -> str:
    """Shortest round-trip text for a cell; ``None`` becomes an empty cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write(result: SweepResult, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([format_value(v) for v in row])


def emit_csv(result: SweepResult, destination) -> None:
    """Write ``result`` as CSV to a path or an open text handle."""
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", newline="", encoding="utf-8") as handle:
            _write(result, handle)
    else:
        _write(result, destination)


def to_csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    _write(result, buf)
    return buf.getvalue()
