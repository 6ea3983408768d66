"""Steady states and time evolution of the master equation."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from .fock import SpaceConfig, number
from .model import Liouvillian, SystemParams, build_liouvillian

__all__ = [
    "SolverError",
    "SingularSystem",
    "StepTooLarge",
    "NoConvergence",
    "InvalidState",
    "DensityMatrix",
    "SolveReport",
    "steady_state",
    "evolve",
    "converged_steady_state",
    "N_MAX_LIMIT",
]

log = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8
N_MAX_LIMIT = 60
N_MAX_STEP = 5


class SolverError(RuntimeError):
    """Base class for numerical failures."""


class SingularSystem(SolverError):
    """The trace-constrained steady-state system is rank deficient."""


class StepTooLarge(SolverError):
    """The RK4 step violates the stability guard ``dt * ||L|| <= 0.1``."""


class NoConvergence(SolverError):
    """Mean photon number did not settle before :data:`N_MAX_LIMIT`."""


class InvalidState(SolverError):
    """A computed density matrix breaks hermiticity, trace or positivity."""


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix on ``cfg`` with the parameters that produced it."""

    data: np.ndarray
    cfg: SpaceConfig
    params: SystemParams | None = None

    def __post_init__(self):
        d = self.cfg.dim
        if self.data.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got {self.data.shape}")

    @property
    def dim(self) -> int:
        return self.cfg.dim

    @property
    def hermiticity_error(self) -> float:
        return float(np.abs(self.data - self.data.conj().T).max())

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.data))

    @property
    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.data + self.data.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    @property
    def purity(self) -> float:
        return float(np.real(np.vdot(self.data.conj().T, self.data)))

    def validate(self) -> "DensityMatrix":
        """Raise :class:`InvalidState` unless hermitian, unit-trace and positive."""
        herm = self.hermiticity_error
        if herm >= HERMITICITY_TOL:
            raise InvalidState(f"hermiticity error {herm:.3e}")
        tr = abs(self.trace - 1.0)
        if tr >= TRACE_TOL:
            raise InvalidState(f"trace error {tr:.3e}")
        lam = self.min_eigenvalue
        if lam < -POSITIVITY_TOL:
            raise InvalidState(f"minimum eigenvalue {lam:.3e}")
        return self

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.trace(op @ self.data))


@dataclass(frozen=True)
class SolveReport:
    """Diagnostics of one steady-state solve.

    ``truncation_shift`` is ``None`` unless the solve went through
    :func:`converged_steady_state`.
    """

    residual: float
    norm: float
    n_max_used: int
    truncation_shift: float | None = None
    hermiticity_error: float = 0.0
    trace_error: float = 0.0
    min_eigenvalue: float = 0.0

    @property
    def relative_residual(self) -> float:
        return self.residual / self.norm if self.norm else self.residual


def _population_block(matrix: sp.csr_matrix, d: int) -> np.ndarray:
    """Indices of the decoupled block of ``matrix`` that holds all populations.

    Coherences that never couple to the diagonal relax to zero and can be
    dropped from the linear solve.
    """
    pattern = sp.csr_matrix(
        (np.ones(matrix.nnz), matrix.indices, matrix.indptr), shape=matrix.shape
    )
    _, labels = connected_components(pattern, directed=False)
    diag = np.arange(d) * (d + 1)
    block = labels[0]
    if np.any(labels[diag] != block):
        raise SingularSystem("populations split into uncoupled blocks; steady state is not unique")
    return np.flatnonzero(labels == block)


def steady_state(L: Liouvillian) -> tuple[DensityMatrix, SolveReport]:
    """Solve ``L vec(rho) = 0`` with ``Tr rho = 1``.

    The row of the ``(0, 0)`` element is replaced by the trace functional and
    the square system is factorized by sparse LU.  Only the block of ``L``
    connected to the populations enters the factorization.
    """
    d = L.hilbert_dim
    matrix = L.matrix
    keep = _population_block(matrix, d)
    n = len(keep)
    sub = matrix[keep][:, keep].tocsr()
    # keep is sorted and contains 0, so row 0 is the rho[0, 0] equation
    sub.data[sub.indptr[0] : sub.indptr[1]] = 0.0
    diag_pos = np.flatnonzero(np.isin(keep, np.arange(d) * (d + 1)))
    trace_row = sp.csr_matrix(
        (np.ones(len(diag_pos), dtype=complex), (np.zeros(len(diag_pos), dtype=int), diag_pos)),
        shape=(n, n),
    )
    sub = sub + trace_row
    rhs = np.zeros(n, dtype=complex)
    rhs[0] = 1.0
    try:
        lu = spla.splu(sub.tocsc())
    except RuntimeError as exc:
        raise SingularSystem(str(exc)) from exc
    x_sub = lu.solve(rhs)
    if not np.all(np.isfinite(x_sub)):
        raise SingularSystem("non-finite steady-state solution")
    x = np.zeros(d * d, dtype=complex)
    x[keep] = x_sub
    rho = DensityMatrix(x.reshape(d, d, order="F"), L.cfg, L.params)
    report = SolveReport(
        residual=float(np.linalg.norm(matrix @ x, 1)),
        norm=L.norm(),
        n_max_used=L.cfg.n_max,
        hermiticity_error=rho.hermiticity_error,
        trace_error=abs(rho.trace - 1.0),
        min_eigenvalue=rho.min_eigenvalue,
    )
    rho.validate()
    return rho, report


def evolve(rho0: DensityMatrix, L: Liouvillian, t_final: float, dt: float) -> DensityMatrix:
    """Integrate the master equation with fixed-step classical RK4.

    The number of steps is ``ceil(t_final / dt)`` and the step is shrunk so
    the last one lands on ``t_final`` exactly.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if t_final < 0:
        raise ValueError(f"t_final must be >= 0, got {t_final}")
    if rho0.cfg != L.cfg:
        raise ValueError("state and Liouvillian live on different spaces")
    norm = L.norm()
    if dt * norm > 0.1:
        raise StepTooLarge(f"dt * ||L|| = {dt * norm:.3g} exceeds 0.1; use dt <= {0.1 / norm:.3g}")
    if t_final == 0:
        return rho0
    steps = math.ceil(t_final / dt - 1e-12)
    h = t_final / steps
    m = L.matrix
    x = rho0.data.reshape(-1, order="F").astype(complex)
    for _ in range(steps):
        k1 = m @ x
        k2 = m @ (x + 0.5 * h * k1)
        k3 = m @ (x + 0.5 * h * k2)
        k4 = m @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    d = L.hilbert_dim
    return DensityMatrix(x.reshape(d, d, order="F"), L.cfg, L.params)


def _mean_photon(rho: DensityMatrix) -> float:
    return float(np.real(np.trace(number(rho.cfg) @ rho.data)))


def converged_steady_state(
    p: SystemParams,
    n_max_start: int = 15,
    tol: float = 1e-6,
    include_atom: bool = True,
) -> tuple[DensityMatrix, SolveReport]:
    """Steady state with the Fock cutoff raised until the mean photon number settles.

    The cutoff starts at ``n_max_start`` and grows in steps of 5 until
    ``|<a+a>(n_max) - <a+a>(n_max + 5)| < tol``.  The state at ``n_max`` is
    returned; the report carries that shift.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    n_max = n_max_start
    rho, report = steady_state(build_liouvillian(p, SpaceConfig(n_max, include_atom)))
    while n_max <= N_MAX_LIMIT:
        bigger, bigger_report = steady_state(
            build_liouvillian(p, SpaceConfig(n_max + N_MAX_STEP, include_atom))
        )
        shift = abs(_mean_photon(rho) - _mean_photon(bigger))
        if shift < tol:
            return rho, replace(report, truncation_shift=shift)
        log.debug("n_max=%d shift=%.3e, raising cutoff", n_max, shift)
        n_max += N_MAX_STEP
        rho, report = bigger, bigger_report
    raise NoConvergence(f"mean photon number not converged to {tol:g} by n_max={N_MAX_LIMIT}")
