"""Steady states and time evolution of the master equation.

The stationary state solves L vec(rho) = 0 with Tr(rho) = 1 imposed by
replacing one row of L with the trace functional and doing a direct sparse
LU solve.  Time evolution integrates vec(rho_dot) = L vec(rho) with an
adaptive embedded Runge-Kutta scheme (DOP853) at rtol 1e-8.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .errors import (NoConvergenceError, NonUniqueSteadyStateError,
                     StiffnessError, TruncationFailureError)
from .fock import HilbertSpace, build_operators
from .liouville import Liouvillian, build_liouvillian, trace_functional, vectorize
from .model import SystemParams, build_hamiltonian, lindblad_channels
from .observables import PhotonDistribution, photon_distribution

RESIDUAL_TOL = 1e-9
POSITIVITY_TOL = 1e-8
EVOLVE_RTOL = 1e-8
TRACE_DRIFT_TOL = 1e-7


@dataclass(frozen=True)
class SteadyStateResult:
    rho_ss: np.ndarray
    residual: float
    n_max_used: int
    converged: bool


@dataclass(frozen=True)
class TimeSeries:
    """Observables on a time grid: <|X><X|>, <a^dag a>, and full P(n)."""

    times: np.ndarray
    proj_x: np.ndarray
    mean_n: np.ndarray
    pn: np.ndarray  # shape (len(times), n_max + 1)
    trace_drift: float = field(default=0.0)
    rho_final: np.ndarray | None = field(default=None)


def steady_state(liouvillian: Liouvillian, *, trace_row: int = 0,
                 residual_tol: float = RESIDUAL_TOL) -> SteadyStateResult:
    """Unique stationary state of the Liouvillian.

    The equation for the trace_row-th *diagonal* element is replaced by the
    trace constraint; diagonal rows are the ones made redundant by trace
    preservation, so any choice gives the same state.  A degenerate steady
    space surfaces as a singular linear system after the replacement.
    """
    dim = liouvillian.dim
    if not 0 <= trace_row < dim:
        raise ValueError(f"trace_row must index a diagonal element in [0, {dim})")
    row = trace_row * (dim + 1)
    lhs = liouvillian.matrix.tolil(copy=True)
    lhs[row, :] = trace_functional(dim)
    rhs = np.zeros(dim * dim, dtype=complex)
    rhs[row] = 1.0

    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            vec = spla.spsolve(lhs.tocsc(), rhs)
        except (spla.MatrixRankWarning, RuntimeError) as exc:
            raise NonUniqueSteadyStateError(
                "linear system singular after trace-row replacement; "
                "steady state is not unique") from exc
    if not np.all(np.isfinite(vec)):
        raise NonUniqueSteadyStateError(
            "singular steady-state system (non-finite solution)")

    rho = vec.reshape((dim, dim), order="F")
    rho = 0.5 * (rho + rho.conj().T)

    residual = float(np.max(np.abs(liouvillian.matrix @ vectorize(rho))))
    if residual > residual_tol:
        raise NoConvergenceError(
            f"steady-state residual {residual:.3e} above tolerance {residual_tol:.1e}")
    if abs(np.trace(rho) - 1.0) > 1e-8:
        raise NoConvergenceError(f"trace defect {abs(np.trace(rho) - 1.0):.3e}")
    lam_min = float(np.linalg.eigvalsh(rho).min())
    if lam_min < -POSITIVITY_TOL:
        raise NoConvergenceError(f"steady state not positive: min eigenvalue {lam_min:.3e}")

    return SteadyStateResult(rho_ss=rho, residual=residual,
                             n_max_used=liouvillian.space.n_max, converged=True)


def steady_state_for(params: SystemParams, n_max: int) -> SteadyStateResult:
    """Convenience: build space, H, channels and solve in one call."""
    space = HilbertSpace(n_max)
    h = build_hamiltonian(params, space)
    lv = build_liouvillian(h, lindblad_channels(params, space), space)
    return steady_state(lv)


def steady_state_autotruncate(params: SystemParams, n_max_start: int = 8,
                              *, n_max_ceiling: int = 120,
                              tail_tol: float = 1e-8,
                              r_tol: float = 1e-3):
    """Grow n_max by doubling until the photon distribution is converged.

    Converged once the top-state occupation P(n_max) < tail_tol and, when a
    previous truncation exists, the bundle ratio r moved by less than r_tol
    (two undefined ratios also count as stable).  Returns the result plus
    its PhotonDistribution.
    """
    if n_max_start < 4:
        raise ValueError("n_max_start must be >= 4")
    n_max = n_max_start
    prev_r = None
    have_prev = False
    while True:
        result = steady_state_for(params, n_max)
        dist = photon_distribution(result.rho_ss)
        tail_ok = dist.probs[-1] < tail_tol
        if have_prev:
            if prev_r is None and dist.r is None:
                r_ok = True
            elif prev_r is None or dist.r is None:
                r_ok = False
            else:
                r_ok = abs(dist.r - prev_r) < r_tol
        else:
            r_ok = True
        if tail_ok and r_ok:
            return result, dist
        prev_r, have_prev = dist.r, True
        if 2 * n_max > n_max_ceiling:
            raise TruncationFailureError(
                f"no truncation convergence below n_max = {n_max_ceiling} "
                f"(P(n_max) = {dist.probs[-1]:.3e} at n_max = {n_max})")
        n_max *= 2


def evolve(liouvillian: Liouvillian, rho0: np.ndarray, t_grid) -> TimeSeries:
    """Integrate the master equation, recording observables at grid points."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("time grid must be strictly increasing with >= 2 points")
    dim = liouvillian.dim
    if rho0.shape != (dim, dim):
        raise ValueError(f"rho0 shape {rho0.shape} does not match dim {dim}")

    gen = liouvillian.matrix
    t0 = float(t_grid[0])
    sol = solve_ivp(lambda _t, y: gen @ y, (t0, float(t_grid[-1])),
                    vectorize(rho0).astype(complex), t_eval=t_grid,
                    method="DOP853", rtol=EVOLVE_RTOL, atol=1e-12)
    if not sol.success:
        scale = float(np.abs(gen.diagonal()).max())
        raise StiffnessError(
            f"integrator failed ({sol.message}); fastest rate scale ~ {scale:.3e}")

    n_fock = liouvillian.space.n_fock
    n_t = len(t_grid)
    pn = np.empty((n_t, n_fock))
    proj_x = np.empty(n_t)
    traces = np.empty(n_t)
    rho = None
    for k in range(n_t):
        rho = sol.y[:, k].reshape((dim, dim), order="F")
        diag = np.real(np.diag(rho))
        pn[k] = diag[:n_fock] + diag[n_fock:]
        proj_x[k] = diag[n_fock:].sum()
        traces[k] = diag.sum()
    drift = float(np.max(np.abs(traces - traces[0])))
    if drift > TRACE_DRIFT_TOL:
        raise NoConvergenceError(f"trace drift {drift:.3e} above {TRACE_DRIFT_TOL:.1e}")
    mean_n = pn @ np.arange(n_fock)
    return TimeSeries(times=t_grid, proj_x=proj_x, mean_n=mean_n, pn=pn,
                      trace_drift=drift, rho_final=0.5 * (rho + rho.conj().T))


def evolve_params(params: SystemParams, n_max: int, rho0: np.ndarray, t_grid) -> TimeSeries:
    space = HilbertSpace(n_max)
    h = build_hamiltonian(params, space)
    lv = build_liouvillian(h, lindblad_channels(params, space), space)
    return evolve(lv, rho0, t_grid)
