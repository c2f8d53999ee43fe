"""Pure-dephasing rate calibration by envelope matching.

A reference exciton trajectory (typically produced by an external,
microscopically exact solver) is compared against the reduced model in which
the environment enters only through the Lindblad channel on |X><X|.  The
comparison runs with kappa = gamma = 0 and delta_lx = delta_cx = 0, in one
of three scenarios:

    a  driven system from |G, 0>,
    b  undriven (f = 0) from |G, 1>,
    c  undriven (f = 0) from |G, 2>.

The dephasing rate is the minimizer of the RMS difference between the upper
envelopes of <|X><X|>(t), evaluated at the reference's own maxima times so
that pure frequency renormalization is not penalized.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientOscillationError, TruncationUnreliableError
from .fock import G, HilbertSpace, density_matrix
from .model import SystemParams
from .solve import TimeSeries, evolve_params

SCENARIOS = ("a", "b", "c")
SEARCH_DECADES = (1e-6, 10.0)       # gamma_phi bracket in units of g
FLAT_ENVELOPE_TOL = 1e-3            # relative drop below which there is nothing to fit


@dataclass(frozen=True)
class ReferenceDynamics:
    times: np.ndarray
    exciton_occupation: np.ndarray
    scenario: str
    source_label: str = ""

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}")
        t = np.asarray(self.times, dtype=float)
        occ = np.asarray(self.exciton_occupation, dtype=float)
        if t.ndim != 1 or len(t) != len(occ) or np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing and match occupations")
        if np.any(occ < -1e-9) or np.any(occ > 1 + 1e-9):
            raise ValueError("occupations must lie in [0, 1]")


@dataclass(frozen=True)
class DephasingFit:
    gamma_phi: float
    residual: float
    degenerate: bool
    scenario: str
    evaluations: int


def extract_envelope(times, values):
    """Strict local maxima of the series; the upper envelope interpolates
    linearly through them.  Fails below three maxima."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    inner = np.arange(1, len(values) - 1)
    mask = (values[inner] > values[inner - 1]) & (values[inner] > values[inner + 1])
    idx = inner[mask]
    if len(idx) < 3:
        raise InsufficientOscillationError(
            f"found {len(idx)} local maxima, need >= 3 for an envelope")
    return times[idx], values[idx]


def _scenario_setup(scenario: str, params: SystemParams):
    """Model parameters and initial state of the matching procedure."""
    base = params.replace(gamma=0.0, kappa=0.0, delta_lx=0.0, delta_cx=0.0)
    if scenario == "a":
        n_max = 12
        return base, density_matrix(HilbertSpace(n_max), G, 0), n_max
    n_max = 4
    f0 = base.replace(f=0.0)
    n_init = 1 if scenario == "b" else 2
    return f0, density_matrix(HilbertSpace(n_max), G, n_init), n_max


def simulate_scenario(scenario: str, params: SystemParams, gamma_phi: float,
                      times) -> TimeSeries:
    """Exciton dynamics of the reduced model at a candidate dephasing rate."""
    model, rho0, n_max = _scenario_setup(scenario, params)
    series = evolve_params(model.replace(gamma_phi=gamma_phi), n_max, rho0, times)
    tail = float(series.pn[:, -1].max())
    if tail > 1e-6:
        raise TruncationUnreliableError(
            f"lossless cavity heated to P(n_max) = {tail:.2e} over the window; "
            "shorten the reference window")
    return series


def envelope_rms(reference: ReferenceDynamics, series: TimeSeries) -> float:
    """RMS envelope difference, resampled on the reference's maxima times."""
    t_ref, env_ref = extract_envelope(reference.times, reference.exciton_occupation)
    t_mod, env_mod = extract_envelope(series.times, series.proj_x)
    inside = (t_ref >= t_mod[0]) & (t_ref <= t_mod[-1])
    if inside.sum() < 3:
        return np.inf
    model_at_ref = np.interp(t_ref[inside], t_mod, env_mod)
    return float(np.sqrt(np.mean((model_at_ref - env_ref[inside]) ** 2)))


def fit_dephasing_rate(reference: ReferenceDynamics, params: SystemParams,
                       *, log_tol: float = 1e-3) -> DephasingFit:
    """Golden-section search of log gamma_phi over [1e-6, 10] g.

    An undamped reference (flat envelope) is reported as rate 0 with the
    degenerate flag; so is a minimizer stuck at the search boundary.
    """
    _t, env = extract_envelope(reference.times, reference.exciton_occupation)
    drop = (env.max() - env.min()) / max(env.max(), 1e-300)
    if drop < FLAT_ENVELOPE_TOL:
        return DephasingFit(gamma_phi=0.0, residual=0.0, degenerate=True,
                            scenario=reference.scenario, evaluations=0)

    lo = np.log(SEARCH_DECADES[0] * params.g)
    hi = np.log(SEARCH_DECADES[1] * params.g)
    evals = 0

    def objective(log_rate):
        nonlocal evals
        evals += 1
        try:
            series = simulate_scenario(reference.scenario, params,
                                       float(np.exp(log_rate)), reference.times)
            return envelope_rms(reference, series)
        except InsufficientOscillationError:
            return np.inf

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = objective(x1), objective(x2)
    while hi - lo > log_tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = objective(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = objective(x2)
    log_best = x1 if f1 <= f2 else x2
    best = float(np.exp(log_best))
    residual = min(f1, f2)
    at_edge = (log_best - np.log(SEARCH_DECADES[0] * params.g) < 2 * log_tol
               or np.log(SEARCH_DECADES[1] * params.g) - log_best < 2 * log_tol)
    return DephasingFit(gamma_phi=best, residual=float(residual),
                        degenerate=bool(at_edge), scenario=reference.scenario,
                        evaluations=evals)


def scale_dephasing_rate(gamma_phi_ref: float, f_ref: float, f: float) -> float:
    """Quadratic drive-strength scaling gamma_phi ~ f^2."""
    if f_ref <= 0:
        raise ValueError("reference drive strength must be > 0")
    return gamma_phi_ref * (f / f_ref) ** 2


def load_reference_csv(path, scenario: str) -> ReferenceDynamics:
    """Read a (time, occupation) CSV; '#' lines are metadata, header optional."""
    times, occs = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                t, occ = float(row[0]), float(row[1])
            except ValueError:
                continue  # header row
            times.append(t)
            occs.append(occ)
    return ReferenceDynamics(times=np.asarray(times), exciton_occupation=np.asarray(occs),
                             scenario=scenario, source_label=str(path))
