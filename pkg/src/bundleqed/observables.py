"""Photon statistics, reduced cavity states, Wigner maps, coherent diagnostics."""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import TruncationUnreliableError

R_UNDEFINED_P1 = 1e-12


@dataclass(frozen=True)
class PhotonDistribution:
    """Stationary P(n) with its derived scalars.

    `r` (= P(2)/P(1)) and `ratio31` (= P(3)/P(1)) are None when P(1)
    underflows: a sweep must be able to distinguish "no photons" from
    "bundle-perfect".
    """

    probs: np.ndarray
    mean_n: float
    r: float | None
    ratio31: float | None


def distribution_from_probs(probs: np.ndarray) -> PhotonDistribution:
    probs = np.asarray(probs, dtype=float)
    mean_n = float(probs @ np.arange(len(probs)))
    if probs[1] < R_UNDEFINED_P1:
        r = ratio31 = None
    else:
        r = float(probs[2] / probs[1]) if len(probs) > 2 else 0.0
        ratio31 = float(probs[3] / probs[1]) if len(probs) > 3 else 0.0
    return PhotonDistribution(probs=probs, mean_n=mean_n, r=r, ratio31=ratio31)


def photon_distribution(rho: np.ndarray) -> PhotonDistribution:
    """P(n) = <G,n|rho|G,n> + <X,n|rho|X,n> (trace over the 2LS)."""
    dim = rho.shape[0]
    n_fock = dim // 2
    diag = np.real(np.diag(rho))
    return distribution_from_probs(diag[:n_fock] + diag[n_fock:])


def reduce_cavity(rho: np.ndarray) -> np.ndarray:
    """Partial trace over the 2LS; returns the (n_max+1) x (n_max+1) cavity state."""
    dim = rho.shape[0]
    n_fock = dim // 2
    return rho[:n_fock, :n_fock] + rho[n_fock:, n_fock:]


@dataclass(frozen=True)
class WignerMap:
    """W(alpha) sampled on a rectangular grid in the complex plane."""

    re_alpha: np.ndarray
    im_alpha: np.ndarray
    values: np.ndarray  # shape (len(im_alpha), len(re_alpha))
    truncation_warning: bool

    def normalization(self) -> float:
        """Riemann-sum integral of W over the grid (should be ~1)."""
        dre = self.re_alpha[1] - self.re_alpha[0]
        dim = self.im_alpha[1] - self.im_alpha[0]
        return float(self.values.sum() * dre * dim)


def default_wigner_grid(mean_n: float, points: int = 101):
    """Square grid covering |Re alpha|, |Im alpha| <= max(2, 2 sqrt(mean_n))."""
    half = max(2.0, 2.0 * np.sqrt(max(mean_n, 0.0)))
    axis = np.linspace(-half, half, points)
    return axis, axis.copy()


def wigner_workspace_size(n_state: int, alpha_max: float) -> int:
    """Fock states needed for a faithful truncated displacement.

    Displacing the highest occupied state by the farthest grid point reaches
    mean index (sqrt(n) + |alpha|)^2; a few standard deviations of headroom
    keep the leaked weight negligible.
    """
    reach = (np.sqrt(max(n_state - 1, 0)) + alpha_max) ** 2
    return max(n_state, int(np.ceil(reach + 5.0 * np.sqrt(reach) + 12.0)))


def wigner(rho_cav: np.ndarray, re_alpha, im_alpha,
           n_workspace: int | None = None) -> WignerMap:
    """Displaced-parity Wigner function, W = (2/pi) Tr[rho D P D^dag].

    P = diag((-1)^n) and D = expm(alpha a^dag - conj(alpha) a) is built from
    truncated ladder operators on a workspace large enough that displacing
    the state to the farthest grid point does not hit the truncation edge
    (by default sized from the grid; see wigner_workspace_size).  The phase
    of alpha is absorbed into a diagonal rotation so that the Hermitian
    generator i(a^dag - a) is diagonalized only once for the whole grid, and
    only the rows of D that meet the state are ever formed.
    """
    re_alpha = np.asarray(re_alpha, dtype=float)
    im_alpha = np.asarray(im_alpha, dtype=float)
    m = rho_cav.shape[0]

    warn = float(np.real(rho_cav[-1, -1])) > 1e-6

    alpha_max = float(np.hypot(np.max(np.abs(re_alpha)), np.max(np.abs(im_alpha))))
    big = wigner_workspace_size(m, alpha_max) if n_workspace is None else n_workspace
    if big < m:
        raise ValueError(f"workspace {big} smaller than the state ({m})")
    idx = np.arange(big)
    ladder = np.diag(np.sqrt(np.arange(1, big, dtype=float)), 1)
    herm_gen = 1j * (ladder.conj().T - ladder)          # i(a^dag - a), Hermitian
    lam, basis = np.linalg.eigh(herm_gen)
    basis_rows = basis[:m, :]
    parity = (-1.0) ** idx

    values = np.empty((len(im_alpha), len(re_alpha)))
    for iy, y in enumerate(im_alpha):
        for ix, x in enumerate(re_alpha):
            alpha = complex(x, y)
            mod, theta = abs(alpha), np.angle(alpha)
            # D(alpha) = R(theta) expm(|alpha| (a^dag - a)) R(theta)^dag
            rows = (basis_rows * np.exp(-1j * mod * lam)) @ basis.conj().T
            rot = np.exp(1j * theta * idx)
            rows = (rot[:m, None] * rows) * rot.conj()[None, :]
            dpd = (rows * parity) @ rows.conj().T       # m x m block of D P D^dag
            values[iy, ix] = (2.0 / np.pi) * np.real(np.einsum("ij,ji->", rho_cav, dpd))
    return WignerMap(re_alpha=re_alpha, im_alpha=im_alpha, values=values,
                     truncation_warning=warn)


def coherent_state(alpha: complex, n_fock: int) -> np.ndarray:
    """Truncated coherent state, renormalized on the truncated space."""
    amp = np.zeros(n_fock, dtype=complex)
    if alpha == 0:
        amp[0] = 1.0
        return amp
    n = np.arange(n_fock)
    log_mag = n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1.0)
    amp = np.exp(log_mag + 1j * n * np.angle(alpha))
    return amp / np.linalg.norm(amp)


def coherent_fidelity(rho_cav: np.ndarray):
    """Amplitude alpha = Tr(rho a) and overlap with the coherent state |alpha>."""
    n_fock = rho_cav.shape[0]
    ladder = np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), 1)
    alpha = complex(np.einsum("ij,ji->", rho_cav, ladder))
    if abs(alpha) ** 2 > (n_fock - 1) / 2:
        raise TruncationUnreliableError(
            f"|alpha|^2 = {abs(alpha)**2:.2f} too large for n_max = {n_fock - 1}")
    ket = coherent_state(alpha, n_fock)
    fidelity = float(np.real(ket.conj() @ rho_cav @ ket))
    return alpha, fidelity
