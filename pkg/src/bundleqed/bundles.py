"""Closed-form bundle results: the ideal 1/n statistics, laser-dressed-state
energies, and the N-photon resonance conditions of the dressed-state picture.

Everything here is a pure function of rates in one consistent angular
frequency unit; no Hilbert space is involved.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfigurationError, MeanTooLargeError


@dataclass(frozen=True)
class DressedStatePair:
    """Rotating-frame energies of the laser-dressed states |+> and |->."""

    e_plus: float
    e_minus: float

    @property
    def splitting(self) -> float:
        return self.e_plus - self.e_minus


def ideal_bundle_distribution(n_bundle: int, mean_n: float):
    """Photon-number probabilities of a perfect N-photon bundle source.

    P(0) = 1 - (mean_n/N) * H_N with H_N the N-th harmonic number,
    P(n) = (mean_n/N) / n for 1 <= n <= N, and P(n > N) = 0.  The
    distribution sums to one and has mean exactly `mean_n`.
    """
    if n_bundle < 1:
        raise ValueError(f"bundle size must be >= 1, got {n_bundle}")
    if mean_n < 0:
        raise ValueError(f"mean photon number must be >= 0, got {mean_n}")
    harmonic = np.sum(1.0 / np.arange(1, n_bundle + 1))
    p0 = 1.0 - mean_n * harmonic / n_bundle
    if p0 < 0:
        raise MeanTooLargeError(
            f"mean_n={mean_n} exceeds the bundle capacity N/H_N={n_bundle / harmonic:.6g}"
        )
    probs = np.zeros(n_bundle + 1)
    probs[0] = p0
    probs[1:] = (mean_n / n_bundle) / np.arange(1, n_bundle + 1)
    return probs


def dressed_energies(delta_lx: float, f: float) -> DressedStatePair:
    """Diagonalize the driven 2LS (cavity neglected) in the rotating frame.

    The 2x2 Hamiltonian is [[0, f], [f, -delta_lx]] in the {|G>, |X>} basis.
    """
    if f < 0:
        raise ValueError("drive strength must be >= 0")
    half = np.sqrt(f * f + 0.25 * delta_lx * delta_lx)
    return DressedStatePair(e_plus=-0.5 * delta_lx + half, e_minus=-0.5 * delta_lx - half)


def bundle_resonance_detuning(n_bundle: int, f: float, delta_cx: float) -> float:
    """Laser-exciton detuning at which the N-photon bundle resonance sits.

    Valid for N >= 2; the N = 1 case is singular here, use
    one_photon_resonance_detuning instead.
    """
    if n_bundle < 2:
        raise ValueError("bundle resonance formula needs N >= 2; "
                         "use one_photon_resonance_detuning for N = 1")
    if f <= 0:
        raise ValueError("drive strength must be > 0")
    nsq = n_bundle * n_bundle
    root = np.sqrt(4.0 * (nsq - 1) * f * f + nsq * delta_cx * delta_cx)
    return (root + delta_cx) / (nsq - 1) + delta_cx


def one_photon_resonance_detuning(f: float, delta_cx: float) -> float:
    """Detuning of the single-photon (blockade) resonance.

    Solves e_+ - e_- = -(delta_cx - delta_lx), the condition that one
    rotating-frame cavity photon bridges the dressed-state gap:

        delta_lx = (delta_cx^2 - 4 f^2) / (2 delta_cx).

    The retained root requires delta_lx - delta_cx > 0 (cavity below the
    drive in the rotating frame, matching the bundle-resonance geometry).
    """
    if f <= 0:
        raise ValueError("drive strength must be > 0")
    if delta_cx == 0:
        raise DegenerateConfigurationError(
            "delta_cx = 0 makes the one-photon matching condition degenerate")
    delta_lx = (delta_cx * delta_cx - 4.0 * f * f) / (2.0 * delta_cx)
    if delta_lx - delta_cx <= 0:
        raise DegenerateConfigurationError(
            "selected root violates delta_lx > delta_cx; no matching resonance")
    return delta_lx


def resonance_identity_residual(n_bundle: int, f: float, delta_cx: float) -> float:
    """|dressed splitting + N * delta_cl| at the Eq.-style bundle detuning.

    Zero (to rounding) iff the closed-form detuning equals the condition
    that N rotating-frame photons fit between the dressed states.
    """
    if n_bundle < 2:
        raise ValueError("identity defined for N >= 2")
    delta_lx = bundle_resonance_detuning(n_bundle, f, delta_cx)
    delta_cl = delta_cx - delta_lx
    gap = dressed_energies(delta_lx, f).splitting
    return abs(gap + n_bundle * delta_cl)
