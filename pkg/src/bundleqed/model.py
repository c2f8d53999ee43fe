"""Rotating-frame model: parameter sets, the Hamiltonian, dissipation channels.

The Hamiltonian (divided by hbar, so every term is an angular frequency) is

    H = -delta_lx |X><X| + delta_cl a^dag a
        + g (sigma_+ a + sigma_- a^dag) + f (sigma_+ + sigma_-),

with delta_cl = delta_cx - delta_lx always derived, never stored.  Loss
channels are (sigma_-, gamma), (a, kappa) and, when gamma_phi > 0, the pure
dephasing channel (|X><X|, gamma_phi).
"""

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import bundles
from .fock import HilbertSpace, OperatorSet, build_operators
from .units import HBAR_MEV_PS, convert_rate

PRESET_NAMES = ("qd", "qd_weak_losses", "superconducting", "superconducting_bad_cavity")


@dataclass(frozen=True)
class SystemParams:
    """All model rates and detunings in one angular-frequency unit.

    `unit_system` records what that unit is ("per_ps" or "per_ns"); it is a
    label only and never enters the dynamics.
    """

    g: float
    f: float
    gamma: float
    kappa: float
    delta_lx: float
    delta_cx: float
    gamma_phi: float = 0.0
    unit_system: str = "per_ps"

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError("coupling g must be > 0")
        for name in ("f", "gamma", "kappa", "gamma_phi"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def delta_cl(self) -> float:
        """Cavity-laser detuning, always derived as delta_cx - delta_lx."""
        return self.delta_cx - self.delta_lx

    def replace(self, **kwargs) -> "SystemParams":
        return dataclasses.replace(self, **kwargs)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def build_hamiltonian(params: SystemParams, space: HilbertSpace) -> np.ndarray:
    """Rotating-frame Hamiltonian over hbar as a dense Hermitian matrix."""
    ops = build_operators(space)
    h = (-params.delta_lx * ops.proj_x
         + params.delta_cl * (ops.a_dag @ ops.a)
         + params.g * (ops.sigma_plus @ ops.a + ops.sigma_minus @ ops.a_dag)
         + params.f * (ops.sigma_plus + ops.sigma_minus))
    defect = np.max(np.abs(h - h.conj().T))
    if defect > 1e-12:
        raise AssertionError(f"Hamiltonian not Hermitian, defect {defect:.3e}")
    return h


def lindblad_channels(params: SystemParams, space: HilbertSpace,
                      ops: OperatorSet | None = None):
    """Loss channels as (operator, rate) pairs; zero-rate channels omitted."""
    if ops is None:
        ops = build_operators(space)
    channels = [(ops.sigma_minus, params.gamma), (ops.a, params.kappa)]
    if params.gamma_phi > 0:
        channels.append((ops.proj_x, params.gamma_phi))
    return [(op, rate) for op, rate in channels if rate > 0]


def preset(name: str) -> SystemParams:
    """The two platform parameter sets plus their loss variants.

    All presets share f = 32 g and delta_cx = -60 g, and default delta_lx to
    the two-photon bundle resonance.  Quantum-dot presets are stored in
    per_ps, superconducting ones in per_ns, keeping magnitudes near unity.
    """
    if name in ("qd", "qd_weak_losses"):
        g = convert_rate(0.02, "meV", "per_ps")              # hbar g = 0.02 meV
        if name == "qd":
            gamma = convert_rate(1.0, "per_ns", "per_ps")    # 1 ns^-1
            kappa = convert_rate(8.5, "per_ns", "per_ps")    # 8.5 ns^-1
        else:
            gamma, kappa = 0.01 * g, 0.1 * g
        unit = "per_ps"
    elif name in ("superconducting", "superconducting_bad_cavity"):
        g = convert_rate(0.079, "ueV", "per_ns")             # hbar g = 0.079 ueV
        gamma = convert_rate(1.54, "per_us", "per_ns")       # 1.54 us^-1
        if name == "superconducting":
            kappa = convert_rate(0.29, "per_us", "per_ns")   # 0.29 us^-1
        else:
            kappa = 0.1 * g                                  # about 7.8 gamma
        unit = "per_ns"
    else:
        raise ValueError(f"unknown preset {name!r}; valid: {PRESET_NAMES}")

    f = 32.0 * g
    delta_cx = -60.0 * g
    delta_lx = bundles.bundle_resonance_detuning(2, f, delta_cx)
    return SystemParams(g=g, f=f, gamma=gamma, kappa=kappa,
                        delta_lx=delta_lx, delta_cx=delta_cx,
                        gamma_phi=0.0, unit_system=unit)


def energy_of(params: SystemParams, omega: float) -> float:
    """hbar * omega in meV (per_ps systems) or ueV (per_ns systems)."""
    return omega * HBAR_MEV_PS
