"""Unit handling: energies (meV, ueV) vs angular frequencies (per_ps, per_ns).

All model rates and detunings are stored as angular frequencies in a single
internal unit per parameter set ("per_ps" or "per_ns").  Conversions use

    hbar = 0.6582119569 meV ps = 0.6582119569 ueV ns,

so the same numeric constant serves both unit systems.
"""

from dataclasses import dataclass

HBAR_MEV_PS = 0.6582119569

# factor that maps one unit of each quantity to angular frequency in per_ps
_TO_PER_PS = {
    "meV": 1.0 / HBAR_MEV_PS,
    "ueV": 1.0e-3 / HBAR_MEV_PS,
    "per_ps": 1.0,
    "per_ns": 1.0e-3,
    "per_us": 1.0e-6,
}

_TIME_TO_PS = {"ps": 1.0, "ns": 1.0e3, "us": 1.0e6}

FREQUENCY_UNITS = ("per_ps", "per_ns", "per_us")
ENERGY_UNITS = ("meV", "ueV")


@dataclass(frozen=True)
class UnitConvention:
    """The fixed hbar constant plus conversion helpers."""

    hbar_mev_ps: float = HBAR_MEV_PS

    def to_angular(self, value: float, unit: str, internal: str) -> float:
        """Convert an energy or rate to an angular frequency in `internal`."""
        return convert_rate(value, unit, internal)

    def to_energy(self, omega: float, internal: str) -> float:
        """Angular frequency in `internal` -> energy (meV for per_ps, ueV for per_ns)."""
        if internal == "per_ps":
            return omega * self.hbar_mev_ps
        if internal == "per_ns":
            return omega * self.hbar_mev_ps  # ueV
        raise ValueError(f"unknown internal unit {internal!r}")


def convert_rate(value: float, unit: str, target: str) -> float:
    """Convert `value` in `unit` (energy or angular frequency) to `target`."""
    if unit not in _TO_PER_PS:
        raise ValueError(f"unknown unit {unit!r}; expected one of {sorted(_TO_PER_PS)}")
    if target not in FREQUENCY_UNITS:
        raise ValueError(f"target must be a frequency unit, got {target!r}")
    return value * _TO_PER_PS[unit] / _TO_PER_PS[target]


def convert_time(value: float, unit: str, target: str) -> float:
    if unit not in _TIME_TO_PS or target not in _TIME_TO_PS:
        raise ValueError(f"unknown time unit {unit!r} or {target!r}")
    return value * _TIME_TO_PS[unit] / _TIME_TO_PS[target]


def energy_unit_for(internal: str) -> str:
    """Natural energy label for an internal frequency unit."""
    return {"per_ps": "meV", "per_ns": "ueV"}[internal]


def time_unit_for(internal: str) -> str:
    return {"per_ps": "ps", "per_ns": "ns"}[internal]
