"""Driven dissipative emitter-cavity simulations and N-photon-bundle statistics."""

__version__ = "0.1.0"

from .bundles import (DressedStatePair, bundle_resonance_detuning, dressed_energies,
                      ideal_bundle_distribution, one_photon_resonance_detuning,
                      resonance_identity_residual)
from .fock import (G, X, HilbertSpace, OperatorSet, build_operators, build_space,
                   density_matrix, expectation, ket, validate_density_matrix)
from .liouville import Liouvillian, apply, build_liouvillian
from .model import SystemParams, build_hamiltonian, lindblad_channels, preset
from .observables import (PhotonDistribution, WignerMap, coherent_fidelity,
                          photon_distribution, reduce_cavity, wigner)
from .solve import (SteadyStateResult, TimeSeries, evolve, evolve_params,
                    steady_state, steady_state_autotruncate, steady_state_for)
from .sweeps import SweepSpec, SweepTable, run_sweep
from .trajectories import (BundleGrouping, EmissionRecord, empirical_statistics,
                           group_bundles, mcwf_run, run_ensemble)
from .units import HBAR_MEV_PS, UnitConvention, convert_rate, convert_time

__all__ = [name for name in dir() if not name.startswith("_")]
