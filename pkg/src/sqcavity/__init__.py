"""Steady states and photon statistics of a single-atom cavity driven by squeezed vacuum."""

from .fock import SpaceConfig, annihilation, atom_lowering, creation, number, tensor
from .model import BathKind, BathSpec, Liouvillian, SystemParams, bath_parameters, build_hamiltonian, build_liouvillian
from .observables import PhotonDistribution, delta_n, detect_atom, mean_photon, photon_distribution
from .solver import DensityMatrix, SolveReport, converged_steady_state, evolve, steady_state
from .sweep import Scenario, ScenarioName, SweepAxis, SweepGrid, SweepResult, emit_csv, run_distribution, run_map, run_spectrum
from .config import parse_config

__version__ = "0.1.0"
