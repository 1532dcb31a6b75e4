"""Strong-field ionization and fragmentation of H2.

Quasi-analytical molecular tunneling/multiphoton ionization rates
coupled to quantum nuclear wave-packet propagation on the neutral, the
two lowest ion states, and an accumulated Coulomb-explosion channel;
produces time-resolved populations and proton kinetic-energy-release
spectra.
"""

__version__ = "0.1.0"

from .grid import RadialGrid, WavePacket, build_grid, transform, observables
from .dataset import MolecularDataset, CurveTable, load_dataset, eval_curve, ionization_potentials
from .states import BoundState, ContinuumState, numerov_bound, continuum_state, find_bound_levels
from .rates import PulseParams, RateModel, RateTable, make_pulse, pulse_field, keldysh, ppt_rate, build_rate_table

__all__ = [
    "RadialGrid", "WavePacket", "build_grid", "transform", "observables",
    "MolecularDataset", "CurveTable", "load_dataset", "eval_curve",
    "ionization_potentials", "BoundState", "ContinuumState", "numerov_bound",
    "continuum_state", "find_bound_levels", "PulseParams", "RateModel",
    "RateTable", "make_pulse", "pulse_field", "keldysh", "ppt_rate",
    "build_rate_table", "__version__",
]
