"""Free Dirac plane-wave superpositions and their probability currents.

Modules:
  spinor_algebra   fixed-size complex spinor/matrix helpers
  dirac_states     plane-wave solutions, Hamiltonian, dispersion
  currents         density, current, guidance velocity, quantum potential
  case_catalog     built-in two-mode families with closed-form currents
  backflow_scan    region detection, onset thresholds, parameter grids
  fock_toy         fermionic Fock-space current vs charge identity
  cli              command-line front end (``python -m diracflow``)
"""
from .backflow_scan import (
    BackflowRegion,
    NoSignChange,
    RegionGrid,
    ResolutionTooCoarse,
    ScanGrid,
    backflow_threshold,
    find_backflow_regions,
    region_grid,
    scan_current,
)
from .case_catalog import (
    CaseReport,
    CaseSpec,
    ClosedFormCurrent,
    ScaleNotPositive,
    build_case,
    closed_form_current,
    critical_amplitude,
    verify_case,
)
from .currents import (
    CurrentSample,
    NodeDensityTooSmall,
    NodeSingular,
    SuperpositionState,
    bohm_velocity,
    current,
    current_sample,
    density,
    evaluate_state,
    nr_velocity,
    quantum_potential,
)
from .dirac_states import (
    PhysicalParams,
    PlaneWaveMode,
    SpinorPlaneWave,
    dispersion,
    hamiltonian,
    helicity_operator,
    plane_wave_spinor,
)
from .fock_toy import (
    FockLattice,
    ProportionalityBroken,
    build_lattice,
    charge_operator,
    current_charge_report,
    current_operator_z,
    physical_current,
    rest_spinors,
)

__version__ = "0.1.0"
