"""Free-particle plane-wave solutions of the 1D Dirac equation.

Momentum is taken along z, so a mode is labelled by the sign of its energy,
a wavenumber k (any real, including 0 and negative values) and a two-valued
spin label lambda, the Sigma_z eigenvalue (which equals the helicity for
k > 0). Physical constants are configurable and default to hbar = c = m = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spinor_algebra import dirac_matrices, require_finite

__all__ = [
    "DEFAULT_PARAMS",
    "PhysicalParams",
    "PlaneWaveMode",
    "SpinorPlaneWave",
    "dispersion",
    "hamiltonian",
    "helicity_operator",
    "plane_wave_spinor",
]


@dataclass(frozen=True)
class PhysicalParams:
    """Physical constants hbar, c and the particle mass (natural units by default)."""

    hbar: float = 1.0
    c: float = 1.0
    mass: float = 1.0

    def __post_init__(self) -> None:
        if not (self.hbar > 0.0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar}")
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ValueError(f"c must be positive and finite, got {self.c}")
        if not (self.mass >= 0.0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be nonnegative and finite, got {self.mass}")

    @property
    def rest_energy(self) -> float:
        return self.mass * self.c * self.c


DEFAULT_PARAMS = PhysicalParams()


def _check_sign(value: int, name: str) -> int:
    if value not in (1, -1):
        raise ValueError(f"{name} must be +1 or -1, got {value!r}")
    return value


@dataclass(frozen=True)
class PlaneWaveMode:
    """Label (energy sign, wavenumber, spin-z label) of one plane-wave solution."""

    energy_sign: int
    k: float
    helicity: int

    def __post_init__(self) -> None:
        _check_sign(self.energy_sign, "energy_sign")
        _check_sign(self.helicity, "helicity")
        if not math.isfinite(self.k):
            raise ValueError(f"wavenumber must be finite, got {self.k}")


@dataclass(frozen=True)
class SpinorPlaneWave:
    """A mode together with its unit-norm constant spinor and signed energy."""

    mode: PlaneWaveMode
    spinor: np.ndarray = field(repr=False)
    energy: float


def dispersion(k: float, sign: int = 1, params: PhysicalParams = DEFAULT_PARAMS) -> float:
    """Signed relativistic energy sign * sqrt(c^2 hbar^2 k^2 + m^2 c^4)."""
    _check_sign(sign, "sign")
    return sign * math.hypot(params.c * params.hbar * k, params.rest_energy)


def plane_wave_spinor(mode: PlaneWaveMode, params: PhysicalParams = DEFAULT_PARAMS) -> SpinorPlaneWave:
    """Build the constant spinor factor of a plane-wave solution.

    Positive-energy modes put the spin two-spinor in the upper block with a
    lower block scaled by lambda*c*hbar*k/(|E| + m c^2); negative-energy
    modes mirror that with a sign flip. The overall prefactor makes the
    four-spinor exactly unit norm.
    """
    energy = dispersion(mode.k, mode.energy_sign, params)
    abs_e = abs(energy)
    gap = abs_e + params.rest_energy
    if gap == 0.0:
        raise ValueError("massless zero-momentum mode has no normalized spinor")
    ratio = mode.helicity * params.c * params.hbar * mode.k / gap
    prefactor = math.sqrt(gap / (2.0 * abs_e))
    two = np.array([1.0, 0.0] if mode.helicity == 1 else [0.0, 1.0], dtype=np.complex128)
    if mode.energy_sign == 1:
        spinor = prefactor * np.concatenate([two, ratio * two])
    else:
        spinor = prefactor * np.concatenate([-ratio * two, two])
    require_finite(spinor)
    spinor.setflags(write=False)
    return SpinorPlaneWave(mode=mode, spinor=spinor, energy=energy)


def hamiltonian(k: float, params: PhysicalParams = DEFAULT_PARAMS) -> np.ndarray:
    """Free Dirac Hamiltonian c*alpha_z*hbar*k + beta*m*c^2 for momentum along z."""
    mats = dirac_matrices()
    return params.c * params.hbar * k * mats.alpha[2] + params.rest_energy * mats.beta


def helicity_operator(k: float, params: PhysicalParams = DEFAULT_PARAMS) -> np.ndarray:
    """Spin projected on the direction of motion, Sigma_z * sgn(k).

    For k = 0 there is no direction of motion and the operator degenerates
    to Sigma_z, so the spin label stays meaningful in the k -> 0 limit.
    """
    sigma_z4 = dirac_matrices().spin[2]
    return -sigma_z4 if k < 0 else sigma_z4
