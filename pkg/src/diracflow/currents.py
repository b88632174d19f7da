"""Superposition wavefunctions and the local observables built from them.

A state is a finite superposition of plane-wave modes. Evaluating it at
(z, t) gives a four-spinor; from that we form the probability density,
the current c * psi^dag alpha psi, and the guidance velocity j / rho.
The two-wave nonrelativistic closed forms (velocity and quantum potential)
live here as well since the region scans are built on them.

Plane waves are not square integrable, so rho is reported unnormalized;
only ratios and signs are physically meaningful.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dirac_states import DEFAULT_PARAMS, PhysicalParams, PlaneWaveMode, plane_wave_spinor
from .spinor_algebra import dirac_matrices

__all__ = [
    "EPS_RHO",
    "CurrentSample",
    "NodeDensityTooSmall",
    "NodeSingular",
    "SuperpositionState",
    "bohm_velocity",
    "current",
    "current_grid",
    "current_sample",
    "current_samples_grid",
    "density",
    "evaluate_state",
    "evaluate_state_grid",
    "nr_velocity",
    "quantum_potential",
]

EPS_RHO = 1e-12

_ALPHAS = np.stack(dirac_matrices().alpha)


class NodeDensityTooSmall(ArithmeticError):
    """The density is below threshold; j / rho is ill-conditioned there."""


class NodeSingular(ArithmeticError):
    """Exact node of the two-wave state (a = 1 with cos(kx + phi) = -1)."""


@dataclass(frozen=True, eq=False)
class SuperpositionState:
    """Finite superposition of plane-wave modes with fixed coefficients.

    Duplicate modes are merged at construction. With ``normalize`` set the
    coefficient vector is rescaled to unit l2 norm, which is the state
    normalization because distinct modes are orthonormal spinor plane waves.
    """

    terms: tuple[tuple[complex, PlaneWaveMode], ...]
    params: PhysicalParams = DEFAULT_PARAMS
    normalize: bool = True
    coefficients: np.ndarray = field(init=False, repr=False)
    spinors: np.ndarray = field(init=False, repr=False)
    wavenumbers: np.ndarray = field(init=False, repr=False)
    energies: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.terms) == 0:
            raise ValueError("superposition needs at least one term")
        merged: dict[PlaneWaveMode, complex] = {}
        for coeff, mode in self.terms:
            coeff = complex(coeff)
            if not (math.isfinite(coeff.real) and math.isfinite(coeff.imag)):
                raise ValueError(f"non-finite coefficient {coeff!r}")
            merged[mode] = merged.get(mode, 0.0) + coeff
        modes = tuple(merged)
        coeffs = np.array([merged[m] for m in modes], dtype=np.complex128)
        total = float(np.sum(np.abs(coeffs) ** 2))
        if total == 0.0:
            raise ValueError("coefficients cancel to the zero state")
        if self.normalize:
            coeffs = coeffs / math.sqrt(total)
        waves = [plane_wave_spinor(m, self.params) for m in modes]
        object.__setattr__(self, "terms", tuple(zip([complex(cc) for cc in coeffs], modes)))
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "spinors", np.array([w.spinor for w in waves]))
        object.__setattr__(self, "wavenumbers", np.array([m.k for m in modes]))
        object.__setattr__(self, "energies", np.array([w.energy for w in waves]))

    @property
    def max_wavenumber(self) -> float:
        return float(np.max(np.abs(self.wavenumbers)))


def evaluate_state(state: SuperpositionState, z: float, t: float = 0.0) -> np.ndarray:
    """Four-spinor value sum_i c_i s_i exp(i(k_i z - E_i t / hbar))."""
    phases = np.exp(1j * (state.wavenumbers * z - state.energies * (t / state.params.hbar)))
    return (state.coefficients * phases) @ state.spinors


def evaluate_state_grid(state: SuperpositionState, z: np.ndarray, t: float = 0.0) -> np.ndarray:
    """Vectorized evaluation over a 1D array of positions; returns (len(z), 4)."""
    z = np.asarray(z, dtype=float)
    phases = np.exp(
        1j * (np.outer(z, state.wavenumbers) - state.energies * (t / state.params.hbar))
    )
    return (phases * state.coefficients) @ state.spinors


def density(psi: np.ndarray) -> float:
    """Probability density psi^dag psi."""
    return float(np.vdot(psi, psi).real)


def current_grid(psi: np.ndarray, params: PhysicalParams = DEFAULT_PARAMS) -> np.ndarray:
    """Currents of a stack of four-spinors; (n, 4) -> (n, 3)."""
    psi = np.asarray(psi, dtype=np.complex128)
    # psi^dag alpha_i psi is real for Hermitian alpha_i; guard against drift
    raw = np.einsum("na,iab,nb->ni", psi.conj(), _ALPHAS, psi)
    rho_scale = max(1.0, float(np.max(np.abs(raw.real))))
    if np.max(np.abs(raw.imag)) > 1e-12 * rho_scale:
        raise FloatingPointError("current quadratic form acquired an imaginary part")
    return params.c * raw.real


def current(psi: np.ndarray, params: PhysicalParams = DEFAULT_PARAMS) -> np.ndarray:
    """Current three-vector c * psi^dag alpha psi of a four-spinor value."""
    return current_grid(np.asarray(psi, dtype=np.complex128)[None, :], params)[0]


@dataclass(frozen=True)
class CurrentSample:
    """One evaluation point: density, current and (if defined) velocity."""

    z: float
    t: float
    rho: float
    j: np.ndarray = field(repr=False)
    v: np.ndarray | None = field(repr=False)
    node: bool = False


def _make_sample(z: float, t: float, rho: float, j: np.ndarray, eps_rho: float) -> CurrentSample:
    if rho <= eps_rho:
        return CurrentSample(z=z, t=t, rho=rho, j=j, v=None, node=True)
    return CurrentSample(z=z, t=t, rho=rho, j=j, v=j / rho, node=False)


def current_sample(
    state: SuperpositionState, z: float, t: float = 0.0, eps_rho: float = EPS_RHO
) -> CurrentSample:
    psi = evaluate_state(state, z, t)
    return _make_sample(z, t, density(psi), current(psi, state.params), eps_rho)


def current_samples_grid(
    state: SuperpositionState, z: np.ndarray, t: float = 0.0, eps_rho: float = EPS_RHO
) -> list[CurrentSample]:
    z = np.asarray(z, dtype=float)
    psi = evaluate_state_grid(state, z, t)
    rho = np.einsum("na,na->n", psi.conj(), psi).real
    j = current_grid(psi, state.params)
    return [_make_sample(float(zi), t, float(ri), ji, eps_rho) for zi, ri, ji in zip(z, rho, j)]


def bohm_velocity(sample: CurrentSample, eps_rho: float = EPS_RHO) -> np.ndarray:
    """Guidance velocity j / rho; refuses near-nodes where it is ill-conditioned."""
    if sample.rho <= eps_rho:
        raise NodeDensityTooSmall(
            f"density {sample.rho:.3e} at z={sample.z} is below {eps_rho:.1e}"
        )
    return sample.j / sample.rho


def _two_wave_parts(a: float, k: float, x: float, phi: float, eps: float) -> tuple[float, float]:
    if a < 0.0:
        raise ValueError(f"amplitude must be nonnegative, got {a}")
    cos_term = math.cos(k * x + phi)
    denominator = 1.0 + a * a + 2.0 * a * cos_term
    if abs(denominator) <= eps:
        raise NodeSingular(f"two-wave node at a={a}, cos(kx+phi)={cos_term}")
    return cos_term, denominator


def nr_velocity(
    a: float,
    k: float,
    x: float,
    phi: float = 0.0,
    params: PhysicalParams = DEFAULT_PARAMS,
    eps: float = 1e-12,
) -> float:
    """Nonrelativistic guidance velocity of 1 + a exp(i(kx + phi)).

    Equals (a hbar k / m) (a + cos(kx+phi)) / (1 + a^2 + 2 a cos(kx+phi));
    for a < 1 its sign is the sign of a + cos(kx+phi).
    """
    if params.mass <= 0.0:
        raise ValueError("nonrelativistic velocity requires a positive mass")
    cos_term, denominator = _two_wave_parts(a, k, x, phi, eps)
    return (a * params.hbar * k / params.mass) * (a + cos_term) / denominator


def quantum_potential(
    a: float,
    k: float,
    x: float,
    phi: float = 0.0,
    params: PhysicalParams = DEFAULT_PARAMS,
    eps: float = 1e-12,
) -> float:
    """Quantum potential -(hbar^2/2m) R''/R of the same two-wave state, in closed form."""
    if params.mass <= 0.0:
        raise ValueError("quantum potential requires a positive mass")
    cos_term, denominator = _two_wave_parts(a, k, x, phi, eps)
    scale = a * params.hbar * params.hbar * k * k / (2.0 * params.mass)
    return scale * (1.0 + a * cos_term) * (a + cos_term) / (denominator * denominator)
