"""Finite fermionic Fock space for the current-vs-charge operator check.

M momentum modes near zero momentum, each carrying one particle slot and
one antiparticle slot (2M fermionic slots, dimension 4^M). Ladder
operators come from the Jordan-Wigner construction, so all
anticommutation relations hold as exact integer matrix identities. The
z-current operator is assembled per mode from the rest-frame spinor
matrix elements, its (finite) vacuum expectation is subtracted, and the
result is checked entrywise against the normal-ordered charge operator
N = sum_p (a_p^dag a_p - b_p^dag b_p).

The overall strength stands in for an arbitrary positive normalization
constant of the mode expansion; every identity is stated relative to it.
The proportionality sign is not assumed: it is the computed diagonal
matrix element of the current matrix between rest spinors, +1 for spin up
and -1 for spin down.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .spinor_algebra import dirac_matrices

__all__ = [
    "FockLattice",
    "ProportionalityBroken",
    "RestSpinors",
    "build_lattice",
    "charge_operator",
    "current_charge_report",
    "current_coefficients",
    "current_operator_z",
    "ladder",
    "physical_current",
    "rest_spinors",
    "vacuum_expectation",
]

MAX_MODES = 6
IDENTITY_TOL = 1e-12

_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)  # |1> -> |0>
_PARITY = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
_I2 = np.eye(2, dtype=np.complex128)


class ProportionalityBroken(ArithmeticError):
    """The vacuum-subtracted current failed to match the charge operator."""


@dataclass(frozen=True)
class FockLattice:
    """2M fermionic slots ordered [a_1 .. a_M, b_1 .. b_M]."""

    n_modes: int
    epsilon: float = 1.0  # momentum cutoff label, bookkeeping only

    def __post_init__(self) -> None:
        if not (1 <= self.n_modes <= MAX_MODES):
            raise ValueError(f"n_modes must be in 1..{MAX_MODES}, got {self.n_modes}")

    @property
    def n_slots(self) -> int:
        return 2 * self.n_modes

    @property
    def dim(self) -> int:
        return 1 << self.n_slots


def build_lattice(n_modes: int, epsilon: float = 1.0) -> FockLattice:
    return FockLattice(n_modes=n_modes, epsilon=epsilon)


def _slot_operator(n_slots: int, slot: int, dagger: bool) -> sparse.csr_matrix:
    local = _LOWER.conj().T if dagger else _LOWER
    op = sparse.identity(1, dtype=np.complex128, format="csr")
    for j in range(n_slots):
        factor = _PARITY if j < slot else (local if j == slot else _I2)
        op = sparse.kron(op, factor, format="csr")
    op.eliminate_zeros()
    return op


def ladder(lattice: FockLattice, kind: str, mode_index: int, dagger: bool = False) -> sparse.csr_matrix:
    """Jordan-Wigner ladder operator for a particle ('a') or antiparticle ('b') slot.

    Entries are exactly 0 and +-1, so the canonical anticommutation
    relations hold to exact floating equality.
    """
    if kind not in ("a", "b"):
        raise ValueError(f"kind must be 'a' or 'b', got {kind!r}")
    if not (0 <= mode_index < lattice.n_modes):
        raise ValueError(f"mode_index {mode_index} out of range for {lattice.n_modes} modes")
    slot = mode_index if kind == "a" else lattice.n_modes + mode_index
    return _slot_operator(lattice.n_slots, slot, dagger)


@dataclass(frozen=True)
class RestSpinors:
    """Zero-momentum particle/antiparticle spinors for both spin projections."""

    u_up: np.ndarray = field(repr=False)
    u_down: np.ndarray = field(repr=False)
    v_up: np.ndarray = field(repr=False)
    v_down: np.ndarray = field(repr=False)

    def u(self, spin: float) -> np.ndarray:
        return self.u_up if spin > 0 else self.u_down

    def v(self, spin: float) -> np.ndarray:
        return self.v_up if spin > 0 else self.v_down


def rest_spinors() -> RestSpinors:
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    make = lambda *c: inv_sqrt2 * np.array(c, dtype=np.complex128)
    return RestSpinors(
        u_up=make(1, 0, 1, 0),
        u_down=make(0, 1, 0, 1),
        v_up=make(0, 1, 0, -1),
        v_down=make(-1, 0, 1, 0),
    )


def _check_spin(spin: float) -> float:
    if spin not in (0.5, -0.5):
        raise ValueError(f"spin must be +0.5 or -0.5, got {spin!r}")
    return spin


def current_coefficients(spin: float = 0.5) -> tuple[complex, complex, complex, complex]:
    """Spinor matrix elements multiplying (a^dag a, b b^dag, a^dag b^dag, b a).

    Computed from the rest spinors and the z-direction current matrix
    (block-off-diagonal sigma_z), never hard coded. For spin up these are
    (1, 1, 0, 0); for spin down (-1, -1, 0, 0).
    """
    _check_spin(spin)
    spinors = rest_spinors()
    u = spinors.u(spin)
    v = spinors.v(spin)
    gamma_z = dirac_matrices().alpha[2]
    return (
        complex(np.vdot(u, gamma_z @ u)),
        complex(np.vdot(v, gamma_z @ v)),
        complex(np.vdot(u, gamma_z @ v)),
        complex(np.vdot(v, gamma_z @ u)),
    )


def current_operator_z(lattice: FockLattice, spin: float = 0.5, strength: float = 1.0) -> sparse.csr_matrix:
    """z-current operator on the lattice, before vacuum subtraction.

    Per mode this is c_aa a^dag a + c_bb b b^dag plus the (vanishing)
    cross terms, with the coefficients taken from current_coefficients;
    cross-mode products are dropped, consistent with every mode carrying
    the same zero-momentum spinor pair.
    """
    if not strength > 0.0:
        raise ValueError(f"strength must be positive, got {strength}")
    c_aa, c_bb, c_ab, c_ba = current_coefficients(spin)
    for label, value in (("a^dag a", c_aa), ("b b^dag", c_bb)):
        if abs(value.imag) > 1e-14:
            raise FloatingPointError(f"{label} coefficient has imaginary part {value.imag:.2e}")
    op = sparse.csr_matrix((lattice.dim, lattice.dim), dtype=np.complex128)
    for p in range(lattice.n_modes):
        a = ladder(lattice, "a", p)
        a_dag = ladder(lattice, "a", p, dagger=True)
        b = ladder(lattice, "b", p)
        b_dag = ladder(lattice, "b", p, dagger=True)
        op = op + c_aa * (a_dag @ a) + c_bb * (b @ b_dag) + c_ab * (a_dag @ b_dag) + c_ba * (b @ a)
    return (strength * op).tocsr()


def charge_operator(lattice: FockLattice) -> sparse.csr_matrix:
    """Normal-ordered charge N = sum_p (a_p^dag a_p - b_p^dag b_p)."""
    op = sparse.csr_matrix((lattice.dim, lattice.dim), dtype=np.complex128)
    for p in range(lattice.n_modes):
        a = ladder(lattice, "a", p)
        a_dag = ladder(lattice, "a", p, dagger=True)
        b = ladder(lattice, "b", p)
        b_dag = ladder(lattice, "b", p, dagger=True)
        op = op + (a_dag @ a) - (b_dag @ b)
    return op.tocsr()


def vacuum_expectation(op: sparse.spmatrix) -> float:
    """<0| op |0>; the vacuum is basis state 0 (all slots empty)."""
    value = complex(op[0, 0])
    return value.real


def _max_abs_entry(op: sparse.spmatrix) -> float:
    data = op.tocoo().data
    return float(np.max(np.abs(data))) if data.size else 0.0


def _identity_deviation(
    lattice: FockLattice, spin: float, strength: float
) -> tuple[sparse.csr_matrix, sparse.csr_matrix, int, float]:
    """Vacuum-subtracted current, charge operator, computed sign, max deviation."""
    jz = current_operator_z(lattice, spin, strength)
    identity = sparse.identity(lattice.dim, dtype=np.complex128, format="csr")
    physical = (jz - vacuum_expectation(jz) * identity).tocsr()
    c_aa = current_coefficients(spin)[0]
    sign = int(round(c_aa.real))
    charge = charge_operator(lattice)
    deviation = _max_abs_entry(physical - (sign * strength) * charge)
    return physical, charge, sign, deviation


def physical_current(lattice: FockLattice, spin: float = 0.5, strength: float = 1.0) -> sparse.csr_matrix:
    """Current operator with its vacuum expectation subtracted.

    Must coincide with (sign * strength) * N entrywise, the sign being the
    computed rest-spinor coefficient; any larger deviation indicates a
    construction bug and raises ProportionalityBroken.
    """
    physical, _, sign, deviation = _identity_deviation(lattice, spin, strength)
    if deviation > IDENTITY_TOL * max(1.0, strength):
        raise ProportionalityBroken(
            f"physical current deviates from {sign:+d} * strength * N by {deviation:.3e}"
        )
    return physical


def _diagonal_spectrum(op: sparse.spmatrix) -> dict:
    diag = np.real(np.asarray(op.diagonal()))
    values, counts = np.unique(np.round(diag, 12), return_counts=True)
    return {
        "values": [float(value) for value in values],
        "multiplicities": [int(count) for count in counts],
    }


def current_charge_report(lattice: FockLattice, spin: float = 0.5, strength: float = 1.0) -> dict:
    """Machine-readable summary of the current/charge identity check."""
    physical, charge, sign, deviation = _identity_deviation(lattice, spin, strength)
    return {
        "M": lattice.n_modes,
        "spin": spin,
        "K": strength,
        "proportionality_sign": sign,
        "identity_holds": bool(deviation <= IDENTITY_TOL * max(1.0, strength)),
        "max_entry_deviation": deviation,
        "vacuum_expectation": vacuum_expectation(current_operator_z(lattice, spin, strength)),
        "spectrum_N": _diagonal_spectrum(charge),
        "spectrum_physical_current": _diagonal_spectrum(physical),
    }
