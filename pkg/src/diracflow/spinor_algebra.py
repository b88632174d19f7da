"""Fixed-size complex linear algebra for 2- and 4-component spinors.

Everything the rest of the package needs is 2x2 or 4x4: the Pauli triple,
the Pauli-Dirac alpha/beta/Sigma matrices, and a handful of vector
operations. Matrix constructors return read-only arrays; treat every value
produced here as immutable.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = [
    "DiracMatrices",
    "add",
    "dagger",
    "dirac_matrices",
    "inner",
    "matvec",
    "norm",
    "pauli_matrices",
    "require_finite",
    "scale",
    "spinor2",
    "spinor4",
]


def _frozen(entries) -> np.ndarray:
    m = np.asarray(entries, dtype=np.complex128)
    m.setflags(write=False)
    return m


_SX = _frozen([[0, 1], [1, 0]])
_SY = _frozen([[0, -1j], [1j, 0]])
_SZ = _frozen([[1, 0], [0, -1]])
_Z2 = np.zeros((2, 2), dtype=np.complex128)

# alpha_i: sigma_i on the off-diagonal blocks; Sigma_i: sigma_i on the diagonal.
_ALPHA = tuple(_frozen(np.block([[_Z2, s], [s, _Z2]])) for s in (_SX, _SY, _SZ))
_BETA = _frozen(np.diag([1, 1, -1, -1]))
_SPIN = tuple(_frozen(np.block([[s, _Z2], [_Z2, s]])) for s in (_SX, _SY, _SZ))


class DiracMatrices(NamedTuple):
    alpha: tuple[np.ndarray, np.ndarray, np.ndarray]
    beta: np.ndarray
    spin: tuple[np.ndarray, np.ndarray, np.ndarray]


def pauli_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (sigma_x, sigma_y, sigma_z) as read-only 2x2 complex arrays."""
    return _SX, _SY, _SZ


def dirac_matrices() -> DiracMatrices:
    """Return the Pauli-Dirac representation triple (alpha, beta, Sigma).

    alpha is the velocity-direction triple (block-off-diagonal sigma),
    beta = diag(1, 1, -1, -1), and Sigma is the spin triple
    (block-diagonal sigma). All arrays are read-only.
    """
    return DiracMatrices(alpha=_ALPHA, beta=_BETA, spin=_SPIN)


def require_finite(values: np.ndarray) -> np.ndarray:
    """Reject NaN/Inf components before they enter downstream operations."""
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite component in spinor/matrix data")
    return values


def spinor2(c0: complex, c1: complex) -> np.ndarray:
    return require_finite(np.array([c0, c1], dtype=np.complex128))


def spinor4(c0: complex, c1: complex, c2: complex, c3: complex) -> np.ndarray:
    return require_finite(np.array([c0, c1, c2, c3], dtype=np.complex128))


def _check_square(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 4):
        raise ValueError(f"expected a 2x2 or 4x4 matrix, got shape {m.shape}")


def matvec(m: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Matrix times spinor with a shape guard (2x2 on 2, 4x4 on 4)."""
    m = np.asarray(m)
    s = np.asarray(s)
    _check_square(m)
    if s.shape != (m.shape[0],):
        raise ValueError(f"shape mismatch: {m.shape} matrix on {s.shape} spinor")
    return m @ s


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hermitian inner product, conjugate-linear in the first argument."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"shape mismatch in inner product: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def dagger(x: np.ndarray) -> np.ndarray:
    """Conjugate (spinors) or conjugate-transpose (matrices)."""
    x = np.asarray(x)
    if x.ndim == 1:
        return x.conj()
    return x.conj().T.copy()


def scale(factor: complex, s: np.ndarray) -> np.ndarray:
    return factor * np.asarray(s)


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch in add: {a.shape} vs {b.shape}")
    return a + b


def norm(s: np.ndarray) -> float:
    return float(np.linalg.norm(s))
