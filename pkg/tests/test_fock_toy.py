import math

import numpy as np
import pytest

import diracflow.fock_toy as fock_toy
from diracflow.fock_toy import (
    FockLattice,
    ProportionalityBroken,
    build_lattice,
    charge_operator,
    current_charge_report,
    current_coefficients,
    current_operator_z,
    ladder,
    physical_current,
    rest_spinors,
    vacuum_expectation,
)
from diracflow.spinor_algebra import dirac_matrices

GAMMA_Z = dirac_matrices().alpha[2]


def _dense(op):
    return np.asarray(op.todense())


def _all_ladders(lattice):
    ops = []
    for kind in ("a", "b"):
        for p in range(lattice.n_modes):
            ops.append(ladder(lattice, kind, p))
    return ops


def test_lattice_dimensions():
    assert build_lattice(1).dim == 4
    assert build_lattice(2).dim == 16
    assert build_lattice(3).dim == 64


def test_lattice_bounds():
    with pytest.raises(ValueError):
        build_lattice(0)
    with pytest.raises(ValueError):
        build_lattice(7)


def test_ladder_argument_guards():
    lattice = build_lattice(2)
    with pytest.raises(ValueError):
        ladder(lattice, "c", 0)
    with pytest.raises(ValueError):
        ladder(lattice, "a", 2)


def test_anticommutation_relations_exact():
    for modes in (1, 2, 3):
        lattice = build_lattice(modes)
        ops = _all_ladders(lattice)
        identity = np.eye(lattice.dim)
        zero = np.zeros((lattice.dim, lattice.dim))
        for i, ci in enumerate(ops):
            for j, cj in enumerate(ops):
                mixed = _dense(ci @ cj.conj().T + cj.conj().T @ ci)
                expected = identity if i == j else zero
                assert np.array_equal(mixed, expected)
                assert np.array_equal(_dense(ci @ cj + cj @ ci), zero)


def test_number_operator_eigenvalues():
    # 4x4 eigensolve: occupation of the particle slot at M = 1
    lattice = build_lattice(1)
    a = ladder(lattice, "a", 0)
    number = _dense(a.conj().T @ a)
    assert np.allclose(np.sort(np.linalg.eigvalsh(number)), [0.0, 0.0, 1.0, 1.0], atol=1e-14)


def test_rest_spinors_normalized():
    spinors = rest_spinors()
    for s in (spinors.u_up, spinors.u_down, spinors.v_up, spinors.v_down):
        assert np.vdot(s, s).real == pytest.approx(1.0, abs=1e-14)


def test_rest_spinor_matrix_elements():
    # 4x4 arithmetic: diagonal element 1, particle/antiparticle cross term 0
    spinors = rest_spinors()
    assert np.vdot(spinors.u_up, GAMMA_Z @ spinors.u_up) == pytest.approx(1.0, abs=1e-14)
    assert np.vdot(spinors.u_up, GAMMA_Z @ spinors.v_up) == pytest.approx(0.0, abs=1e-14)
    assert np.vdot(spinors.v_up, GAMMA_Z @ spinors.v_up) == pytest.approx(1.0, abs=1e-14)


def test_current_coefficients_provenance():
    c_aa, c_bb, c_ab, c_ba = current_coefficients(0.5)
    assert abs(c_aa - 1.0) < 1e-14 and abs(c_bb - 1.0) < 1e-14
    assert abs(c_ab) < 1e-14 and abs(c_ba) < 1e-14
    c_aa, c_bb, c_ab, c_ba = current_coefficients(-0.5)
    assert abs(c_aa + 1.0) < 1e-14 and abs(c_bb + 1.0) < 1e-14
    assert abs(c_ab) < 1e-14 and abs(c_ba) < 1e-14
    with pytest.raises(ValueError):
        current_coefficients(0.3)


def test_current_operator_single_mode_spectrum():
    # enumerate the 4 basis states |n_a, n_b>: eigenvalues n_a + (1 - n_b)
    # over {|00>, |10>, |01>, |11>} are {1, 2, 0, 1}
    lattice = build_lattice(1)
    jz = current_operator_z(lattice)
    diag = np.sort(np.real(jz.diagonal()))
    assert np.allclose(diag, [0.0, 1.0, 1.0, 2.0], atol=1e-14)


def test_current_operator_is_hermitian():
    lattice = build_lattice(2)
    jz = current_operator_z(lattice, spin=-0.5, strength=2.5)
    assert (jz - jz.conj().T).nnz == 0


def test_vacuum_expectation_counts_modes():
    for modes in (1, 2, 3):
        lattice = build_lattice(modes)
        assert vacuum_expectation(current_operator_z(lattice)) == pytest.approx(modes, abs=1e-12)
        assert vacuum_expectation(current_operator_z(lattice, spin=-0.5)) == pytest.approx(
            -modes, abs=1e-12
        )


def test_charge_operator_single_mode():
    lattice = build_lattice(1)
    charge = charge_operator(lattice)
    assert np.allclose(np.sort(np.real(charge.diagonal())), [-1.0, 0.0, 0.0, 1.0], atol=1e-14)
    assert vacuum_expectation(charge) == 0.0


def test_charge_commutes_with_current():
    lattice = build_lattice(2)
    jz = current_operator_z(lattice)
    charge = charge_operator(lattice)
    assert (jz @ charge - charge @ jz).nnz == 0


def test_physical_current_single_mode_diagonal():
    # basis order |n_a n_b| with slot a most significant: indices
    # 0=|00>, 1=|01>, 2=|10>, 3=|11> give diag (0, -1, +1, 0) = N
    lattice = build_lattice(1)
    phys = physical_current(lattice)
    assert np.allclose(np.real(phys.diagonal()), [0.0, -1.0, 1.0, 0.0], atol=1e-14)


def test_identity_for_all_sizes_and_spins():
    for modes in (1, 2, 3, 4):
        lattice = build_lattice(modes)
        charge = charge_operator(lattice)
        for spin, sign in ((0.5, 1), (-0.5, -1)):
            phys = physical_current(lattice, spin=spin)
            difference = phys - sign * charge
            deviation = np.max(np.abs(difference.tocoo().data)) if difference.nnz else 0.0
            assert deviation < 1e-12


def test_identity_with_strength_scaling():
    lattice = build_lattice(2)
    strength = 0.37
    phys = physical_current(lattice, strength=strength)
    difference = phys - strength * charge_operator(lattice)
    deviation = np.max(np.abs(difference.tocoo().data)) if difference.nnz else 0.0
    assert deviation < 1e-12


def test_spectrum_multiplicities_binomial():
    for modes in (1, 2, 3, 4):
        lattice = build_lattice(modes)
        report = current_charge_report(lattice)
        values = report["spectrum_physical_current"]["values"]
        counts = report["spectrum_physical_current"]["multiplicities"]
        assert values == [float(q) for q in range(-modes, modes + 1)]
        assert counts == [math.comb(2 * modes, modes + q) for q in range(-modes, modes + 1)]
        assert sum(counts) == lattice.dim


def test_report_fields():
    report = current_charge_report(build_lattice(2), spin=-0.5, strength=1.5)
    assert report["M"] == 2
    assert report["spin"] == -0.5
    assert report["K"] == 1.5
    assert report["identity_holds"] is True
    assert report["proportionality_sign"] == -1
    assert report["max_entry_deviation"] < 1e-12
    assert report["vacuum_expectation"] == pytest.approx(-3.0, abs=1e-12)


def test_proportionality_guard_detects_bad_spinors(monkeypatch):
    # corrupt the antiparticle spinor so the cross coefficients stop
    # vanishing; the cross terms then survive and the identity must fail
    broken = rest_spinors()
    tilted = (broken.u_up + broken.v_up) / np.linalg.norm(broken.u_up + broken.v_up)
    monkeypatch.setattr(
        fock_toy,
        "rest_spinors",
        lambda: fock_toy.RestSpinors(
            u_up=broken.u_up, u_down=broken.u_down, v_up=tilted, v_down=broken.v_down
        ),
    )
    with pytest.raises(ProportionalityBroken):
        physical_current(build_lattice(1))


def test_current_strength_must_be_positive():
    with pytest.raises(ValueError):
        current_operator_z(build_lattice(1), strength=0.0)
