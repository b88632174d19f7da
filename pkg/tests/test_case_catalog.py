import json
import math
from dataclasses import replace

import numpy as np
import pytest

from diracflow.case_catalog import (
    CaseSpec,
    ScaleNotPositive,
    build_case,
    case_energies,
    closed_form_current,
    critical_amplitude,
    fit_scale,
    verify_case,
)
from diracflow.dirac_states import dispersion

Z_GRID = np.linspace(-10.0, 10.0, 1001)


def test_spec_validation():
    with pytest.raises(ValueError):
        CaseSpec(case_id=0)
    with pytest.raises(ValueError):
        CaseSpec(case_id=8)
    with pytest.raises(ValueError):
        CaseSpec(case_id=2, k=0.0)
    with pytest.raises(ValueError):
        CaseSpec(case_id=2, k=-1.0)
    with pytest.raises(ValueError):
        CaseSpec(case_id=2, a=-0.1)
    with pytest.raises(ValueError):
        CaseSpec(case_id=2, helicity=0)


def test_case_1_is_single_term():
    state = build_case(CaseSpec(case_id=1, k=1.3, energy_sign=-1, helicity=-1))
    assert len(state.terms) == 1
    (_, mode), = state.terms
    assert mode.energy_sign == -1 and mode.k == 1.3 and mode.helicity == -1


def test_case_2_is_equal_weight_mix_at_unit_a():
    state = build_case(CaseSpec(case_id=2, a=1.0, phi=math.pi, helicity=1, k=1.0))
    coeffs = {m.energy_sign: c for c, m in state.terms}
    assert abs(coeffs[1]) == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-12)
    assert abs(coeffs[-1]) == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-12)
    assert {m.k for _, m in state.terms} == {1.0}


def test_case_4_mixes_opposite_spin_labels():
    state = build_case(CaseSpec(case_id=4, a=0.5, k=0.9, helicity=1))
    labels = {(m.energy_sign, m.helicity) for _, m in state.terms}
    assert labels == {(1, 1), (-1, -1)}
    assert {m.k for _, m in state.terms} == {0.9}


def test_case_7_pairs_rest_mode_with_left_mover():
    state = build_case(CaseSpec(case_id=7, a=0.4, k=1.1))
    ks = sorted(m.k for _, m in state.terms)
    assert ks == [-1.1, 0.0]
    assert all(m.energy_sign == -1 for _, m in state.terms)


def test_mode_energies_used_for_phase_shift():
    spec = CaseSpec(case_id=6, a=0.3, k=1.2, energy_sign=-1)
    e1, e2 = case_energies(spec)
    assert e1 == pytest.approx(-1.0)
    assert e2 == pytest.approx(-dispersion(1.2, 1))


def test_closed_form_case_2_known_value():
    # substitution with gamma = 2 (k = sqrt(3)): (1/4) [0 - 2] = -0.5
    spec = CaseSpec(case_id=2, a=1.0, phi=math.pi, helicity=1, k=math.sqrt(3.0))
    jz = closed_form_current(spec).jz(0.0)
    assert jz == pytest.approx(-0.5, rel=1e-12)


def test_closed_form_case_4_longitudinal_positive():
    for a in (0.0, 0.3, 0.8, 0.99):
        spec = CaseSpec(case_id=4, a=a, phi=1.0, k=1.5)
        form = closed_form_current(spec)
        expected = (1.5 / dispersion(1.5, 1)) * (1.0 - a * a) / (1.0 + a * a)
        assert form.jz(3.21) == pytest.approx(expected, rel=1e-12)
        assert form.jz(3.21) > 0.0


def test_closed_form_case_5_at_aligned_point():
    # z = phi/(2k) makes the oscillation phase vanish: jx at maximum, jy = 0
    a, phi, k = 0.6, 0.9, 1.3
    spec = CaseSpec(case_id=5, a=a, phi=phi, helicity=1, k=k)
    form = closed_form_current(spec)
    z = phi / (2.0 * k)
    abs_e = dispersion(k, 1)
    assert form.jx(z) == pytest.approx(2.0 * a / ((1.0 + a * a) * abs_e), rel=1e-12)
    assert form.jy(z) == pytest.approx(0.0, abs=1e-12)


def test_verify_case_1_both_signs_exact():
    for sign in (1, -1):
        spec = CaseSpec(case_id=1, k=1.7, energy_sign=sign)
        report = verify_case(spec, Z_GRID)
        assert report.fitted_scale == pytest.approx(1.0, abs=1e-12)
        assert report.max_residual < 1e-12
        assert report.passed


def test_verify_case_3_fine_grid():
    report = verify_case(CaseSpec(case_id=3, a=0.3, phi=math.pi / 3.0, k=1.0), Z_GRID)
    assert report.passed
    assert report.max_residual < 1e-10 * report.current_scale


def test_verify_case_6_scale_cancels_mode_normalization():
    # the built state is coefficient-normalized while the printed current is
    # not, so the fit absorbs 2 / (1 + a^2 P^2) with P^2 = 2|E|/(|E| + mc^2)
    a, k = 0.6, 1.4
    spec = CaseSpec(case_id=6, a=a, phi=0.8, k=k)
    abs_e = dispersion(k, 1)
    boost_sq = 2.0 * abs_e / (abs_e + 1.0)
    report = verify_case(spec, Z_GRID)
    assert report.passed
    assert report.fitted_scale == pytest.approx(2.0 / (1.0 + a * a * boost_sq), rel=1e-10)


def test_verify_all_cases_randomized():
    rng = np.random.default_rng(101)
    for case_id in range(1, 8):
        for _ in range(10):
            spec = CaseSpec(
                case_id=case_id,
                a=float(rng.uniform(0.0, 1.0)),
                phi=float(rng.uniform(0.0, 2.0 * math.pi)),
                helicity=int(rng.choice([1, -1])),
                k=float(rng.uniform(0.05, 3.0)),
                energy_sign=int(rng.choice([1, -1])),
            )
            report = verify_case(spec, np.linspace(-8.0, 8.0, 401))
            assert report.passed, f"case {case_id} failed at {spec}"
            assert report.fitted_scale > 0.0


def test_verify_holds_at_nonzero_time():
    for case_id in (2, 3, 5, 6):
        spec = CaseSpec(case_id=case_id, a=0.45, phi=0.3, k=1.2)
        report = verify_case(spec, Z_GRID, t=2.7)
        assert report.passed, f"case {case_id} failed at t != 0"


def test_critical_amplitude_values():
    assert critical_amplitude(1.0) == 0.0
    # sqrt(2/4) = 1/sqrt(2)
    assert critical_amplitude(3.0) == pytest.approx(0.7071067811865476, rel=1e-12)
    with pytest.raises(ValueError):
        critical_amplitude(0.9)


def test_case_2_current_vanishes_at_onset():
    gamma = 2.0
    k = math.sqrt(gamma * gamma - 1.0)
    a_c = critical_amplitude(gamma)
    base = CaseSpec(case_id=2, a=a_c, phi=math.pi, helicity=1, k=k)
    assert abs(closed_form_current(base).jz(0.0)) < 1e-12
    assert closed_form_current(replace(base, a=a_c + 0.01)).jz(0.0) < 0.0
    assert closed_form_current(replace(base, a=a_c - 0.01)).jz(0.0) > 0.0


def test_case_2_backflow_onset_matches_closed_form_by_bisection():
    # bisect the closed-form jz(a) at phi = pi and compare with the
    # critical-amplitude expression
    for gamma in (1.5, 2.0, 4.0):
        k = math.sqrt(gamma * gamma - 1.0)

        def jz(a):
            return closed_form_current(CaseSpec(case_id=2, a=a, phi=math.pi, helicity=1, k=k)).jz(0.0)

        lo, hi = 1e-9, 1.0
        assert jz(lo) > 0.0 > jz(hi)
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            if jz(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        assert 0.5 * (lo + hi) == pytest.approx(critical_amplitude(gamma), abs=1e-10)


def test_case_3_explicit_backflow_instance():
    # v = a c requires k = a / sqrt(1 - a^2); negative jz at z = 0
    a = 0.5
    k = a / math.sqrt(1.0 - a * a)
    spec = CaseSpec(case_id=3, a=a, phi=math.pi, helicity=1, k=k)
    assert closed_form_current(spec).jz(0.0) < 0.0


def test_cases_4_5_transverse_without_transverse_momentum():
    zs = np.linspace(-5.0, 5.0, 101)
    for case_id in (4, 5):
        for a in (0.01, 0.4, 0.9):
            spec = CaseSpec(case_id=case_id, a=a, phi=0.7, k=1.1)
            j = closed_form_current(spec).evaluate(zs)
            assert np.all(j[:, 2] > 0.0)
            assert np.max(np.abs(j[:, :2])) > 0.0


def test_cases_6_7_current_zeros_located_by_bisection():
    # jz vanishes where cos(k z +- phi) = -a
    for case_id, phase_sign in ((6, 1.0), (7, -1.0)):
        a, phi, k = 0.55, 0.9, 1.3
        spec = CaseSpec(case_id=case_id, a=a, phi=phi, k=k)
        jz = closed_form_current(spec).jz
        root = math.acos(-a)
        target = (phase_sign * (root - phi)) / k if case_id == 6 else (root + phi) / k
        lo, hi = target - 0.4, target + 0.4
        assert jz(lo) * jz(hi) < 0.0
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            if jz(mid) * jz(lo) > 0.0:
                lo = mid
            else:
                hi = mid
        found = 0.5 * (lo + hi)
        assert math.cos(k * found + phase_sign * phi) == pytest.approx(-a, abs=1e-10)


def test_fit_scale_guards():
    ones = np.ones((5, 3))
    assert fit_scale(2.0 * ones, ones) == pytest.approx(2.0)
    assert fit_scale(np.zeros((5, 3)), np.zeros((5, 3))) == 1.0
    with pytest.raises(ScaleNotPositive):
        fit_scale(ones, -ones)
    with pytest.raises(ScaleNotPositive):
        fit_scale(ones, np.zeros((5, 3)))


def test_report_serializes_to_json():
    report = verify_case(CaseSpec(case_id=4, a=0.5), np.linspace(-2.0, 2.0, 51))
    report.backflow_intervals = []
    payload = json.loads(json.dumps(report.as_dict()))
    assert payload["case_id"] == 4
    assert payload["passed"] is True
    assert payload["backflow_intervals"] == []
    assert payload["params"]["a"] == 0.5
