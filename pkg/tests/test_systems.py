import numpy as np
import pytest

from conftest import random_qp, random_u, random_v

from lattice_flows import (
    ChartMismatch,
    DivisionByZero,
    Spectrum,
    UnsupportedDimension,
    ab_state,
    c_state,
    null_combination,
    qp_state,
    sklyanin_spectrum,
    u_state,
    v_state,
)
from lattice_flows.systems import (
    ab_field,
    bv_field,
    c_family_data,
    c_field,
    hamiltonian_eval,
    integrals_F1_F2,
    km_field,
    qp_field,
    spectrum_field,
    toda_ab_field,
    u_to_v,
    vd_field,
)

A2 = Spectrum(3, ((1, -1, 0), (0, 1, -1)))


def test_km_examples():
    assert np.allclose(km_field(u_state([1, 1, 1])), [1, 0, -1])
    assert np.all(km_field(u_state([0, 0, 0])) == 0)
    assert np.allclose(km_field(u_state([1, 2, 3])), [2, 4, -6])


def test_km_chart_mismatch():
    with pytest.raises(ChartMismatch):
        km_field(v_state([1, 1, 1]))


def test_bv_examples():
    assert np.allclose(bv_field("B", u_state([1, 1, 1])), [3, 1, -2])
    assert np.allclose(bv_field("D", u_state([1] * 6)), [3, 1, 0, 0, -2, -2])
    assert np.allclose(bv_field("C", u_state([0, 0, 0])), 0)
    assert np.allclose(bv_field("A", u_state([1, 1, 1])), km_field(u_state([1, 1, 1])))


def test_bv_minimum_sizes():
    with pytest.raises(UnsupportedDimension):
        bv_field("D", u_state([1, 1, 1, 1]))
    with pytest.raises(UnsupportedDimension):
        bv_field("B", u_state([1, 1]))


def test_c_field_examples():
    assert np.allclose(c_field("A", c_state([1, 1])), [-1, 1])
    assert np.allclose(c_field("A", c_state([1, 1, 1])), [-1, 0, 1])


def test_c_field_d4_against_bruteforce():
    # independent oracle: assemble the signed structure constants explicitly
    c = np.array([1.0, 1.0, 1.0, 1.0])
    edges, k = c_family_data("D", 4)
    cij = np.zeros((4, 4))
    for i, j in edges:
        cij[i, j] = 1.0
        cij[j, i] = -1.0
    expected = np.array([-sum(k[j] * cij[i, j] / c[j] for j in range(4)) for i in range(4)])
    assert np.allclose(expected, [-2, -1, 2, 2])
    assert np.allclose(c_field("D", c_state(c)), expected)


def test_c_field_zero_rejected():
    with pytest.raises(DivisionByZero):
        c_field("A", c_state([1, 0]))


def test_vd_examples():
    assert np.allclose(vd_field(v_state([1, 1, 1, 1])), [2, 1, -1, -1])
    assert np.all(vd_field(v_state([0, 0, 0, 0])) == 0)
    assert np.allclose(vd_field(v_state([1, 2, 1, 1, 2])), [3, 0, 1, 0, -4])


def test_fields_quadratic_homogeneity(rng):
    for _ in range(10):
        n = int(rng.integers(5, 9))
        u = random_u(rng, n)
        two_u = u_state(2 * u.array)
        for field in (km_field, lambda s: bv_field("B", s), lambda s: bv_field("C", s), lambda s: bv_field("D", s)):
            ratio = field(two_u) - 4 * field(u)
            assert np.max(np.abs(ratio)) < 1e-12 * max(1.0, np.max(np.abs(field(u))))
        v = random_v(rng, n)
        assert np.max(np.abs(vd_field(v_state(2 * v.array)) - 4 * vd_field(v))) < 1e-11


def test_vd_equals_rescaled_bv_d(rng):
    for n in (5, 6, 7, 9):
        for _ in range(5):
            u = random_u(rng, n)
            pushed = vd_field(u_to_v(u))
            # chain rule through the diagonal rescaling
            scale = np.ones(n)
            scale[1 : n - 2] = 2.0
            assert np.max(np.abs(pushed - scale * bv_field("D", u))) < 1e-12


def test_ab_examples():
    assert np.allclose(ab_field(ab_state([1, 1, 1], [1, 1])), [2, 0, -2, 0, 0])
    assert np.all(ab_field(ab_state([0, 0], [0])) == 0)
    assert np.allclose(ab_field(ab_state([1, 2], [3])), [6, -12, 6])


def test_toda_ab_field_boundary():
    out = toda_ab_field(ab_state([1, 1], [1, 2, 3]))
    assert np.allclose(out, [1, 1, 2, 0, -2])


def test_spectrum_field_examples():
    single = Spectrum(2, ((1, -1),))
    out = spectrum_field(single, ab_state([1], [1]))
    assert np.allclose(out, [1, 2])
    out = spectrum_field(A2, ab_state([1, 1], [0, 0]))
    assert np.allclose(out, [0, 0, 1, 1])
    assert np.all(spectrum_field(A2, ab_state([0, 0], [0, 0])) == 0)


def test_integrals_examples():
    f1, f2 = integrals_F1_F2(ab_state([1, 1], [2, 3]), [1, 1])
    assert f1 == 5 and f2 == 1
    f1, f2 = integrals_F1_F2(ab_state([1, 1], [2, 3]), [0, 0])
    assert f1 == 0 and f2 == 1
    _, f2 = integrals_F1_F2(ab_state([2, 3, 4], [0, 0, 0]), [1, 2, 1])
    assert f2 == 72


def test_integrals_conserved_along_flow(rng):
    # spectra with more vectors than the dimension admit null combinations;
    # their two integrals must ride along the polynomial flow unchanged
    from lattice_flows.catalog import get_system
    from lattice_flows.integrate import FixedStep, drift_report, integrate

    from lattice_flows.transforms import generalized_flaschka

    spec = sklyanin_spectrum(3)
    lam = null_combination(spec)[0]
    system = get_system("spectrum", spectrum=spec)
    # start on the image of the exponential map: there F1 vanishes, which is
    # exactly where the product integral rides along unchanged
    s0 = generalized_flaschka(random_qp(rng, 3), spec)
    traj = integrate(system, s0, 5.0, FixedStep(1e-3))
    report = drift_report(
        traj,
        {
            "F1": lambda s: integrals_F1_F2(s, lam)[0],
            "F2": lambda s: integrals_F1_F2(s, lam)[1],
        },
    )
    for rec in report:
        # F1 vanishes identically on the image, so judge it by absolute drift
        assert rec.max_rel_drift < 1e-8 or rec.max_abs_drift < 1e-10, rec


def test_hamiltonian_examples():
    assert hamiltonian_eval("sklyanin", qp_state([0, 0], [0, 0])) == 3
    assert hamiltonian_eval("toda", qp_state([0, 0], [0, 0])) == 1
    full = hamiltonian_eval(
        "sklyanin_full", qp_state([0, 0], [0, 0]), {"beta1": 0.0, "betan": 0.0}
    )
    assert full == 3


def test_qp_field_examples():
    out = qp_field("sklyanin", qp_state([0, 0], [0, 0]))
    assert np.allclose(out, [0, 0, 1, -1])
    out = qp_field("toda", qp_state([0.3, -0.2], [0, 0]))
    assert np.allclose(out[:2], 0)


def test_qp_field_matches_finite_differences(rng):
    h = 1e-6
    for system, params in (("toda", None), ("sklyanin", None), ("sklyanin_full", {"alpha1": 0.7, "beta1": 1.3, "alphan": 0.2, "betan": 0.5})):
        for _ in range(50):
            n = int(rng.integers(2, 5))
            state = random_qp(rng, n)
            q = state.first().real
            p = state.second().real
            field = qp_field(system, state, params)
            for i in range(n):
                dq = np.zeros(n)
                dq[i] = h
                dh_dq = (
                    hamiltonian_eval(system, qp_state(q + dq, p), params)
                    - hamiltonian_eval(system, qp_state(q - dq, p), params)
                ) / (2 * h)
                dh_dp = (
                    hamiltonian_eval(system, qp_state(q, p + dq), params)
                    - hamiltonian_eval(system, qp_state(q, p - dq), params)
                ) / (2 * h)
                assert abs(field[i] - dh_dp) < 1e-7
                assert abs(field[n + i] + dh_dq) < 1e-7


def test_integrals_zero_to_negative_power_rejected():
    from lattice_flows import DomainError

    with pytest.raises(DomainError):
        integrals_F1_F2(ab_state([0.0, 1.0], [0.0, 0.0]), [-1.0, 1.0])
