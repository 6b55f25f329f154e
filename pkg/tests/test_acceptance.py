"""End-to-end acceptance suite.

Each test enforces one numbered criterion at its stated tolerance and prints
a single pass/fail line; run with ``pytest tests/test_acceptance.py -v -s``
to see the lines as they certify.
"""

import numpy as np

from lattice_flows import Spectrum, ab_state, c_state, qp_state, sklyanin_spectrum, u_state, v_state
from lattice_flows.catalog import get_system
from lattice_flows.integrate import FixedStep, drift_report, integrate
from lattice_flows.lax import (
    build_lax,
    casimir_C,
    grad_casimir_C,
    grad_casimir_F,
    grad_trace_invariant,
    h2_ab,
    lax_residual,
)
from lattice_flows.poisson import (
    casimir_residual,
    compatibility_residual,
    grad_vd_quarter_h2,
    hamiltonian_flow_check,
    jacobi_residual,
    lenard_residual,
    poisson_matrix,
    vd_quarter_h2,
)
from lattice_flows.rootdata import kozlov_treshchev_check
from lattice_flows.systems import (
    ab_field,
    c_field,
    hamiltonian_eval,
    km_field,
    qp_field,
    spectrum_field,
    toda_ab_field,
    vd_field,
)
from lattice_flows.transforms import (
    c_to_v,
    c_to_v_jacobian,
    d_transform,
    generalized_flaschka,
    henon_map,
    moser_reduce,
    pushforward_residual,
    sklyanin_flaschka,
    toda_flaschka,
    toda_jacobi,
)

SEED = 20240911


def report(number, name, passed, detail):
    verdict = "PASS" if passed else "FAIL"
    print(f"[acceptance] criterion {number:02d} ({name}): {verdict}  {detail}")
    assert passed, f"criterion {number} ({name}) failed: {detail}"


def fresh_rng():
    return np.random.default_rng(SEED)


def test_criterion_01_lax_certification():
    tol = 1e-10
    rng = fresh_rng()
    worst = 0.0
    for n in (2, 3, 5, 8):
        for _ in range(100):
            s = u_state(rng.uniform(0.1, 2.0, n))
            worst = max(worst, lax_residual(build_lax("km", s), km_field(s), s))
    for n in (2, 5, 8):
        for _ in range(100):
            s = ab_state(rng.uniform(-1, 1, n - 1), rng.uniform(-1, 1, n))
            worst = max(worst, lax_residual(build_lax("toda", s), toda_ab_field(s), s))
    for n in (5, 7, 9):
        for _ in range(100):
            s = v_state(rng.uniform(0.1, 2.0, n))
            worst = max(worst, lax_residual(build_lax("vd", s), vd_field(s), s))
    for m in (2, 3, 4):
        for _ in range(100):
            s = ab_state(rng.uniform(-1, 1, m + 1), rng.uniform(-1, 1, m))
            worst = max(worst, lax_residual(build_lax("ab", s), ab_field(s), s))
    report(1, "Lax certification", worst < tol, f"max residual {worst:.2e} < {tol:g}")


def test_criterion_02_moser_golden():
    tol = 1e-12
    rng = fresh_rng()
    worst = 0.0
    for _ in range(20):
        u = rng.uniform(0.1, 2.0, 4)
        a = np.sqrt(u / 2)
        L = build_lax("km", u_state(u)).L
        displayed_square = np.array(
            [
                [a[0] ** 2, 0, a[0] * a[1], 0, 0],
                [0, a[0] ** 2 + a[1] ** 2, 0, a[1] * a[2], 0],
                [a[0] * a[1], 0, a[1] ** 2 + a[2] ** 2, 0, a[2] * a[3]],
                [0, a[1] * a[2], 0, a[2] ** 2 + a[3] ** 2, 0],
                [0, 0, a[2] * a[3], 0, a[3] ** 2],
            ]
        )
        displayed_reduced = displayed_square[::2, ::2]
        worst = max(worst, np.max(np.abs(L @ L - displayed_square)))
        worst = max(worst, np.max(np.abs(moser_reduce(L) - displayed_reduced)))
        worst = max(worst, np.max(np.abs(toda_jacobi(henon_map(u_state(u))) - displayed_reduced)))
    report(2, "Moser golden test", worst < tol, f"max entry error {worst:.2e} < {tol:g}")


def test_criterion_03_pi1_golden():
    tol = 1e-12
    rng = fresh_rng()
    worst = 0.0
    for _ in range(20):
        v = rng.uniform(0.1, 2.0, 7)
        t12 = v[0] * v[2] / v[1]
        t13 = v[0] * v[2] * v[4] / (v[1] * v[3])
        t23 = v[2] * v[4] / v[3]
        half = 0.5 * (v[6] - v[5])
        displayed = np.array(
            [
                [0, v[0], -t12, t12, -t13, t13 / 2, t13 / 2],
                [-v[0], 0, v[2], -v[2], t23, -t23 / 2, -t23 / 2],
                [t12, -v[2], 0, v[2], -t23, t23 / 2, t23 / 2],
                [-t12, v[2], -v[2], 0, v[4], -v[4] / 2, -v[4] / 2],
                [t13, -t23, t23, -v[4], 0, v[4] / 2, v[4] / 2],
                [-t13 / 2, t23 / 2, -t23 / 2, v[4] / 2, -v[4] / 2, 0, half],
                [-t13 / 2, t23 / 2, -t23 / 2, v[4] / 2, -v[4] / 2, -half, 0],
            ]
        )
        got = poisson_matrix("pi1-v", v_state(v))
        worst = max(worst, np.max(np.abs(got - displayed)))
    report(3, "pi1 golden test", worst < tol, f"max entry error {worst:.2e} < {tol:g}")


def test_criterion_04_bihamiltonian_suite():
    rng = fresh_rng()
    jac = comp = cas = flow = 0.0
    for n in (5, 7):
        for _ in range(50):
            s = v_state(rng.uniform(0.1, 2.0, n))
            jac = max(jac, jacobi_residual("pi1-v", s), jacobi_residual("pi3-v", s))
            for lam in (1.0, 2.5):
                comp = max(comp, compatibility_residual("pi1-v", "pi3-v", lam, s))
            cas = max(cas, casimir_residual("pi1-v", grad_casimir_F, s))
            flow = max(
                flow,
                hamiltonian_flow_check("pi1-v", vd_quarter_h2, vd_field, s, grad_h=grad_vd_quarter_h2),
            )
    ok = jac < 1e-6 and comp < 1e-6 and cas < 1e-10 and flow < 1e-8
    report(
        4,
        "bi-Hamiltonian suite",
        ok,
        f"jacobi {jac:.2e} < 1e-6, compat {comp:.2e} < 1e-6, casimir {cas:.2e} < 1e-10, flow {flow:.2e} < 1e-8",
    )


def test_criterion_05_lenard():
    tol = 1e-7
    rng = fresh_rng()
    worst_v = 0.0
    for _ in range(50):
        worst_v = max(worst_v, lenard_residual("v", v_state(rng.uniform(0.1, 2.0, 7))))
    worst_ab = 0.0
    for m in (2, 3):
        for _ in range(50):
            s = ab_state(rng.uniform(-1, 1, m + 1), rng.uniform(-1, 1, m))
            worst_ab = max(worst_ab, lenard_residual("ab", s))
    ok = worst_v < tol and worst_ab < tol
    report(5, "Lenard relation", ok, f"v-chart {worst_v:.2e}, ab-chart {worst_ab:.2e} < {tol:g}")


def test_criterion_06_transform_conjugacy():
    tol = 1e-8
    rng = fresh_rng()
    chain5 = Spectrum(5, tuple(tuple(float(j == i) - float(j == i + 1) for j in range(5)) for i in range(4)))
    skl4 = sklyanin_spectrum(4)
    results = {}
    worst = 0.0
    for _ in range(100):
        r = pushforward_residual(henon_map, km_field, toda_ab_field, u_state(rng.uniform(0.1, 2, 5)))
        worst = max(worst, r)
    results["henon"] = worst
    worst = 0.0
    for _ in range(100):
        r = pushforward_residual(d_transform, vd_field, ab_field, v_state(rng.uniform(0.1, 2, 7)))
        worst = max(worst, r)
    results["d-map"] = worst
    worst = 0.0
    for _ in range(100):
        st = qp_state(rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3))
        r = pushforward_residual(
            sklyanin_flaschka, lambda x: qp_field("sklyanin", x), ab_field, st
        )
        worst = max(worst, r)
    results["flaschka-sklyanin"] = worst
    worst = 0.0
    for _ in range(100):
        st = qp_state(rng.uniform(-1, 1, 5), rng.uniform(-1, 1, 5))
        r = pushforward_residual(
            lambda x: toda_flaschka(x, chain5), lambda x: qp_field("toda", x), toda_ab_field, st
        )
        worst = max(worst, r)
    results["flaschka-toda"] = worst
    worst = 0.0
    for _ in range(100):
        st = qp_state(rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 4))
        r = pushforward_residual(
            lambda x: generalized_flaschka(x, skl4),
            lambda x: qp_field("sklyanin", x),
            lambda x: spectrum_field(skl4, x),
            st,
        )
        worst = max(worst, r)
    results["flaschka-general"] = worst
    worst = 0.0
    for _ in range(100):
        st = c_state(rng.uniform(0.1, 2.0, 8))
        r = pushforward_residual(
            c_to_v, lambda x: c_field("D", x), vd_field, st, jacobian=c_to_v_jacobian
        )
        worst = max(worst, r)
    results["c-to-v"] = worst
    ok = all(v < tol for v in results.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in results.items())
    report(6, "transform conjugacy", ok, f"{detail} < {tol:g}")


def test_criterion_07_casimir_constant():
    rng = fresh_rng()
    worst = 0.0
    for m in (2, 3, 4):
        target = 2.0 ** -(2 * m - 1)
        for _ in range(100):
            st = qp_state(rng.uniform(-1, 1, m), rng.uniform(-1, 1, m))
            c = casimir_C(sklyanin_flaschka(st))
            worst = max(worst, abs(c - target) / target)
    report(7, "Casimir constant", worst < 1e-13, f"max relative error {worst:.2e} < 1e-13")


def test_criterion_08_hamiltonian_correspondence():
    rng = fresh_rng()
    worst = 0.0
    for _ in range(50):
        m = int(rng.integers(2, 5))
        st = qp_state(rng.uniform(-1, 1, m), rng.uniform(-1, 1, m))
        lhs = h2_ab(sklyanin_flaschka(st))
        rhs = 0.5 * hamiltonian_eval("sklyanin", st)
        worst = max(worst, abs(lhs - rhs))
    report(8, "Hamiltonian correspondence", worst < 1e-12, f"max |h2 - H/2| {worst:.2e} < 1e-12")


def test_criterion_09_conservation_under_flow():
    tol = 1e-6
    ab_sys = get_system("ab")
    s0 = ab_state([1.0, 0.9, 1.1, 0.8], [0.1, -0.2, 0.3])
    traj = integrate(ab_sys, s0, 10.0, FixedStep(1e-3))
    inv = ab_sys.invariants(s0)
    drifts = {r.name: r.max_rel_drift for r in drift_report(traj, inv)}
    ab_ok = all(drifts[k] < tol for k in ("H2", "H4", "H6", "C"))
    vd_sys = get_system("vd")
    v0 = v_state([0.04, 0.05, 0.06, 0.05, 0.045, 0.06, 0.03])
    traj_v = integrate(vd_sys, v0, 10.0, FixedStep(1e-3))
    inv_v = {k: fn for k, fn in vd_sys.invariants(v0).items() if k in ("H2", "H4", "F")}
    drifts_v = {r.name: r.max_rel_drift for r in drift_report(traj_v, inv_v)}
    ok = ab_ok and all(d < tol for d in drifts_v.values())
    detail = (
        "ab "
        + ", ".join(f"{k} {drifts[k]:.1e}" for k in ("H2", "H4", "H6", "C"))
        + "; vd "
        + ", ".join(f"{k} {v:.1e}" for k, v in drifts_v.items())
    )
    report(9, "conservation under flow", ok, f"{detail} < {tol:g}")


def test_criterion_10_involution():
    tol = 1e-9
    rng = fresh_rng()
    worst = 0.0
    for _ in range(50):
        s = ab_state(rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 3))
        pi = poisson_matrix("pi1-ab", s)
        g2 = grad_trace_invariant("ab", s, 2)
        for order in (4, 6):
            gk = grad_trace_invariant("ab", s, order)
            worst = max(worst, abs(complex(g2 @ pi @ gk)))
    report(10, "involution", worst < tol, f"max |{{H2,Hk}}| {worst:.2e} < {tol:g}")


def test_criterion_11_condition_checker():
    all_pass = all(kozlov_treshchev_check(sklyanin_spectrum(n)).passed for n in range(2, 13))
    base = sklyanin_spectrum(4)
    extra = [0.0] * 4
    extra[0] = extra[1] = 1.0
    spoiled = Spectrum(4, base.vectors + (tuple(extra),))
    rep = kozlov_treshchev_check(spoiled)
    spoiled_fails = (not rep.passed) and any(r > 0 for _, _, r in rep.violations)
    ok = all_pass and spoiled_fails
    report(
        11,
        "integrability condition checker",
        ok,
        f"sizes 2..12 pass; augmented spectrum fails with ratio "
        f"{max((r for _, _, r in rep.violations), default=float('nan')):+.1f}",
    )
