"""Acceptance criteria 1-11, each at its stated tolerance.

Every test prints one line ``criterion N: PASS|FAIL  <detail>`` to the
terminal, also without ``-s``, and then asserts the outcome.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from _cases import (
    hyperbolic_alpha_star,
    hyperbolic_case,
    hyperbolic_I_min,
    hyperbolic_index,
    reference_surface_components,
    random_index_cases,
)
from eulercells.cli import load_config, profile_from_config
from eulercells.criteria import (
    hardy_ratio_interior,
    hardy_ratio_origin,
    interior_extremum,
    isochronal,
    origin_extremum,
)
from eulercells.elliptic import E_complete, K_complete, jacobi_zeta, sn_cn_dn
from eulercells.index import (
    TestFunctionXi,
    Verdict,
    constant_vorticity_rule,
    index_I1,
    index_I2,
    index_I3,
    index_value,
    minimize_over_alpha,
)
from eulercells.kolmogorov import (
    G_bracket,
    cell_index_positivity,
    cell_profile,
    flow_residual,
    mbar,
    mbar_expansion,
)
from eulercells.profiles import make_rotational
from eulercells.surface import build_metric, verify_steady, vorticity_density
from eulercells.torus import dmsy_check, misiolek_index, zeta_22, zeta_32, zeta_33, zeta_m1


@pytest.fixture
def report(capsys):
    def emit(n, failures, detail=""):
        ok = not failures
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        if failures:
            line += "  failed: " + "; ".join(failures)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


def test_criterion_1_torus_exact_values(report):
    start = time.perf_counter()
    expected = {(m, 1, "m1"): Fraction(29 - 12 * m * m, 4) for m in range(2, 7)}
    expected[(2, 2, "22")] = Fraction(-854)
    expected[(3, 2, "32")] = Fraction(-764865, 8)
    expected[(3, 3, "33")] = Fraction(-51939)
    zetas = {"m1": zeta_m1, "22": zeta_22, "32": zeta_32, "33": zeta_33}
    failures = []
    for (m, n, key), want in expected.items():
        got = misiolek_index(m, n, zetas[key]()).q
        if got != want:
            failures.append(f"({m},{n}) gives {got} pi^2, expected {want} pi^2")
    elapsed = time.perf_counter() - start
    if elapsed >= 5.0:
        failures.append(f"runtime {elapsed:.2f} s")
    report(1, failures, f"{len(expected)} exact values in {elapsed:.2f} s")


def test_criterion_2_hyperbolic_disc(report):
    failures = []
    for rho in (2, 3):
        p, xi = hyperbolic_case(rho)
        for alpha in (-1.0, 0.0, 0.5, 1.5, 3.0):
            got, want = index_I1(p, xi, alpha), hyperbolic_index(alpha, rho)
            if abs(got - want) > 1e-8 * abs(want):
                failures.append(f"I({alpha}, {rho}) = {got!r} vs {want!r}")
        q = minimize_over_alpha(p, xi)
        if abs(q.alpha_star - hyperbolic_alpha_star(rho)) > 1e-8 * hyperbolic_alpha_star(rho):
            failures.append(f"alpha* at rho={rho}: {q.alpha_star!r}")
        if abs(q.I_min - hyperbolic_I_min(rho)) > 1e-8 * abs(hyperbolic_I_min(rho)):
            failures.append(f"I_min at rho={rho}: {q.I_min!r} vs {hyperbolic_I_min(rho)!r}")
    report(2, failures, "rho in {2, 3}, five alpha values, alpha*, I_min")


def test_criterion_3_sphere_example(report):
    p = make_rotational("sin(r)", "7/4 + 4*cos(r) + cos(r)^2", math.pi)
    xi = TestFunctionXi.of("sin(4*r)", 0.0, math.pi / 4)
    val = index_value(p, xi, 5.431).value
    failures = [] if abs(val + 0.5635) <= 0.01 * 0.5635 else [f"I(5.431) = {val!r}"]
    report(3, failures, f"I(5.431) = {val:.6f}")


def test_criterion_4_form_equivalence(report):
    failures = []
    worst = 0.0
    for i, (p, xi, alpha) in enumerate(random_index_cases(20)):
        i1 = index_I1(p, xi, alpha)
        for name, other in (("I2", index_I2), ("I3", index_I3)):
            d = abs(i1 - other(p, xi, alpha)) / (1 + abs(i1))
            worst = max(worst, d)
            if d > 1e-8:
                failures.append(f"case {i} {name}: scaled gap {d:.2e}")
    report(4, failures, f"20 cases, worst scaled gap {worst:.2e}")


def test_criterion_5_isochronal_dichotomy(report, sphere, flat_disc):
    failures = []
    hyper = make_rotational("sinh(r)", "1", 1.0)
    torus = make_rotational("1", "1", 1.0, pole=False)
    for name, p, want in (
        ("sphere", sphere, Verdict.CERTIFIED),
        ("hyperbolic", hyper, Verdict.CERTIFIED),
        ("flat disc", flat_disc, Verdict.INCONCLUSIVE),
        ("flat torus", torus, Verdict.INCONCLUSIVE),
    ):
        got = isochronal(p).verdict
        if got is not want:
            failures.append(f"{name}: {got}")
    rule = constant_vorticity_rule(flat_disc)
    if rule is not Verdict.NO_CONJUGATE_POINT:
        failures.append(f"constant vorticity rule on flat disc: {rule}")
    report(5, failures, "sphere/hyperbolic certified, flat inconclusive, rule fires on flat disc")


def test_criterion_6_interior_and_origin(report):
    failures = []
    p = make_rotational("sin(r)", "9/8 - sqrt(2)*cos(r) + cos(r)^2", math.pi / 2)
    rep = interior_extremum(p, math.pi / 4)
    ratio = rep.witness["ratio"]
    if abs(ratio - 5 / 8) > 1e-10 or rep.verdict is not Verdict.CERTIFIED:
        failures.append(f"interior ratio {ratio!r}, {rep.verdict}")
    cfg = load_config(
        "[profile]\nkind = general\nphi = r\nu = 5 + r^2/2\ne = 1\ng = r^2 - r^4/8\nR = 1\n"
    )
    o = origin_extremum(profile_from_config(cfg))
    if abs(o.lhs - 27) > 1e-10 or abs(o.rhs - 30) > 1e-10 or o.verdict is not Verdict.CERTIFIED:
        failures.append(f"origin {o.lhs!r} < {o.rhs!r}, {o.verdict}")
    report(6, failures, f"interior ratio {ratio:.12f}; origin {o.lhs:g} < {o.rhs:g}")


def test_criterion_7_hardy_ratios(report):
    failures = []
    for d in (0.1, 0.2):
        a, b = hardy_ratio_interior(d), hardy_ratio_origin(d)
        if abs(a - (9 / 4 + 4 * d / 3 + d * d / 3)) > 1e-6:
            failures.append(f"interior delta={d}: {a!r}")
        if abs(b - (d * d + d + 4)) > 1e-6:
            failures.append(f"origin delta={d}: {b!r}")
    report(7, failures, "delta in {0.1, 0.2}")


def test_criterion_8_kolmogorov_geometry(report):
    failures = []
    taus = np.linspace(-10, 10, 201)
    ident = 0.0
    for k in (0.0, 0.3, 0.7, 0.95, 0.9999):
        sn, cn, dn = sn_cn_dn(taus, k)
        ident = max(ident, np.max(np.abs(sn * sn + cn * cn - 1)), np.max(np.abs(dn * dn + k * k * sn * sn - 1)))
        if 0 < k < 1:
            kp = math.sqrt(1 - k * k)
            leg = E_complete(k) * K_complete(kp) + E_complete(kp) * K_complete(k) - K_complete(k) * K_complete(kp)
            ident = max(ident, abs(leg - math.pi / 2))
            ident = max(ident, abs(jacobi_zeta(K_complete(k), k)))
    if ident > 1e-12:
        failures.append(f"elliptic identities {ident:.2e}")
    ts = np.linspace(0.0, 3.0, 61)
    flow = max(flow_residual(m, n, s, ts) for m, n in ((1, 1), (3, 2)) for s in (0.1, 0.5, 0.9))
    if flow > 1e-7:
        failures.append(f"flow residual {flow:.2e}")
    grid = np.round(np.arange(1, 100) * 0.01, 2)
    mb = mbar(grid)
    if not np.all(mb < 0):
        failures.append("mbar not negative on the grid")
    rs = np.array([0.02, 0.05, 0.1])
    ratio = (mbar(rs) - mbar_expansion(rs)) / rs**6
    if not np.all(np.abs(ratio) < 5.0):
        failures.append(f"expansion residual ratios {ratio}")
    cell = cell_profile(1, 1)
    E, G, phi = cell.E(grid), cell.G(grid), cell.phi(grid)
    if not np.all(E * G >= phi * phi):
        failures.append("E G < phi^2 somewhere")
    gdiff = float(np.max(np.abs(G - G_bracket(1, 1, grid)) / np.maximum(np.abs(G), 1e-300)))
    if gdiff > 1e-10:
        failures.append(f"G forms differ by {gdiff:.2e}")
    report(
        8,
        failures,
        f"identities {ident:.1e}, flow {flow:.1e}, max mbar {mb.max():.2e}, r^6 ratios {np.round(ratio, 3)}",
    )


def test_criterion_9_cell_positivity(report):
    failures = []
    for m, n in ((1, 1), (3, 2)):
        rep = cell_index_positivity(m, n)
        if len(rep.results) != 10:
            failures.append(f"({m},{n}) used {len(rep.results)} test functions")
        for label, q in rep.results:
            if q.verdict is not Verdict.INCONCLUSIVE or not q.discriminant < 0:
                failures.append(f"({m},{n}) {label}: {q.verdict}, B^2-AC = {q.discriminant!r}")
    report(9, failures, "(1,1) and (3,2) cells, 10 test functions each")


def test_criterion_10_surface_builder(report):
    failures = []
    mf = build_metric("r", "r^2 - r^4/8", {"cos2": "r^6"}, R=1.0, u="5 + r^2/2")
    worst = 0.0
    for r, t in ((0.3, 0.0), (0.5, math.pi / 5), (0.7, math.pi / 2), (0.9, 1.0), (0.2, 2.5), (0.95, 4.0)):
        got = mf.components(r, t)
        want = reference_surface_components(r, t)
        gap = max(abs(float(g) - w) for g, w in zip(got, want))
        worst = max(worst, gap)
        if gap > 1e-10:
            failures.append(f"components at (r={r}, theta={t:.4f}) off by {gap:.2e}")
    rep = verify_steady(mf, 64)
    if rep.det_error > 1e-12:
        failures.append(f"det error {rep.det_error:.2e}")
    rs = np.linspace(0.02, 0.98, 49)
    vort = max(float(np.max(np.abs(vorticity_density(mf, rs, t) - (10 * rs - rs**3 / 2 - 3 * rs**5 / 8)))) for t in (0.0, 0.9, 2.2))
    if vort > 1e-9:
        failures.append(f"vorticity error {vort:.2e}")
    report(10, failures, f"component gap {worst:.2e}, det {rep.det_error:.1e}, vorticity {vort:.1e}")


def test_criterion_11_dmsy_region(report):
    failures = []
    members = 0
    for n in range(2, 13):
        for m in range(1, 13):
            # m > (3n^2+6)/(sqrt(3) n), decided in integers
            if not 3 * m * m * n * n > (3 * n * n + 6) ** 2:
                continue
            members += 1
            inside, val = dmsy_check(m, n)
            if not inside or not val < 0:
                failures.append(f"({m},{n}) index {val}")
    report(11, failures, f"{members} pairs in the region, all negative" if not failures else f"{members} pairs")
