"""Machine-checkable property suite.

Runs one named check per library invariant and returns a JSON-ready
report with stable key order.  Each check records its worst residual
and tolerance; convention-resolution outcomes (the 3D Casimir metric
and the 2D closed-form comparison) are recorded alongside the checks.
"""

from __future__ import annotations

import numpy as np

from .lie import AlgebraParams, anh_algebra, basis_vector, bracket, jacobi_residual
from .orbit import (
    DualPoint,
    OrbitParams,
    casimir_kernel_residual,
    kirillov_matrix,
    orbit_structure_2d,
    orbit_structure_3d,
    resolve_casimir_convention_3d,
)
from .ncps import (
    PhasePoint,
    PoissonStructure,
    ScalarField,
    couple,
    decouple,
    jacobi_conditions,
    nc_bracket,
)
from .dynamics import (
    ScenarioParams,
    build_scenario,
    closed_form_flow_1d,
    integrate,
)

__all__ = ["run_verification"]


def _check(name, residual, tolerance, notes=None):
    rec = {
        "name": name,
        "status": "pass" if residual <= tolerance else "fail",
        "residual": float(residual),
        "tolerance": float(tolerance),
    }
    if notes is not None:
        rec["notes"] = notes
    return rec


def _all_algebras(rng, n_draws=20):
    for dim in (1, 2, 3):
        for sign in ("plus", "minus"):
            for _ in range(n_draws):
                w, c, r = rng.uniform(0.1, 10.0, size=3)
                yield AlgebraParams(dim=dim, sign=sign, omega=w, c=c, r=r)


def _random_element(rng, sc):
    return rng.uniform(-1.0, 1.0, size=sc.n)


def _quadratic_field(rng, n):
    """Random quadratic scalar with analytic gradient."""
    Q = rng.uniform(-1.0, 1.0, size=(2 * n, 2 * n))
    Q = Q + Q.T
    c = rng.uniform(-1.0, 1.0, size=2 * n)
    return ScalarField(
        value=lambda z: float(0.5 * z.z @ Q @ z.z + c @ z.z),
        gradient=lambda z: Q @ z.z + c,
    )


def _random_structure(rng, n=2, poisson_pairing=False):
    def skew(scale=1.0):
        M = rng.uniform(-scale, scale, size=(n, n))
        return M - M.T

    F, G = skew(), skew(0.4)
    pairing = np.eye(n) - 0.25 * F @ G if poisson_pairing else np.eye(n)
    return PoissonStructure(n=n, F=F, G=G, pairing=pairing)


def _lie_checks(rng):
    worst = 0.0
    for params in _all_algebras(rng):
        worst = max(worst, jacobi_residual(anh_algebra(params)))
    yield _check("lie_jacobi_all_algebras", worst, 1e-12)

    worst = 0.0
    for params in _all_algebras(rng, n_draws=3):
        sc = anh_algebra(params)
        x, y, z = (_random_element(rng, sc) for _ in range(3))
        a, b = rng.uniform(-2.0, 2.0, size=2)
        lin = bracket(sc, a * x + b * y, z) - a * bracket(sc, x, z) - b * bracket(sc, y, z)
        anti = bracket(sc, x, y) + bracket(sc, y, x)
        worst = max(worst, float(np.abs(lin).max()), float(np.abs(anti).max()))
    yield _check("lie_bracket_bilinear_antisymmetric", worst, 1e-12)

    worst = 0.0
    for params in _all_algebras(rng, n_draws=1):
        sc = anh_algebra(params)
        central = [lab for lab in sc.basis if lab == "M" or lab.startswith("J")]
        for lab in central:
            e_c = basis_vector(sc, lab)
            for other in sc.basis:
                worst = max(
                    worst, float(np.abs(bracket(sc, e_c, basis_vector(sc, other))).max())
                )
    yield _check("lie_central_generators", worst, 0.0)


def _random_dual(rng, dim):
    h = {1: None, 2: rng.uniform(-0.5, 0.5), 3: rng.uniform(-0.5, 0.5, size=3)}[dim]
    return DualPoint(
        m=rng.uniform(0.5, 2.0),
        k=rng.uniform(-1.0, 1.0, size=dim),
        p=rng.uniform(-1.0, 1.0, size=dim),
        e=rng.uniform(-1.0, 1.0),
        h=h,
    )


def _orbit_checks(rng, conventions):
    worst = 0.0
    for params in _all_algebras(rng, n_draws=2):
        sc = anh_algebra(params)
        xi, eta = _random_dual(rng, params.dim), _random_dual(rng, params.dim)
        a, b = rng.uniform(-2.0, 2.0, size=2)
        va, vb = xi.as_vector(sc), eta.as_vector(sc)
        lin = kirillov_matrix(sc, a * va + b * vb) - a * kirillov_matrix(
            sc, va
        ) - b * kirillov_matrix(sc, vb)
        B = kirillov_matrix(sc, xi)
        worst = max(worst, float(np.abs(lin).max()), float(np.abs(B + B.T).max()))
    yield _check("orbit_kirillov_linear_antisymmetric", worst, 1e-12)

    worst = 0.0
    selections = {}
    for dim in (1, 2):
        for sign in ("plus", "minus"):
            params = AlgebraParams(dim=dim, sign=sign, omega=1.3, c=0.9, r=1.1)
            sc = anh_algebra(params)
            for _ in range(100):
                worst = max(worst, casimir_kernel_residual(sc, _random_dual(rng, dim)))
    for sign in ("plus", "minus"):
        params = AlgebraParams(dim=3, sign=sign, omega=1.3, c=0.9, r=1.1)
        res = resolve_casimir_convention_3d(params, rng, n_samples=30)
        selections[sign] = res
        key = "branch-adapted (I - s omega^2 A^2, sign-corrected quadratic)"
        worst = max(worst, res["residuals"][key])
    conventions["casimir_metric_3d"] = selections
    yield _check(
        "orbit_casimir_kernel",
        worst,
        1e-6,
        notes={s: selections[s]["selected"] for s in selections},
    )

    worst = 0.0
    for params in _all_algebras(rng, n_draws=1):
        sc = anh_algebra(params)
        B = kirillov_matrix(sc, _random_dual(rng, params.dim))
        for i, lab in enumerate(sc.basis):
            if lab == "M" or lab.startswith("J"):
                worst = max(worst, float(np.abs(B[i]).max()), float(np.abs(B[:, i]).max()))
    yield _check("orbit_central_directions_vanish", worst, 0.0)

    worst = 0.0
    count = 0
    while count < 50:
        dim = 2 if count % 2 == 0 else 3
        sign = "plus" if (count // 2) % 2 == 0 else "minus"
        params = AlgebraParams(
            dim=dim, sign=sign,
            omega=rng.uniform(0.5, 2.0), c=rng.uniform(0.5, 2.0), r=rng.uniform(0.5, 2.0),
        )
        op = OrbitParams(algebra=params, xi=_random_dual(rng, dim))
        orbit = orbit_structure_2d(op) if dim == 2 else orbit_structure_3d(op)
        if orbit.degenerate:
            continue
        count += 1
        inv = orbit.poisson_matrix
        worst = max(
            worst,
            float(np.abs(inv + inv.T).max()),
            float(np.abs(orbit.F + orbit.F.T).max()),
            float(np.abs(orbit.G + orbit.G.T).max()),
            float(np.abs(orbit.omega_matrix @ inv - np.eye(2 * dim)).max()),
        )
    yield _check("orbit_inverse_consistency", worst, 1e-12)

    # closed-form regime h = m*omega*r^2 with c = omega*r
    m, w, r = 1.0, 1.0, 1.0
    notes = {}
    worst = 0.0
    for sign in ("minus", "plus"):
        params = AlgebraParams(dim=2, sign=sign, omega=w, c=w * r, r=r)
        xi = DualPoint(m=m, k=np.zeros(2), p=np.zeros(2), e=0.0, h=m * w * r**2)
        orbit = orbit_structure_2d(OrbitParams(algebra=params, xi=xi))
        if orbit.degenerate:
            notes[sign] = {"degenerate": True, "det": orbit.det}
            continue
        ids = orbit.closed_form["field_identities"]
        match = orbit.closed_form["pattern_match"]
        notes[sign] = {
            "degenerate": False,
            "matched_mu_e": match["mu_e"],
            "pattern_deviation": match["deviation"],
        }
        worst = max(worst, match["deviation"], ids["mass_identity_residual"])
    conventions["closed_form_2d"] = notes
    yield _check("orbit_2d_closed_form_identities", worst, 1e-12, notes=notes)


def _ncps_checks(rng):
    worst = 0.0
    for _ in range(20):
        ps = _random_structure(rng)
        z = PhasePoint(p=rng.uniform(-1, 1, 2), q=rng.uniform(-1, 1, 2), chart="coupled")
        f, g, h = (_quadratic_field(rng, 2) for _ in range(3))
        a, b = rng.uniform(-2.0, 2.0, size=2)
        anti = nc_bracket(ps, f, g, z) + nc_bracket(ps, g, f, z)
        combo = ScalarField(
            value=lambda zz: a * f(zz) + b * g(zz),
            gradient=lambda zz: a * f.grad(zz) + b * g.grad(zz),
        )
        lin = nc_bracket(ps, combo, h, z) - a * nc_bracket(ps, f, h, z) - b * nc_bracket(
            ps, g, h, z
        )
        worst = max(worst, abs(anti), abs(lin))
    yield _check("ncps_bracket_antisymmetric_bilinear", worst, 1e-10)

    worst = 0.0
    for _ in range(10):
        ps = _random_structure(rng)
        z = PhasePoint(p=rng.uniform(-1, 1, 2), q=rng.uniform(-1, 1, 2), chart="coupled")
        f, g, h = (_quadratic_field(rng, 2) for _ in range(3))
        prod = ScalarField(value=lambda zz: g(zz) * h(zz))  # finite-difference gradient
        lhs = nc_bracket(ps, f, prod, z)
        rhs = nc_bracket(ps, f, g, z) * h(z) + g(z) * nc_bracket(ps, f, h, z)
        worst = max(worst, abs(lhs - rhs))
    yield _check("ncps_leibniz", worst, 1e-8)

    worst = 0.0
    canonical = PoissonStructure.canonical(2)
    for _ in range(10):
        ps = _random_structure(rng, poisson_pairing=True)
        p0, q0 = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
        f, g = (_quadratic_field(rng, 2) for _ in range(2))
        origin = PhasePoint(p=np.zeros(2), q=np.zeros(2))
        T = np.block(
            [[np.eye(2), -0.5 * ps.F(origin)], [-0.5 * ps.G(origin).T, np.eye(2)]]
        )
        Tinv = np.linalg.inv(T)

        def pull(fld):
            def value(zz):
                w = Tinv @ zz.z
                return fld(PhasePoint.from_z(w, "darboux"))

            def gradient(zz):
                w = Tinv @ zz.z
                return Tinv.T @ fld.grad(PhasePoint.from_z(w, "darboux"))

            return ScalarField(value=value, gradient=gradient)

        zd = PhasePoint(p=p0, q=q0)
        pi, x = couple(ps, p0, q0)
        zc = PhasePoint(p=pi, q=x, chart="coupled")
        worst = max(
            worst,
            abs(nc_bracket(canonical, f, g, zd) - nc_bracket(ps, pull(f), pull(g), zc)),
        )
    yield _check("ncps_chart_equivalence", worst, 1e-8)

    worst = 0.0
    grid = [
        PhasePoint(p=rng.uniform(-1, 1, 2), q=rng.uniform(-1, 1, 2), chart="coupled")
        for _ in range(4)
    ]
    rep = jacobi_conditions(_random_structure(rng), grid)
    if rep["all_ok"]:
        worst = max(worst, rep["jacobi_residual"])
    smooth = PoissonStructure(
        n=2,
        F=lambda z: -np.sin(z.q[0]) * np.array([[0.0, 1.0], [-1.0, 0.0]]),
        G=None,
        pairing=np.eye(2),
        constant_fields=False,
    )
    rep2 = jacobi_conditions(smooth, grid)
    if rep2["field_dependence_ok"] and rep2["closedness_ok"]:
        worst = max(worst, rep2["jacobi_residual"])
    yield _check("ncps_jacobi_coordinate_triples", worst, 1e-8)


def _dynamics_checks(rng):
    electron = ScenarioParams(m=1.0, e=1.0, B=2.0)
    spring = ScenarioParams(k=1.0, estar=1.0, Bstar=2.0)
    pendulum = ScenarioParams(m=1.0, k=2.0, e=1.0, B=2.0, estar=1.0, Bstar=1.0)
    worst = 0.0
    for name, sp in (("electron", electron), ("spring", spring), ("pendulum", pendulum)):
        sc = build_scenario(name, sp)
        z0 = PhasePoint(p=[0.3, -0.2], q=[1.0, 0.5], chart="coupled")
        traj = integrate(
            sc.ps, sc.hamiltonian, z0, t_end=10.0, dt=1e-3, method="darboux_exactified"
        )
        worst = max(worst, float(np.abs(traj.energy - traj.energy[0]).max()))
    yield _check("dynamics_energy_conservation", worst, 1e-6)

    worst = 0.0
    alg1 = AlgebraParams(dim=1, sign="minus", omega=1.0)
    xi1 = DualPoint(m=1.0, k=[0.2], p=[0.4], e=1.0)
    alg2 = AlgebraParams(dim=2, sign="plus", omega=1.0, c=1.0, r=1.0)
    xi2 = DualPoint(m=2.0, k=[0.1, -0.2], p=[0.3, 0.4], e=1.0, h=1.0)
    for name, alg, xi in (("anh1d", alg1, xi1), ("anh2d", alg2, xi2)):
        sc = build_scenario(name, algebra=alg, xi=xi)
        z0 = PhasePoint(p=xi.p, q=xi.k, chart=sc.chart)
        traj = integrate(
            sc.ps, sc.hamiltonian, z0, t_end=10.0, dt=1e-3,
            method="darboux_exactified", casimir=sc.casimir,
        )
        worst = max(worst, float(np.abs(traj.casimir - traj.casimir[0]).max()))
    yield _check("dynamics_casimir_conservation", worst, 1e-6)

    sc = build_scenario("electron", ScenarioParams(m=1.0, e=1.0, B=2.0, Evec=[0.1, 0.0]))
    p0, q0 = np.array([0.5, 0.0]), np.array([0.0, 0.7])
    canonical = PoissonStructure.canonical(2)
    traj_d = integrate(
        canonical, sc.hamiltonian, PhasePoint(p=p0, q=q0), t_end=1.0, dt=1e-3
    )
    pi0, x0 = couple(sc.ps, p0, q0)
    traj_c = integrate(
        sc.ps, sc.hamiltonian, PhasePoint(p=pi0, q=x0, chart="coupled"),
        t_end=1.0, dt=1e-3,
    )
    worst = 0.0
    for zd, zc in zip(traj_d.states, traj_c.states):
        pi, x = couple(sc.ps, zd.p, zd.q)
        worst = max(worst, float(np.abs(pi - zc.p).max()), float(np.abs(x - zc.q).max()))
    yield _check("dynamics_covariance", worst, 1e-6)

    worst = 0.0
    details = {}
    for ratio in (1e-2, 1e-4, 1e-6):
        m_s = 1.0 / ratio
        sp = ScenarioParams(
            m=1.0, k=m_s, e=1.0, B=2.0, estar=1.0, Bstar=2.0 / m_s, omega=1.0
        )
        sc = build_scenario("pendulum", sp)
        dev = float(np.abs(sc.ps.pairing - np.eye(2)).max())
        details[f"{ratio:g}"] = dev
        worst = max(worst, dev / ratio)
    yield _check("dynamics_pendulum_limit", worst, 1.0 + 1e-9, notes=details)

    worst = 0.0
    dt = 1e-3
    t = np.arange(0.0, 2.0 + dt / 2, dt)
    for sign, s in (("minus", -1.0), ("plus", 1.0)):
        _, q = closed_form_flow_1d(sign, m=1.2, omega=0.8, p0=0.5, q0=1.0, t=t)
        acc = (q[2:] - 2 * q[1:-1] + q[:-2]) / dt**2
        worst = max(worst, float(np.abs(acc - s * 0.8**2 * q[1:-1]).max()))
    yield _check("dynamics_1d_second_order", worst, 1e-5)


def run_verification(seed: int = 0) -> dict:
    """Run every named check; returns the full report."""
    rng = np.random.default_rng(seed)
    conventions: dict = {}
    checks = []
    checks.extend(_lie_checks(rng))
    checks.extend(_orbit_checks(rng, conventions))
    checks.extend(_ncps_checks(rng))
    checks.extend(_dynamics_checks(rng))
    failures = [c["name"] for c in checks if c["status"] != "pass"]
    return {
        "seed": seed,
        "status": "pass" if not failures else "fail",
        "failures": failures,
        "checks": checks,
        "conventions": conventions,
    }
