import numpy as np
import pytest

from ncphase.lie import AlgebraParams
from ncphase.ncps import (
    PhasePoint,
    PoissonStructure,
    ScalarField,
    coordinate_bracket_table,
    coordinate_field,
    couple,
    decouple,
    invertibility_margin,
    jacobi_conditions,
    nc_bracket,
)
from ncphase.orbit import DualPoint, OrbitParams, orbit_structure_2d

EPS2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def quadratic(rng, n):
    A = rng.standard_normal((2 * n, 2 * n))
    A = 0.5 * (A + A.T)
    b = rng.standard_normal(2 * n)

    def value(z):
        v = z.z
        return 0.5 * v @ A @ v + b @ v

    def grad(z):
        return A @ z.z + b

    return ScalarField(value=value, gradient=grad)


def test_couple_examples():
    ps0 = PoissonStructure.canonical(2)
    p, q = np.array([0.3, -0.1]), np.array([1.0, 2.0])
    pi, x = couple(ps0, p, q)
    assert np.allclose(pi, p) and np.allclose(x, q)

    mag = PoissonStructure.magnetic(eB=2.0)
    pi, x = couple(mag, np.zeros(2), np.array([1.0, 0.0]))
    assert np.allclose(pi, [0.0, -1.0], atol=1e-14)
    assert np.allclose(x, [1.0, 0.0], atol=1e-14)

    dual = PoissonStructure.dual(estarBstar=2.0)
    pi, x = couple(dual, np.array([1.0, 0.0]), np.zeros(2))
    assert np.allclose(pi, [1.0, 0.0], atol=1e-14)
    assert np.allclose(x, [0.0, 1.0], atol=1e-14)


def test_decouple_round_trip_and_forward_residual():
    mixed = PoissonStructure.mixed(eB=2.0, estarBstar=1.0)
    p0, q0 = np.array([0.4, -0.7]), np.array([0.2, 0.9])
    pi, x = couple(mixed, p0, q0)
    p1, q1 = decouple(mixed, pi, x)
    assert np.allclose(p1, p0, atol=1e-12) and np.allclose(q1, q0, atol=1e-12)

    # at eB e*B* = 4 the coordinate map loses rank, but this target lies in
    # its range, so the least-squares preimage reproduces it exactly
    corner = PoissonStructure.mixed(eB=2.0, estarBstar=2.0)
    p2, q2 = decouple(corner, np.array([0.0, -1.0]), np.array([1.0, 0.0]))
    pi2, x2 = couple(corner, p2, q2)
    assert np.allclose(pi2, [0.0, -1.0], atol=1e-12)
    assert np.allclose(x2, [1.0, 0.0], atol=1e-12)


def test_invertibility_margin_values():
    assert invertibility_margin(PoissonStructure.magnetic(eB=3.0)) == pytest.approx(1.0)
    assert invertibility_margin(PoissonStructure.dual(estarBstar=-1.0)) == pytest.approx(1.0)
    assert invertibility_margin(
        PoissonStructure.mixed(eB=2.0, estarBstar=2.0)) == pytest.approx(4.0)
    ps = PoissonStructure(n=2, F=-2.0 * EPS2, G=2.0 * EPS2, pairing=np.eye(2))
    assert invertibility_margin(ps) == 0.0


def test_singular_coupling_detected_exactly():
    # eB e*B* = -4 collapses the mixed pairing
    with pytest.raises(ValueError, match="non-invertible"):
        PoissonStructure.mixed(eB=2.0, estarBstar=-2.0)
    ps = PoissonStructure(n=2, F=-2.0 * EPS2, G=2.0 * EPS2, pairing=np.eye(2))
    with pytest.raises(ValueError, match="non-invertible coupling"):
        decouple(ps, np.array([1.0, 0.0]), np.array([0.0, 1.0]))


def test_coordinate_bracket_values():
    can = PoissonStructure.canonical(2)
    z = PhasePoint(p=[0.1, 0.2], q=[0.3, 0.4], chart="coupled")
    f = coordinate_field("p", 0, 2)
    g = coordinate_field("q", 0, 2)
    assert nc_bracket(can, f, g, z) == pytest.approx(1.0)

    dual = PoissonStructure.dual(estarBstar=2.0)
    x1 = coordinate_field("q", 0, 2)
    x2 = coordinate_field("q", 1, 2)
    assert nc_bracket(dual, x1, x2, z) == pytest.approx(-2.0)

    mixed = PoissonStructure.mixed(eB=2.0, estarBstar=1.0)  # gamma = 1.5
    assert nc_bracket(mixed, f, g, z) == pytest.approx(1.5)


def test_bracket_table_matches_structure():
    z = PhasePoint(p=[0.0, 0.0], q=[0.0, 0.0], chart="coupled")
    can = PoissonStructure.canonical(2)
    f, pairing, g = coordinate_bracket_table(can, z)
    assert np.allclose(f, 0.0) and np.allclose(g, 0.0)
    assert np.allclose(pairing, np.eye(2), atol=1e-13)

    mixed = PoissonStructure.mixed(eB=2.0, estarBstar=1.0)
    f, pairing, g = coordinate_bracket_table(mixed, z)
    assert np.allclose(f, -2.0 * EPS2, atol=1e-13)
    assert np.allclose(g, -1.0 * EPS2, atol=1e-13)
    assert np.allclose(pairing, 1.5 * np.eye(2), atol=1e-13)


def test_bracket_table_matches_orbit_structure():
    alg = AlgebraParams(dim=2, sign="plus", omega=1.0, c=1.0, r=1.0)
    xi = DualPoint(m=2.0, k=[0.0, 0.0], p=[0.0, 0.0], e=7.0, h=1.0)
    st = orbit_structure_2d(OrbitParams(algebra=alg, xi=xi))
    ps = PoissonStructure.from_orbit(st)
    z = PhasePoint(p=[0.1, -0.2], q=[0.3, 0.4], chart="coupled")
    f, pairing, g = coordinate_bracket_table(ps, z)
    assert np.allclose(f, st.F, atol=1e-12)
    assert np.allclose(g, st.G, atol=1e-12)
    assert np.allclose(pairing, st.pairing, atol=1e-12)


def test_bracket_antisymmetry_bilinearity_leibniz():
    rng = np.random.default_rng(4)
    ps = PoissonStructure.mixed(eB=1.3, estarBstar=0.7)
    z = PhasePoint(p=rng.uniform(-1, 1, 2), q=rng.uniform(-1, 1, 2), chart="coupled")
    f, g, h = (quadratic(rng, 2) for _ in range(3))
    assert nc_bracket(ps, f, g, z) == pytest.approx(-nc_bracket(ps, g, f, z), abs=1e-12)

    combo = ScalarField(
        value=lambda zz: 2.0 * f(zz) - 0.5 * g(zz),
        gradient=lambda zz: 2.0 * f.grad(zz) - 0.5 * g.grad(zz),
    )
    lin = nc_bracket(ps, combo, h, z)
    assert lin == pytest.approx(
        2.0 * nc_bracket(ps, f, h, z) - 0.5 * nc_bracket(ps, g, h, z), abs=1e-12)

    prod = ScalarField(value=lambda zz: g(zz) * h(zz))  # finite-difference gradient
    lhs = nc_bracket(ps, f, prod, z)
    rhs = nc_bracket(ps, f, g, z) * h(z) + g(z) * nc_bracket(ps, f, h, z)
    assert lhs == pytest.approx(rhs, abs=1e-7)


def test_scalar_field_fd_gradient():
    f = ScalarField(value=lambda z: np.sin(z.p[0]) + z.q[0] ** 2)
    z = PhasePoint(p=[0.3], q=[0.5])
    g = f.grad(z)
    assert g[0] == pytest.approx(np.cos(0.3), abs=1e-8)
    assert g[1] == pytest.approx(1.0, abs=1e-8)


def test_chart_equivalence_constant_fields():
    rng = np.random.default_rng(9)
    canonical = PoissonStructure.canonical(2)
    F = -1.1 * EPS2
    G = 0.6 * EPS2
    pairing = np.eye(2) - 0.25 * F @ G
    ps = PoissonStructure(n=2, F=F, G=G, pairing=pairing)
    T = np.block([[np.eye(2), -0.5 * F], [-0.5 * G.T, np.eye(2)]])
    Tinv = np.linalg.inv(T)

    def pull(fld):
        return ScalarField(
            value=lambda zz: fld(PhasePoint.from_z(Tinv @ zz.z, "darboux")),
            gradient=lambda zz: Tinv.T @ fld.grad(PhasePoint.from_z(Tinv @ zz.z, "darboux")),
        )

    for _ in range(5):
        f, g = (quadratic(rng, 2) for _ in range(2))
        p0, q0 = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
        zd = PhasePoint(p=p0, q=q0)
        pi, x = couple(ps, p0, q0)
        zc = PhasePoint(p=pi, q=x, chart="coupled")
        assert nc_bracket(canonical, f, g, zd) == pytest.approx(
            nc_bracket(ps, pull(f), pull(g), zc), abs=1e-10)


def test_jacobi_conditions_constant_fields():
    rng = np.random.default_rng(1)
    grid = [PhasePoint(p=rng.uniform(-1, 1, 2), q=rng.uniform(-1, 1, 2), chart="coupled")
            for _ in range(3)]
    rep = jacobi_conditions(PoissonStructure.mixed(eB=0.8, estarBstar=0.5), grid)
    assert rep["all_ok"]


def test_jacobi_conditions_smooth_magnetic_field():
    rng = np.random.default_rng(1)
    grid = [PhasePoint(p=rng.uniform(-1, 1, 2), q=rng.uniform(-1, 1, 2), chart="coupled")
            for _ in range(3)]
    smooth = PoissonStructure(
        n=2,
        F=lambda z: -np.sin(z.q[0]) * EPS2,
        G=None,
        pairing=np.eye(2),
        constant_fields=False,
    )
    rep = jacobi_conditions(smooth, grid)
    assert rep["field_dependence_ok"] and rep["closedness_ok"]


def test_jacobi_conditions_position_dependent_g_fails():
    rng = np.random.default_rng(1)
    grid = [PhasePoint(p=rng.uniform(-1, 1, 2), q=rng.uniform(-1, 1, 2), chart="coupled")
            for _ in range(3)]
    bad = PoissonStructure(
        n=2,
        F=None,
        G=lambda z: -z.q[0] * EPS2,
        pairing=np.eye(2),
        constant_fields=False,
    )
    rep = jacobi_conditions(bad, grid)
    assert not rep["field_dependence_ok"]
    assert not rep["all_ok"]


def test_structure_validation():
    with pytest.raises(ValueError):
        PoissonStructure(n=2, F=None, G=None, pairing=np.zeros((2, 2)))
    with pytest.raises(ValueError):
        PhasePoint(p=[1.0], q=[1.0], chart="polar")
    with pytest.raises(ValueError):
        PhasePoint(p=[1.0, 2.0], q=[1.0])
