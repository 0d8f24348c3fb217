import numpy as np
import pytest

from ncphase.lie import (
    AlgebraParams,
    anh_algebra,
    basis_labels,
    basis_vector,
    bracket,
    extension_coefficients,
    jacobi_residual,
)


def nonzero_components(sc, a, b):
    v = bracket(sc, basis_vector(sc, a), basis_vector(sc, b))
    labels = basis_labels(sc.params.dim)
    return {l: c for l, c in zip(labels, v) if abs(c) > 1e-14}


def all_algebras(omega=1.0, c=1.0, r=1.0):
    for dim in (1, 2, 3):
        for sign in ("minus", "plus"):
            yield anh_algebra(AlgebraParams(dim=dim, sign=sign, omega=omega, c=c, r=r))


def test_basis_labels():
    assert basis_labels(1) == ("M", "K", "P", "E")
    assert basis_labels(2) == ("M", "J3", "K1", "K2", "P1", "P2", "E")
    assert len(basis_labels(3)) == 11


def test_1d_minus_bracket_table():
    sc = anh_algebra(AlgebraParams(dim=1, sign="minus", omega=1.0))
    assert nonzero_components(sc, "K", "E") == {"P": 1.0}
    assert nonzero_components(sc, "P", "E") == {"K": -1.0}
    assert nonzero_components(sc, "K", "P") == {"M": 1.0}


def test_1d_plus_oscillator_sign():
    sc = anh_algebra(AlgebraParams(dim=1, sign="plus", omega=2.0))
    assert nonzero_components(sc, "P", "E") == {"K": 4.0}


def test_2d_plus_extended_brackets():
    sc = anh_algebra(AlgebraParams(dim=2, sign="plus", omega=1.0, c=1.0, r=1.0))
    assert nonzero_components(sc, "K1", "K2") == {"J3": 1.0}
    assert nonzero_components(sc, "K1", "P1") == {"M": 1.0}
    assert nonzero_components(sc, "K1", "P2") == {}
    # the P-P cocycle sign is pinned by the Jacobi identity: b = -s w^2 a
    assert nonzero_components(sc, "P1", "P2") == {"J3": -1.0}


def test_3d_extension_coefficient_magnitude():
    # with c = w r the P-P coefficient has magnitude 1/r^2
    sc = anh_algebra(AlgebraParams(dim=3, sign="minus", omega=2.0, c=1.0, r=0.5))
    comps = nonzero_components(sc, "P1", "P2")
    assert set(comps) == {"J3"}
    assert abs(comps["J3"]) == pytest.approx(1.0 / 0.5**2, abs=1e-14)
    a, b = extension_coefficients(sc.params)
    assert a == pytest.approx(1.0)
    assert b == pytest.approx(-(-1.0) * 4.0)


def test_extension_coefficients_jacobi_relation():
    for sc in all_algebras(omega=1.7, c=0.9, r=1.3):
        if sc.params.dim == 1:
            continue
        a, b = extension_coefficients(sc.params)
        s = sc.params.s
        assert b == pytest.approx(-s * sc.params.omega**2 * a, rel=1e-14)


def test_jacobi_residual_all_six_algebras():
    for sc in all_algebras(omega=1.3, c=0.8, r=1.1):
        assert jacobi_residual(sc) <= 1e-12


def test_jacobi_residual_randomized_draws():
    rng = np.random.default_rng(7)
    for _ in range(20):
        omega, c, r = rng.uniform(0.2, 3.0, 3)
        for sc in all_algebras(omega=omega, c=c, r=r):
            assert jacobi_residual(sc) <= 1e-12


def test_jacobi_residual_abelian_is_zero():
    sc = anh_algebra(AlgebraParams(dim=1, sign="minus", omega=1.0))
    zeroed = type(sc)(basis=sc.basis, tensor=np.zeros_like(sc.tensor), params=sc.params)
    assert jacobi_residual(zeroed) == 0.0


def test_jacobi_residual_detects_broken_closure():
    sc = anh_algebra(AlgebraParams(dim=2, sign="plus", omega=1.0, c=1.0, r=1.0))
    tensor = sc.tensor.copy()
    iK1, iP1, iE = sc.index("K1"), sc.index("P1"), sc.index("E")
    tensor[iP1, iK1, iE] += 0.1  # injects [K1,E] -> P1 + 0.1 E, breaking Jacobi
    broken = type(sc)(basis=sc.basis, tensor=tensor, params=sc.params)
    assert jacobi_residual(broken) > 1e-3


def test_bracket_antisymmetry_random_vectors():
    rng = np.random.default_rng(3)
    for sc in all_algebras():
        x = rng.standard_normal(sc.n)
        y = rng.standard_normal(sc.n)
        assert np.allclose(bracket(sc, x, y), -bracket(sc, y, x), atol=1e-13)
        assert np.allclose(bracket(sc, x, x), 0.0, atol=1e-13)


def test_central_generators_commute():
    for sc in all_algebras():
        central = ["M"] if sc.params.dim == 1 else (
            ["M", "J3"] if sc.params.dim == 2 else ["M", "J1", "J2", "J3"]
        )
        for z in central:
            for other in basis_labels(sc.params.dim):
                assert nonzero_components(sc, z, other) == {}


def test_params_validation():
    with pytest.raises(ValueError):
        AlgebraParams(dim=4, sign="minus", omega=1.0)
    with pytest.raises(ValueError):
        AlgebraParams(dim=1, sign="sideways", omega=1.0)
    with pytest.raises(ValueError):
        AlgebraParams(dim=2, sign="minus", omega=1.0)  # needs c and r
    with pytest.raises(ValueError):
        AlgebraParams(dim=1, sign="minus", omega=-1.0)
