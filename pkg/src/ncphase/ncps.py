"""Noncommutative phase-space core.

Generalized Poisson brackets with a magnetic field block F, a dual
(position-position) block G and a momentum-position pairing, plus the
minimal-coupling coordinate transform between the canonical chart (p, q)
and the coupled chart (pi, x), and Jacobi-condition diagnostics for
field-dependent structures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .lie import EPS2
from .orbit import OrbitStructure

__all__ = [
    "PhasePoint",
    "PoissonStructure",
    "ScalarField",
    "coordinate_field",
    "couple",
    "decouple",
    "invertibility_margin",
    "nc_bracket",
    "coordinate_bracket_table",
    "jacobi_conditions",
]

FD_REL_STEP = 1e-6
FD_ABS_FLOOR = 1e-9


@dataclass(frozen=True)
class PhasePoint:
    """A point in phase space: momenta and positions in one chart.

    In the darboux chart the components are (p, q); in the coupled chart
    the same slots hold (pi, x).
    """

    p: np.ndarray
    q: np.ndarray
    chart: str = "darboux"

    def __post_init__(self):
        object.__setattr__(self, "p", np.atleast_1d(np.asarray(self.p, dtype=float)))
        object.__setattr__(self, "q", np.atleast_1d(np.asarray(self.q, dtype=float)))
        if self.p.shape != self.q.shape:
            raise ValueError("momentum and position must have equal length")
        if self.chart not in ("darboux", "coupled"):
            raise ValueError(f"unknown chart {self.chart!r}")

    @property
    def n(self) -> int:
        return self.p.size

    @property
    def z(self) -> np.ndarray:
        """Flat state vector (momenta, positions)."""
        return np.concatenate([self.p, self.q])

    @classmethod
    def from_z(cls, z: np.ndarray, chart: str = "darboux") -> "PhasePoint":
        z = np.asarray(z, dtype=float)
        n = z.size // 2
        return cls(p=z[:n], q=z[n:], chart=chart)


def _as_field(fld, n: int) -> Callable[[PhasePoint], np.ndarray]:
    if fld is None:
        zero = np.zeros((n, n))
        return lambda z: zero
    if callable(fld):
        return fld
    mat = np.asarray(fld, dtype=float)
    return lambda z: mat


@dataclass(frozen=True)
class PoissonStructure:
    """The bracket data on a 2n-dimensional noncommutative phase space.

    F maps a phase point to the antisymmetric momentum-momentum block
    (physically a function of position), G to the position-position
    block (a function of momentum), and pairing is the constant
    {pi_i, x^j} matrix (identity in the plain coupled chart, gamma I for
    mixed coupling, the orbit pairing for orbit-derived structures).
    """

    n: int
    F: Callable[[PhasePoint], np.ndarray]
    G: Callable[[PhasePoint], np.ndarray]
    pairing: np.ndarray
    constant_fields: bool = True

    def __post_init__(self):
        object.__setattr__(self, "F", _as_field(self.F, self.n))
        object.__setattr__(self, "G", _as_field(self.G, self.n))
        pairing = np.eye(self.n) if self.pairing is None else np.asarray(self.pairing, dtype=float)
        object.__setattr__(self, "pairing", pairing)
        if pairing.shape != (self.n, self.n):
            raise ValueError("pairing must be n x n")
        if abs(np.linalg.det(pairing)) < 1e-14:
            raise ValueError("pairing must be nonsingular")

    @classmethod
    def canonical(cls, n: int) -> "PoissonStructure":
        return cls(n=n, F=None, G=None, pairing=np.eye(n))

    @classmethod
    def magnetic(cls, eB: float, n: int = 2) -> "PoissonStructure":
        """Constant magnetic coupling F = -eB eps (2D)."""
        if n != 2:
            raise ValueError("epsilon-based magnetic coupling is 2D")
        return cls(n=2, F=-eB * EPS2, G=None, pairing=np.eye(2))

    @classmethod
    def dual(cls, estarBstar: float, n: int = 2) -> "PoissonStructure":
        """Constant dual coupling G = -e*B* eps (2D)."""
        if n != 2:
            raise ValueError("epsilon-based dual coupling is 2D")
        return cls(n=2, F=None, G=-estarBstar * EPS2, pairing=np.eye(2))

    @classmethod
    def mixed(cls, eB: float, estarBstar: float, n: int = 2) -> "PoissonStructure":
        """Both couplings at once; the pairing picks up
        gamma = 1 + eB e*B*/4 from the composition of the transforms."""
        if n != 2:
            raise ValueError("epsilon-based mixed coupling is 2D")
        gamma = 1.0 + eB * estarBstar / 4.0
        if gamma == 0.0:
            raise ValueError("non-invertible mixed coupling: gamma = 1 + eB e*B*/4 = 0")
        return cls(n=2, F=-eB * EPS2, G=-estarBstar * EPS2, pairing=gamma * np.eye(2))

    @classmethod
    def from_orbit(cls, orbit: OrbitStructure) -> "PoissonStructure":
        if orbit.degenerate:
            raise ValueError("degenerate orbit carries no Poisson structure")
        return cls(n=orbit.dim, F=orbit.F, G=orbit.G, pairing=orbit.pairing)

    def matrix(self, z: PhasePoint) -> np.ndarray:
        """The full 2n x 2n bracket matrix at z, blocks ordered
        (momenta, positions)."""
        f, g = self.F(z), self.G(z)
        return np.block([[f, self.pairing], [-self.pairing.T, g]])


@dataclass(frozen=True)
class ScalarField:
    """A real function on phase space with an attached gradient.

    The gradient returns the 2n components (d/dp, d/dq) in the point's
    chart; when no analytic gradient is supplied a central-difference
    one is used.
    """

    value: Callable[[PhasePoint], float]
    gradient: Callable[[PhasePoint], np.ndarray] | None = None

    def __call__(self, z: PhasePoint) -> float:
        return float(self.value(z))

    def grad(self, z: PhasePoint) -> np.ndarray:
        if self.gradient is not None:
            return np.asarray(self.gradient(z), dtype=float)
        return fd_gradient(self.value, z)


def fd_gradient(fn: Callable[[PhasePoint], float], z: PhasePoint) -> np.ndarray:
    """Central differences over the flat state, relative step 1e-6 with
    an absolute floor of 1e-9."""
    v0 = z.z
    grad = np.empty_like(v0)
    for i in range(v0.size):
        h = max(FD_REL_STEP * abs(v0[i]), FD_ABS_FLOOR)
        vp, vm = v0.copy(), v0.copy()
        vp[i] += h
        vm[i] -= h
        grad[i] = (
            fn(PhasePoint.from_z(vp, z.chart)) - fn(PhasePoint.from_z(vm, z.chart))
        ) / (2 * h)
    return grad


def coordinate_field(kind: str, i: int, n: int) -> ScalarField:
    """The coordinate function pi_i or x^i (0-based i) as a ScalarField."""
    if kind not in ("p", "q"):
        raise ValueError("kind must be 'p' (momentum) or 'q' (position)")
    idx = i if kind == "p" else n + i
    e = np.zeros(2 * n)
    e[idx] = 1.0
    return ScalarField(value=lambda z: z.z[idx], gradient=lambda z: e)


def couple(ps: PoissonStructure, p, q) -> tuple[np.ndarray, np.ndarray]:
    """Canonical to coupled chart: pi = p - (1/2) F q, x = q - (1/2) G^T p."""
    if not ps.constant_fields:
        raise ValueError("coupling transform is defined for constant fields only")
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    origin = PhasePoint(p=np.zeros(ps.n), q=np.zeros(ps.n))
    f, g = ps.F(origin), ps.G(origin)
    pi = p - 0.5 * f @ q
    x = q - 0.5 * g.T @ p
    return pi, x


def invertibility_margin(ps: PoissonStructure) -> float:
    """det(I - (1/4) F G), the invertibility margin of the
    coupling transform."""
    if not ps.constant_fields:
        raise ValueError("margin is defined for constant fields only")
    origin = PhasePoint(p=np.zeros(ps.n), q=np.zeros(ps.n))
    return float(np.linalg.det(np.eye(ps.n) - 0.25 * ps.F(origin) @ ps.G(origin)))


def decouple(ps: PoissonStructure, pi, x) -> tuple[np.ndarray, np.ndarray]:
    """Invert couple by solving the 2n x 2n linear system."""
    margin = invertibility_margin(ps)
    if abs(margin) < 1e-12:
        raise ValueError(f"non-invertible coupling: det(I - FG/4) = {margin}")
    pi = np.asarray(pi, dtype=float)
    x = np.asarray(x, dtype=float)
    origin = PhasePoint(p=np.zeros(ps.n), q=np.zeros(ps.n))
    f, g = ps.F(origin), ps.G(origin)
    n = ps.n
    T = np.block([[np.eye(n), -0.5 * f], [-0.5 * g.T, np.eye(n)]])
    sol, *_ = np.linalg.lstsq(T, np.concatenate([pi, x]), rcond=None)
    return sol[:n], sol[n:]


def nc_bracket(ps: PoissonStructure, f: ScalarField, g: ScalarField, z: PhasePoint) -> float:
    """{f, g} at z: pairing terms plus the F and G field terms."""
    gf, gg = f.grad(z), g.grad(z)
    return float(gf @ ps.matrix(z) @ gg)


def coordinate_bracket_table(
    ps: PoissonStructure, z: PhasePoint
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """({pi_i, pi_j}, {pi_i, x^j}, {x^i, x^j}) evaluated through
    nc_bracket on the coordinate functions."""
    n = ps.n
    coords = [coordinate_field("p", i, n) for i in range(n)] + [
        coordinate_field("q", i, n) for i in range(n)
    ]
    full = np.array(
        [[nc_bracket(ps, a, b, z) for b in coords] for a in coords]
    )
    return full[:n, :n], full[:n, n:], full[n:, n:]


def _bracket_entry_field(ps: PoissonStructure, a: int, b: int) -> ScalarField:
    """{z^a, z^b} as a function of the phase point."""
    return ScalarField(value=lambda z: ps.matrix(z)[a, b])


def jacobi_conditions(ps: PoissonStructure, sample_grid) -> dict:
    """Check the closure conditions that make nc_bracket a Poisson
    bracket, at every point of sample_grid.

    (a) F depends on position only and G on momentum only,
    (b) the two-forms built from F and G are closed (cyclic
        finite-difference sums vanish),
    (c) the direct Jacobi residual on all coordinate triples.
    """
    n = ps.n
    points = list(sample_grid)

    def fd_wrt(field, z: PhasePoint, idx: int) -> np.ndarray:
        v0 = z.z
        h = max(FD_REL_STEP * abs(v0[idx]), FD_ABS_FLOOR)
        vp, vm = v0.copy(), v0.copy()
        vp[idx] += h
        vm[idx] -= h
        return (
            field(PhasePoint.from_z(vp, z.chart)) - field(PhasePoint.from_z(vm, z.chart))
        ) / (2 * h)

    cross = 0.0
    for z in points:
        for i in range(n):
            cross = max(cross, float(np.abs(fd_wrt(ps.F, z, i)).max()))        # dF/dpi
            cross = max(cross, float(np.abs(fd_wrt(ps.G, z, n + i)).max()))    # dG/dx

    closed = 0.0
    for z in points:
        dF = np.stack([fd_wrt(ps.F, z, n + k) for k in range(n)])  # dF_ij/dx^k
        dG = np.stack([fd_wrt(ps.G, z, k) for k in range(n)])      # dG^ij/dpi_k
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    closed = max(closed, abs(dF[k, i, j] + dF[i, j, k] + dF[j, k, i]))
                    closed = max(closed, abs(dG[k, i, j] + dG[i, j, k] + dG[j, k, i]))

    jac = 0.0
    coords = [coordinate_field("p", i, n) for i in range(n)] + [
        coordinate_field("q", i, n) for i in range(n)
    ]
    for z in points:
        for a in range(2 * n):
            for b in range(a + 1, 2 * n):
                for c in range(b + 1, 2 * n):
                    total = (
                        nc_bracket(ps, coords[a], _bracket_entry_field(ps, b, c), z)
                        + nc_bracket(ps, coords[b], _bracket_entry_field(ps, c, a), z)
                        + nc_bracket(ps, coords[c], _bracket_entry_field(ps, a, b), z)
                    )
                    jac = max(jac, abs(total))

    return {
        "field_dependence_residual": cross,
        "field_dependence_ok": cross < 1e-8,
        "closedness_residual": closed,
        "closedness_ok": closed < 1e-8,
        "jacobi_residual": jac,
        "jacobi_ok": jac < 1e-8,
        "all_ok": cross < 1e-8 and closed < 1e-8 and jac < 1e-8,
    }
