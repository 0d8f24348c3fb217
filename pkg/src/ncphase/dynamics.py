"""Scenario Hamiltonians and trajectory integration.

Three coupled scenarios (electron in a magnetic field, massless spring
in a dual magnetic field, pendulum under both couplings) plus the
orbit-derived anh1d/anh2d/anh3d phase spaces, integrated either with
plain RK4 on the generalized bracket or by factoring the structure
through a linear Darboux chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .lie import EPS2, AlgebraParams, extension_coefficients
from .orbit import (
    DualPoint,
    OrbitParams,
    OrbitStructure,
    casimir_u,
    coupling_matrix_3d,
    orbit_structure_2d,
    orbit_structure_3d,
)
from .ncps import PhasePoint, PoissonStructure, ScalarField, nc_bracket

__all__ = [
    "ScenarioParams",
    "DerivedParams",
    "Scenario",
    "Trajectory",
    "derived_params",
    "hamiltonian_electron",
    "hamiltonian_spring",
    "hamiltonian_pendulum",
    "build_scenario",
    "evolve",
    "integrate",
    "closed_form_flow_1d",
    "group_action_1d",
    "newton_residual",
    "spring_dual_residual",
]


def cross2(a: np.ndarray, b: np.ndarray) -> float:
    """z-component of the planar cross product, orientation n = +z."""
    return float(a[0] * b[1] - a[1] * b[0])


@dataclass(frozen=True)
class ScenarioParams:
    m: float = 1.0
    e: float = 0.0
    B: float = 0.0
    Evec: np.ndarray = None
    estar: float = 0.0
    Bstar: float = 0.0
    Estar: np.ndarray = None
    k: float = 0.0
    omega: float | None = None

    def __post_init__(self):
        ev = np.zeros(2) if self.Evec is None else np.asarray(self.Evec, dtype=float)
        es = np.zeros(2) if self.Estar is None else np.asarray(self.Estar, dtype=float)
        object.__setattr__(self, "Evec", ev)
        object.__setattr__(self, "Estar", es)


@dataclass(frozen=True)
class DerivedParams:
    omega_c: float | None
    m_s: float | None
    gamma: float | None
    mu: float | None
    Mtot: float | None


def derived_params(params: ScenarioParams) -> DerivedParams:
    """omega = eB/2m, the spring mass from 1/m_s = k e*^2 B*^2 / 4, and
    the two-oscillator mass combinations."""
    omega_c = params.e * params.B / (2 * params.m) if params.m > 0 else None
    ksq = params.k * (params.estar * params.Bstar) ** 2
    if ksq == 0:
        return DerivedParams(omega_c=omega_c, m_s=None, gamma=None, mu=None, Mtot=None)
    m_s = 4.0 / ksq
    m = params.m
    return DerivedParams(
        omega_c=omega_c,
        m_s=m_s,
        gamma=1.0 + m / m_s,
        mu=m * m_s / (m + m_s),
        Mtot=m + m_s,
    )


def _two_chart_field(darboux, coupled, grad_darboux, grad_coupled) -> ScalarField:
    def value(z: PhasePoint) -> float:
        return darboux(z) if z.chart == "darboux" else coupled(z)

    def gradient(z: PhasePoint) -> np.ndarray:
        return grad_darboux(z) if z.chart == "darboux" else grad_coupled(z)

    return ScalarField(value=value, gradient=gradient)


def hamiltonian_electron(params: ScenarioParams) -> ScalarField:
    """Charged particle in a magnetic field (symmetric gauge) and an
    electric potential.

    darboux chart: H = p^2/2m - e E.q
    coupled chart: H = pi^2/2m - e E.x + m w^2 x^2/2 + w (x cross pi),
    with w = eB/2m (the half-valued cyclotron frequency convention).
    """
    if params.m <= 0:
        raise ValueError("electron scenario requires m > 0")
    m, e, E = params.m, params.e, params.Evec
    w = params.e * params.B / (2 * m)

    def h_d(z):
        return z.p @ z.p / (2 * m) - e * (E @ z.q)

    def g_d(z):
        return np.concatenate([z.p / m, -e * E])

    def h_c(z):
        pi, x = z.p, z.q
        return (
            pi @ pi / (2 * m)
            - e * (E @ x)
            + m * w**2 * (x @ x) / 2
            + w * cross2(x, pi)
        )

    def g_c(z):
        pi, x = z.p, z.q
        dpi = pi / m + w * np.array([-x[1], x[0]])
        dx = -e * E + m * w**2 * x + w * np.array([pi[1], -pi[0]])
        return np.concatenate([dpi, dx])

    return _two_chart_field(h_d, h_c, g_d, g_c)


def hamiltonian_spring(params: ScenarioParams) -> ScalarField:
    """Massless spring coupled to a dual magnetic field.

    darboux chart: H = k q^2/2 - e* p.E*
    coupled chart: H = k x^2/2 - e* pi.E* + pi^2/2m_s + w (x cross pi),
    with w = k e*B*/2 and 1/m_s = k e*^2 B*^2/4.  The angular term
    enters with + for the n = +z orientation used throughout (the same
    orientation that makes the chart values agree identically).
    """
    if params.k <= 0:
        raise ValueError("spring scenario requires k > 0")
    k, estar, Estar = params.k, params.estar, params.Estar
    eb = params.estar * params.Bstar
    w = k * eb / 2
    inv_ms = k * eb**2 / 4

    def h_d(z):
        return k * (z.q @ z.q) / 2 - estar * (z.p @ Estar)

    def g_d(z):
        return np.concatenate([-estar * Estar, k * z.q])

    def h_c(z):
        pi, x = z.p, z.q
        return (
            k * (x @ x) / 2
            - estar * (pi @ Estar)
            + inv_ms * (pi @ pi) / 2
            + w * cross2(x, pi)
        )

    def g_c(z):
        pi, x = z.p, z.q
        dpi = -estar * Estar + inv_ms * pi + w * np.array([-x[1], x[0]])
        dx = k * x + w * np.array([pi[1], -pi[0]])
        return np.concatenate([dpi, dx])

    return _two_chart_field(h_d, h_c, g_d, g_c)


def check_synchronization(params: ScenarioParams) -> tuple[float, DerivedParams]:
    """Pendulum synchronization eB/2 = m w and e*B*/2 = 1/(m_s w); w is
    taken from params.omega when given, else from eB/2m."""
    dp = derived_params(params)
    if dp.m_s is None:
        raise ValueError("pendulum requires k e*^2 B*^2 != 0 (spring mass undefined)")
    w = params.omega if params.omega is not None else dp.omega_c
    if w is None or w == 0:
        raise ValueError("pendulum requires a nonzero frequency omega")
    lhs1, rhs1 = params.e * params.B / 2, params.m * w
    lhs2, rhs2 = params.estar * params.Bstar / 2, 1.0 / (dp.m_s * w)
    if abs(lhs1 - rhs1) > 1e-9 * max(abs(rhs1), 1.0):
        raise ValueError(f"synchronization violated: eB/2 = {lhs1} but m*omega = {rhs1}")
    if abs(lhs2 - rhs2) > 1e-9 * max(abs(rhs2), 1.0):
        raise ValueError(
            f"synchronization violated: e*B*/2 = {lhs2} but 1/(m_s*omega) = {rhs2}"
        )
    return w, dp


def hamiltonian_pendulum(params: ScenarioParams) -> ScalarField:
    """Massive pendulum under both couplings (two synchronized
    oscillators).

    darboux chart: H = p^2/2m + k q^2/2 - e E.q - e* p.E*
    coupled chart: H = pi^2/2mu + M w^2 x^2/2 - e phi - e* phi*,
    phi = E.x + (E cross pi)/(m_s w), phi* = pi.E* + m w (x cross E*).
    """
    if params.m <= 0 or params.k <= 0:
        raise ValueError("pendulum scenario requires m > 0 and k > 0")
    w, dp = check_synchronization(params)
    m, k, e, estar = params.m, params.k, params.e, params.estar
    E, Estar = params.Evec, params.Estar
    mu, Mtot, m_s = dp.mu, dp.Mtot, dp.m_s

    def h_d(z):
        return (
            z.p @ z.p / (2 * m) + k * (z.q @ z.q) / 2 - e * (E @ z.q) - estar * (z.p @ Estar)
        )

    def g_d(z):
        return np.concatenate([z.p / m - estar * Estar, k * z.q - e * E])

    def h_c(z):
        pi, x = z.p, z.q
        phi = E @ x + cross2(E, pi) / (m_s * w)
        phistar = pi @ Estar + m * w * cross2(x, Estar)
        return pi @ pi / (2 * mu) + Mtot * w**2 * (x @ x) / 2 - e * phi - estar * phistar

    def g_c(z):
        pi, x = z.p, z.q
        dpi = (
            pi / mu
            - (e / (m_s * w)) * np.array([-E[1], E[0]])
            - estar * Estar
            - estar * m * w * np.array([-Estar[1], Estar[0]])
        )
        dx = Mtot * w**2 * x - e * E
        return np.concatenate([dpi, dx])

    return _two_chart_field(h_d, h_c, g_d, g_c)


@dataclass(frozen=True)
class Scenario:
    name: str
    n: int
    ps: PoissonStructure
    hamiltonian: ScalarField
    params: ScenarioParams | None = None
    derived: DerivedParams | None = None
    orbit: OrbitStructure | None = None
    casimir: Callable[[PhasePoint], float] | None = None
    chart: str = "coupled"


def _orbit_hamiltonian(alg: AlgebraParams, xi: DualPoint) -> ScalarField:
    """Energy coordinate restricted to the orbit: the function whose
    value completes casimir_u(alg, .) to the constant e0,
    H(p, k) = e0 - U(m, h, k, p, e0).  Conserved by construction."""
    m, s, w2 = xi.m, alg.s, alg.omega**2

    def value(z: PhasePoint) -> float:
        pt = DualPoint(m=m, k=z.q, p=z.p, e=0.0, h=xi.h)
        return -casimir_u(alg, pt)

    if alg.dim == 2:
        a, b = extension_coefficients(alg)
        h = 0.0 if xi.h is None else float(np.asarray(xi.h).reshape(()))
        big_d = m * m - a * b * h * h
        mu = big_d / m
        c2 = b * h / big_d

        def gradient(z: PhasePoint) -> np.ndarray:
            p, k = z.p, z.q
            return np.concatenate(
                [p / mu - c2 * (EPS2 @ k), -s * w2 * k / mu + c2 * (EPS2 @ p)]
            )

    else:
        A = coupling_matrix_3d(alg, xi)
        Wi = np.linalg.inv(np.eye(3) - s * w2 * (A @ A))

        def gradient(z: PhasePoint) -> np.ndarray:
            p, k = z.p, z.q
            return np.concatenate(
                [Wi @ (p + s * w2 * (A @ k)) / m, -(s * w2 / m) * (Wi @ (k + A @ p))]
            )

    return ScalarField(value=value, gradient=gradient)


def build_scenario(
    name: str,
    params: ScenarioParams | None = None,
    algebra: AlgebraParams | None = None,
    xi: DualPoint | None = None,
) -> Scenario:
    """Assemble the Poisson structure and Hamiltonian for one of the
    named scenarios (electron, spring, pendulum, anh1d, anh2d, anh3d)."""
    if name == "electron":
        sp = params or ScenarioParams()
        ps = PoissonStructure.magnetic(sp.e * sp.B)
        return Scenario(
            name=name, n=2, ps=ps, hamiltonian=hamiltonian_electron(sp),
            params=sp, derived=derived_params(sp),
        )
    if name == "spring":
        sp = params or ScenarioParams(k=1.0)
        ps = PoissonStructure.dual(sp.estar * sp.Bstar)
        return Scenario(
            name=name, n=2, ps=ps, hamiltonian=hamiltonian_spring(sp),
            params=sp, derived=derived_params(sp),
        )
    if name == "pendulum":
        sp = params or ScenarioParams(k=1.0)
        h = hamiltonian_pendulum(sp)
        ps = PoissonStructure.mixed(sp.e * sp.B, sp.estar * sp.Bstar)
        return Scenario(
            name=name, n=2, ps=ps, hamiltonian=h,
            params=sp, derived=derived_params(sp),
        )
    if name == "anh1d":
        if algebra is None or xi is None:
            raise ValueError("anh1d requires algebra params and a dual point")
        s, w, m = algebra.s, algebra.omega, xi.m
        ps = PoissonStructure.canonical(1)
        ham = ScalarField(
            value=lambda z: float(z.p[0] ** 2 / (2 * m) - s * m * w**2 * z.q[0] ** 2 / 2),
            gradient=lambda z: np.array([z.p[0] / m, -s * m * w**2 * z.q[0]]),
        )
        e0 = xi.e
        cas = lambda z: e0 - ham(z)  # noqa: E731
        return Scenario(name=name, n=1, ps=ps, hamiltonian=ham, casimir=cas, chart="darboux")
    if name in ("anh2d", "anh3d"):
        if algebra is None or xi is None:
            raise ValueError(f"{name} requires algebra params and a dual point")
        op = OrbitParams(algebra=algebra, xi=xi)
        orbit = orbit_structure_2d(op) if name == "anh2d" else orbit_structure_3d(op)
        if orbit.degenerate:
            raise ValueError(f"degenerate orbit: det Omega = {orbit.det}")
        # state coordinates are the orbit's (p, k); the bracket matrix is
        # the full numeric inverse of Omega, blocks reordered to (p, k)
        d = orbit.dim
        inv = orbit.poisson_matrix
        ps = PoissonStructure(
            n=d,
            F=inv[d:, d:],
            G=inv[:d, :d],
            pairing=inv[d:, :d],
        )
        ham = _orbit_hamiltonian(algebra, xi)
        e0 = xi.e
        cas = lambda z: e0 - ham(z)  # noqa: E731
        return Scenario(
            name=name, n=d, ps=ps, hamiltonian=ham, orbit=orbit, casimir=cas,
        )
    raise ValueError(f"unknown scenario {name!r}")


def evolve(ps: PoissonStructure, H: ScalarField, f: ScalarField, z: PhasePoint) -> float:
    """df/dt along the Hamiltonian flow of H: the generalized bracket
    applied as {H, f}, whose coordinate specializations are
    dq/dt = dH/dp - G dH/dq and dp/dt = -dH/dq - F dH/dp."""
    return nc_bracket(ps, H, f, z)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: list
    energy: np.ndarray
    casimir: np.ndarray | None = None
    angular_momentum: np.ndarray | None = None
    darboux_states: list | None = None

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        for z in self.states:
            if not (np.all(np.isfinite(z.p)) and np.all(np.isfinite(z.q))):
                raise ValueError("non-finite state in trajectory")


def _rk4_path(rhs, z0: np.ndarray, t_end: float, dt: float) -> tuple[np.ndarray, np.ndarray]:
    n_steps = int(round(t_end / dt))
    times = np.empty(n_steps + 1)
    path = np.empty((n_steps + 1, z0.size))
    times[0], path[0] = 0.0, z0
    z = z0.copy()
    for i in range(n_steps):
        k1 = rhs(z)
        k2 = rhs(z + 0.5 * dt * k1)
        k3 = rhs(z + 0.5 * dt * k2)
        k4 = rhs(z + dt * k3)
        z = z + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(z)):
            raise FloatingPointError(f"non-finite state at step {i + 1}")
        times[i + 1], path[i + 1] = (i + 1) * dt, z
    return times, path


def _symplectic_factor(Pi: np.ndarray) -> np.ndarray:
    """A linear Darboux factor T with T J T^T = Pi for a constant
    invertible antisymmetric Pi, J = [[0, I], [-I, 0]].

    Antisymmetric matrices are normal, so the real Schur form is block
    diagonal with 2x2 rotation generators; rescaling each block and
    regrouping pairs yields the factor.
    """
    m = Pi.shape[0]
    n = m // 2
    S, Q = scipy.linalg.schur(np.asarray(Pi, dtype=float))
    T_pairs = np.empty_like(Q)
    for b in range(n):
        i = 2 * b
        d = S[i, i + 1]
        u, v = Q[:, i], Q[:, i + 1]
        if d < 0:
            u, v, d = v, u, -d
        rt = math.sqrt(d)
        T_pairs[:, i], T_pairs[:, i + 1] = rt * u, rt * v
    # regroup from interleaved (p1,q1,p2,q2,...) to split (p...,q...)
    T = np.empty_like(T_pairs)
    for b in range(n):
        T[:, b] = T_pairs[:, 2 * b]
        T[:, n + b] = T_pairs[:, 2 * b + 1]
    return T


def integrate(
    ps: PoissonStructure,
    H: ScalarField,
    z0: PhasePoint,
    t_end: float,
    dt: float,
    method: str = "rk4",
    casimir: Callable[[PhasePoint], float] | None = None,
) -> Trajectory:
    """Integrate the flow of H under ps from z0.

    rk4 steps the bracket equations of motion directly.
    darboux_exactified factors the (constant) structure through a linear
    Darboux chart, integrates the canonical system there and maps the
    samples back, so the bracket relations hold exactly along the path.
    """
    if dt <= 0 or t_end <= dt:
        raise ValueError("need 0 < dt < t_end")
    n = ps.n
    chart = z0.chart

    if method == "rk4":
        def rhs(v):
            z = PhasePoint.from_z(v, chart)
            return ps.matrix(z).T @ H.grad(z)

        times, path = _rk4_path(rhs, z0.z, t_end, dt)
        states = [PhasePoint.from_z(v, chart) for v in path]
    elif method == "darboux_exactified":
        if not ps.constant_fields:
            raise ValueError("darboux_exactified requires constant fields")
        Pi = ps.matrix(z0)
        expected = np.eye(n) - 0.25 * ps.F(z0) @ ps.G(z0)
        if np.allclose(ps.pairing, expected, atol=1e-12):
            origin = PhasePoint(p=np.zeros(n), q=np.zeros(n))
            T = np.block(
                [[np.eye(n), -0.5 * ps.F(origin)], [-0.5 * ps.G(origin).T, np.eye(n)]]
            )
            if abs(np.linalg.det(T)) < 1e-12:
                raise ValueError("non-invertible coupling: transform is singular")
        else:
            T = _symplectic_factor(Pi)
        Tinv = np.linalg.inv(T)
        J = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])

        def rhs(w):
            z = PhasePoint.from_z(T @ w, chart)
            return J.T @ (T.T @ H.grad(z))

        times, wpath = _rk4_path(rhs, Tinv @ z0.z, t_end, dt)
        states = [PhasePoint.from_z(T @ w, chart) for w in wpath]
    else:
        raise ValueError(f"unknown method {method!r}")

    energy = np.array([H(z) for z in states])
    cas = np.array([casimir(z) for z in states]) if casimir is not None else None
    ang = (
        np.array([cross2(z.q, z.p) for z in states]) if n == 2 else None
    )
    return Trajectory(times=times, states=states, energy=energy, casimir=cas, angular_momentum=ang)


def closed_form_flow_1d(sign: str, m: float, omega: float, p0: float, q0: float, t):
    """Exact 1D flow: trigonometric on the minus branch, hyperbolic on
    the plus branch."""
    if m <= 0 or omega <= 0:
        raise ValueError("need m > 0 and omega > 0")
    wt = omega * np.asarray(t, dtype=float)
    if sign == "minus":
        p = p0 * np.cos(wt) - m * omega * q0 * np.sin(wt)
        q = (p0 / (m * omega)) * np.sin(wt) + q0 * np.cos(wt)
    elif sign == "plus":
        p = p0 * np.cosh(wt) + m * omega * q0 * np.sinh(wt)
        q = (p0 / (m * omega)) * np.sinh(wt) + q0 * np.cosh(wt)
    else:
        raise ValueError(f"unknown sign {sign!r}")
    return p, q


def group_action_1d(
    sign: str, m: float, omega: float, v: float, x: float, t: float, p0: float, q0: float
) -> tuple[float, float]:
    """The symplectic realization L_(v,x,t)(p, q) of the 1D groups;
    L_(0,0,t) is the time flow."""
    if m <= 0 or omega <= 0:
        raise ValueError("need m > 0 and omega > 0")
    wt = omega * t
    if sign == "minus":
        p = p0 * math.cos(wt) - m * omega * q0 * math.sin(wt) - m * v * math.cos(wt)
        q = (
            (p0 / (m * omega)) * math.sin(wt)
            + (q0 + x) * math.cos(wt)
            - (v / omega) * math.sin(wt)
        )
    elif sign == "plus":
        p = (
            p0 * math.cosh(wt)
            + m * omega * q0 * math.sinh(wt)
            - m * (v * math.cosh(wt) - omega * x * math.sinh(wt))
        )
        q = (
            (p0 / (m * omega)) * math.sinh(wt)
            + (q0 + x) * math.cosh(wt)
            - (v / omega) * math.sinh(wt)
        )
    else:
        raise ValueError(f"unknown sign {sign!r}")
    return p, q


def _second_diff(arr: np.ndarray, dt: float) -> np.ndarray:
    return (arr[2:] - 2 * arr[1:-1] + arr[:-2]) / dt**2


def _first_diff(arr: np.ndarray, dt: float) -> np.ndarray:
    return (arr[2:] - arr[:-2]) / (2 * dt)


def newton_residual(traj: Trajectory, V: ScalarField, ps: PoissonStructure, m: float) -> float:
    """Max interior residual of the field-modified second-order law
    m q'' + dV/dq - F^T p / m - m G^T d/dt(dV/dq) = 0
    for flows of H = p^2/2m + V(q) under the structure ps."""
    if len(traj.states) < 5:
        raise ValueError("trajectory too short for second differences")
    dt = float(traj.times[1] - traj.times[0])
    n = traj.states[0].n
    P = np.array([z.p for z in traj.states])
    Q = np.array([z.q for z in traj.states])
    gradV = np.array([V.grad(z)[n:] for z in traj.states])
    acc = _second_diff(Q, dt)
    dgv = _first_diff(gradV, dt)
    f = ps.F(traj.states[0])
    g = ps.G(traj.states[0])
    res = m * acc + gradV[1:-1] - (P[1:-1] @ f) / m - m * (dgv @ g)
    return float(np.abs(res).max())


def spring_dual_residual(traj: Trajectory, params: ScenarioParams) -> float:
    """Max interior residual of the dual second-order law
    (1/k) p'' = e* E* + e* k B* (q cross n), the velocity-dimension
    analog of the Lorentz law, for spring flows under the dual
    structure.  The cross term carries the n = +z orientation of the
    implemented brackets."""
    if len(traj.states) < 5:
        raise ValueError("trajectory too short for second differences")
    dt = float(traj.times[1] - traj.times[0])
    k, estar, Bstar, Estar = params.k, params.estar, params.Bstar, params.Estar
    P = np.array([z.p for z in traj.states])
    Q = np.array([z.q for z in traj.states])
    yank = _second_diff(P, dt) / k
    dual_force = estar * Estar - estar * k * Bstar * (Q[1:-1] @ EPS2.T)
    return float(np.abs(yank - dual_force).max())
