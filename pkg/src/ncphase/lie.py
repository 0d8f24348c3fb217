"""Finite-dimensional Lie algebras given by structure constants.

Hard-codes the six centrally extended anisotropic Newton-Hooke algebras
(dim 1, 2, 3; oscillatory "minus" and hyperbolic "plus" branches) and
provides bracket evaluation plus a Jacobi-identity residual.

Orientation convention: eps_{12} = eps^{12} = +1 and eps_{123} = +1
throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AlgebraParams",
    "StructureConstants",
    "anh_algebra",
    "bracket",
    "jacobi_residual",
    "basis_vector",
    "EPS2",
]

EPS2 = np.array([[0.0, 1.0], [-1.0, 0.0]])

_SIGNS = {"plus": 1.0, "minus": -1.0}


def _levi_civita_3() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1.0
        eps[i, k, j] = -1.0
    return eps


EPS3 = _levi_civita_3()


@dataclass(frozen=True)
class AlgebraParams:
    """Parameters of one anisotropic Newton-Hooke algebra.

    omega is the frequency; c (speed) and r (length) enter only for
    dim >= 2 where they scale the central-extension cocycles.
    """

    dim: int
    sign: str
    omega: float
    c: float | None = None
    r: float | None = None

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.sign not in _SIGNS:
            raise ValueError(f"sign must be 'plus' or 'minus', got {self.sign!r}")
        if not (self.omega > 0):
            raise ValueError("omega must be positive")
        if self.dim >= 2:
            if self.c is None or not (self.c > 0):
                raise ValueError("c must be positive for dim >= 2")
            if self.r is None or not (self.r > 0):
                raise ValueError("r must be positive for dim >= 2")

    @property
    def s(self) -> float:
        return _SIGNS[self.sign]


@dataclass(frozen=True)
class StructureConstants:
    """A finite Lie algebra: ordered basis labels and the dense tensor
    c^gamma_{alpha beta}, so that [x, y]^gamma = c^gamma_{ab} x^a y^b.
    """

    basis: tuple[str, ...]
    tensor: np.ndarray
    params: AlgebraParams | None = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.basis)
        if self.tensor.shape != (n, n, n):
            raise ValueError("tensor shape does not match basis size")
        self.tensor.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.basis)

    def index(self, label: str) -> int:
        return self.basis.index(label)


def basis_labels(dim: int) -> tuple[str, ...]:
    if dim == 1:
        return ("M", "K", "P", "E")
    if dim == 2:
        return ("M", "J3", "K1", "K2", "P1", "P2", "E")
    return ("M", "J1", "J2", "J3", "K1", "K2", "K3", "P1", "P2", "P3", "E")


def extension_coefficients(params: AlgebraParams) -> tuple[float, float]:
    """Cocycle coefficients (a, b) of [K_i,K_j] = a J eps_ij and
    [P_i,P_j] = b J eps_ij.

    The cocycle condition (equivalently the Jacobi identity on the
    extended algebra) forces b = -s * omega^2 * a with s the branch
    sign.  With a = 1/c^2 this gives |b| = 1/r^2 exactly on the locus
    c = omega * r; the branch correlation of the sign is fixed here by
    Jacobi, not free.
    """
    a = 1.0 / params.c**2
    b = -params.s * params.omega**2 * a
    return a, b


def anh_algebra(params: AlgebraParams) -> StructureConstants:
    """Structure constants of the centrally extended ANH algebra.

    Nonzero brackets (i, j spatial indices, s = +/-1 the branch):
      [K_i, E] = P_i,   [P_i, E] = s omega^2 K_i,   [K_i, P_j] = M delta_ij
    and for dim >= 2 the central charges
      [K_i, K_j] = (1/c^2) J_k eps^k_ij,
      [P_i, P_j] = -s (omega^2/c^2) J_k eps^k_ij.
    M and the J_k are central.
    """
    labels = basis_labels(params.dim)
    n = len(labels)
    idx = {lab: i for i, lab in enumerate(labels)}
    t = np.zeros((n, n, n))
    s = params.s
    w2 = params.omega**2

    def put(gamma: str, alpha: str, beta: str, coeff: float) -> None:
        t[idx[gamma], idx[alpha], idx[beta]] += coeff
        t[idx[gamma], idx[beta], idx[alpha]] -= coeff

    if params.dim == 1:
        put("P", "K", "E", 1.0)
        put("K", "P", "E", s * w2)
        put("M", "K", "P", 1.0)
    else:
        a, b = extension_coefficients(params)
        d = params.dim
        ks = [f"K{i+1}" for i in range(d)]
        ps = [f"P{i+1}" for i in range(d)]
        js = ["J3"] if d == 2 else ["J1", "J2", "J3"]
        for i in range(d):
            put(ps[i], ks[i], "E", 1.0)
            put(ks[i], ps[i], "E", s * w2)
            put("M", ks[i], ps[i], 1.0)
        if d == 2:
            put("J3", "K1", "K2", a)
            put("J3", "P1", "P2", b)
        else:
            for i in range(3):
                for j in range(i + 1, 3):
                    for k in range(3):
                        if EPS3[k, i, j] != 0.0:
                            put(js[k], ks[i], ks[j], a * EPS3[k, i, j])
                            put(js[k], ps[i], ps[j], b * EPS3[k, i, j])
    return StructureConstants(basis=labels, tensor=t, params=params)


def basis_vector(sc: StructureConstants, label: str) -> np.ndarray:
    v = np.zeros(sc.n)
    v[sc.index(label)] = 1.0
    return v


def bracket(sc: StructureConstants, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Linear extension of the bracket table: z^g = c^g_{ab} x^a y^b."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (sc.n,) or y.shape != (sc.n,):
        raise ValueError("element dimension does not match basis")
    return np.einsum("gab,a,b->g", sc.tensor, x, y)


def jacobi_residual(sc: StructureConstants) -> float:
    """Max-abs coefficient of [[e_a,e_b],e_c] + cyclic over all triples.

    Zero (to rounding) iff the tensor defines a genuine Lie algebra.
    """
    t = sc.tensor
    r = (
        np.einsum("dab,mdc->mabc", t, t)
        + np.einsum("dbc,mda->mabc", t, t)
        + np.einsum("dca,mdb->mabc", t, t)
    )
    return float(np.abs(r).max())
