"""Phase-space observables and Poisson brackets.

Polynomial observables are :class:`~magtrans.poly.Poly` instances in
``(x1, x2, x3, p1, p2, p3)``; brackets between them are exact.  Observables
that involve a non-polynomial potential are :class:`NumericObservable` and
get central-difference brackets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .fields import GaugePotential, PhysicalConstants
from .poly import MOMENTA, POSITIONS, Poly

PolyObservable = Poly

DEFAULT_BRACKET_STEP = 1e-5


class NonFiniteError(ArithmeticError):
    """An observable evaluated to inf or nan."""


@dataclass(frozen=True)
class PhasePoint:
    """Position and canonical momentum."""

    x: tuple
    p: tuple

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        p = tuple(float(v) for v in self.p)
        if len(x) != 3 or len(p) != 3:
            raise ValueError("x and p need three components each")
        if not all(math.isfinite(v) for v in x + p):
            raise NonFiniteError(f"non-finite phase point {x}, {p}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)

    @property
    def z(self) -> tuple:
        return self.x + self.p

    @classmethod
    def from_z(cls, z: Sequence[float]) -> "PhasePoint":
        return cls(tuple(z[:3]), tuple(z[3:6]))

    @classmethod
    def from_kinematical(cls, x, pi, A: GaugePotential, consts: PhysicalConstants) -> "PhasePoint":
        q = float(consts.coupling)
        a = A.raw(x)
        return cls(tuple(x), tuple(pv + q * av for pv, av in zip(pi, a)))

    def kinematical(self, A: GaugePotential, consts: PhysicalConstants) -> tuple:
        q = float(consts.coupling)
        a = A.raw(self.x)
        return tuple(pv - q * av for pv, av in zip(self.p, a))


@dataclass(frozen=True)
class NumericObservable:
    """Black-box observable ``f(z)`` with an optional analytic gradient."""

    func: Callable = field(compare=False)
    grad: Callable | None = field(default=None, compare=False)
    label: str = "numeric"

    def __call__(self, z: Sequence[float]) -> float:
        value = float(self.func(z))
        if not math.isfinite(value):
            raise NonFiniteError(f"{self.label} is not finite at {tuple(z)}")
        return value

    @classmethod
    def from_poly(cls, poly: Poly, label: str | None = None) -> "NumericObservable":
        f = poly.lambdify()
        grads = [poly.diff(i).lambdify() for i in range(6)]
        return cls(
            func=lambda z: f(*z),
            grad=lambda z: [g(*z) for g in grads],
            label=label or str(poly),
        )


Observable = Union[Poly, NumericObservable]


def evaluate(obs: Observable, z: Sequence[float]) -> float:
    if isinstance(obs, Poly):
        return float(obs.lambdify()(*z))
    return obs(z)


def poisson(f: Poly, g: Poly) -> Poly:
    """Exact Poisson bracket sum_i (df/dx_i dg/dp_i - df/dp_i dg/dx_i)."""
    total = Poly()
    for i in range(3):
        total = total + f.diff(i) * g.diff(i + 3) - f.diff(i + 3) * g.diff(i)
    return total


def numeric_gradient(obs: Observable, z: Sequence[float], h: float | None = None) -> np.ndarray:
    """Phase-space gradient; analytic when available, central differences otherwise."""
    if isinstance(obs, Poly):
        obs = NumericObservable.from_poly(obs)
    if obs.grad is not None:
        g = np.asarray(obs.grad(z), dtype=float)
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"gradient of {obs.label} is not finite at {tuple(z)}")
        return g
    base = DEFAULT_BRACKET_STEP if h is None else h
    z = [float(v) for v in z]
    g = np.empty(6)
    for i in range(6):
        step = base * max(1.0, abs(z[i]))
        zp, zm = list(z), list(z)
        zp[i] += step
        zm[i] -= step
        g[i] = (obs(zp) - obs(zm)) / (2 * step)
    return g


def poisson_numeric(f: Observable, g: Observable, at: PhasePoint | Sequence[float],
                    h: float | None = None) -> float:
    """Poisson bracket at a single phase point."""
    if h is not None and h <= 0:
        raise ValueError("step must be positive")
    z = at.z if isinstance(at, PhasePoint) else tuple(at)
    df = numeric_gradient(f, z, h)
    dg = numeric_gradient(g, z, h)
    return float(np.dot(df[:3], dg[3:]) - np.dot(df[3:], dg[:3]))


def _require_polynomial(A: GaugePotential):
    if not A.is_polynomial:
        raise TypeError(f"polynomial potential required, got black-box {A.label!r}")


def substitute_kinematical(f: Poly, A: GaugePotential, consts: PhysicalConstants) -> Poly:
    """Rewrite ``f(x, p)`` in terms of ``(x, pi)`` using p = pi + (e/c) A.

    The result reuses the momentum slots for the kinematical momentum.
    """
    _require_polynomial(A)
    q = consts.coupling
    return f.subs({3 + i: MOMENTA[i] + q * A.components[i] for i in range(3)})


def substitute_canonical(F: Poly, A: GaugePotential, consts: PhysicalConstants) -> Poly:
    """Inverse of :func:`substitute_kinematical`: pi = p - (e/c) A."""
    _require_polynomial(A)
    q = consts.coupling
    return F.subs({3 + i: MOMENTA[i] - q * A.components[i] for i in range(3)})


def position(i: int) -> Poly:
    return POSITIONS[i - 1]


def momentum(i: int) -> Poly:
    return MOMENTA[i - 1]


def kinematical_momentum(A: GaugePotential, consts: PhysicalConstants, i: int) -> Observable:
    """pi_i = p_i - (e/c) A_i as an exact or numeric observable (1-based axis)."""
    idx = i - 1
    if A.is_polynomial:
        return MOMENTA[idx] - consts.coupling * A.components[idx]
    q = float(consts.coupling)

    def func(z):
        return z[3 + idx] - q * A.raw(z[:3])[idx]

    def grad(z):
        jac = A.jacobian(z[:3])
        g = [-q * jac[idx, j] for j in range(3)] + [0.0, 0.0, 0.0]
        g[3 + idx] = 1.0
        return g

    return NumericObservable(func=func, grad=grad, label=f"pi{i}[{A.label}]")


def hamiltonian_observable(A: GaugePotential, consts: PhysicalConstants) -> Observable:
    """H = |p - (e/c) A|^2 / 2m."""
    if A.is_polynomial:
        pis = [kinematical_momentum(A, consts, i) for i in (1, 2, 3)]
        return sum((pi * pi for pi in pis), Poly()) * (1 / (2 * consts.m))
    q = float(consts.coupling)
    inv2m = 1.0 / (2.0 * float(consts.m))

    def func(z):
        a = A.raw(z[:3])
        return inv2m * sum((z[3 + i] - q * a[i]) ** 2 for i in range(3))

    def grad(z):
        a = A.raw(z[:3])
        jac = A.jacobian(z[:3])
        pi = [z[3 + i] - q * a[i] for i in range(3)]
        gx = [-q * sum(pi[i] * jac[i, j] for i in range(3)) / float(consts.m) for j in range(3)]
        gp = [v / float(consts.m) for v in pi]
        return gx + gp

    return NumericObservable(func=func, grad=grad, label=f"H[{A.label}]")
