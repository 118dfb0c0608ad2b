"""Vector potentials, magnetic fields, gauge transformations and field families."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .poly import X1, X2, X3, Poly, lambdify_many, parse_rational, rational_sqrt

Vec3 = Sequence[float]

DIPOLE_CORE_RADIUS = 1e-9


class SingularityError(ValueError):
    """Potential or field evaluated at a singular point."""


class StepNotSetError(ValueError):
    """Numeric curl requested for a black-box potential with no step configured."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Charge, speed of light, mass and reduced Planck constant (exact rationals)."""

    e: Fraction = Fraction(1)
    c: Fraction = Fraction(1)
    m: Fraction = Fraction(1)
    hbar: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("e", "c", "m", "hbar"):
            value = getattr(self, name)
            value = parse_rational(value) if not isinstance(value, Fraction) else value
            if value <= 0:
                raise ValueError(f"constant {name} must be positive, got {value}")
            object.__setattr__(self, name, value)

    @property
    def coupling(self) -> Fraction:
        """The ratio e/c that multiplies the vector potential."""
        return self.e / self.c

    @classmethod
    def from_mapping(cls, data) -> "PhysicalConstants":
        unknown = set(data) - {"e", "c", "m", "hbar"}
        if unknown:
            raise ValueError(f"unknown constants: {sorted(unknown)}")
        return cls(**{k: parse_rational(v) for k, v in data.items()})

    def to_json(self) -> dict:
        return {k: str(getattr(self, k)) for k in ("e", "c", "m", "hbar")}


def _check_position_poly(p: Poly) -> Poly:
    if p.depends_on_momentum():
        raise ValueError("potential components must depend on position only")
    return p


@dataclass(frozen=True)
class GaugePotential:
    """A vector potential, either exact polynomial or a black-box function.

    Black-box potentials may carry an analytic Jacobian, a closed-form field
    and an exact rational field evaluator; each is optional.
    ``fd_step`` is ``"auto"`` (h = 1e-5 * max(1, |r|)), a fixed float, or
    ``None`` meaning numeric differentiation is not configured.
    """

    label: str
    components: tuple | None = None
    func: Callable | None = field(default=None, compare=False)
    jacobian_func: Callable | None = field(default=None, compare=False)
    field_func: Callable | None = field(default=None, compare=False)
    exact_field: Callable | None = field(default=None, compare=False)
    fd_step: float | str | None = "auto"
    params: tuple = ()

    def __post_init__(self):
        if (self.components is None) == (self.func is None):
            raise ValueError("give exactly one of polynomial components or func")
        if self.components is not None:
            if len(self.components) != 3:
                raise ValueError("three components required")
            comps = tuple(_check_position_poly(Poly._coerce(c)) for c in self.components)
            object.__setattr__(self, "components", comps)

    @classmethod
    def polynomial(cls, components: Sequence[Poly], label: str = "polynomial") -> "GaugePotential":
        return cls(label=label, components=tuple(components))

    @classmethod
    def blackbox(cls, func: Callable, label: str = "blackbox", *, jacobian=None,
                 fd_step: float | str | None = "auto") -> "GaugePotential":
        return cls(label=label, func=func, jacobian_func=jacobian, fd_step=fd_step)

    @property
    def kind(self) -> str:
        return "polynomial" if self.components is not None else "blackbox"

    @property
    def is_polynomial(self) -> bool:
        return self.components is not None

    @cached_property
    def _compiled(self):
        return lambdify_many(self.components)

    @cached_property
    def _compiled_jacobian(self):
        return lambdify_many([a.diff(j) for a in self.components for j in range(3)])

    def raw(self, x: Vec3) -> tuple:
        """Evaluate as a plain float tuple (fast path for integrators)."""
        if self.components is not None:
            return self._compiled(x[0], x[1], x[2], 0.0, 0.0, 0.0)
        return tuple(self.func(x))

    def __call__(self, x: Vec3) -> np.ndarray:
        return np.array(self.raw(x), dtype=float)

    def jacobian(self, x: Vec3) -> np.ndarray:
        """Matrix J[i, j] = dA_i/dx_j."""
        if self.components is not None:
            return np.array(self._compiled_jacobian(x[0], x[1], x[2], 0.0, 0.0, 0.0)).reshape(3, 3)
        if self.jacobian_func is not None:
            return np.asarray(self.jacobian_func(x), dtype=float).reshape(3, 3)
        return _fd_jacobian(self.raw, x, self._step(x))

    def _step(self, x: Vec3) -> float:
        if self.fd_step is None:
            raise StepNotSetError(f"no finite-difference step configured for {self.label!r}")
        if self.fd_step == "auto":
            return 1e-5 * max(1.0, math.sqrt(sum(float(v) ** 2 for v in x)))
        return float(self.fd_step)

    def to_json(self) -> dict:
        if self.components is None:
            return {"label": self.label, "kind": "blackbox", "params": [list(p) for p in self.params]}
        return {
            "label": self.label,
            "kind": "polynomial",
            "components": [c.to_json(3) for c in self.components],
        }


@dataclass(frozen=True)
class MagneticField:
    """A magnetic field in the same dual representation as :class:`GaugePotential`."""

    label: str
    components: tuple | None = None
    func: Callable | None = field(default=None, compare=False)

    @cached_property
    def _compiled(self):
        return lambdify_many(self.components)

    @property
    def is_polynomial(self) -> bool:
        return self.components is not None

    def raw(self, x: Vec3) -> tuple:
        if self.components is not None:
            return self._compiled(x[0], x[1], x[2], 0.0, 0.0, 0.0)
        return tuple(self.func(x))

    def __call__(self, x: Vec3) -> np.ndarray:
        return np.array(self.raw(x), dtype=float)

    def is_uniform(self) -> bool:
        return self.components is not None and all(c.is_constant() for c in self.components)

    def constant_value(self) -> tuple:
        if not self.is_uniform():
            raise ValueError("field is not uniform")
        return tuple(c.constant_term() for c in self.components)


def _fd_jacobian(f: Callable, x: Vec3, h: float) -> np.ndarray:
    x = [float(v) for v in x]
    jac = np.empty((3, 3))
    for j in range(3):
        xp = list(x)
        xm = list(x)
        xp[j] += h
        xm[j] -= h
        fp, fm = f(xp), f(xm)
        for i in range(3):
            jac[i, j] = (fp[i] - fm[i]) / (2 * h)
    return jac


def _curl_from_jacobian(jac: np.ndarray) -> tuple:
    return (
        jac[2, 1] - jac[1, 2],
        jac[0, 2] - jac[2, 0],
        jac[1, 0] - jac[0, 1],
    )


def numeric_curl(A: GaugePotential, step: float | None = None) -> MagneticField:
    """Central-difference curl, usable on any potential."""
    if step is None and A.fd_step is None:
        raise StepNotSetError(f"no finite-difference step configured for {A.label!r}")

    def b(x):
        h = step if step is not None else A._step(x)
        return _curl_from_jacobian(_fd_jacobian(A.raw, x, h))

    return MagneticField(label=f"numeric curl of {A.label}", func=b)


def curl(A: GaugePotential) -> MagneticField:
    """Magnetic field of a potential.

    Exact for polynomial potentials. Black-box potentials use their closed-form
    field when they carry one, otherwise central differences.
    """
    if A.components is not None:
        a1, a2, a3 = A.components
        comps = (a3.diff(1) - a2.diff(2), a1.diff(2) - a3.diff(0), a2.diff(0) - a1.diff(1))
        return MagneticField(label=f"curl {A.label}", components=comps)
    if A.field_func is not None:
        return MagneticField(label=f"curl {A.label}", func=A.field_func)
    return numeric_curl(A)


def divergence(B: MagneticField) -> Poly:
    if B.components is None:
        raise TypeError("exact divergence needs a polynomial field")
    return sum((c.diff(i) for i, c in enumerate(B.components)), Poly())


def gradient(xi: Poly) -> tuple:
    return tuple(xi.diff(i) for i in range(3))


def gauge_transform(A: GaugePotential, xi: Poly) -> GaugePotential:
    """Return the potential A + grad(xi)."""
    if A.components is None:
        raise TypeError("cannot add a polynomial gauge function to a black-box potential")
    _check_position_poly(xi)
    comps = tuple(a + g for a, g in zip(A.components, gradient(xi)))
    return GaugePotential(label=f"{A.label} + grad({xi})", components=comps)


# built-in families ---------------------------------------------------------

def _vec(values) -> tuple:
    vals = tuple(parse_rational(v) if not isinstance(v, Fraction) else v for v in values)
    if len(vals) != 3:
        raise ValueError("three components required")
    return vals


def _axis_index(axis) -> int:
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {axis!r}")
    return axis - 1


def symmetric(B) -> GaugePotential:
    """A = B x r / 2 for a uniform field."""
    b1, b2, b3 = _vec(B)
    half = Fraction(1, 2)
    comps = (
        half * (b2 * X3 - b3 * X2),
        half * (b3 * X1 - b1 * X3),
        half * (b1 * X2 - b2 * X1),
    )
    return GaugePotential(label=f"symmetric(B={b1},{b2},{b3})", components=comps)


def landau(B, axis: int = 3) -> GaugePotential:
    """Landau gauge for a uniform field of magnitude ``B`` along ``axis``.

    With (i, j, axis) cyclic, A_j = B x_i and the other components vanish.
    """
    k = _axis_index(axis)
    b = parse_rational(B) if not isinstance(B, Fraction) else B
    i, j = (k + 1) % 3, (k + 2) % 3
    comps = [Poly(), Poly(), Poly()]
    comps[j] = b * Poly.var(i)
    return GaugePotential(label=f"landau(B={b}, axis={axis})", components=tuple(comps))


def gradient_field(B0, beta) -> GaugePotential:
    """A = (0, B0 x1 + beta x1^2 / 2, 0), whose field is (0, 0, B0 + beta x1)."""
    b0 = parse_rational(B0) if not isinstance(B0, Fraction) else B0
    bt = parse_rational(beta) if not isinstance(beta, Fraction) else beta
    comps = (Poly(), b0 * X1 + Fraction(1, 2) * bt * X1 * X1, Poly())
    return GaugePotential(label=f"gradient(B0={b0}, beta={bt})", components=comps)


def dipole(mu) -> GaugePotential:
    """Point dipole at the origin, A = mu x r / r^3 (black-box kind)."""
    mu = _vec(mu)
    m1, m2, m3 = (float(v) for v in mu)

    def radius(x):
        r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
        r = math.sqrt(r2)
        if r < DIPOLE_CORE_RADIUS:
            raise SingularityError(f"dipole potential evaluated at |r| = {r:.3g}")
        return r, r2

    def potential(x):
        r, r2 = radius(x)
        inv3 = 1.0 / (r2 * r)
        return (
            (m2 * x[2] - m3 * x[1]) * inv3,
            (m3 * x[0] - m1 * x[2]) * inv3,
            (m1 * x[1] - m2 * x[0]) * inv3,
        )

    def jacobian(x):
        r, r2 = radius(x)
        inv3 = 1.0 / (r2 * r)
        inv5 = inv3 / r2
        cross = ((m2 * x[2] - m3 * x[1]), (m3 * x[0] - m1 * x[2]), (m1 * x[1] - m2 * x[0]))
        # d(mu x r)_a / dx_b
        dcross = ((0.0, -m3, m2), (m3, 0.0, -m1), (-m2, m1, 0.0))
        return [
            [dcross[a][b] * inv3 - 3.0 * cross[a] * x[b] * inv5 for b in range(3)]
            for a in range(3)
        ]

    def field_value(x):
        r, r2 = radius(x)
        inv5 = 1.0 / (r2 * r2 * r)
        mr = m1 * x[0] + m2 * x[1] + m3 * x[2]
        return tuple(3.0 * mr * x[i] * inv5 - (m1, m2, m3)[i] * r2 * inv5 for i in range(3))

    def exact_field_value(x):
        x = tuple(Fraction(v) for v in x)
        r2 = sum(v * v for v in x)
        r = rational_sqrt(r2)
        if r is None:
            return None
        if r == 0:
            raise SingularityError("dipole field at the origin")
        mr = sum(a * b for a, b in zip(mu, x))
        r5 = r2 * r2 * r
        return tuple((3 * mr * x[i] - mu[i] * r2) / r5 for i in range(3))

    return GaugePotential(
        label=f"dipole(mu={mu[0]},{mu[1]},{mu[2]})",
        func=potential,
        jacobian_func=jacobian,
        field_func=field_value,
        exact_field=exact_field_value,
        fd_step="auto",
        params=(("mu",) + tuple(str(v) for v in mu),),
    )


def zero_potential() -> GaugePotential:
    return GaugePotential(label="zero", components=(Poly(), Poly(), Poly()))


BUILTINS = {
    "zero": lambda: zero_potential(),
    "symmetric": lambda B: symmetric(B),
    "landau": lambda B, axis=3: landau(B, axis),
    "gradient": lambda B0, beta: gradient_field(B0, beta),
    "dipole": lambda mu: dipole(mu),
}


def builtin(kind: str, **params) -> GaugePotential:
    """Construct a named built-in potential."""
    try:
        factory = BUILTINS[kind]
    except KeyError:
        raise ValueError(f"unknown field kind {kind!r}; choose from {sorted(BUILTINS)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {kind!r}: {exc}") from exc
