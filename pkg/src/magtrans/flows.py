"""One-parameter canonical flows, finite passive translations, canonicity tests."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .fields import GaugePotential, PhysicalConstants
from .observables import Observable, PhasePoint, numeric_gradient
from .poly import Poly, lambdify_many

DEFAULT_STEPS = 1000
SYMPLECTIC = np.block([[np.zeros((3, 3)), np.eye(3)], [-np.eye(3), np.zeros((3, 3))]])


class DivergenceError(ArithmeticError):
    """Integration produced a non-finite state."""


def hamiltonian_vector_field(G: Observable) -> Callable:
    """Return ``v(z) = (dG/dp, -dG/dx)`` as a function of a 6-sequence."""
    if isinstance(G, Poly):
        f = lambdify_many([G.diff(3), G.diff(4), G.diff(5),
                           -G.diff(0), -G.diff(1), -G.diff(2)])
        return lambda z: f(*z)

    def v(z):
        g = numeric_gradient(G, z)
        return (g[3], g[4], g[5], -g[0], -g[1], -g[2])

    return v


def rk4(rhs: Callable, z0: Sequence[float], s: float, n: int, record: bool = False):
    """Classical fixed-step fourth-order integration from 0 to ``s`` in ``n`` steps.

    Returns the final state, or the list of all ``n + 1`` states when
    ``record`` is true.
    """
    h = s / n
    half = 0.5 * h
    sixth = h / 6.0
    z = tuple(float(v) for v in z0)
    states = [z] if record else None
    for _ in range(n):
        try:
            k1 = rhs(z)
            k2 = rhs(tuple(a + half * b for a, b in zip(z, k1)))
            k3 = rhs(tuple(a + half * b for a, b in zip(z, k2)))
            k4 = rhs(tuple(a + h * b for a, b in zip(z, k3)))
        except OverflowError as exc:
            raise DivergenceError(f"overflow while integrating from {z}") from exc
        z = tuple(a + sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
                  for a, b1, b2, b3, b4 in zip(z, k1, k2, k3, k4))
        if not all(math.isfinite(v) for v in z):
            raise DivergenceError(f"non-finite state {z}")
        if record:
            states.append(z)
    return states if record else z


def _steps(s: float, step: float | None) -> int:
    if step is None:
        return DEFAULT_STEPS
    if step <= 0:
        raise ValueError("step must be positive")
    return max(1, math.ceil(abs(s) / step - 1e-12))


def _as_z(start) -> tuple:
    return start.z if isinstance(start, PhasePoint) else tuple(float(v) for v in start)


def flow(G: Observable, s: float, start: PhasePoint, step: float | None = None) -> PhasePoint:
    """Move ``start`` a parameter distance ``s`` along the flow generated by ``G``."""
    if s == 0:
        return PhasePoint.from_z(_as_z(start))
    z = rk4(hamiltonian_vector_field(G), _as_z(start), s, _steps(s, step))
    return PhasePoint.from_z(z)


@dataclass(frozen=True)
class FlowPath:
    label: str
    s: np.ndarray = field(compare=False)
    states: np.ndarray = field(compare=False)
    method: str = "rk4"
    step: float = 0.0

    def points(self) -> list:
        return [PhasePoint.from_z(z) for z in self.states]

    def to_csv(self, path, A: GaugePotential, consts: PhysicalConstants) -> Path:
        path = Path(path)
        q = float(consts.coupling)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "x1", "x2", "x3", "p1", "p2", "p3", "pi1", "pi2", "pi3"])
            for s, z in zip(self.s, self.states):
                a = A.raw(z[:3])
                pi = [z[3 + i] - q * a[i] for i in range(3)]
                w.writerow([repr(float(s))] + [repr(float(v)) for v in z] + [repr(v) for v in pi])
        return path


def flow_path(G: Observable, s: float, start: PhasePoint, samples: int = 10,
              step: float | None = None, label: str | None = None) -> FlowPath:
    """Sampled flow from 0 to ``s`` (> 0) with ``samples`` equal intervals."""
    if s <= 0:
        raise ValueError("flow paths need a positive parameter range")
    n = _steps(s, step)
    n = samples * max(1, math.ceil(n / samples))
    states = rk4(hamiltonian_vector_field(G), _as_z(start), s, n, record=True)
    stride = n // samples
    kept = np.array(states[::stride])
    return FlowPath(label=label or getattr(G, "label", str(G)),
                    s=np.linspace(0.0, s, samples + 1), states=kept, step=s / n)


def finite_passive_translation(start: PhasePoint, k: int, s: float, A: GaugePotential,
                               consts: PhysicalConstants) -> PhasePoint:
    """Shift x_k by s keeping the kinematical momentum fixed."""
    if k not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {k!r}")
    q = float(consts.coupling)
    x = list(start.x)
    x_new = list(x)
    x_new[k - 1] += s
    a0 = A.raw(x)
    a1 = A.raw(x_new)
    p_new = tuple(p + q * (b - a) for p, a, b in zip(start.p, a0, a1))
    return PhasePoint(tuple(x_new), p_new)


def map_jacobian(mapping: Callable, z: Sequence[float], h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of a phase-space map, J[a, b] = dz'_a/dz_b."""
    z = [float(v) for v in z]
    jac = np.empty((6, 6))
    for b in range(6):
        step = h * max(1.0, abs(z[b]))
        zp, zm = list(z), list(z)
        zp[b] += step
        zm[b] -= step
        fp = np.asarray(_as_z(mapping(PhasePoint.from_z(zp))))
        fm = np.asarray(_as_z(mapping(PhasePoint.from_z(zm))))
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
            raise DivergenceError("map produced a non-finite image")
        jac[:, b] = (fp - fm) / (2 * step)
    return jac


@dataclass(frozen=True)
class CanonicityReport:
    """Fundamental brackets of a map's image coordinates at sample points.

    ``brackets[n]`` is the 6x6 matrix of {z'_a, z'_b}; ``residuals[n]`` holds
    the largest deviation from canonical values in each block.
    """

    points: tuple
    brackets: tuple = field(compare=False)
    residuals: tuple

    @property
    def max_residual(self) -> float:
        return max((max(r.values()) for r in self.residuals), default=0.0)

    def bracket(self, a: str, b: str, index: int = 0) -> float:
        """Bracket between named image coordinates, e.g. ``bracket("p1", "p2")``."""
        names = ("x1", "x2", "x3", "p1", "p2", "p3")
        return float(self.brackets[index][names.index(a), names.index(b)])

    def to_json(self) -> list:
        return [
            {"point": list(p.z), **{k: float(v) for k, v in r.items()}}
            for p, r in zip(self.points, self.residuals)
        ]


def canonicity_report(mapping: Callable, points: Sequence[PhasePoint],
                      h: float = 1e-5) -> CanonicityReport:
    """Numeric check that ``mapping`` preserves the fundamental brackets."""
    if h <= 0:
        raise ValueError("step must be positive")
    brackets, residuals = [], []
    for pt in points:
        jac = map_jacobian(mapping, _as_z(pt), h)
        pb = jac @ SYMPLECTIC @ jac.T
        diff = pb - SYMPLECTIC
        brackets.append(pb)
        residuals.append({
            "xp": float(np.max(np.abs(diff[:3, 3:]))),
            "xx": float(np.max(np.abs(diff[:3, :3]))),
            "pp": float(np.max(np.abs(diff[3:, 3:]))),
        })
    return CanonicityReport(points=tuple(points), brackets=tuple(brackets), residuals=tuple(residuals))


def phase_distance(a: PhasePoint, b: PhasePoint) -> float:
    return float(math.dist(a.z, b.z))


def flow_commutator_gap(G1: Observable, G2: Observable, s1: float, s2: float,
                        start: PhasePoint, step: float | None = None) -> float:
    """Distance between the two orders of composing the flows of G1 and G2."""
    if step is not None and step <= 0:
        raise ValueError("step must be positive")
    one_then_two = flow(G2, s2, flow(G1, s1, start, step), step)
    two_then_one = flow(G1, s1, flow(G2, s2, start, step), step)
    return phase_distance(one_then_two, two_then_one)

