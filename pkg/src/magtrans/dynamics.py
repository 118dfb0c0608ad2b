"""Time evolution of a charged particle under H = |p - (e/c)A|^2 / 2m."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .fields import GaugePotential, PhysicalConstants, curl
from .flows import hamiltonian_vector_field, rk4
from .observables import Observable, PhasePoint, hamiltonian_observable
from .poly import Poly

STEPS_PER_PERIOD = 2000


def hamiltonian(state: PhasePoint, A: GaugePotential, consts: PhysicalConstants) -> float:
    pi = state.kinematical(A, consts)
    return sum(v * v for v in pi) / (2.0 * float(consts.m))


def cyclotron_period(B_magnitude: float, consts: PhysicalConstants) -> float:
    """2 pi m c / (e |B|)."""
    return 2.0 * math.pi * float(consts.m) * float(consts.c) / (float(consts.e) * B_magnitude)


def default_dt(start: PhasePoint, A: GaugePotential, consts: PhysicalConstants) -> float | None:
    b = float(np.linalg.norm(curl(A)(start.x)))
    if b == 0.0:
        return None
    return cyclotron_period(b, consts) / STEPS_PER_PERIOD


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray = field(compare=False)
    states: np.ndarray = field(compare=False)
    gauge: str
    consts: PhysicalConstants
    potential: GaugePotential = field(compare=False, repr=False)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def point(self, index: int) -> PhasePoint:
        return PhasePoint.from_z(self.states[index])

    def kinematical(self) -> np.ndarray:
        q = float(self.consts.coupling)
        a = np.array([self.potential.raw(z[:3]) for z in self.states])
        return self.states[:, 3:] - q * a

    def values(self, obs: Observable) -> np.ndarray:
        if isinstance(obs, Poly):
            f = obs.lambdify()
            out = f(*self.states.T)
            return np.broadcast_to(np.asarray(out, dtype=float), self.times.shape).copy()
        return np.array([obs(z) for z in self.states])

    def to_csv(self, path, monitors: Mapping[str, Observable] | None = None) -> Path:
        path = Path(path)
        monitors = dict(monitors or {})
        pi = self.kinematical()
        energy = (pi ** 2).sum(axis=1) / (2.0 * float(self.consts.m))
        columns = {name: self.values(obs) for name, obs in monitors.items()}
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x1", "x2", "x3", "p1", "p2", "p3", "pi1", "pi2", "pi3", "H", *columns])
            for n, t in enumerate(self.times):
                row = [t, *self.states[n], *pi[n], energy[n], *(c[n] for c in columns.values())]
                w.writerow([repr(float(v)) for v in row])
        return path


def _blackbox_rhs(A: GaugePotential, consts: PhysicalConstants):
    q = float(consts.coupling)
    inv_m = 1.0 / float(consts.m)

    def rhs(z):
        x = z[:3]
        a = A.raw(x)
        jac = A.jacobian(x)
        pi = [z[3 + i] - q * a[i] for i in range(3)]
        force = [q * inv_m * sum(pi[j] * jac[j][i] for j in range(3)) for i in range(3)]
        return (pi[0] * inv_m, pi[1] * inv_m, pi[2] * inv_m, *force)

    return rhs


def integrate_trajectory(start: PhasePoint, A: GaugePotential, consts: PhysicalConstants,
                         T: float, dt: float | None = None) -> Trajectory:
    """Fixed-step RK4 integration of Hamilton's equations in (x, p).

    With ``dt`` omitted the step is a 2000th of the local cyclotron period at
    the start point; a field-free start then requires an explicit step.
    """
    if T <= 0:
        raise ValueError("duration must be positive")
    if dt is None:
        dt = default_dt(start, A, consts)
        if dt is None:
            raise ValueError("field vanishes at the start point; pass dt explicitly")
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = max(1, math.ceil(T / dt - 1e-9))
    if A.is_polynomial:
        rhs = hamiltonian_vector_field(hamiltonian_observable(A, consts))
    else:
        rhs = _blackbox_rhs(A, consts)
    states = rk4(rhs, start.z, T, n, record=True)
    return Trajectory(
        times=np.linspace(0.0, T, n + 1),
        states=np.array(states),
        gauge=A.label,
        consts=consts,
        potential=A,
    )


def drift(traj: Trajectory, obs: Observable) -> float:
    """max_t |O(t) - O(0)| / max(1, |O(0)|)."""
    values = traj.values(obs)
    ref = values[0]
    return float(np.max(np.abs(values - ref)) / max(1.0, abs(ref)))


def lorentz_residual(traj: Trajectory) -> float:
    """Largest mismatch between centred dpi/dt and (e/c) v x B at interior samples."""
    pi = traj.kinematical()
    dt = traj.dt
    B = curl(traj.potential)
    q = float(traj.consts.coupling)
    m = float(traj.consts.m)
    worst = 0.0
    for n in range(1, len(traj.times) - 1):
        dpi = (pi[n + 1] - pi[n - 1]) / (2 * dt)
        force = q * np.cross(pi[n] / m, B(traj.states[n, :3]))
        worst = max(worst, float(np.max(np.abs(dpi - force))))
    return worst

