import math

import numpy as np
import pytest

from magtrans.dynamics import (
    cyclotron_period, default_dt, drift, hamiltonian, integrate_trajectory, lorentz_residual,
)
from magtrans.fields import PhysicalConstants, dipole, landau, symmetric, zero_potential
from magtrans.generators import passive_rotation_generator, passive_translation_generator
from magtrans.observables import PhasePoint, hamiltonian_observable
from magtrans.poly import P1


def test_hamiltonian_examples(unit):
    assert hamiltonian(PhasePoint((0, 0, 0), (1, 0, 0)), zero_potential(), unit) == 0.5
    assert hamiltonian(PhasePoint((1, 0, 0), (1, 1, 0)), landau(1), unit) == 0.5
    x, pi = (0.3, -0.7, 0.2), (0.4, 0.5, -0.6)
    values = {hamiltonian(PhasePoint.from_kinematical(x, pi, A, unit), A, unit)
              for A in (symmetric((0, 0, 1)), landau(1))}
    assert max(values) - min(values) <= 1e-15


def test_free_motion_is_straight(unit):
    start = PhasePoint((1, 2, 3), (0.5, -1, 2))
    traj = integrate_trajectory(start, zero_potential(), unit, 2.0, dt=0.01)
    assert traj.point(-1).x == pytest.approx((2, 0, 7), abs=1e-12)
    with pytest.raises(ValueError):
        integrate_trajectory(start, zero_potential(), unit, 2.0)
    with pytest.raises(ValueError):
        integrate_trajectory(start, zero_potential(), unit, -1.0, dt=0.1)


def test_cyclotron_orbit_closes(unit):
    A = symmetric((0, 0, 1))
    start = PhasePoint.from_kinematical((0, 0, 0), (1, 0, 0), A, unit)
    period = cyclotron_period(1.0, unit)
    assert period == pytest.approx(2 * math.pi)
    assert default_dt(start, A, unit) == pytest.approx(period / 2000)
    traj = integrate_trajectory(start, A, unit, period)
    xs = traj.states[:, :3]
    assert np.linalg.norm(xs[-1] - xs[0]) <= 1e-8
    # circle of radius m|pi|c/(eB) = 1 centred at (0, -1) for positive charge
    radii = np.hypot(xs[:, 0], xs[:, 1] + 1)
    assert np.max(np.abs(radii - 1)) <= 1e-8
    assert lorentz_residual(traj) <= 10 * traj.dt ** 2


def test_uniform_field_conservation(unit):
    A = symmetric((0, 0, 1))
    start = PhasePoint.from_kinematical((0.5, 0, 0), (1, 0, 0), A, unit)
    traj = integrate_trajectory(start, A, unit, 10 * 2 * math.pi)
    monitors = [hamiltonian_observable(A, unit), passive_rotation_generator(A, 3, unit)]
    monitors += [passive_translation_generator(A, k, unit) for k in (1, 2, 3)]
    for obs in monitors:
        assert drift(traj, obs) <= 1e-8
    assert drift(traj, P1) >= 0.1


def test_dipole_conservation(unit):
    A = dipole((0, 0, 1))
    start = PhasePoint.from_kinematical((2, 0, 0), (0, 0.1, 0), A, unit)
    traj = integrate_trajectory(start, A, unit, 50.0)
    assert drift(traj, hamiltonian_observable(A, unit)) <= 1e-8
    assert drift(traj, passive_rotation_generator(A, 3, unit)) <= 1e-7
    assert lorentz_residual(traj) <= 10 * traj.dt ** 2


def test_scaled_constants(odd_consts):
    consts = PhysicalConstants(3, 2, 1, 1)
    A = landau(2)
    start = PhasePoint.from_kinematical((0.1, 0.2, 0), (0.5, 0.5, 0.1), A, consts)
    period = cyclotron_period(2.0, consts)
    traj = integrate_trajectory(start, A, consts, period)
    assert np.linalg.norm(traj.states[-1, :2] - traj.states[0, :2]) <= 1e-8
    assert traj.states[-1, 2] == pytest.approx(0.1 * period, abs=1e-10)


def test_trajectory_csv(tmp_path, unit):
    A = symmetric((0, 0, 1))
    traj = integrate_trajectory(PhasePoint((0, 0, 0), (1, 0, 0)), A, unit, 1.0, dt=0.1)
    path = traj.to_csv(tmp_path / "t.csv", {"L3": passive_rotation_generator(A, 3, unit)})
    rows = path.read_text().splitlines()
    assert rows[0] == "t,x1,x2,x3,p1,p2,p3,pi1,pi2,pi3,H,L3"
    assert len(rows) == 12
    assert np.all(np.diff(traj.times) > 0)
