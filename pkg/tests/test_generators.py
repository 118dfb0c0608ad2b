from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import polys
from magtrans.fields import (
    GaugePotential, PhysicalConstants, curl, dipole, gauge_transform, gradient_field, landau,
    symmetric, zero_potential,
)
from magtrans.generators import (
    PASSIVE_ROTATION, PASSIVE_TRANSLATION, GeneratorSpec, NonIntegrableReport,
    active_translation_generator, describe, find_gauge_function, free_angular_momentum,
    levi_civita, passive_rotation_generator, passive_translation_generator, rotation_witness,
    solve_gradient, translation_witness,
)
from magtrans.observables import hamiltonian_observable, kinematical_momentum, poisson, substitute_kinematical
from magtrans.poly import MOMENTA, P1, P2, POSITIONS, X1, X2, X3, Poly


def test_solve_gradient_examples():
    assert solve_gradient([Poly.const(1), Poly(), Poly()]) == X1
    assert solve_gradient([X2, X1, Poly()]) == X1 * X2
    report = solve_gradient([X2, -X1, Poly()])
    assert isinstance(report, NonIntegrableReport)
    (i, j, diff), = report.mixed_partials
    assert (i, j) == (0, 1) and diff == 2


def test_solve_gradient_respects_basepoint():
    phi = solve_gradient([2 * X1, Poly(), 3 * X3 * X3], basepoint=(1, 5, 2))
    assert phi.diff(0) == 2 * X1 and phi.diff(2) == 3 * X3 * X3
    assert phi.evaluate([1, 5, 2, 0, 0, 0]) == 0


def test_report_needs_content():
    with pytest.raises(ValueError):
        NonIntegrableReport(axis=1, kind=PASSIVE_TRANSLATION)


def test_symmetric_gauge_passive_generator():
    consts = PhysicalConstants(2, 3, 1, 1)
    B = Fraction(5, 2)
    G1 = passive_translation_generator(symmetric((0, 0, B)), 1, consts)
    assert G1 == P1 - consts.e * B / (2 * consts.c) * X2


def test_free_generators(unit):
    for k in (1, 2, 3):
        assert passive_translation_generator(zero_potential(), k, unit) == MOMENTA[k - 1]
        assert active_translation_generator(zero_potential(), k, unit) == MOMENTA[k - 1]
        assert passive_rotation_generator(zero_potential(), k, unit) == free_angular_momentum(k)


def test_gradient_field_rejects_x1(unit):
    A = gradient_field(1, 1)
    report = passive_translation_generator(A, 1, unit)
    assert isinstance(report, NonIntegrableReport)
    assert report.offending == ((2, Poly.const(1)),)
    assert report.to_json()["offending"][0] == {"component": 3, "value": "1"}
    for k in (2, 3):
        assert isinstance(passive_translation_generator(A, k, unit), Poly)


def test_active_generator_examples(unit):
    assert active_translation_generator(landau(1), 2, unit) == P2 - X1
    sym = symmetric((0, 0, 3))
    pi1, pi2 = (active_translation_generator(sym, k, unit) for k in (1, 2))
    assert poisson(pi1, pi2) == 3
    with pytest.raises(TypeError):
        active_translation_generator(dipole((0, 0, 1)), 1, unit)


def test_rotation_generators_uniform_field(unit):
    A = symmetric((0, 0, 4))
    assert passive_rotation_generator(A, 3, unit) == X1 * P2 - X2 * P1
    for k in (1, 2):
        assert isinstance(passive_rotation_generator(A, k, unit), NonIntegrableReport)


def test_rotation_in_landau_gauge_obeys_brackets(odd_consts):
    A = landau(Fraction(3, 2))
    L3 = passive_rotation_generator(A, 3, odd_consts)
    pis = [kinematical_momentum(A, odd_consts, i) for i in (1, 2, 3)]
    for i in range(3):
        ex = sum((levi_civita(i, 2, l) * POSITIONS[l] for l in range(3)), Poly())
        ep = sum((levi_civita(i, 2, l) * pis[l] for l in range(3)), Poly())
        assert poisson(POSITIONS[i], L3) == ex
        assert poisson(pis[i], L3) == ep
    assert poisson(L3, hamiltonian_observable(A, odd_consts)).is_zero()


def test_dipole_gates(unit):
    A = dipole((0, 0, 1))
    for k in (1, 2, 3):
        report = passive_translation_generator(A, k, unit)
        assert isinstance(report, NonIntegrableReport)
        assert report.to_json()["offending"]
    assert passive_rotation_generator(A, 3, unit) == X1 * P2 - X2 * P1
    for k in (1, 2):
        assert isinstance(passive_rotation_generator(A, k, unit), NonIntegrableReport)
    assert rotation_witness(A, 3) is None and translation_witness(A, 3) is not None


def test_undecidable_blackbox_raises(unit):
    A = GaugePotential.blackbox(lambda x: (0.0, x[0] + x[1] ** 2, 0.0))
    with pytest.raises(TypeError):
        passive_translation_generator(A, 1, unit)
    with pytest.raises(TypeError):
        passive_rotation_generator(A, 1, unit)


def test_bad_axis(unit):
    with pytest.raises(ValueError):
        passive_translation_generator(zero_potential(), 0, unit)


def test_not_gauge_related(unit):
    A = symmetric((0, 0, 1))
    G = [passive_translation_generator(A, k, unit) for k in (1, 2, 3)]
    assert find_gauge_function([g - p for g, p in zip(G, MOMENTA)], unit) is None
    xi = X1 * X2 * X3 + X1
    shifted = [MOMENTA[k] + xi.diff(k) for k in range(3)]
    assert find_gauge_function([s - p for s, p in zip(shifted, MOMENTA)], unit) == xi


def test_generator_spec_serializes(unit):
    G = passive_translation_generator(symmetric((0, 0, 1)), 1, unit)
    spec = describe(G, PASSIVE_TRANSLATION, 1, symmetric((0, 0, 1)))
    assert isinstance(spec, GeneratorSpec)
    data = spec.to_json()
    assert data["observable"] == "-1/2*x2 + p1"
    assert Poly.from_json(data["terms"]) == G
    assert describe(G, PASSIVE_ROTATION, 3, zero_potential()).kind == PASSIVE_ROTATION


@settings(max_examples=25)
@given(polys(nvars=3, max_degree=3))
def test_gauge_independence_in_pi_variables(xi):
    consts = PhysicalConstants(2, 3, 1, Fraction(1, 2))
    A = symmetric((1, -2, 3))
    A2 = gauge_transform(A, xi)
    for k in (1, 2, 3):
        one = substitute_kinematical(passive_translation_generator(A, k, consts), A, consts)
        two = substitute_kinematical(passive_translation_generator(A2, k, consts), A2, consts)
        assert one == two
    L = passive_rotation_generator(symmetric((0, 0, 3)), 3, consts)
    L2 = passive_rotation_generator(gauge_transform(symmetric((0, 0, 3)), xi), 3, consts)
    assert substitute_kinematical(L, symmetric((0, 0, 3)), consts) == \
        substitute_kinematical(L2, gauge_transform(symmetric((0, 0, 3)), xi), consts)


@settings(max_examples=25)
@given(polys(nvars=3, max_degree=2), polys(nvars=3, max_degree=2), polys(nvars=3, max_degree=2))
def test_defining_brackets_whenever_generator_exists(a1, a2, a3):
    consts = PhysicalConstants(1, 2, 1, 1)
    A = GaugePotential.polynomial([a1, a2, a3])
    B = curl(A).components
    H = hamiltonian_observable(A, consts)
    for k in (1, 2, 3):
        G = passive_translation_generator(A, k, consts)
        invariant = all(b.diff(k - 1).is_zero() for b in B)
        assert isinstance(G, Poly) == invariant
        if isinstance(G, Poly):
            for i in range(3):
                assert poisson(POSITIONS[i], G) == (1 if i == k - 1 else 0)
                assert poisson(kinematical_momentum(A, consts, i + 1), G).is_zero()
            assert poisson(G, H).is_zero()
