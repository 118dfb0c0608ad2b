from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import polys
from magtrans.fields import (
    GaugePotential, PhysicalConstants, SingularityError, StepNotSetError, builtin, curl, dipole,
    divergence, gauge_transform, gradient_field, landau, numeric_curl, symmetric, zero_potential,
)
from magtrans.poly import X1, X2, Poly


def test_constants_must_be_positive():
    with pytest.raises(ValueError):
        PhysicalConstants(0, 1, 1, 1)
    c = PhysicalConstants.from_mapping({"e": "2", "c": "3", "m": "1", "hbar": "1/2"})
    assert c.coupling == Fraction(2, 3)
    with pytest.raises(ValueError):
        PhysicalConstants.from_mapping({"e": "1", "charge": "1"})


def test_symmetric_gauge_curl_is_uniform():
    B = curl(symmetric((0, 0, 1)))
    assert B.is_uniform() and B.constant_value() == (0, 0, 1)


def test_landau_curl():
    A = landau(1)
    assert A.components[1] == X1
    assert curl(A).constant_value() == (0, 0, 1)
    for axis in (1, 2, 3):
        expected = [0, 0, 0]
        expected[axis - 1] = 2
        assert curl(landau(2, axis)).constant_value() == tuple(expected)
    with pytest.raises(ValueError):
        landau(1, 4)


def test_dipole_field_on_equator():
    B = curl(dipole((0, 0, 1)))
    np.testing.assert_allclose(B((1.0, 0.0, 0.0)), [0, 0, -1], atol=1e-14)
    np.testing.assert_allclose(numeric_curl(dipole((0, 0, 1)))((1.0, 0.0, 0.0)), [0, 0, -1], atol=1e-8)


def test_dipole_singularity_and_axis():
    A = dipole((0, 0, 1))
    np.testing.assert_array_equal(A((0.0, 0.0, 2.0)), [0, 0, 0])
    with pytest.raises(SingularityError):
        A((0.0, 0.0, 1e-12))
    np.testing.assert_array_equal(dipole((0, 0, 0))((1.0, 2.0, 3.0)), [0, 0, 0])


def test_gauge_transform_examples():
    sym = symmetric((0, 0, 1))
    assert gauge_transform(sym, Fraction(1, 2) * X1 * X2).components == landau(1).components
    assert gauge_transform(sym, Poly.const(7)).components == sym.components
    with pytest.raises(TypeError):
        gauge_transform(dipole((0, 0, 1)), X1)


def test_builtins():
    np.testing.assert_array_equal(symmetric((0, 0, 2))((1.0, 0.0, 0.0)), [0, 1, 0])
    np.testing.assert_allclose(curl(gradient_field(1, 1))((2.0, 0.0, 0.0)), [0, 0, 3])
    assert builtin("symmetric", B=["0", "0", "1"]).label.startswith("symmetric")
    assert builtin("zero").components == zero_potential().components
    with pytest.raises(ValueError):
        builtin("monopole")
    with pytest.raises(ValueError):
        builtin("gradient", B0="1")


def test_blackbox_without_step_refuses_numeric_curl():
    A = GaugePotential.blackbox(lambda x: (0.0, x[0], 0.0), fd_step=None)
    with pytest.raises(StepNotSetError):
        curl(A)
    np.testing.assert_allclose(numeric_curl(A, step=1e-4)((0.3, 0.2, 0.1)), [0, 0, 1], atol=1e-9)


def test_potential_rejects_momentum_dependence():
    with pytest.raises(ValueError):
        GaugePotential.polynomial([Poly.var(3), Poly(), Poly()])


position_polys = polys(nvars=3, max_degree=3)


@given(position_polys, position_polys, position_polys)
def test_divergence_of_curl_vanishes(a1, a2, a3):
    assert divergence(curl(GaugePotential.polynomial([a1, a2, a3]))).is_zero()


@given(position_polys, position_polys)
def test_gauge_transform_preserves_curl(a, xi):
    A = GaugePotential.polynomial([a, X2 * a, Poly()])
    assert curl(gauge_transform(A, xi)).components == curl(A).components


@given(position_polys, position_polys, position_polys,
       st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_numeric_curl_matches_exact(a1, a2, a3, x):
    A = GaugePotential.polynomial([a1, a2, a3])
    exact = curl(A)(x)
    h = 1e-5 * max(1.0, float(np.linalg.norm(x)))
    err = np.max(np.abs(numeric_curl(A)(x) - exact))
    # central differences of cubic terms: error is O(h^2) per unit field, plus rounding
    assert err <= 10 * h * h * max(1.0, float(np.linalg.norm(exact))) + 1e-9
