"""Generators of passive/active translations and passive rotations.

Passive generators only exist when the magnetic field is invariant under the
transformation; when it is not, the gradient equation for the correction term
is not integrable and a :class:`NonIntegrableReport` is returned instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .fields import GaugePotential, PhysicalConstants, SingularityError, curl
from .poly import MOMENTA, POSITIONS, Poly, monomials_up_to, solve_rational

PASSIVE_TRANSLATION = "passive-translation"
ACTIVE_TRANSLATION = "active-translation"
PASSIVE_ROTATION = "passive-rotation"

ORIGIN = (Fraction(0), Fraction(0), Fraction(0))


def levi_civita(i: int, j: int, k: int) -> int:
    """Permutation symbol for 0-based indices."""
    return (i - j) * (j - k) * (k - i) // 2


@dataclass(frozen=True)
class NonIntegrableReport:
    """Why a requested generator does not exist.

    ``offending`` holds ``(component, value)`` pairs where value is either an
    exact polynomial derivative dB_i/dx_k (or its rotational analogue) or a
    pair of exact samples ``(x1, x2, x3, B_i)`` whose field values differ.
    """

    axis: int
    kind: str
    offending: tuple = ()
    mixed_partials: tuple = ()
    note: str = ""

    def __post_init__(self):
        if not self.offending and not self.mixed_partials:
            raise ValueError("a non-integrability report needs at least one offending entry")

    def to_json(self) -> dict:
        def render(v):
            if isinstance(v, Poly):
                return str(v)
            return [[str(c) for c in point] for point in v]

        return {
            "axis": self.axis,
            "kind": self.kind,
            "offending": [{"component": i + 1, "value": render(v)} for i, v in self.offending],
            "mixed_partials": [
                {"i": i + 1, "j": j + 1, "difference": str(d)} for i, j, d in self.mixed_partials
            ],
            "note": self.note,
        }


@dataclass(frozen=True)
class GeneratorSpec:
    """A constructed generator plus the metadata needed to report it."""

    observable: Poly
    kind: str
    axis: int
    gauge: str
    basepoint: tuple = ORIGIN
    notes: tuple = field(default=())

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "axis": self.axis,
            "gauge": self.gauge,
            "basepoint": [str(b) for b in self.basepoint],
            "normalization": "generator vanishes at x = basepoint, pi = 0",
            "observable": str(self.observable),
            "terms": self.observable.to_json(),
            "notes": list(self.notes),
        }


GeneratorResult = Union[Poly, NonIntegrableReport]


def _axis(k: int) -> int:
    if k not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {k!r}")
    return k - 1


def _require_polynomial(A: GaugePotential):
    if not A.is_polynomial:
        raise TypeError(f"polynomial potential required, got black-box {A.label!r}")


def solve_gradient(rhs: Sequence[Poly], basepoint: Sequence = ORIGIN,
                   axis: int = 0, kind: str = "gradient") -> GeneratorResult:
    """Find phi(x) with grad(phi) = rhs and phi(basepoint) = 0.

    Integrability (equal mixed partials) is checked exactly first; the
    potential is then the straight-line integral from the basepoint, done
    term by term on homogeneous parts of the shifted field.
    """
    rhs = [Poly._coerce(r) for r in rhs]
    if any(r.depends_on_momentum() for r in rhs):
        raise ValueError("gradient components must depend on position only")
    bad = []
    for i in range(3):
        for j in range(i + 1, 3):
            d = rhs[i].diff(j) - rhs[j].diff(i)
            if not d.is_zero():
                bad.append((i, j, d))
    if bad:
        return NonIntegrableReport(axis=axis, kind=kind, mixed_partials=tuple(bad))
    b = [Fraction(v) for v in basepoint]
    shifted = [r.shift(b) for r in rhs]
    phi = Poly()
    for i, comp in enumerate(shifted):
        for d, part in comp.homogeneous_parts().items():
            phi = phi + POSITIONS[i] * part * Fraction(1, d + 1)
    return phi.shift([-v for v in b])


def _field_derivatives(A: GaugePotential, k: int) -> list:
    B = curl(A)
    return [(i, B.components[i].diff(k)) for i in range(3) if not B.components[i].diff(k).is_zero()]


def passive_translation_rhs(A: GaugePotential, k: int, consts: PhysicalConstants) -> list:
    """Right-hand side of grad f = -(e/c) dA/dx_k for axis index k (0-based)."""
    q = consts.coupling
    return [-q * a.diff(k) for a in A.components]


def passive_translation_generator(A: GaugePotential, k: int, consts: PhysicalConstants,
                                  basepoint: Sequence = ORIGIN) -> GeneratorResult:
    """G_k = p_k + f with {x_i, G_k} = delta_ik and {pi_i, G_k} = 0.

    The additive constant is fixed so that G_k vanishes at x = basepoint,
    pi = 0, which makes the result the same in every gauge.

    Black-box potentials cannot be integrated symbolically; for them the
    result is a report when an exact witness of field non-invariance exists,
    otherwise ``TypeError``.
    """
    idx = _axis(k)
    if not A.is_polynomial:
        witness = translation_witness(A, k)
        if witness is not None:
            return witness
        raise TypeError(f"cannot decide passive translations for black-box {A.label!r}")
    result = solve_gradient(passive_translation_rhs(A, idx, consts), basepoint,
                            axis=k, kind=PASSIVE_TRANSLATION)
    if isinstance(result, NonIntegrableReport):
        return NonIntegrableReport(
            axis=k,
            kind=PASSIVE_TRANSLATION,
            offending=tuple(_field_derivatives(A, idx)),
            mixed_partials=result.mixed_partials,
            note=f"field is not invariant under translations along x{k}",
        )
    shift = -consts.coupling * A.components[idx].evaluate(tuple(Fraction(v) for v in basepoint))
    return MOMENTA[idx] + result + shift


def active_translation_generator(A: GaugePotential, k: int, consts: PhysicalConstants) -> Poly:
    """pi_k = p_k - (e/c) A_k; exists for every field."""
    idx = _axis(k)
    _require_polynomial(A)
    return MOMENTA[idx] - consts.coupling * A.components[idx]


def free_angular_momentum(k: int) -> Poly:
    """epsilon_kij x_i p_j."""
    idx = _axis(k)
    total = Poly()
    for i in range(3):
        for j in range(3):
            eps = levi_civita(idx, i, j)
            if eps:
                total = total + eps * POSITIONS[i] * MOMENTA[j]
    return total


def passive_rotation_rhs(A: GaugePotential, k: int, consts: PhysicalConstants) -> list:
    """Right-hand side of grad g for rotations about axis index k (0-based)."""
    q = consts.coupling
    rhs = []
    for i in range(3):
        term = Poly()
        for l in range(3):
            eps = levi_civita(i, k, l)
            if eps:
                term = term + eps * A.components[l]
        for l in range(3):
            for j in range(3):
                eps = levi_civita(k, l, j)
                if eps:
                    term = term - eps * POSITIONS[l] * A.components[i].diff(j)
        rhs.append(q * term)
    return rhs


def _rotation_field_defects(A: GaugePotential, k: int) -> list:
    # Infinitesimal invariance B(Rr) = R B(r) about e_k:
    # eps_klj x_l dB_i/dx_j - eps_ikl B_l = 0.
    B = curl(A).components
    out = []
    for i in range(3):
        d = Poly()
        for l in range(3):
            for j in range(3):
                eps = levi_civita(k, l, j)
                if eps:
                    d = d + eps * POSITIONS[l] * B[i].diff(j)
        for l in range(3):
            eps = levi_civita(i, k, l)
            if eps:
                d = d - eps * B[l]
        if not d.is_zero():
            out.append((i, d))
    return out


def passive_rotation_generator(A: GaugePotential, k: int, consts: PhysicalConstants,
                               basepoint: Sequence = ORIGIN) -> GeneratorResult:
    """L_k = eps_kij x_i p_j + g with the rotation bracket conditions.

    The constant in g is fixed so that L_k vanishes at x = basepoint, pi = 0.

    For a black-box potential only the case where the correction's source
    term vanishes identically (A itself rotation-invariant) is accepted; it
    is checked at sample points and yields g = 0.
    """
    idx = _axis(k)
    if not A.is_polynomial:
        witness = rotation_witness(A, k)
        if witness is not None:
            return witness
        if _blackbox_rotation_invariant(A, idx):
            return free_angular_momentum(k)
        raise TypeError(f"cannot decide passive rotations for black-box {A.label!r}")
    rhs = passive_rotation_rhs(A, idx, consts)
    b = tuple(Fraction(v) for v in basepoint)
    # pin L_k(x = basepoint, pi = 0) = 0
    offset = -consts.coupling * sum(
        (levi_civita(idx, i, j) * b[i] * A.components[j].evaluate(b)
         for i in range(3) for j in range(3)), Fraction(0))
    if all(r.is_zero() for r in rhs):
        return free_angular_momentum(k) + offset
    result = solve_gradient(rhs, basepoint, axis=k, kind=PASSIVE_ROTATION)
    if isinstance(result, NonIntegrableReport):
        return NonIntegrableReport(
            axis=k,
            kind=PASSIVE_ROTATION,
            offending=tuple(_rotation_field_defects(A, idx)),
            mixed_partials=result.mixed_partials,
            note=f"field is not invariant under rotations about x{k}",
        )
    return free_angular_momentum(k) + result + offset


_SAMPLE_POINTS = (
    (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0), (0.3, -0.7, 1.1),
    (-1.2, 0.4, 0.9), (2.0, 1.5, -0.5), (0.6, 0.8, -1.7), (-0.9, -1.3, 0.2),
)


def _blackbox_rotation_invariant(A: GaugePotential, k: int, tol: float = 1e-9) -> bool:
    """Check eps_ikl A_l - eps_klj x_l dA_i/dx_j = 0 at fixed sample points."""
    for x in _SAMPLE_POINTS:
        try:
            a = A.raw(x)
            jac = A.jacobian(x)
        except SingularityError:
            continue
        scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(jac))))
        for i in range(3):
            v = sum(levi_civita(i, k, l) * a[l] for l in range(3))
            v -= sum(levi_civita(k, l, j) * x[l] * jac[i, j] for l in range(3) for j in range(3))
            if abs(v) > tol * scale:
                return False
    return True


_WITNESS_BASES = (
    (Fraction(0), Fraction(0), Fraction(0)),
    (Fraction(3), Fraction(4), Fraction(0)),
    (Fraction(0), Fraction(3), Fraction(4)),
    (Fraction(4), Fraction(0), Fraction(3)),
)


def translation_witness(A: GaugePotential, k: int) -> NonIntegrableReport | None:
    """Exact proof that a black-box field is not invariant along x_k.

    Compares exactly evaluated field values at pairs of points separated
    along the axis, restricted to points with rational |r|.
    """
    if A.exact_field is None:
        return None
    idx = _axis(k)
    for base in _WITNESS_BASES:
        candidates = []
        for t in range(-6, 7):
            point = list(base)
            point[idx] += t
            try:
                value = A.exact_field(tuple(point))
            except SingularityError:
                continue
            if value is not None:
                candidates.append((tuple(point), value))
        for (p1, v1), (p2, v2) in zip(candidates, candidates[1:]):
            for i in range(3):
                if v1[i] != v2[i]:
                    return NonIntegrableReport(
                        axis=k,
                        kind=PASSIVE_TRANSLATION,
                        offending=((i, (p1 + (v1[i],), p2 + (v2[i],))),),
                        note=(f"B{i + 1} differs exactly between {tuple(map(str, p1))} "
                              f"and {tuple(map(str, p2))}: {v1[i]} != {v2[i]}"),
                    )
    return None


_ROTATION_POINTS = (
    (Fraction(3), Fraction(4), Fraction(0)),
    (Fraction(0), Fraction(3), Fraction(4)),
    (Fraction(4), Fraction(0), Fraction(3)),
    (Fraction(1), Fraction(2), Fraction(2)),
    (Fraction(2), Fraction(3), Fraction(6)),
)
_COS, _SIN = Fraction(3, 5), Fraction(4, 5)


def _rotate(v: Sequence[Fraction], idx: int) -> tuple:
    i, j = (idx + 1) % 3, (idx + 2) % 3
    out = list(v)
    out[i] = _COS * v[i] - _SIN * v[j]
    out[j] = _SIN * v[i] + _COS * v[j]
    return tuple(out)


def rotation_witness(A: GaugePotential, k: int) -> NonIntegrableReport | None:
    """Exact proof that a black-box field is not invariant under rotations about x_k.

    A field invariant under the infinitesimal rotation is invariant under
    every finite one, so B(R r) != R B(r) for the rotation with cosine 3/5
    settles non-existence.  Points have rational |r|, which keeps the
    comparison in exact arithmetic.
    """
    if A.exact_field is None:
        return None
    idx = _axis(k)
    for point in _ROTATION_POINTS:
        moved = _rotate(point, idx)
        try:
            before = A.exact_field(point)
            after = A.exact_field(moved)
        except SingularityError:
            continue
        if before is None or after is None:
            continue
        turned = _rotate(before, idx)
        for i in range(3):
            if turned[i] != after[i]:
                return NonIntegrableReport(
                    axis=k,
                    kind=PASSIVE_ROTATION,
                    offending=((i, (point + (turned[i],), moved + (after[i],))),),
                    note=(f"rotating {tuple(map(str, point))} about x{k} gives B{i + 1} = {after[i]}, "
                          f"but the rotated field value is {turned[i]}"),
                )
    return None


def find_gauge_function(targets: Sequence[Poly], consts: PhysicalConstants,
                        max_degree: int = 3) -> Poly | None:
    """Solve (e/c) dxi/dx_k = targets[k] for a polynomial xi of bounded degree.

    Returns ``None`` when the exact linear system is infeasible.
    """
    q = consts.coupling
    basis = [Poly({m: 1}) for m in monomials_up_to(max_degree)]
    derivs = [[q * b.diff(k) for b in basis] for k in range(3)]
    rows, rhs = [], []
    monos = set()
    for k in range(3):
        monos.update(targets[k].terms)
        for d in derivs[k]:
            monos.update(d.terms)
    for k in range(3):
        for mono in sorted(monos):
            rows.append([d.coefficient(mono) for d in derivs[k]])
            rhs.append(targets[k].coefficient(mono))
    solution = solve_rational(rows, rhs)
    if solution is None:
        return None
    return sum((c * b for c, b in zip(solution, basis) if c), Poly())


def describe(observable: Poly, kind: str, axis: int, A: GaugePotential,
             basepoint: Sequence = ORIGIN) -> GeneratorSpec:
    return GeneratorSpec(observable=observable, kind=kind, axis=axis, gauge=A.label,
                         basepoint=tuple(Fraction(b) for b in basepoint))
