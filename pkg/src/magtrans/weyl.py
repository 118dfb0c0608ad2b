"""Exact operator algebra generated by x_i, p_j with [x_i, p_j] = i hbar delta_ij.

Operators are kept in normal order (every x factor to the left of every p
factor) with complex-rational coefficients, so commutator identities are
decided by coefficient comparison.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .fields import GaugePotential, PhysicalConstants, curl
from .generators import (
    NonIntegrableReport,
    levi_civita,
    passive_rotation_generator,
    passive_translation_generator,
)
from .poly import VAR_NAMES, Poly


@dataclass(frozen=True)
class CQ:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, v) -> "CQ":
        if isinstance(v, CQ):
            return v
        if isinstance(v, complex):
            return cls(Fraction(v.real), Fraction(v.imag))
        return cls(Fraction(v))

    def __add__(self, o):
        o = CQ.coerce(o)
        return CQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return CQ(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-CQ.coerce(o))

    def __mul__(self, o):
        o = CQ.coerce(o)
        return CQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = CQ(1)
        for _ in range(n):
            out = out * self
        return out

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> "CQ":
        return CQ(self.re, -self.im)

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return "i" if self.im == 1 else "-i" if self.im == -1 else f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {abs(self.im)}i)"


I = CQ(0, 1)
ZERO3 = (0, 0, 0)


def _reorder_coefficients(n: int, m: int, hbar: Fraction) -> list:
    """p^n x^m = sum_k C(n,k) C(m,k) k! (-i hbar)^k x^(m-k) p^(n-k)."""
    minus_ih = CQ(0, -hbar)
    return [(k, CQ(comb(n, k) * comb(m, k) * factorial(k)) * minus_ih ** k)
            for k in range(min(n, m) + 1)]


class WeylOp:
    """Normal-ordered polynomial operator; terms keyed by ``(alpha, beta)``."""

    __slots__ = ("terms", "hbar")

    def __init__(self, terms=None, hbar=Fraction(1)):
        self.hbar = Fraction(hbar)
        clean = {}
        for (a, b), c in (terms or {}).items():
            c = CQ.coerce(c)
            key = (tuple(a), tuple(b))
            total = clean.get(key, CQ()) + c
            if total:
                clean[key] = total
            else:
                clean.pop(key, None)
        self.terms = clean

    # constructors -----------------------------------------------------------
    @classmethod
    def scalar(cls, value, hbar) -> "WeylOp":
        return cls({(ZERO3, ZERO3): value}, hbar)

    @classmethod
    def x(cls, i: int, hbar) -> "WeylOp":
        a = [0, 0, 0]
        a[i - 1] = 1
        return cls({(tuple(a), ZERO3): 1}, hbar)

    @classmethod
    def p(cls, i: int, hbar) -> "WeylOp":
        b = [0, 0, 0]
        b[i - 1] = 1
        return cls({(ZERO3, tuple(b)): 1}, hbar)

    # algebra ------------------------------------------------------------------
    def _check(self, other: "WeylOp"):
        if self.hbar != other.hbar:
            raise ValueError("operators built with different hbar values")

    def _lift(self, other):
        if isinstance(other, WeylOp):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, CQ, complex)):
            return WeylOp.scalar(other, self.hbar)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        merged = dict(self.terms)
        for k, c in other.terms.items():
            merged[k] = merged.get(k, CQ()) + c
        return WeylOp(merged, self.hbar)

    __radd__ = __add__

    def __neg__(self):
        return WeylOp({k: -c for k, c in self.terms.items()}, self.hbar)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, WeylOp):
            return wmul(self, other)
        if isinstance(other, (int, Fraction, CQ, complex)):
            c = CQ.coerce(other)
            return WeylOp({k: v * c for k, v in self.terms.items()}, self.hbar)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, CQ, complex)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self.terms == other.terms

    __hash__ = None

    # inspection ---------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(a) + sum(b) for a, b in self.terms), default=-1)

    def is_scalar(self) -> bool:
        """True for multiples of the identity (including zero)."""
        return all(a == ZERO3 and b == ZERO3 for a, b in self.terms)

    def scalar_value(self) -> CQ:
        if not self.is_scalar():
            raise ValueError("operator is not a multiple of the identity")
        return self.terms.get((ZERO3, ZERO3), CQ())

    def __repr__(self):
        return f"WeylOp({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        order = sorted(self.terms, key=lambda k: (sum(k[0]) + sum(k[1]), k[0] + k[1]), reverse=True)
        parts = []
        for a, b in order:
            factors = []
            for name, e in zip(VAR_NAMES, a + b):
                if e:
                    factors.append(name if e == 1 else f"{name}^{e}")
            mono = "*".join(factors)
            text = str(self.terms[(a, b)])
            sign = "-" if text.startswith("-") else "+"
            text = text.lstrip("-")
            if mono:
                text = mono if text == "1" else f"{text}*{mono}"
            parts.append((sign, text))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        return out + "".join(f" {sign} {text}" for sign, text in parts[1:])


def wmul(a: WeylOp, b: WeylOp) -> WeylOp:
    """Normal-ordered product, moving p factors right past x factors."""
    a._check(b)
    hbar = a.hbar
    out: dict = {}
    cache: dict = {}
    for (a1, b1), c1 in a.terms.items():
        for (a2, b2), c2 in b.terms.items():
            per_dim = []
            for d in range(3):
                key = (b1[d], a2[d])
                if key not in cache:
                    cache[key] = _reorder_coefficients(b1[d], a2[d], hbar)
                per_dim.append(cache[key])
            base = c1 * c2
            for choice in itertools.product(*per_dim):
                coeff = base
                alpha, beta = [], []
                for d, (k, ck) in enumerate(choice):
                    coeff = coeff * ck
                    alpha.append(a1[d] + a2[d] - k)
                    beta.append(b1[d] + b2[d] - k)
                key = (tuple(alpha), tuple(beta))
                total = out.get(key, CQ()) + coeff
                if total:
                    out[key] = total
                else:
                    out.pop(key, None)
    return WeylOp(out, hbar)


def commutator(a: WeylOp, b: WeylOp) -> WeylOp:
    return wmul(a, b) - wmul(b, a)


def adjoint(op: WeylOp) -> WeylOp:
    """Formal adjoint: conjugate coefficients, reverse factors, renormal-order."""
    total = WeylOp(hbar=op.hbar)
    for (a, b), c in op.terms.items():
        ps = WeylOp({(ZERO3, b): c.conjugate()}, op.hbar)
        xs = WeylOp({(a, ZERO3): 1}, op.hbar)
        total = total + wmul(ps, xs)
    return total


def is_hermitian(op: WeylOp) -> bool:
    return adjoint(op) == op


def _split(mono) -> tuple:
    return tuple(mono[:3]), tuple(mono[3:])


def from_normal_symbol(poly: Poly, hbar) -> WeylOp:
    """Read ``x^a p^b`` as the normal-ordered operator with the same exponents."""
    return WeylOp({_split(m): c for m, c in poly.terms.items()}, hbar)


def _power(op: WeylOp, n: int) -> WeylOp:
    out = WeylOp.scalar(1, op.hbar)
    for _ in range(n):
        out = wmul(out, op)
    return out


def weyl_quantize(poly: Poly, hbar) -> WeylOp:
    """Symmetric (Weyl) ordering of a phase-space polynomial.

    Per degree of freedom x^a p^b maps to 2^-a sum_k C(a,k) x^k p^b x^(a-k);
    different degrees of freedom commute so the factors multiply.
    """
    hbar = Fraction(hbar)
    total = WeylOp(hbar=hbar)
    cache: dict = {}
    for mono, c in poly.terms.items():
        op = WeylOp.scalar(c, hbar)
        for d in range(3):
            a, b = mono[d], mono[3 + d]
            if not (a or b):
                continue
            key = (d, a, b)
            if key not in cache:
                x, p = WeylOp.x(d + 1, hbar), WeylOp.p(d + 1, hbar)
                acc = WeylOp(hbar=hbar)
                pb = _power(p, b)
                for k in range(a + 1):
                    acc = acc + wmul(wmul(_power(x, k), pb), _power(x, a - k)) * comb(a, k)
                cache[key] = acc * Fraction(1, 2 ** a)
            op = wmul(op, cache[key])
        total = total + op
    return total


def weyl_symbol(op: WeylOp) -> Poly:
    """Inverse of :func:`weyl_quantize` for operators with real symbols."""
    remaining = op
    terms: dict = {}
    while not remaining.is_zero():
        key = max(remaining.terms, key=lambda k: (sum(k[0]) + sum(k[1]), k))
        c = remaining.terms[key]
        if c.im:
            raise ValueError("operator has a non-real symbol")
        mono = key[0] + key[1]
        terms[mono] = c.re
        remaining = remaining - weyl_quantize(Poly({mono: c.re}), op.hbar)
    return Poly(terms)


def classical_limit(op: WeylOp) -> Poly:
    """Alias for the Weyl symbol, the map used for classical comparisons."""
    return weyl_symbol(op)


# operators for a given gauge ------------------------------------------------------

@dataclass
class QuantumOperators:
    hbar: Fraction
    x: tuple
    p: tuple
    pi: tuple
    B: tuple
    H: WeylOp
    G: dict = field(default_factory=dict)
    L: dict = field(default_factory=dict)

    def existing_G(self) -> dict:
        return {k: v for k, v in self.G.items() if isinstance(v, WeylOp)}

    def existing_L(self) -> dict:
        return {k: v for k, v in self.L.items() if isinstance(v, WeylOp)}


def build_operators(A: GaugePotential, consts: PhysicalConstants) -> QuantumOperators:
    """pi, H, B and the passive generators (or reports) as operators."""
    if not A.is_polynomial:
        raise TypeError(f"polynomial potential required, got black-box {A.label!r}")
    hbar = consts.hbar
    q = consts.coupling
    xs = tuple(WeylOp.x(i, hbar) for i in (1, 2, 3))
    ps = tuple(WeylOp.p(i, hbar) for i in (1, 2, 3))
    pis = tuple(ps[i] - from_normal_symbol(A.components[i], hbar) * q for i in range(3))
    H = sum((wmul(pi, pi) for pi in pis), WeylOp(hbar=hbar)) * (1 / (2 * consts.m))
    Bpoly = curl(A).components
    Bs = tuple(from_normal_symbol(b, hbar) for b in Bpoly)
    G, L = {}, {}
    for k in (1, 2, 3):
        g = passive_translation_generator(A, k, consts)
        G[k] = g if isinstance(g, NonIntegrableReport) else weyl_quantize(g, hbar)
        l = passive_rotation_generator(A, k, consts)
        L[k] = l if isinstance(l, NonIntegrableReport) else weyl_quantize(l, hbar)
    return QuantumOperators(hbar=hbar, x=xs, p=ps, pi=pis, B=Bs, H=H, G=G, L=L)


@dataclass
class IdentityResult:
    name: str
    passed: bool | None
    residual: WeylOp | None = None
    detail: str = ""

    @property
    def applicable(self) -> bool:
        return self.passed is not None

    def to_json(self) -> dict:
        status = "not-applicable" if self.passed is None else ("pass" if self.passed else "fail")
        return {
            "identity": self.name,
            "status": status,
            "residual": None if self.residual is None else str(self.residual),
            "detail": self.detail,
        }


@dataclass
class IdentityReport:
    gauge: str
    hbar: Fraction
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed is not False for r in self.results)

    def failures(self) -> list:
        return [r for r in self.results if r.passed is False]

    def by_name(self, prefix: str) -> list:
        return [r for r in self.results if r.name.startswith(prefix)]

    def to_json(self) -> dict:
        return {"gauge": self.gauge, "hbar": str(self.hbar), "passed": self.passed,
                "results": [r.to_json() for r in self.results]}


def _zero_check(name: str, residual: WeylOp, detail: str = "") -> IdentityResult:
    return IdentityResult(name=name, passed=residual.is_zero(), residual=residual, detail=detail)


def verify_identities(A: GaugePotential, consts: PhysicalConstants) -> IdentityReport:
    """Run every operator identity that applies to the given gauge."""
    ops = build_operators(A, consts)
    hbar = ops.hbar
    q = consts.coupling
    ih = CQ(0, hbar)
    results = []
    Bpoly = curl(A).components
    uniform = all(b.is_constant() for b in Bpoly)

    for i in range(3):
        for j in range(i + 1, 3):
            rhs = sum((ops.B[l] * (ih * q * levi_civita(i, j, l)) for l in range(3)),
                      WeylOp(hbar=hbar))
            results.append(_zero_check(f"pi-commutator[{i + 1},{j + 1}]",
                                       commutator(ops.pi[i], ops.pi[j]) - rhs))

    for k in (1, 2, 3):
        Gk = ops.G[k]
        if isinstance(Gk, NonIntegrableReport):
            candidate = ops.p[k - 1]
            res = [commutator(candidate, ops.B[l]) for l in range(3)]
            nonzero = [l + 1 for l, r in enumerate(res) if not r.is_zero()]
            results.append(IdentityResult(
                name=f"generator-field-commutator[{k}]",
                passed=bool(nonzero),
                residual=next((r for r in res if not r.is_zero()), WeylOp(hbar=hbar)),
                detail=f"existence refused: [G{k} candidate, B_l] != 0 for l in {nonzero}",
            ))
            for name in ("translation-x", "translation-pi", "jacobi", "generator-hamiltonian"):
                results.append(IdentityResult(name=f"{name}[{k}]", passed=None,
                                              detail="generator does not exist"))
            continue
        for i in range(3):
            delta = ih if i == k - 1 else CQ()
            results.append(_zero_check(f"translation-x[{i + 1},{k}]",
                                       commutator(ops.x[i], Gk) - delta))
            results.append(_zero_check(f"translation-pi[{i + 1},{k}]", commutator(ops.pi[i], Gk)))
        for i in range(3):
            for j in range(3):
                jac = (commutator(ops.pi[i], commutator(ops.pi[j], Gk))
                       + commutator(ops.pi[j], commutator(Gk, ops.pi[i]))
                       + commutator(Gk, commutator(ops.pi[i], ops.pi[j])))
                results.append(_zero_check(f"jacobi[{i + 1},{j + 1},{k}]", jac))
        for l in range(3):
            results.append(_zero_check(f"generator-field-commutator[{k},{l + 1}]",
                                       commutator(Gk, ops.B[l])))
        results.append(_zero_check(f"generator-hamiltonian[{k}]", commutator(Gk, ops.H)))
        results.append(IdentityResult(f"hermitian-G[{k}]", is_hermitian(Gk)))

    existing = ops.existing_G()
    for i in range(1, 4):
        for j in range(i + 1, 4):
            if i not in existing or j not in existing:
                results.append(IdentityResult(f"generator-commutator[{i},{j}]", None,
                                              detail="generator does not exist"))
                continue
            rhs = sum((ops.B[l] * (-ih * q * levi_civita(i - 1, j - 1, l)) for l in range(3)),
                      WeylOp(hbar=hbar))
            comm = commutator(existing[i], existing[j])
            res = comm - rhs
            ok = res.is_zero() and (comm.is_scalar() or not uniform)
            results.append(IdentityResult(f"generator-commutator[{i},{j}]", ok, res,
                                          detail="scalar" if comm.is_scalar() else "operator-valued"))

    for k in (1, 2, 3):
        Lk = ops.L[k]
        if isinstance(Lk, NonIntegrableReport):
            results.append(IdentityResult(f"rotation[{k}]", None, detail="rotation generator does not exist"))
            continue
        for i in range(3):
            rhs_x = sum((ops.x[l] * (ih * levi_civita(i, k - 1, l)) for l in range(3)), WeylOp(hbar=hbar))
            rhs_pi = sum((ops.pi[l] * (ih * levi_civita(i, k - 1, l)) for l in range(3)), WeylOp(hbar=hbar))
            results.append(_zero_check(f"rotation-x[{i + 1},{k}]", commutator(ops.x[i], Lk) - rhs_x))
            results.append(_zero_check(f"rotation-pi[{i + 1},{k}]", commutator(ops.pi[i], Lk) - rhs_pi))
        results.append(_zero_check(f"rotation-hamiltonian[{k}]", commutator(Lk, ops.H)))
        results.append(IdentityResult(f"hermitian-L[{k}]", is_hermitian(Lk)))

    L3 = ops.L[3]
    if uniform and isinstance(L3, WeylOp) and Bpoly[0].is_zero() and Bpoly[1].is_zero():
        b3 = Bpoly[2].constant_term()
        x1, x2 = ops.x[0], ops.x[1]
        form = (wmul(x1, ops.pi[1]) - wmul(x2, ops.pi[0])
                + (wmul(x1, x1) + wmul(x2, x2)) * (q * b3 / 2))
        results.append(_zero_check("rotation-kinematical-form[3]", L3 - form))

    results.append(IdentityResult("hermitian-H", is_hermitian(ops.H)))
    for i in range(3):
        results.append(IdentityResult(f"hermitian-pi[{i + 1}]", is_hermitian(ops.pi[i])))
    return IdentityReport(gauge=A.label, hbar=hbar, results=results)
