"""Exact multivariate polynomials over the rationals in phase-space variables.

Every polynomial lives in the six variables ``(x1, x2, x3, p1, p2, p3)``.
Position-only polynomials (vector potentials, fields, gauge functions) simply
carry zero momentum exponents.  Coefficients are :class:`fractions.Fraction`
so that identity checks are exact equalities.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

NVARS = 6
VAR_NAMES = ("x1", "x2", "x3", "p1", "p2", "p3")

Monomial = tuple
Rational = Union[int, Fraction]


def parse_rational(value) -> Fraction:
    """Parse ``"n/d"`` strings, ints and Fractions; reject floats and junk."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational string: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def _grlex_key(mono: Monomial):
    return (sum(mono), mono)


class Poly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("_terms", "_hash", "_fn")

    def __init__(self, terms: Mapping[Monomial, Rational] | None = None):
        clean: dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != NVARS or min(mono) < 0:
                raise ValueError(f"bad monomial {mono!r}")
            coeff = Fraction(coeff)
            if coeff:
                clean[mono] = clean.get(mono, Fraction(0)) + coeff
        self._terms = {m: c for m, c in clean.items() if c}
        self._hash = None
        self._fn = None

    # construction -----------------------------------------------------
    @classmethod
    def const(cls, value: Rational) -> "Poly":
        return cls({(0,) * NVARS: value})

    @classmethod
    def var(cls, index: int) -> "Poly":
        mono = [0] * NVARS
        mono[index] = 1
        return cls({tuple(mono): 1})

    @classmethod
    def zero(cls) -> "Poly":
        return cls()

    # inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Terms in graded-lex order, highest degree first."""
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * NVARS, Fraction(0))

    def depends_on_momentum(self) -> bool:
        return any(any(m[3:]) for m in self._terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # calculus and substitution -----------------------------------------
    def diff(self, index: int) -> "Poly":
        out = {}
        for m, c in self._terms.items():
            e = m[index]
            if e:
                mm = list(m)
                mm[index] = e - 1
                out[tuple(mm)] = c * e
        return Poly(out)

    def subs(self, mapping: Mapping[int, "Poly"]) -> "Poly":
        """Replace variables by polynomials (simultaneous composition)."""
        powers: dict[tuple[int, int], Poly] = {}

        def power(i: int, e: int) -> Poly:
            key = (i, e)
            if key not in powers:
                powers[key] = mapping[i] ** e
            return powers[key]

        result = Poly()
        for m, c in self._terms.items():
            kept = [0] * NVARS
            term = Poly.const(c)
            for i, e in enumerate(m):
                if not e:
                    continue
                if i in mapping:
                    term = term * power(i, e)
                else:
                    kept[i] = e
            result = result + term * Poly({tuple(kept): 1})
        return result

    def shift(self, offset: Sequence[Rational]) -> "Poly":
        """Return ``P(x + offset)`` for a position offset of length 3."""
        mapping = {
            i: Poly.var(i) + Fraction(b) for i, b in enumerate(offset) if Fraction(b)
        }
        return self.subs(mapping) if mapping else self

    def homogeneous_parts(self) -> dict[int, "Poly"]:
        parts: dict[int, dict] = {}
        for m, c in self._terms.items():
            parts.setdefault(sum(m), {})[m] = c
        return {d: Poly(t) for d, t in parts.items()}

    def evaluate(self, values: Sequence):
        """Evaluate at a point; exact if the values are rationals."""
        if len(values) == 3:
            values = tuple(values) + (0, 0, 0)
        total = 0
        for m, c in self._terms.items():
            term = c
            for v, e in zip(values, m):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def lambdify(self) -> Callable:
        """Compile to a float function of ``(x1, x2, x3, p1, p2, p3)``.

        Works elementwise on numpy arrays as well.
        """
        if self._fn is None:
            self._fn = lambdify_many([self], scalar=True)
        return self._fn

    # presentation and serialization --------------------------------------
    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for m, c in self.items():
            factors = []
            for name, e in zip(VAR_NAMES, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mono = "*".join(factors)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self, nexp: int = NVARS) -> list[dict]:
        if nexp == 3 and self.depends_on_momentum():
            raise ValueError("position polynomial expected")
        return [
            {"coefficient": f"{c.numerator}/{c.denominator}", "exponents": list(m[:nexp])}
            for m, c in self.items()
        ]

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> "Poly":
        terms: dict[Monomial, Fraction] = {}
        for entry in data:
            try:
                coeff = parse_rational(entry["coefficient"])
                exps = [int(e) for e in entry["exponents"]]
            except (KeyError, TypeError) as exc:
                raise ValueError(f"malformed polynomial term {entry!r}") from exc
            if len(exps) == 3:
                exps += [0, 0, 0]
            if len(exps) != NVARS or min(exps) < 0:
                raise ValueError(f"bad exponents {entry['exponents']!r}")
            m = tuple(exps)
            terms[m] = terms.get(m, Fraction(0)) + coeff
        return cls(terms)


X1, X2, X3, P1, P2, P3 = (Poly.var(i) for i in range(NVARS))
POSITIONS = (X1, X2, X3)
MOMENTA = (P1, P2, P3)


def _term_source(mono: Monomial, coeff: Fraction) -> str:
    factors = [repr(float(coeff))]
    for name, e in zip(VAR_NAMES, mono):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}**{e}")
    return "*".join(factors)


def lambdify_many(polys: Sequence[Poly], scalar: bool = False) -> Callable:
    """Compile several polynomials into one float function returning a tuple.

    Generated source is plain arithmetic, which keeps per-call overhead low
    inside fixed-step integrators.
    """
    exprs = []
    for p in polys:
        terms = [_term_source(m, c) for m, c in p.items()]
        exprs.append(" + ".join(terms) if terms else "0.0")
    args = ", ".join(VAR_NAMES)
    body = exprs[0] if scalar else "(" + ", ".join(exprs) + ("," if len(exprs) == 1 else "") + ")"
    src = f"def _f({args}):\n    return {body}\n"
    namespace: dict = {}
    exec(compile(src, "<poly>", "exec"), namespace)
    return namespace["_f"]


def solve_rational(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Exact Gauss-Jordan solve of a possibly non-square system.

    Returns one solution (free variables set to zero) or ``None`` when the
    system is inconsistent.
    """
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    aug = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, nrows) if aug[i][col]), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = 1 / aug[r][col]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][col]:
                factor = aug[i][col]
                aug[i] = [a - factor * b for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if aug[i][-1]:
            return None
    solution = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        solution[col] = aug[i][-1]
    return solution


def monomials_up_to(degree: int, nvars: int = 3) -> list[Monomial]:
    """All exponent tuples in the first ``nvars`` variables with total degree <= degree."""
    out = []

    def rec(prefix, remaining, left):
        if left == 0:
            out.append(tuple(prefix) + (0,) * (NVARS - nvars))
            return
        for e in range(remaining + 1):
            rec(prefix + [e], remaining - e, left - 1)

    rec([], degree, nvars)
    return sorted(out, key=_grlex_key)


def rational_sqrt(value: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None if irrational."""
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None
