"""Magnetic translations of wavefunctions on a uniform 2D grid.

The field is uniform and normal to the grid plane, in symmetric gauge.
Shifts are restricted to lattice vectors, so a translation is a sample shift
times an exact phase:

    passive:  psi'(r) = exp(-i (e / 2 hbar c) r . (a x B)) psi(r - a)
    active:   psi'(r) = exp(+i (e / 2 hbar c) r . (a x B)) psi(r - a)

Boundaries are open (zero padded); operations refuse states that have
amplitude near the edge band a shift would push off the grid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .fields import PhysicalConstants

MARGIN_TOLERANCE = 1e-12
MIN_FIDELITY = 0.99
PASSIVE = "passive"
ACTIVE = "active"


class MarginError(ValueError):
    """The state has non-negligible amplitude where a shift would truncate it."""


class ComparisonError(ValueError):
    """Two states compared for a relative phase are not proportional."""


@dataclass(frozen=True)
class Wavefunction2D:
    """Complex samples ``psi[i, j]`` at ``(origin[0] + i h, origin[1] + j h)``."""

    psi: np.ndarray = field(compare=False)
    h: float
    origin: tuple

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex)
        if psi.ndim != 2 or psi.shape[0] != psi.shape[1]:
            raise ValueError("square 2D amplitude array required")
        if not np.all(np.isfinite(psi)):
            raise ValueError("non-finite amplitudes")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def n(self) -> int:
        return self.psi.shape[0]

    def with_values(self, psi: np.ndarray) -> "Wavefunction2D":
        return Wavefunction2D(psi, self.h, self.origin)

    def coordinates(self) -> tuple:
        ax = np.arange(self.n) * self.h
        return np.meshgrid(self.origin[0] + ax, self.origin[1] + ax, indexing="ij")

    @property
    def norm(self) -> float:
        return float(math.sqrt(np.sum(np.abs(self.psi) ** 2) * self.h * self.h))

    def inner(self, other: "Wavefunction2D") -> complex:
        """<self, other> with the grid measure."""
        return complex(np.vdot(self.psi, other.psi) * self.h * self.h)

    def save(self, stem) -> tuple:
        """Write ``stem.json`` (header) and ``stem.csv`` rows of i, j, re, im."""
        stem = Path(stem)
        header = {"N": self.n, "h": self.h, "origin": list(self.origin)}
        json_path = stem.with_suffix(".json")
        csv_path = stem.with_suffix(".csv")
        json_path.write_text(json.dumps(header, indent=2, sort_keys=True))
        ii, jj = np.indices(self.psi.shape)
        table = np.column_stack([ii.ravel(), jj.ravel(), self.psi.real.ravel(), self.psi.imag.ravel()])
        np.savetxt(csv_path, table, delimiter=",", header="i,j,re,im", comments="",
                   fmt=["%d", "%d", "%.17g", "%.17g"])
        return json_path, csv_path

    @classmethod
    def load(cls, stem) -> "Wavefunction2D":
        stem = Path(stem)
        header = json.loads(stem.with_suffix(".json").read_text())
        table = np.loadtxt(stem.with_suffix(".csv"), delimiter=",", skiprows=1)
        n = int(header["N"])
        psi = np.zeros((n, n), dtype=complex)
        psi[table[:, 0].astype(int), table[:, 1].astype(int)] = table[:, 2] + 1j * table[:, 3]
        return cls(psi, float(header["h"]), tuple(header["origin"]))


def fidelity(u: Wavefunction2D, v: Wavefunction2D) -> float:
    """Global-phase-insensitive overlap |<u, v>| / (|u| |v|)."""
    return abs(u.inner(v)) / (u.norm * v.norm)


@dataclass(frozen=True)
class LatticeShift:
    m1: int
    m2: int
    h: float

    @classmethod
    def from_vector(cls, a: Sequence[float], h: float) -> "LatticeShift":
        m = []
        for v in a[:2]:
            r = round(v / h)
            if abs(r * h - v) > 1e-9 * max(1.0, abs(v)):
                raise ValueError(f"shift component {v} is not a multiple of h = {h}")
            m.append(int(r))
        if len(a) > 2 and a[2]:
            raise ValueError("shifts must lie in the grid plane")
        return cls(m[0], m[1], h)

    @property
    def vector(self) -> tuple:
        return (self.m1 * self.h, self.m2 * self.h, 0.0)

    def __add__(self, other: "LatticeShift") -> "LatticeShift":
        return LatticeShift(self.m1 + other.m1, self.m2 + other.m2, self.h)

    def __neg__(self):
        return LatticeShift(-self.m1, -self.m2, self.h)

    @property
    def width(self) -> int:
        return max(abs(self.m1), abs(self.m2))


def _as_shift(a, h: float) -> LatticeShift:
    if isinstance(a, LatticeShift):
        if not math.isclose(a.h, h, rel_tol=1e-12):
            raise ValueError("shift built for a different grid spacing")
        return a
    return LatticeShift.from_vector(a, h)


def check_margin(psi: Wavefunction2D, width: int) -> None:
    """Raise unless the outer band of ``width`` cells is numerically empty."""
    if width <= 0:
        return
    if width >= psi.n // 2:
        raise MarginError(f"margin band {width} too wide for an {psi.n}-point grid")
    amp = np.abs(psi.psi)
    peak = amp.max()
    band = max(amp[:width].max(), amp[-width:].max(), amp[:, :width].max(), amp[:, -width:].max())
    if band > MARGIN_TOLERANCE * peak:
        raise MarginError(f"amplitude {band:.3g} in the {width}-cell edge band exceeds "
                          f"{MARGIN_TOLERANCE:g} of the peak {peak:.3g}")


def gaussian_packet(n: int, h: float, center: Sequence[float], sigma: float,
                    k0: Sequence[float] = (0.0, 0.0), origin: Sequence[float] | None = None,
                    margin: int = 0) -> Wavefunction2D:
    """Normalized exp(-|r - c|^2 / 2 sigma^2 + i k0 . r) on an n x n grid.

    ``origin`` defaults to centring the grid on zero.
    """
    if origin is None:
        origin = (-(n // 2) * h, -(n // 2) * h)
    lo = [origin[0] + margin * h, origin[1] + margin * h]
    hi = [origin[0] + (n - 1 - margin) * h, origin[1] + (n - 1 - margin) * h]
    for d in range(2):
        if center[d] - 6 * sigma < lo[d] or center[d] + 6 * sigma > hi[d]:
            raise MarginError("packet support (6 sigma) leaves the grid interior")
    ax = np.arange(n) * h
    X, Y = np.meshgrid(origin[0] + ax, origin[1] + ax, indexing="ij")
    r2 = (X - center[0]) ** 2 + (Y - center[1]) ** 2
    psi = np.exp(-r2 / (2 * sigma * sigma) + 1j * (k0[0] * X + k0[1] * Y))
    wf = Wavefunction2D(psi, h, tuple(origin))
    return wf.with_values(wf.psi / wf.norm)


def position_mean(psi: Wavefunction2D) -> tuple:
    X, Y = psi.coordinates()
    w = np.abs(psi.psi) ** 2
    total = w.sum()
    return float((w * X).sum() / total), float((w * Y).sum() / total)


def _spectral_gradient(psi: Wavefunction2D) -> tuple:
    k = 2 * np.pi * np.fft.fftfreq(psi.n, d=psi.h)
    f = np.fft.fft2(psi.psi)
    d1 = np.fft.ifft2(1j * k[:, None] * f)
    d2 = np.fft.ifft2(1j * k[None, :] * f)
    return d1, d2


def momentum_mean(psi: Wavefunction2D, hbar: float = 1.0) -> tuple:
    """<-i hbar grad> using spectral derivatives."""
    d1, d2 = _spectral_gradient(psi)
    norm2 = np.vdot(psi.psi, psi.psi).real
    return tuple(float((np.vdot(psi.psi, -1j * hbar * d).real) / norm2) for d in (d1, d2))


def symmetric_potential(psi: Wavefunction2D, B: float) -> tuple:
    """In-plane components of A = B x r / 2 for B along the grid normal."""
    X, Y = psi.coordinates()
    return -0.5 * B * Y, 0.5 * B * X


def kinematical_mean(psi: Wavefunction2D, B: float, consts: PhysicalConstants) -> tuple:
    """<p - (e/c) A> in symmetric gauge."""
    hbar = float(consts.hbar)
    q = float(consts.coupling)
    p = momentum_mean(psi, hbar)
    a1, a2 = symmetric_potential(psi, B)
    w = np.abs(psi.psi) ** 2
    total = w.sum()
    return (p[0] - q * float((w * a1).sum() / total), p[1] - q * float((w * a2).sum() / total))


def _shift_samples(values: np.ndarray, m1: int, m2: int) -> np.ndarray:
    """out[i, j] = values[i - m1, j - m2], zero where the source is off-grid."""
    n = values.shape[0]
    out = np.zeros_like(values)
    src = values[max(0, -m1): n - max(0, m1), max(0, -m2): n - max(0, m2)]
    out[max(0, m1): n - max(0, -m1), max(0, m2): n - max(0, -m2)] = src
    return out


def _translate(psi: Wavefunction2D, a, B: float, consts: PhysicalConstants, sign: int,
               margin: int | None = None) -> Wavefunction2D:
    shift = _as_shift(a, psi.h)
    if 4 * shift.width >= psi.n:
        raise ValueError(f"shift {shift.width} cells must be below N/4 = {psi.n / 4}")
    check_margin(psi, shift.width if margin is None else margin)
    kappa = float(consts.e) / (2.0 * float(consts.hbar) * float(consts.c))
    a1, a2, _ = shift.vector
    # r . (a x B) with B along x3: a x B = (a2 B, -a1 B, 0)
    X, Y = psi.coordinates()
    phase = np.exp(sign * -1j * kappa * (X * a2 * B - Y * a1 * B))
    return psi.with_values(phase * _shift_samples(psi.psi, shift.m1, shift.m2))


def translate_passive(psi: Wavefunction2D, a, B: float, consts: PhysicalConstants,
                      margin: int | None = None) -> Wavefunction2D:
    """Apply exp(-(i/hbar) a . G) with G = p + (e/2c) B x r."""
    return _translate(psi, a, B, consts, +1, margin)


def translate_active(psi: Wavefunction2D, a, B: float, consts: PhysicalConstants,
                     margin: int | None = None) -> Wavefunction2D:
    """Apply exp(-(i/hbar) a . pi) with pi = p - (e/2c) B x r."""
    return _translate(psi, a, B, consts, -1, margin)


def translate(psi, a, B, consts, which: str = PASSIVE, margin: int | None = None):
    if which == PASSIVE:
        return translate_passive(psi, a, B, consts, margin)
    if which == ACTIVE:
        return translate_active(psi, a, B, consts, margin)
    raise ValueError(f"which must be {PASSIVE!r} or {ACTIVE!r}")


def compose_phase(psi: Wavefunction2D, a, b, B: float, consts: PhysicalConstants,
                  which: str = PASSIVE) -> tuple:
    """Relative phase and fidelity between T(a) T(b) psi and T(a + b) psi.

    Returns ``(phi, fidelity)`` with phi in (-pi, pi].
    """
    sa, sb = _as_shift(a, psi.h), _as_shift(b, psi.h)
    band = max(abs(sa.m1) + abs(sb.m1), abs(sa.m2) + abs(sb.m2))
    check_margin(psi, band)
    u = translate(translate(psi, sb, B, consts, which, margin=band), sa, B, consts, which, margin=0)
    v = translate(psi, sa + sb, B, consts, which, margin=band)
    overlap = v.inner(u)
    fid = abs(overlap) / (u.norm * v.norm)
    if fid < MIN_FIDELITY:
        raise ComparisonError(f"states are not proportional (fidelity {fid:.6f})")
    phi = math.atan2(overlap.imag, overlap.real)
    if phi <= -math.pi:
        phi += 2 * math.pi
    return phi, fid


def predicted_phase(a: Sequence[float], b: Sequence[float], B: float,
                    consts: PhysicalConstants, which: str = PASSIVE) -> float:
    """(e / 2 hbar c) (a x b) . B, sign-flipped for the active family."""
    cross3 = a[0] * b[1] - a[1] * b[0]
    value = float(consts.e) / (2 * float(consts.hbar) * float(consts.c)) * cross3 * B
    return value if which == PASSIVE else -value


def triangle_flux(a: Sequence[float], b: Sequence[float], field_fn: Callable) -> float:
    """Flux of a field through the triangle (0, a, a + b), oriented by a x b.

    Integrates over r = u a + v b with 0 <= v <= u <= 1 numerically.
    """
    a = np.array([a[0], a[1], a[2] if len(a) > 2 else 0.0], dtype=float)
    b = np.array([b[0], b[1], b[2] if len(b) > 2 else 0.0], dtype=float)
    normal = np.cross(a, b)

    def integrand(v, u):
        return float(np.dot(field_fn(u * a + v * b), normal))

    value, _ = integrate.dblquad(integrand, 0.0, 1.0, 0.0, lambda u: u, epsabs=1e-13, epsrel=1e-13)
    return float(value)


def wrap_phase(value: float) -> float:
    """Map an angle to (-pi, pi]."""
    wrapped = math.remainder(value, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def apply_hamiltonian(psi: Wavefunction2D, B: float, consts: PhysicalConstants) -> Wavefunction2D:
    """(1/2m)(-i hbar grad - (e/c) A)^2 with second-order central differences.

    Uses div A = 0 to write the operator as
    -hbar^2 lap/2m + i hbar (e/c) A . grad / m + (e/c)^2 |A|^2 / 2m;
    samples outside the grid are zero.
    """
    hbar = float(consts.hbar)
    q = float(consts.coupling)
    m = float(consts.m)
    h = psi.h
    f = np.pad(psi.psi, 1)
    center = f[1:-1, 1:-1]
    east, west = f[2:, 1:-1], f[:-2, 1:-1]
    north, south = f[1:-1, 2:], f[1:-1, :-2]
    lap = (east + west + north + south - 4 * center) / (h * h)
    d1 = (east - west) / (2 * h)
    d2 = (north - south) / (2 * h)
    a1, a2 = symmetric_potential(psi, B)
    out = (-hbar * hbar / (2 * m)) * lap
    out = out + (1j * hbar * q / m) * (a1 * d1 + a2 * d2)
    out = out + (q * q / (2 * m)) * (a1 * a1 + a2 * a2) * center
    return psi.with_values(out)


def energy(psi: Wavefunction2D, B: float, consts: PhysicalConstants) -> float:
    return float(psi.inner(apply_hamiltonian(psi, B, consts)).real / psi.norm ** 2)


def invariance_residual(psi: Wavefunction2D, a, B: float, consts: PhysicalConstants,
                        which: str = PASSIVE) -> float:
    """||H T(a) psi - T(a) H psi|| / ||H psi||."""
    shift = _as_shift(a, psi.h)
    check_margin(psi, shift.width + 1)
    Hpsi = apply_hamiltonian(psi, B, consts)
    lhs = apply_hamiltonian(translate(psi, shift, B, consts, which), B, consts)
    rhs = translate(Hpsi, shift, B, consts, which, margin=0)
    return float(np.linalg.norm(lhs.psi - rhs.psi) / np.linalg.norm(Hpsi.psi))
