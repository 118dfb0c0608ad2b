"""Registry of named verification checks run by scenarios.

Each check takes a :class:`Context` and its parameter mapping and returns a
:class:`Outcome`.  ``passed`` is ``True``/``False``, or ``None`` when the
check does not apply (for example a generator that does not exist and was
not expected either way).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import qgrid
from .dynamics import cyclotron_period, drift, integrate_trajectory, lorentz_residual
from .fields import (
    GaugePotential,
    PhysicalConstants,
    curl,
    divergence,
    gauge_transform,
    numeric_curl,
)
from .flows import canonicity_report, finite_passive_translation, flow_commutator_gap, flow_path
from .generators import (
    NonIntegrableReport,
    find_gauge_function,
    levi_civita,
    passive_rotation_generator,
    passive_translation_generator,
)
from .observables import (
    PhasePoint,
    hamiltonian_observable,
    kinematical_momentum,
    poisson,
    poisson_numeric,
    substitute_canonical,
    substitute_kinematical,
)
from .poly import MOMENTA, POSITIONS, Poly, monomials_up_to
from .weyl import CQ, commutator, verify_identities, weyl_quantize

TRIVIAL, PAPER, DERIVED = "TRIVIAL", "PAPER", "DERIVED"


@dataclass
class Context:
    consts: PhysicalConstants
    potential: GaugePotential
    seed: int = 0
    export_dir: Path | None = None

    def rng(self, salt: str) -> random.Random:
        return random.Random(f"{self.seed}:{salt}")

    @property
    def field(self):
        return curl(self.potential)

    def uniform_bz(self) -> Fraction | None:
        """B3 when the field is uniform and along x3, else None."""
        A = self.potential
        if not A.is_polynomial:
            return None
        B = curl(A)
        if not B.is_uniform():
            return None
        b1, b2, b3 = B.constant_value()
        if b1 or b2:
            return None
        return b3


@dataclass
class Outcome:
    passed: bool | None
    measured: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    provenance: str = DERIVED
    residuals: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    summary: str
    tolerance: float | None
    run: Callable


REGISTRY: dict[str, Check] = {}


def register(name: str, anchor: str, summary: str, tolerance: float | None = None):
    def deco(fn):
        REGISTRY[name] = Check(name, anchor, summary, tolerance, fn)
        return fn
    return deco


# helpers -----------------------------------------------------------------------------

def random_rational(rng: random.Random, span: int = 5) -> Fraction:
    den = rng.choice((1, 1, 2, 3))
    num = rng.randint(-span, span)
    return Fraction(num, den)


def random_poly(rng: random.Random, max_degree: int, nterms: int, position_only: bool) -> Poly:
    monos = monomials_up_to(max_degree, 3 if position_only else 6)
    terms = {}
    for _ in range(nterms):
        terms[rng.choice(monos)] = random_rational(rng)
    return Poly(terms)


def _require_poly(ctx: Context) -> Outcome | None:
    if not ctx.potential.is_polynomial:
        return Outcome(None, notes=["needs a polynomial potential"])
    return None


def _axes(params) -> list:
    axes = params.get("axes", [1, 2, 3])
    for k in axes:
        if k not in (1, 2, 3):
            raise ValueError(f"bad axis {k!r}")
    return list(axes)


def _expectations(params, axes) -> dict:
    exp = params.get("expect")
    if exp is None:
        return {}
    if isinstance(exp, str):
        return {k: exp for k in axes}
    return {int(k): v for k, v in exp.items()}


def _existence(ctx: Context, params, builder, label: str) -> Outcome:
    axes = _axes(params)
    expect = _expectations(params, axes)
    measured, reports, ok = {}, {}, True
    for k in axes:
        try:
            result = builder(ctx.potential, k, ctx.consts)
        except TypeError as exc:
            measured[str(k)] = "undecidable"
            reports[str(k)] = str(exc)
            ok = False
            continue
        exists = not isinstance(result, NonIntegrableReport)
        measured[str(k)] = "exists" if exists else "absent"
        if exists:
            reports[str(k)] = str(result)
        else:
            reports[str(k)] = result.to_json()
        if k in expect and expect[k] != measured[str(k)]:
            ok = False
    if not expect:
        passed = ok and all(v == "exists" for v in measured.values())
        passed = True if passed else (None if ok else False)
    else:
        passed = ok
    return Outcome(passed, measured={"existence": measured, label: reports},
                   expected={str(k): v for k, v in expect.items()}, provenance=PAPER)


def _generators(ctx: Context, axes=(1, 2, 3)) -> dict:
    out = {}
    for k in axes:
        g = passive_translation_generator(ctx.potential, k, ctx.consts)
        if not isinstance(g, NonIntegrableReport):
            out[k] = g
    return out


def _field_polys(ctx: Context) -> tuple:
    return curl(ctx.potential).components


def _phase_point(params, key: str, default) -> tuple:
    return tuple(float(v) for v in params.get(key, default))


# classical sector ---------------------------------------------------------------------

@register("gauge-canonical", "§2 gauge transformation",
          "p -> p + grad(e xi / c) preserves the fundamental brackets (random xi)")
def check_gauge_canonical(ctx: Context, params) -> Outcome:
    rng = ctx.rng("gauge-canonical")
    samples = int(params.get("samples", 10))
    q = ctx.consts.coupling
    failures = 0
    for _ in range(samples):
        xi = random_poly(rng, 3, 5, position_only=True)
        P = [MOMENTA[i] + q * xi.diff(i) for i in range(3)]
        for i in range(3):
            for j in range(3):
                if not poisson(P[i], P[j]).is_zero():
                    failures += 1
                if poisson(POSITIONS[i], P[j]) != Poly.const(1 if i == j else 0):
                    failures += 1
    return Outcome(failures == 0, measured={"samples": samples, "failures": failures},
                   expected={"failures": 0}, provenance=PAPER)


@register("bracket-gauge-invariance", "§2 gauge invariance of the bracket",
          "brackets of (x, pi) observables agree across gauges related by random xi")
def check_bracket_gauge_invariance(ctx: Context, params) -> Outcome:
    if (skip := _require_poly(ctx)) is not None:
        return skip
    rng = ctx.rng("bracket-gauge-invariance")
    samples = int(params.get("samples", 10))
    A, consts = ctx.potential, ctx.consts
    failures = 0
    for _ in range(samples):
        xi = random_poly(rng, 3, 4, position_only=True)
        A2 = gauge_transform(A, xi)
        F = random_poly(rng, 2, 4, position_only=False)
        G = random_poly(rng, 2, 4, position_only=False)
        one = substitute_kinematical(
            poisson(substitute_canonical(F, A, consts), substitute_canonical(G, A, consts)), A, consts)
        two = substitute_kinematical(
            poisson(substitute_canonical(F, A2, consts), substitute_canonical(G, A2, consts)), A2, consts)
        failures += one != two
    return Outcome(failures == 0, measured={"samples": samples, "failures": failures},
                   expected={"failures": 0}, provenance=PAPER)


@register("canonical-momenta-commute", "§2.2 closing remark",
          "{p_i, p_k} = 0 and p is unchanged along the flow of p_k", tolerance=1e-12)
def check_canonical_momenta(ctx: Context, params) -> Outcome:
    tol = float(params.get("tolerance", 1e-12))
    brackets = [str(poisson(MOMENTA[i], MOMENTA[j])) for i in range(3) for j in range(3)]
    start = PhasePoint(_phase_point(params, "x", (0.3, -0.4, 0.5)), _phase_point(params, "p", (1, 2, 3)))
    worst = 0.0
    from .flows import flow
    for k in range(3):
        end = flow(MOMENTA[k], 2.0, start)
        worst = max(worst, max(abs(a - b) for a, b in zip(end.p, start.p)))
        worst = max(worst, abs(end.x[k] - start.x[k] - 2.0))
    ok = all(b == "0" for b in brackets) and worst <= tol
    return Outcome(ok, measured={"brackets": brackets, "flow_deviation": worst},
                   expected={"brackets": "0", "flow_deviation": f"<= {tol}"}, provenance=TRIVIAL)


@register("passive-generator-existence", "Eq. (8)",
          "passive translation generators exist exactly when dB/dx_k = 0")
def check_passive_existence(ctx: Context, params) -> Outcome:
    return _existence(ctx, params, passive_translation_generator, "generators")


@register("passive-generator-brackets", "Eq. (7)",
          "{x_i, G_k} = delta_ik and {pi_i, G_k} = 0 exactly")
def check_passive_brackets(ctx: Context, params) -> Outcome:
    if (skip := _require_poly(ctx)) is not None:
        return skip
    gens = _generators(ctx, _axes(params))
    if not gens:
        return Outcome(None, notes=["no passive translation generator exists"])
    residuals = {}
    for k, G in gens.items():
        for i in range(3):
            pi = kinematical_momentum(ctx.potential, ctx.consts, i + 1)
            rx = poisson(POSITIONS[i], G) - (1 if i == k - 1 else 0)
            rp = poisson(pi, G)
            if not rx.is_zero():
                residuals[f"x{i + 1},G{k}"] = str(rx)
            if not rp.is_zero():
                residuals[f"pi{i + 1},G{k}"] = str(rp)
    return Outcome(not residuals, measured={"axes": sorted(gens)}, residuals=residuals,
                   expected={"residuals": "none"}, provenance=PAPER)


@register("passive-bracket-anomaly", "Eq. (10)",
          "{G_i, G_j} = -(e/c) eps_ijl B_l")
def check_passive_anomaly(ctx: Context, params) -> Outcome:
    if (skip := _require_poly(ctx)) is not None:
        return skip
    gens = _generators(ctx)
    B = _field_polys(ctx)
    q = ctx.consts.coupling
    measured, residuals = {}, {}
    for i in range(1, 4):
        for j in range(i + 1, 4):
            if i in gens and j in gens:
                pb = poisson(gens[i], gens[j])
                expected = sum((-q * levi_civita(i - 1, j - 1, l) * B[l] for l in range(3)), Poly())
                measured[f"{i},{j}"] = str(pb)
                if pb != expected:
                    residuals[f"{i},{j}"] = str(pb - expected)
    if not measured:
        return Outcome(None, notes=["fewer than two passive generators exist"])
    return Outcome(not residuals, measured=measured, residuals=residuals,
                   expected={"formula": "-(e/c) eps_ijl B_l"}, provenance=PAPER)


@register("active-bracket", "Eq. (14)",
          "{pi_i, pi_j} = (e/c) eps_ijl B_l (exact, or numeric for black-box gauges)")
def check_active_bracket(ctx: Context, params) -> Outcome:
    A, consts = ctx.potential, ctx.consts
    q = consts.coupling
    pis = [kinematical_momentum(A, consts, i) for i in (1, 2, 3)]
    if A.is_polynomial:
        B = _field_polys(ctx)
        measured, residuals = {}, {}
        for i in range(3):
            for j in range(i + 1, 3):
                pb = poisson(pis[i], pis[j])
                expected = sum((q * levi_civita(i, j, l) * B[l] for l in range(3)), Poly())
                measured[f"{i + 1},{j + 1}"] = str(pb)
                if pb != expected:
                    residuals[f"{i + 1},{j + 1}"] = str(pb - expected)
        return Outcome(not residuals, measured=measured, residuals=residuals,
                       expected={"formula": "(e/c) eps_ijl B_l"}, provenance=PAPER)
    tol = float(params.get("tolerance", 1e-6))
    points = params.get("points", [[1, 0, 0], [0.5, 1.2, -0.3], [2, -1, 1]])
    Bf = curl(A)
    worst = 0.0
    measured = {}
    for x in points:
        z = PhasePoint(tuple(x), (0.3, -0.2, 0.1))
        b = Bf(z.x)
        for i in range(3):
            for j in range(i + 1, 3):
                val = poisson_numeric(pis[i], pis[j], z)
                exp = float(q) * sum(levi_civita(i, j, l) * b[l] for l in range(3))
                worst = max(worst, abs(val - exp))
                measured[f"{tuple(x)}:{i + 1},{j + 1}"] = val
    return Outcome(worst <= tol, measured=measured, residuals={"max_abs": worst},
                   expected={"tolerance": tol}, provenance=PAPER)


@register("generator-conservation-bracket", "Eq. (11)",
          "{G_k, H} = 0 and {L_k, H} = 0 exactly whenever the generators exist")
def check_conservation_bracket(ctx: Context, params) -> Outcome:
    if (skip := _require_poly(ctx)) is not None:
        return skip
    H = hamiltonian_observable(ctx.potential, ctx.consts)
    measured, residuals = {}, {}
    for k, G in _generators(ctx).items():
        pb = poisson(G, H)
        measured[f"G{k}"] = str(pb)
        if not pb.is_zero():
            residuals[f"G{k}"] = str(pb)
    for k in (1, 2, 3):
        L = passive_rotation_generator(ctx.potential, k, ctx.consts)
        if isinstance(L, NonIntegrableReport):
            continue
        pb = poisson(L, H)
        measured[f"L{k}"] = str(pb)
        if not pb.is_zero():
            residuals[f"L{k}"] = str(pb)
    if not measured:
        return Outcome(None, notes=["no passive generator exists"])
    return Outcome(not residuals, measured=measured, residuals=residuals,
                   expected={"brackets": "0"}, provenance=PAPER)


@register("gauge-independence", "Eq. (9)",
          "G_k in (x, pi) variables is identical across random gauge transformations")
def check_gauge_independence(ctx: Context, params) -> Outcome:
    if (skip := _require_poly(ctx)) is not None:
        return skip
    rng = ctx.rng("gauge-independence")
    samples = int(params.get("samples", 20))
    degree = int(params.get("max_degree", 3))
    A, consts = ctx.potential, ctx.consts
    base = {k: substitute_kinematical(G, A, consts) for k, G in _generators(ctx).items()}
    if not base:
        return Outcome(None, notes=["no passive translation generator exists"])
    failures = []
    for n in range(samples):
        xi = random_poly(rng, degree, 5, position_only=True)
        A2 = gauge_transform(A, xi)
        for k, ref in base.items():
            G2 = passive_translation_generator(A2, k, consts)
            if isinstance(G2, NonIntegrableReport) or substitute_kinematical(G2, A2, consts) != ref:
                failures.append({"sample": n, "axis": k, "xi": str(xi)})
    return Outcome(not failures, measured={"pi_form": {str(k): str(v) for k, v in base.items()},
                                           "samples": samples},
                   residuals={"failures": failures}, expected={"failures": 0}, provenance=PAPER)


@register("not-gauge-related", "Eq. (9) remark",
          "no polynomial xi of bounded degree turns every p_k into G_k when B != 0")
def check_not_gauge_related(ctx: Context, params) -> Outcome:
    if (skip := _require_poly(ctx)) is not None:
        return skip
    gens = _generators(ctx)
    if len(gens) < 3:
        return Outcome(None, notes=["needs all three passive generators"])
    degree = int(params.get("max_degree", 3))
    xi = find_gauge_function([gens[k] - MOMENTA[k - 1] for k in (1, 2, 3)], ctx.consts, degree)
    field_zero = all(b.is_zero() for b in _field_polys(ctx))
    related = xi is not None
    return Outcome(related == field_zero,
                   measured={"gauge_function": None if xi is None else str(xi)},
                   expected={"related": field_zero}, provenance=PAPER)


@register("rotation-generator-existence", "Eq. (22)",
          "passive rotation generators exist exactly when B is rotation invariant")
def check_rotation_existence(ctx: Context, params) -> Outcome:
    return _existence(ctx, params, passive_rotation_generator, "generators")


@register("rotation-generator-brackets", "Eq. (20)",
          "{x_i, L_k} = eps_ikl x_l and {pi_i, L_k} = eps_ikl pi_l exactly")
def check_rotation_brackets(ctx: Context, params) -> Outcome:
    if (skip := _require_poly(ctx)) is not None:
        return skip
    residuals, found = {}, []
    for k in _axes(params):
        L = passive_rotation_generator(ctx.potential, k, ctx.consts)
        if isinstance(L, NonIntegrableReport):
            continue
        found.append(k)
        pis = [kinematical_momentum(ctx.potential, ctx.consts, i) for i in (1, 2, 3)]
        for i in range(3):
            ex = sum((levi_civita(i, k - 1, l) * POSITIONS[l] for l in range(3)), Poly())
            ep = sum((levi_civita(i, k - 1, l) * pis[l] for l in range(3)), Poly())
            rx = poisson(POSITIONS[i], L) - ex
            rp = poisson(pis[i], L) - ep
            if not rx.is_zero():
                residuals[f"x{i + 1},L{k}"] = str(rx)
            if not rp.is_zero():
                residuals[f"pi{i + 1},L{k}"] = str(rp)
    if not found:
        return Outcome(None, notes=["no rotation generator exists"])
    return Outcome(not residuals, measured={"axes": found}, residuals=residuals,
                   expected={"residuals": "none"}, provenance=PAPER)


@register("finite-translation-canonicity", "§2.1 finite passive translation",
          "{p_i(s), p_j(s)} = (e/c) eps_ijl [B_l(x) - B_l(x(s))], other brackets canonical",
          tolerance=1e-6)
def check_finite_translation(ctx: Context, params) -> Outcome:
    A, consts = ctx.potential, ctx.consts
    k = int(params.get("axis", 1))
    tol = float(params.get("tolerance", 1e-6))
    svals = [float(s) for s in params.get("s", [0.1, 0.5, 1.0])]
    points = [PhasePoint(tuple(p[:3]), tuple(p[3:]))
              for p in params.get("points", [[0.2, -0.3, 0.4, 0.5, -1.0, 0.7], [1.0, 0.5, -0.5, 0, 0, 0]])]
    B = curl(A)
    q = float(consts.coupling)
    worst = 0.0
    measured = {}
    for s in svals:
        rep = canonicity_report(lambda z: finite_passive_translation(z, k, s, A, consts), points)
        for n, pt in enumerate(points):
            x_after = list(pt.x)
            x_after[k - 1] += s
            b0, b1 = B(pt.x), B(x_after)
            expected = np.zeros((6, 6))
            expected[:3, 3:] = np.eye(3)
            expected[3:, :3] = -np.eye(3)
            for i in range(3):
                for j in range(3):
                    expected[3 + i, 3 + j] = q * sum(levi_civita(i, j, l) * (b0[l] - b1[l]) for l in range(3))
            worst = max(worst, float(np.max(np.abs(rep.brackets[n] - expected))))
            measured[f"s={s}:point{n}:p1p2"] = rep.bracket("p1", "p2", n)
    return Outcome(worst <= tol, measured=measured, residuals={"max_abs": worst},
                   expected={"tolerance": tol}, provenance=PAPER)


def _flow_generators(ctx: Context, family: str, axes) -> list | None:
    if family == "active":
        return [kinematical_momentum(ctx.potential, ctx.consts, k) for k in axes]
    out = []
    for k in axes:
        g = passive_translation_generator(ctx.potential, k, ctx.consts)
        if isinstance(g, NonIntegrableReport):
            return None
        out.append(g)
    return out


@register("flow-commutation", "Eq. (10) and Eq. (14) remarks",
          "flows of translation generators commute iff their bracket is constant", tolerance=1e-9)
def check_flow_commutation(ctx: Context, params) -> Outcome:
    family = params.get("family", "passive")
    axes = params.get("axes", [1, 2])
    s1, s2 = float(params.get("s1", 1.0)), float(params.get("s2", 1.0))
    start = PhasePoint(_phase_point(params, "x", (0.3, -0.2, 0.1)), _phase_point(params, "p", (0.5, 0.4, -0.3)))
    expect = params.get("expect", "commute")
    gens = _flow_generators(ctx, family, axes)
    if gens is None:
        return Outcome(None, notes=["passive generator does not exist"])
    gap = flow_commutator_gap(gens[0], gens[1], s1, s2, start)
    artifacts = []
    if ctx.export_dir is not None:
        for k, g in zip(axes, gens):
            path = Path(ctx.export_dir) / f"flow-{family}-{k}.csv"
            flow_path(g, s1, start, samples=20).to_csv(path, ctx.potential, ctx.consts)
            artifacts.append(str(path))
    if expect == "commute":
        tol = float(params.get("tolerance", 1e-9))
        ok = gap <= tol
        expected = {"gap": f"<= {tol}"}
    else:
        floor = float(params.get("min_gap", 1e-6))
        ok = gap >= floor
        expected = {"gap": f">= {floor}"}
    return Outcome(ok, measured={"gap": gap}, expected=expected, provenance=PAPER, artifacts=artifacts)


def _observable_by_name(ctx: Context, name: str):
    A, consts = ctx.potential, ctx.consts
    if name == "H":
        return hamiltonian_observable(A, consts)
    kind, k = name[:-1], int(name[-1])
    if kind == "G":
        g = passive_translation_generator(A, k, consts)
        return None if isinstance(g, NonIntegrableReport) else g
    if kind == "L":
        g = passive_rotation_generator(A, k, consts)
        return None if isinstance(g, NonIntegrableReport) else g
    if kind == "p":
        return MOMENTA[k - 1]
    if kind == "x":
        return POSITIONS[k - 1]
    if kind == "pi":
        return kinematical_momentum(A, consts, k)
    raise ValueError(f"unknown observable {name!r}")


def _trajectory(ctx: Context, params):
    A, consts = ctx.potential, ctx.consts
    x0 = _phase_point(params, "x", (0.5, 0.0, 0.0))
    pi0 = _phase_point(params, "pi", (1.0, 0.0, 0.0))
    start = PhasePoint.from_kinematical(x0, pi0, A, consts)
    b = float(np.linalg.norm(curl(A)(x0)))
    spp = int(params.get("steps_per_period", 2000))
    if "duration" in params:
        T = float(params["duration"])
        dt = float(params["dt"]) if "dt" in params else (
            cyclotron_period(b, consts) / spp if b else None)
    else:
        if not b:
            raise ValueError("field vanishes at the start point; give duration and dt")
        period = cyclotron_period(b, consts)
        T = float(params.get("periods", 10)) * period
        dt = period / spp
    return integrate_trajectory(start, A, consts, T, dt)


@register("conservation-drift", "Eq. (11) and §4 conservation remarks",
          "generators of symmetries are constants of motion; p_k generally is not", tolerance=1e-8)
def check_conservation_drift(ctx: Context, params) -> Outcome:
    tol = float(params.get("tolerance", 1e-8))
    names = params.get("conserved", ["H", "G1", "G2", "G3", "L3"])
    controls = params.get("not_conserved", {})
    traj = _trajectory(ctx, params)
    measured, ok, notes = {}, True, []
    monitors = {}
    for name in names:
        obs = _observable_by_name(ctx, name)
        if obs is None:
            notes.append(f"{name} does not exist for this field")
            continue
        d = drift(traj, obs)
        measured[name] = d
        if name != "H":  # the trajectory export already carries H
            monitors[name] = obs
        ok &= d <= tol
    for name, floor in controls.items():
        d = drift(traj, _observable_by_name(ctx, name))
        measured[name] = d
        ok &= d >= float(floor)
    artifacts = []
    if ctx.export_dir is not None:
        path = Path(ctx.export_dir) / "trajectory.csv"
        traj.to_csv(path, monitors)
        artifacts.append(str(path))
    return Outcome(bool(ok), measured=measured,
                   expected={"conserved": f"<= {tol}", **{k: f">= {v}" for k, v in controls.items()}},
                   provenance=PAPER, notes=notes, artifacts=artifacts)


@register("cyclotron-orbit", "Eq. (12) Lorentz force",
          "uniform-field orbit closes after one cyclotron period; dpi/dt = (e/c) v x B", tolerance=1e-8)
def check_cyclotron(ctx: Context, params) -> Outcome:
    tol = float(params.get("tolerance", 1e-8))
    p = dict(params)
    p.setdefault("periods", 1)
    traj = _trajectory(ctx, p)
    closure = float(np.linalg.norm(traj.states[-1, :3] - traj.states[0, :3]))
    lorentz = lorentz_residual(traj)
    bound = 10 * traj.dt ** 2
    uniform = ctx.potential.is_polynomial and curl(ctx.potential).is_uniform()
    ok = lorentz <= bound and (closure <= tol if uniform else True)
    return Outcome(ok, measured={"closure": closure, "lorentz_residual": lorentz},
                   expected={"closure": f"<= {tol}" if uniform else "n/a", "lorentz_residual": f"<= {bound}"},
                   provenance=DERIVED)


@register("field-curl-consistency", "§1 B = curl A",
          "numeric curl matches the exact or closed-form field; div B = 0")
def check_field_curl(ctx: Context, params) -> Outcome:
    A = ctx.potential
    rng = np.random.default_rng(ctx.seed)
    samples = int(params.get("samples", 100))
    B = curl(A)
    Bn = numeric_curl(A)
    worst = 0.0
    for _ in range(samples):
        x = rng.uniform(-2, 2, 3)
        r = float(np.linalg.norm(x))
        if r < 1.0:
            x = x * (1.0 + r) / r
        h = 1e-5 * max(1.0, float(np.linalg.norm(x)))
        exact = B(x)
        scale = max(1.0, float(np.linalg.norm(exact)))
        worst = max(worst, float(np.max(np.abs(Bn(x) - exact))) / (scale * h * h))
    ok = worst <= 10.0
    div = None
    if A.is_polynomial:
        div = str(divergence(B))
        ok &= div == "0"
    return Outcome(ok, measured={"max_error_over_h2": worst, "divergence": div},
                   expected={"max_error_over_h2": "<= 10", "divergence": "0"}, provenance=TRIVIAL)


# quantum sector ----------------------------------------------------------------------

@register("quantum-identities", "Eqs. (15)-(17), (21), (23)",
          "operator commutators, Jacobi argument and Hermiticity, exact for several hbar")
def check_quantum_identities(ctx: Context, params) -> Outcome:
    if (skip := _require_poly(ctx)) is not None:
        return skip
    hbars = params.get("hbar_values", ["1", "1/3", "7/2"])
    measured, failures, ok = {}, {}, True
    for hb in hbars:
        consts = PhysicalConstants(ctx.consts.e, ctx.consts.c, ctx.consts.m, Fraction(hb))
        report = verify_identities(ctx.potential, consts)
        counts = {"pass": 0, "fail": 0, "not-applicable": 0}
        for r in report.results:
            counts[r.to_json()["status"]] += 1
        measured[str(hb)] = counts
        if not report.passed:
            ok = False
            failures[str(hb)] = [r.to_json() for r in report.failures()]
    return Outcome(ok, measured=measured, residuals=failures,
                   expected={"failures": 0}, provenance=PAPER)


@register("classical-quantum-consistency", "Eq. (16) vs Eq. (14)",
          "[W(f), W(g)] = i hbar W({f, g}) for random observables of degree <= 2")
def check_classical_quantum(ctx: Context, params) -> Outcome:
    rng = ctx.rng("classical-quantum-consistency")
    samples = int(params.get("samples", 50))
    hbar = ctx.consts.hbar
    failures = 0
    for _ in range(samples):
        f = random_poly(rng, 2, 5, position_only=False)
        g = random_poly(rng, 2, 5, position_only=False)
        lhs = commutator(weyl_quantize(f, hbar), weyl_quantize(g, hbar))
        rhs = weyl_quantize(poisson(f, g), hbar) * CQ(0, hbar)
        failures += lhs != rhs
    return Outcome(failures == 0, measured={"samples": samples, "failures": failures},
                   expected={"failures": 0}, provenance=DERIVED)


def _grid(ctx: Context, params):
    n = int(params.get("N", 256))
    h = float(params.get("h", 0.1))
    sigma = float(params.get("sigma", 1.0))
    center = tuple(float(v) for v in params.get("center", (0.0, 0.0)))
    k0 = tuple(float(v) for v in params.get("k0", (0.0, 0.0)))
    return qgrid.gaussian_packet(n, h, center, sigma, k0)


def _phase_check(ctx: Context, params, which: str) -> Outcome:
    bz = ctx.uniform_bz()
    if bz is None:
        return Outcome(None, notes=["grid sector needs a uniform field along x3"])
    B = float(bz)
    psi = _grid(ctx, params)
    a = [float(v) for v in params.get("a", [1.0, 0.0])]
    b = [float(v) for v in params.get("b", [0.0, 1.0])]
    c = [float(v) for v in params.get("c", [0.5, 0.5])]
    tol = float(params.get("tolerance", 1e-10))
    fid_tol = float(params.get("fidelity_tolerance", 1e-12))
    consts = ctx.consts
    phi, fid = qgrid.compose_phase(psi, a, b, B, consts, which)
    phi_ba, fid_ba = qgrid.compose_phase(psi, b, a, B, consts, which)
    predicted = qgrid.predicted_phase(a, b, B, consts, which)
    kappa = float(consts.e) / (float(consts.hbar) * float(consts.c))
    flux = qgrid.triangle_flux(a, b, lambda r: np.array([0.0, 0.0, B]))
    flux_phase = kappa * flux if which == qgrid.PASSIVE else -kappa * flux
    ab = [x + y for x, y in zip(a, b)]
    bc = [x + y for x, y in zip(b, c)]
    cocycle = (qgrid.compose_phase(psi, a, b, B, consts, which)[0]
               + qgrid.compose_phase(psi, ab, c, B, consts, which)[0]
               - qgrid.compose_phase(psi, b, c, B, consts, which)[0]
               - qgrid.compose_phase(psi, a, bc, B, consts, which)[0])
    residuals = {
        "phase": abs(qgrid.wrap_phase(phi - predicted)),
        "antisymmetry": abs(qgrid.wrap_phase(phi + phi_ba)),
        "flux": abs(flux_phase - predicted),
        "cocycle": abs(qgrid.wrap_phase(cocycle)),
        "fidelity": 1.0 - min(fid, fid_ba),
    }
    ok = (residuals["phase"] <= tol and residuals["antisymmetry"] <= tol
          and residuals["flux"] <= 1e-9 and residuals["cocycle"] <= 1e-9
          and residuals["fidelity"] <= fid_tol)
    artifacts = []
    if ctx.export_dir is not None:
        stem = Path(ctx.export_dir) / f"wavefunction-{which}"
        u = qgrid.translate(qgrid.translate(psi, b, B, consts, which), a, B, consts, which)
        artifacts = [str(p) for p in u.save(stem)]
    return Outcome(ok, measured={"phi": phi, "phi_swapped": phi_ba, "fidelity": fid,
                                 "predicted_phase": predicted, "flux_integral": flux,
                                 "convention": f"{which}: psi'(r) = exp({'-' if which == 'passive' else '+'}"
                                               "i e r.(a x B)/(2 hbar c)) psi(r - a)"},
                   expected={"phi": predicted, "tolerance": tol, "fidelity": f">= 1 - {fid_tol}"},
                   residuals=residuals, provenance=PAPER if which == qgrid.PASSIVE else DERIVED,
                   artifacts=artifacts)


@register("ray-phase", "Eq. (19)",
          "T(a) T(b) = exp(i e (a x b).B / 2 hbar c) T(a + b) on the grid", tolerance=1e-10)
def check_ray_phase(ctx: Context, params) -> Outcome:
    return _phase_check(ctx, params, qgrid.PASSIVE)


@register("active-phase", "§3.2 active operators",
          "active translations compose with the opposite flux phase", tolerance=1e-10)
def check_active_phase(ctx: Context, params) -> Outcome:
    return _phase_check(ctx, params, qgrid.ACTIVE)


@register("hamiltonian-invariance-grid", "§3.1 invariance of H",
          "[H, T_G(a)] vanishes at second order under grid refinement")
def check_grid_invariance(ctx: Context, params) -> Outcome:
    bz = ctx.uniform_bz()
    if bz is None:
        return Outcome(None, notes=["grid sector needs a uniform field along x3"])
    B = float(bz)
    n = int(params.get("N", 256))
    h = float(params.get("h", 0.1))
    sigma = float(params.get("sigma", 1.0))
    a = [float(v) for v in params.get("a", [0.5, 0.0])]
    lo, hi = params.get("ratio_bounds", [3.5, 4.5])
    coarse = qgrid.gaussian_packet(n, h, (0.0, 0.0), sigma)
    fine = qgrid.gaussian_packet(2 * n, h / 2, (0.0, 0.0), sigma)
    r_coarse = qgrid.invariance_residual(coarse, a, B, ctx.consts)
    r_fine = qgrid.invariance_residual(fine, a, B, ctx.consts)
    r_free = qgrid.invariance_residual(coarse, a, 0.0, ctx.consts)
    ratio = r_coarse / r_fine if r_fine else math.inf
    ok = r_free <= 1e-12 and (lo <= ratio <= hi if B else r_coarse <= 1e-12)
    return Outcome(ok, measured={"residual_h": r_coarse, "residual_h_over_2": r_fine,
                                 "ratio": ratio, "residual_B0": r_free},
                   expected={"ratio": [lo, hi], "residual_B0": "<= 1e-12"}, provenance=DERIVED)
