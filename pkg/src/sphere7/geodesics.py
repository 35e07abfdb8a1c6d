"""Hamiltonian flows of the four structures, closed-form reduced solutions, conservation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .clifford import UNIT, CliffordSystem, build_clifford_system, left_mult
from .exact.poly import Poly
from .integrals import DECOMPOSITIONS
from .liealg import build_chain, so8
from .srgeom import StructureKind, build_hamiltonian, linear_form

SCHEMES = ("rk4", "rk4_projected")

CHAIN_OF = {kind: DECOMPOSITIONS[kind][0] for kind in StructureKind}


class IntegrationError(RuntimeError):
    def __init__(self, message: str, last_valid_time: float):
        super().__init__(f"{message} (last valid time {last_valid_time:.17g})")
        self.last_valid_time = last_valid_time


@dataclass(frozen=True)
class PhasePoint:
    q: tuple
    xi: tuple

    def __post_init__(self):
        if len(self.q) != 8 or len(self.xi) != 8:
            raise ValueError("phase point needs two 8-vectors")

    @classmethod
    def from_arrays(cls, q, xi) -> "PhasePoint":
        return cls(tuple(float(x) for x in q), tuple(float(x) for x in xi))

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, (int, Fraction)) for x in self.q + self.xi)

    def pairing(self):
        return sum(a * b for a, b in zip(self.q, self.xi))

    def sphere_defect(self):
        return sum(a * a for a in self.q) - 1

    def constraint_residuals(self) -> tuple:
        return self.pairing(), self.sphere_defect()

    def on_tangent_bundle(self, tol: float = 1e-12) -> bool:
        p, s = self.constraint_residuals()
        if self.is_exact:
            return p == 0 and s == 0
        return abs(p) <= tol and abs(s) <= tol

    def array(self) -> np.ndarray:
        return np.array([float(x) for x in self.q + self.xi])


@dataclass(frozen=True)
class Trajectory:
    structure: StructureKind
    times: np.ndarray  # (m,)
    states: np.ndarray  # (m, n, 16) for a batch of n initial conditions
    integrals_log: np.ndarray  # (m, n, 8): H then I1..I7
    scheme: str
    dt: float

    def point(self, step: int, member: int = 0) -> PhasePoint:
        s = self.states[step, member]
        return PhasePoint.from_arrays(s[:8], s[8:])

    def drift(self) -> np.ndarray:
        """max over time of |I(t) - I(0)| / |I(0)| for each member and each logged quantity."""
        ref = np.abs(self.integrals_log[0])
        dev = np.max(np.abs(self.integrals_log - self.integrals_log[0]), axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(ref > 0, dev / np.where(ref > 0, ref, 1.0), dev)
        return rel

    def drift_stats(self) -> dict:
        rel = self.drift()
        names = ["H"] + [f"I{i}" for i in range(1, 8)]
        return {name: float(np.max(rel[:, n])) for n, name in enumerate(names)}


class FlowModel:
    """Float data for the vector field and the logged quantities of one structure.

    The dynamics use H = 1/2 sum_E w_E <E q, xi>^2 over a weighted frame.  For
    the T structures this is the Hamiltonian itself.  For QH the term
    1/2 |xi|^2 is replaced by 1/2 sum_{k<=7} <A_k q, xi>^2, which agrees with
    it on the tangent bundle and Poisson-commutes with both constraints, so
    the flow stays on the tangent bundle.
    """

    def __init__(self, kind: StructureKind, cs: CliffordSystem | None = None):
        cs = cs or build_clifford_system()
        self.kind = kind
        self.cs = cs
        weighted = dynamic_frame(kind, cs)
        self.weights = np.array([float(w) for w, _ in weighted])
        self.frame = np.array([np.array(m, dtype=float) for _, m in weighted])  # (f, 8, 8)
        self.kinetic = kind is StructureKind.QH
        alg = so8(cs)
        self.basis = np.array([np.array(e.m, dtype=float) for e in alg.elements])  # (28, 8, 8)
        chain = build_chain(CHAIN_OF[kind], cs)
        self.level_masks = np.zeros((7, 28))
        for lvl in range(1, 8):
            for n in chain.index_set(lvl):
                self.level_masks[lvl - 1, n] = 1.0
        self.chain_kind = chain.kind
        self.vertical = [alg.index[lab] for lab in ((6,), (7,), (6, 7))]
        j = {StructureKind.T4: 4, StructureKind.T5: 5, StructureKind.T6H: 6}.get(kind, 0)
        self.horizontal = [alg.index[(i,)] for i in range(1, j + 1)]

    def frame_values(self, q: np.ndarray, xi: np.ndarray) -> np.ndarray:
        # F_E = xi^T E q, shape (n, f)
        return np.einsum("nl,flk,nk->nf", xi, self.frame, q)

    def vector_field(self, q: np.ndarray, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        f = self.frame_values(q, xi) * self.weights
        eq = np.einsum("flk,nk->nfl", self.frame, q)
        ex = np.einsum("flk,nk->nfl", self.frame, xi)
        qdot = np.einsum("nf,nfl->nl", f, eq)
        xidot = np.einsum("nf,nfl->nl", f, ex)
        return qdot, xidot

    def basis_values(self, q: np.ndarray, xi: np.ndarray) -> np.ndarray:
        return np.einsum("nl,elk,nk->ne", xi, self.basis, q)

    def hamiltonian(self, q: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """The defining Hamiltonian (with 1/2 |xi|^2 for QH)."""
        f = self.basis_values(q, xi)
        if self.kinetic:
            vert = f[:, self.vertical]
            return 0.5 * np.sum(xi * xi, axis=1) - 0.5 * np.sum(vert * vert, axis=1)
        hor = f[:, self.horizontal]
        return 0.5 * np.sum(hor * hor, axis=1)

    def integrals(self, q: np.ndarray, xi: np.ndarray) -> np.ndarray:
        f = self.basis_values(q, xi)
        return 0.5 * (f * f) @ self.level_masks.T  # (n, 7)

    def log_values(self, q: np.ndarray, xi: np.ndarray) -> np.ndarray:
        return np.concatenate([self.hamiltonian(q, xi)[:, None], self.integrals(q, xi)], axis=1)


def dynamic_frame(kind: StructureKind, cs: CliffordSystem) -> list[tuple[int, np.ndarray]]:
    if kind is StructureKind.QH:
        return [(1, cs.a(i)) for i in range(1, 6)] + [(-1, cs.hopf_k)]
    j = {StructureKind.T4: 4, StructureKind.T5: 5, StructureKind.T6H: 6}[kind]
    return [(1, cs.a(i)) for i in range(1, j + 1)]


def dynamic_hamiltonian_poly(kind: StructureKind, cs: CliffordSystem) -> Poly:
    """The polynomial whose canonical gradient drives the flow."""
    acc = Poly.zero()
    for w, m in dynamic_frame(kind, cs):
        f = linear_form(m)
        acc = acc + f * f * Fraction(w, 2)
    return acc


def tangent_extension_residual(cs: CliffordSystem) -> Poly:
    """H_QH minus its tangent extension; vanishes on the tangent bundle."""
    return build_hamiltonian(StructureKind.QH, cs).poly - dynamic_hamiltonian_poly(StructureKind.QH, cs)


_MODELS: dict = {}


def flow_model(kind: StructureKind, cs: CliffordSystem | None = None) -> FlowModel:
    cs = cs or build_clifford_system()
    key = (kind, id(cs))
    if key not in _MODELS:
        _MODELS[key] = FlowModel(kind, cs)
    return _MODELS[key]


def hamiltonian_vector_field(kind: StructureKind, p: PhasePoint, cs: CliffordSystem | None = None) -> tuple[np.ndarray, np.ndarray]:
    m = flow_model(kind, cs)
    q = np.array([float(x) for x in p.q])[None, :]
    xi = np.array([float(x) for x in p.xi])[None, :]
    qd, xd = m.vector_field(q, xi)
    return qd[0], xd[0]


def _rk4_step(model: FlowModel, q: np.ndarray, xi: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    k1q, k1x = model.vector_field(q, xi)
    k2q, k2x = model.vector_field(q + 0.5 * dt * k1q, xi + 0.5 * dt * k1x)
    k3q, k3x = model.vector_field(q + 0.5 * dt * k2q, xi + 0.5 * dt * k2x)
    k4q, k4x = model.vector_field(q + dt * k3q, xi + dt * k3x)
    q = q + dt / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q)
    xi = xi + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
    return q, xi


def project_to_tangent_bundle(q: np.ndarray, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = q / np.linalg.norm(q, axis=1, keepdims=True)
    xi = xi - np.sum(q * xi, axis=1, keepdims=True) * q
    return q, xi


def integrate(kind: StructureKind, p0: PhasePoint | Sequence[PhasePoint], t_end: float, dt: float,
              scheme: str = "rk4", log_every: int = 1, tol: float = 1e-12, cs: CliffordSystem | None = None) -> Trajectory:
    """Fixed-step classical Runge-Kutta from one or many initial points."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if not (dt > 0 and t_end >= 0 and math.isfinite(dt) and math.isfinite(t_end)):
        raise ValueError("dt must be positive and t_end nonnegative")
    pts = [p0] if isinstance(p0, PhasePoint) else list(p0)
    for p in pts:
        if not p.on_tangent_bundle(tol):
            raise ValueError(f"initial point violates the constraints: {p.constraint_residuals()}")
    model = flow_model(kind, cs)
    q = np.array([[float(x) for x in p.q] for p in pts])
    xi = np.array([[float(x) for x in p.xi] for p in pts])
    nsteps = int(round(t_end / dt))
    if abs(nsteps * dt - t_end) > 1e-9 * max(1.0, t_end):
        nsteps = int(math.ceil(t_end / dt))
    times = [0.0]
    states = [np.concatenate([q, xi], axis=1)]
    logs = [model.log_values(q, xi)]
    t = 0.0
    for step in range(1, nsteps + 1):
        h = min(dt, t_end - t) if step == nsteps else dt
        nq, nx = _rk4_step(model, q, xi, h)
        if scheme == "rk4_projected":
            nq, nx = project_to_tangent_bundle(nq, nx)
        if not (np.all(np.isfinite(nq)) and np.all(np.isfinite(nx))):
            raise IntegrationError("nonfinite state", t)
        q, xi = nq, nx
        t = step * dt if step < nsteps else t_end
        if step % log_every == 0 or step == nsteps:
            times.append(t)
            states.append(np.concatenate([q, xi], axis=1))
            logs.append(model.log_values(q, xi))
    return Trajectory(kind, np.array(times), np.array(states), np.array(logs), scheme, dt)


# ---- closed form on H x H ------------------------------------------------------------

L_K = np.array(left_mult(UNIT["k"]), dtype=float)


@dataclass(frozen=True)
class ReducedInitialData:
    q1: tuple  # quaternion (1, i, j, k)
    q2: tuple

    def __post_init__(self):
        n = sum(x * x for x in self.q1) + sum(x * x for x in self.q2)
        exact = all(isinstance(x, (int, Fraction)) for x in self.q1 + self.q2)
        if (exact and n != 1) or (not exact and abs(float(n) - 1.0) > 1e-14):
            raise ValueError(f"|q1|^2 + |q2|^2 must be 1, got {n}")

    @classmethod
    def from_q1_norm2(cls, s: float | Fraction, u1: Sequence[float] = (1, 0, 0, 0), u2: Sequence[float] = (1, 0, 0, 0)) -> "ReducedInitialData":
        s = float(s)
        if not 0 <= s <= 1:
            raise ValueError("|q1|^2 must lie in [0, 1]")
        n1 = math.sqrt(sum(x * x for x in u1))
        n2 = math.sqrt(sum(x * x for x in u2))
        a, b = math.sqrt(s), math.sqrt(1 - s)
        return cls(tuple(a * x / n1 for x in u1), tuple(b * x / n2 for x in u2))

    @property
    def norm2_q1(self) -> float:
        return float(sum(x * x for x in self.q1))

    @property
    def norm2_q2(self) -> float:
        return float(sum(x * x for x in self.q2))

    @property
    def rates(self) -> tuple[float, float]:
        s1, s2 = self.norm2_q1, self.norm2_q2
        return 1 - s1 + s2, 1 + s1 - s2

    def phase_point(self) -> PhasePoint:
        return closed_form_reduced(self, 0.0)


def _exp_k(theta: float) -> np.ndarray:
    return math.cos(theta) * np.eye(4) + math.sin(theta) * L_K


def closed_form_reduced(data: ReducedInitialData, t: float) -> PhasePoint:
    a, b = data.rates
    q1 = _exp_k(a * t) @ np.array(data.q1, dtype=float)
    q2 = _exp_k(b * t) @ np.array(data.q2, dtype=float)
    q = np.concatenate([q1, q2])
    xi = np.concatenate([L_K @ q1, L_K @ q2])
    return PhasePoint.from_arrays(q, xi)


def closed_form_derivative(data: ReducedInitialData, t: float) -> tuple[np.ndarray, np.ndarray]:
    a, b = data.rates
    p = closed_form_reduced(data, t)
    q = np.array(p.q)
    q1, q2 = q[:4], q[4:]
    qdot = np.concatenate([a * (L_K @ q1), b * (L_K @ q2)])
    xidot = np.concatenate([L_K @ qdot[:4], L_K @ qdot[4:]])
    return qdot, xidot


def closed_form_residual(data: ReducedInitialData, t: float, kind: StructureKind) -> float:
    """max |d/dt closed form - vector field| at time t."""
    p = closed_form_reduced(data, t)
    qd, xd = closed_form_derivative(data, t)
    fq, fx = hamiltonian_vector_field(kind, p)
    return float(max(np.max(np.abs(qd - fq)), np.max(np.abs(xd - fx))))


def closed_form_track(data: ReducedInitialData, times: np.ndarray) -> np.ndarray:
    return np.array([closed_form_reduced(data, float(t)).array() for t in times])


@dataclass
class PeriodicityReport:
    lambda1: float
    lambda2: float
    ratio: float
    rational: bool
    approximant: tuple | None
    common_period: float | None
    label: str
    tolerance: float
    max_denominator: int

    def to_json(self) -> dict:
        return {
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "ratio": self.ratio,
            "rational_within_tolerance": self.rational,
            "approximant": list(self.approximant) if self.approximant else None,
            "common_period": self.common_period,
            "label": self.label,
            "tolerance": self.tolerance,
            "max_denominator": self.max_denominator,
        }


def continued_fraction_convergents(x: float, max_terms: int = 64):
    h0, h1, k0, k1 = 0, 1, 1, 0
    y = x
    for _ in range(max_terms):
        a = math.floor(y)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield h1, k1
        frac = y - a
        if frac == 0:
            return
        y = 1.0 / frac


def periodicity_diagnostic(data: ReducedInitialData, tolerance: float = 1e-12, max_denominator: int = 10_000) -> PeriodicityReport:
    """Component periods and a continued-fraction rationality test of their ratio."""
    a, b = data.rates
    lam1 = 2 * math.pi / a if a else math.inf
    lam2 = 2 * math.pi / b if b else math.inf
    ratio = lam2 / lam1 if math.isfinite(lam1) and math.isfinite(lam2) else math.nan
    approx = None
    if math.isfinite(ratio):
        for p, q in continued_fraction_convergents(ratio):
            if q > max_denominator:
                break
            if abs(ratio - p / q) <= tolerance * max(1.0, abs(ratio)):
                approx = (p, q)
                break
    if approx is not None:
        p, q = approx
        period = q * lam2
        return PeriodicityReport(lam1, lam2, ratio, True, approx, period, f"periodic (common period T = {period:.17g})",
                                 tolerance, max_denominator)
    return PeriodicityReport(lam1, lam2, ratio, False, None, None, "numerically non-periodic", tolerance, max_denominator)


def max_closed_form_error(traj: Trajectory, data: ReducedInitialData, member: int = 0) -> float:
    ref = closed_form_track(data, traj.times)
    return float(np.max(np.abs(traj.states[:, member, :] - ref)))


def float_gradient_check(kind: StructureKind, points: np.ndarray, cs: CliffordSystem | None = None) -> float:
    """max |vector field - (dH/dxi, -dH/dq)| using the polynomial driving the flow."""
    cs = cs or build_clifford_system()
    fp = dynamic_hamiltonian_poly(kind, cs).to_float()
    model = flow_model(kind, cs)
    g = fp.gradient(points)
    qd, xd = model.vector_field(points[:, :8], points[:, 8:])
    return float(max(np.max(np.abs(qd - g[:, 8:])), np.max(np.abs(xd + g[:, :8]))))


__all__ = [
    "IntegrationError",
    "PeriodicityReport",
    "PhasePoint",
    "ReducedInitialData",
    "SCHEMES",
    "Trajectory",
    "closed_form_reduced",
    "closed_form_residual",
    "dynamic_hamiltonian_poly",
    "float_gradient_check",
    "flow_model",
    "hamiltonian_vector_field",
    "integrate",
    "max_closed_form_error",
    "periodicity_diagnostic",
    "project_to_tangent_bundle",
    "tangent_extension_residual",
]
