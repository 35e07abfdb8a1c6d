"""Certify that a polynomial vanishes on the unit tangent bundle {|q|^2 = 1, <q,xi> = 0}.

Three methods, tried in order:

reduction
    Division by (<q,xi>, |q|^2 - 1).  A zero remainder is a proof; a
    nonzero one is inconclusive since the pair is not a Groebner basis.
homogenized-reduction
    If every q-degree of the polynomial has the same parity, pad each
    q-homogeneous part with powers of |q|^2 to a common q-degree.  The result
    agrees with the input on the sphere and is homogeneous in q, so it
    vanishes on the variety iff it is divisible by <q,xi> (irreducible).  The
    single-divisor remainder therefore decides the question both ways.
evaluation
    Exact evaluation at independent random rational points of the variety.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .exact.poly import Poly, inner, q_vars, xi_vars
from .exact.reduce import reduce_modulo
from .sampling import ExactEvaluator, ScaledPoint, random_phase_point

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


def pairing_poly() -> Poly:
    return inner(q_vars(), xi_vars())


def sphere_poly() -> Poly:
    return inner(q_vars(), q_vars()) - 1


def q_norm2() -> Poly:
    return inner(q_vars(), q_vars())


@dataclass
class VarietyCertificate:
    status: str
    method: str
    remainder_terms: int = 0
    points_checked: int = 0
    witness: list[str] | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        out = {"status": self.status, "method": self.method, "remainder_terms": self.remainder_terms}
        if self.points_checked:
            out["points_checked"] = self.points_checked
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def homogenize_q(p: Poly) -> Poly | None:
    parts = p.part_by_q_degree()
    if not parts:
        return p
    degrees = sorted(parts)
    if len({d % 2 for d in degrees}) > 1:
        return None
    top = degrees[-1]
    n2 = q_norm2()
    out = Poly.zero()
    for d, part in parts.items():
        out = out + part * n2 ** ((top - d) // 2)
    return out


def evaluate_on_points(p: Poly, points: list[ScaledPoint]) -> ScaledPoint | None:
    """Returns the first point where p is nonzero, or None."""
    ev = ExactEvaluator(p)
    for pt in points:
        if not ev.is_zero_at(pt):
            return pt
    return None


def certify_on_variety(p: Poly, samples: int = 1000, seed: int = 0, allow_homogenize: bool = True) -> VarietyCertificate:
    if p.is_zero():
        return VarietyCertificate(PASS, "identically-zero")
    _, rem = reduce_modulo(p, [pairing_poly(), sphere_poly()])
    if rem.is_zero():
        return VarietyCertificate(PASS, "reduction")
    notes = [f"two-divisor remainder has {len(rem)} terms (inconclusive)"]
    if allow_homogenize:
        hom = homogenize_q(p)
        if hom is not None:
            _, hrem = reduce_modulo(hom, [pairing_poly()])
            if hrem.is_zero():
                return VarietyCertificate(PASS, "homogenized-reduction", len(rem), notes=notes)
            # decisive negative; find an explicit witness for the report
            rng = random.Random(seed)
            pts = [random_phase_point(rng) for _ in range(50)]
            bad = evaluate_on_points(p, pts)
            witness = [str(x) for x in bad.coords()] if bad is not None else None
            return VarietyCertificate(FAIL, "homogenized-reduction", len(hrem), len(pts), witness, notes)
    rng = random.Random(seed)
    ev = ExactEvaluator(p)
    for n in range(samples):
        pt = random_phase_point(rng)
        if not ev.is_zero_at(pt):
            return VarietyCertificate(FAIL, "evaluation", len(rem), n + 1, [str(x) for x in pt.coords()], notes)
    return VarietyCertificate(PASS, "evaluation", len(rem), samples, notes=notes)


def vanishes_identically(p: Poly) -> bool:
    return p.is_zero()


__all__ = [
    "FAIL",
    "INCONCLUSIVE",
    "PASS",
    "VarietyCertificate",
    "certify_on_variety",
    "evaluate_on_points",
    "homogenize_q",
    "pairing_poly",
    "q_norm2",
    "sphere_poly",
]
