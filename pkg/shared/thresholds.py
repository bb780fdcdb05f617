"""Jet-threshold bounds and the criteria they feed, decided by exact sign tests."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from shared.chern_ring import SurfaceData
from shared.euler_rr import p3_surface
from shared.polyalg import InvariantViolation, MPoly


logger = logging.getLogger(__name__)

PIC_Z_ASSUMPTION = "Pic(X) = Z for a very generic surface of degree d (Noether-Lefschetz; assumed, not computed)"
VERY_GENERIC_THETA2 = "theta2 >= -1/6 + 1/(2(d-4)) for very generic surfaces (Nadel-type connections; assumed genericity)"
BOGOMOLOV_ASSUMPTION = "Bogomolov vanishing of H^2(S^m T*_X (x) O(t K_X)) (cited, not computed)"
HYPERBOLICITY_ASSUMPTIONS = (
    "entire curves are killed by jet differentials vanishing on an ample divisor (cited, not computed)",
    "horizontal components of the base locus are handled by bigness of O_{X2}(1) (cited, not computed)",
)


class ThresholdError(ValueError):
    pass


@dataclass(frozen=True)
class ThresholdBound:
    kind: str
    lower: Optional[Fraction]
    upper: Optional[Fraction]
    provenance: str
    m: Optional[int] = None

    def __post_init__(self) -> None:
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ThresholdError(f"{self.kind}: lower bound {self.lower} exceeds upper bound {self.upper}")


@dataclass(frozen=True)
class Verdict:
    name: str
    holds: bool
    margin: Fraction
    assumptions: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        # strict inequalities: a zero margin is a failing boundary case
        if self.holds != (self.margin > 0):
            raise InvariantViolation(f"{self.name}: holds={self.holds} but margin={self.margin}")


def _numeric(surface: SurfaceData) -> Tuple[Fraction, Fraction]:
    if isinstance(surface.c1sq, MPoly) or isinstance(surface.c2, MPoly):
        raise ThresholdError("criteria need numeric Chern numbers")
    return surface.c1sq, surface.c2


def _sign_verdict(name: str, margin: Fraction, assumptions: Sequence[str] = ()) -> Verdict:
    margin = Fraction(margin)
    return Verdict(name, margin > 0, margin, tuple(assumptions))


def _require_general_type(d: int) -> None:
    if d <= 4:
        raise ThresholdError(f"degree {d} surfaces are not of general type (need d >= 5)")


# -- threshold bounds -------------------------------------------------------


def theta1_bounds(d: int) -> ThresholdBound:
    _require_general_type(d)
    return ThresholdBound(
        "theta1",
        Fraction(1, d - 4),
        Fraction(2, d - 4),
        "vanishing and sections of S^m T*_X (k) on degree-d surfaces in P^3",
    )


def theta1m_lower(d: int, m: int) -> Fraction:
    _require_general_type(d)
    if m < 1:
        raise ThresholdError(f"m must be >= 1, got {m}")
    return min(Fraction(2), 1 + Fraction(d - 1, m)) / (d - 4)


def theta2m_lower(d: int, m: int) -> Fraction:
    if d < 6:
        raise ThresholdError(f"theta_2,m bounds need d >= 6, got {d}")
    if m not in (3, 4, 5):
        raise ThresholdError(f"theta_2,m bounds exist only for m in {{3, 4, 5}}, got {m}")
    return -Fraction(1, 2 * m) + (2 - Fraction(7, 2 * m)) / (d - 4)


def theta2m_asymptote(m: int) -> Fraction:
    """Limit of theta2m_lower(d, m) as d grows."""
    if m not in (3, 4, 5):
        raise ThresholdError(f"theta_2,m bounds exist only for m in {{3, 4, 5}}, got {m}")
    return -Fraction(1, 2 * m)


def theta2_lower_combination(t23: Fraction, t24: Fraction, t25: Fraction, theta1_low: Fraction) -> Fraction:
    """min(theta_2,3, theta_2,4, theta_2,5, theta1/2 - 1/6)."""
    return min(Fraction(t23), Fraction(t24), Fraction(t25), Fraction(theta1_low) / 2 - Fraction(1, 6))


def theta2_lower_bound(d: int) -> Fraction:
    """Certified lower bound for theta2 on a very generic degree-d surface, d >= 6."""
    bounds = [theta2m_lower(d, m) for m in (3, 4, 5)]
    value = theta2_lower_combination(*bounds, theta1_bounds(d).lower)
    if value != -Fraction(1, 6) + Fraction(1, 2 * (d - 4)):
        raise InvariantViolation(f"theta2 lower bound {value} differs from -1/6 + 1/(2(d-4)) at d = {d}")
    return value


def theta_bounds(d: int) -> List[ThresholdBound]:
    bounds = [theta1_bounds(d)]
    bounds.extend(
        ThresholdBound("theta1m", theta1m_lower(d, m), None, "sections of S^m T*_X (k)", m) for m in (1, 2, 3, 4, 5)
    )
    if d >= 6:
        bounds.extend(
            ThresholdBound("theta2m", theta2m_lower(d, m), None, "uniqueness of Nadel-type partial connections", m)
            for m in (3, 4, 5)
        )
        bounds.append(ThresholdBound("theta2", theta2_lower_bound(d), None, "filtration and discriminant combination"))
    return bounds


# -- Chern number criteria ---------------------------------------------------


def check_gg_existence(surface: SurfaceData) -> Verdict:
    c1sq, c2 = _numeric(surface)
    return _sign_verdict("2-jet differentials exist (theta2 < 0)", 13 * c1sq - 9 * c2, [BOGOMOLOV_ASSUMPTION])


def check_miyaoka(surface: SurfaceData) -> Verdict:
    c1sq, c2 = _numeric(surface)
    return _sign_verdict("1-jet criterion c1^2 - 2c2 > 0", c1sq - 2 * c2)


def check_horizontal_bigness(surface: SurfaceData) -> Verdict:
    """c1^2 - (9/7) c2 > 0, cleared to 7 c1^2 - 9 c2."""
    c1sq, c2 = _numeric(surface)
    return _sign_verdict("horizontal base components are big", 7 * c1sq - 9 * c2)


def check_bogomolov(surface: SurfaceData) -> Verdict:
    c1sq, c2 = _numeric(surface)
    return _sign_verdict("symmetric differentials exist (c1^2 > c2)", c1sq - c2)


def _chern_ratio_verdict(d: int, theta2_low: Fraction, extra: Sequence[str] = ()) -> Verdict:
    surface = p3_surface(d)
    c1sq, c2 = _numeric(surface)
    assumptions = (PIC_Z_ASSUMPTION, VERY_GENERIC_THETA2, *extra)
    gg = check_gg_existence(surface)
    denominator = 13 + 12 * theta2_low
    if not gg.holds:
        return Verdict("chern ratio criterion", False, gg.margin, assumptions + ("13c1^2 - 9c2 <= 0: theta2 < 0 not established",))
    if denominator <= 0:
        return Verdict("chern ratio criterion", False, denominator, assumptions + ("13 + 12 theta2 <= 0: inequality direction undefined",))
    return _sign_verdict("chern ratio criterion", c1sq * denominator - 9 * c2, assumptions)


def check_chern_ratio_criterion(d: int) -> Verdict:
    """c1^2/c2 > 9/(13 + 12 theta2) with theta2 replaced by its certified lower bound."""
    if d < 6:
        raise ThresholdError(f"the chern ratio criterion needs d >= 6, got {d}")
    return _chern_ratio_verdict(d, theta2_lower_bound(d))


# -- multi-foliation criteria ------------------------------------------------


def check_uniform_foliation(surface: SurfaceData) -> Verdict:
    """Both leading quadratics 4c1^2 - 3c2 and 5c1^2 - 3c2 positive."""
    c1sq, c2 = _numeric(surface)
    margin = min(4 * c1sq - 3 * c2, 5 * c1sq - 3 * c2)
    return _sign_verdict("lifted foliation inequality for all m (c1.F > 0, F^2 > 0, G1 = 0)", margin)


@dataclass(frozen=True)
class FoliationVerdicts:
    first_order: Verdict
    lifted: Verdict
    uniform: Verdict


def check_foliation_criterion(
    surface: SurfaceData,
    m: int,
    c1F: Fraction,
    F2: Fraction,
    u1G1: Fraction = Fraction(0),
    c1G1: Fraction = Fraction(0),
) -> FoliationVerdicts:
    if m < 1:
        raise ThresholdError(f"m must be >= 1, got {m}")
    c1sq, c2 = _numeric(surface)
    c1F, F2, u1G1, c1G1 = (Fraction(x) for x in (c1F, F2, u1G1, c1G1))
    first_order = _sign_verdict("multi-foliation first-order inequality", m * (c1sq - c2) + c1F)
    lifted_margin = (
        m * m * (4 * c1sq - 3 * c2)
        + m * (5 * c1sq - 3 * c2)
        + (8 * m + 4) * c1F
        + 3 * F2
        - (3 * u1G1 - c1G1)
    )
    lifted = _sign_verdict(
        "lifted foliation inequality",
        lifted_margin,
        ["G1 contribution supplied as u1.G1 and c1.G1; its size is not computed"],
    )
    return FoliationVerdicts(first_order, lifted, check_uniform_foliation(surface))


def proportionality_vanishes(d: int, m1: int, m2: int, t1: Fraction, t2: Fraction) -> bool:
    """Whether beta1 P2 - beta2 P1 is forced to vanish."""
    if m1 not in (3, 4, 5) or m2 not in (3, 4, 5):
        raise ThresholdError(f"weights must lie in {{3, 4, 5}}, got {m1}, {m2}")
    m = m1 + m2 - 3
    return 1 + Fraction(t1) + Fraction(t2) < m * theta1m_lower(d, m)


def connection_unique(b_over_k: Fraction, theta13: Fraction) -> bool:
    """At most one partial projective connection when B < (1 + 3 theta_1,3)/2 K."""
    return Fraction(b_over_k) < (1 + 3 * Fraction(theta13)) / 2


# -- sweeps and certification -------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    d: int
    c1sq: Fraction
    c2: Fraction
    theta1_lower: Fraction
    theta1_upper: Fraction
    theta2_lower: Fraction
    gg: Verdict
    miyaoka: Verdict
    horizontal_bigness: Verdict
    bogomolov: Verdict
    uniform_foliation: Verdict
    chern_ratio: Verdict
    certified: bool


SWEEP_COLUMNS = (
    "d",
    "c1sq",
    "c2",
    "theta1_lower",
    "theta1_upper",
    "theta2_lower",
    "gg_margin",
    "gg_holds",
    "miyaoka_margin",
    "horizontal_margin",
    "bogomolov_margin",
    "foliation_margin",
    "foliation_holds",
    "chern_ratio_margin",
    "chern_ratio_holds",
    "certified",
)


def sweep_row(d: int) -> SweepRow:
    _require_general_type(d)
    surface = p3_surface(d)
    theta1 = theta1_bounds(d)
    if d >= 6:
        theta2_low = theta2_lower_bound(d)
        chern_ratio = check_chern_ratio_criterion(d)
    else:
        theta2_low = theta2_lower_combination(*([theta1.lower / 2 - Fraction(1, 6)] * 3), theta1.lower)
        chern_ratio = _chern_ratio_verdict(d, theta2_low, ["d < 6: theta_2,m bounds unavailable, value not certified"])
    return SweepRow(
        d=d,
        c1sq=surface.c1sq,
        c2=surface.c2,
        theta1_lower=theta1.lower,
        theta1_upper=theta1.upper,
        theta2_lower=theta2_low,
        gg=check_gg_existence(surface),
        miyaoka=check_miyaoka(surface),
        horizontal_bigness=check_horizontal_bigness(surface),
        bogomolov=check_bogomolov(surface),
        uniform_foliation=check_uniform_foliation(surface),
        chern_ratio=chern_ratio,
        certified=d >= 6,
    )


def row_values(row: SweepRow) -> Dict[str, object]:
    return {
        "d": row.d,
        "c1sq": row.c1sq,
        "c2": row.c2,
        "theta1_lower": row.theta1_lower,
        "theta1_upper": row.theta1_upper,
        "theta2_lower": row.theta2_lower,
        "gg_margin": row.gg.margin,
        "gg_holds": row.gg.holds,
        "miyaoka_margin": row.miyaoka.margin,
        "horizontal_margin": row.horizontal_bigness.margin,
        "bogomolov_margin": row.bogomolov.margin,
        "foliation_margin": row.uniform_foliation.margin,
        "foliation_holds": row.uniform_foliation.holds,
        "chern_ratio_margin": row.chern_ratio.margin,
        "chern_ratio_holds": row.chern_ratio.holds,
        "certified": row.certified,
    }


def validate_sweep_range(dmin: int, dmax: int) -> None:
    if dmin < 5:
        raise ThresholdError(f"dmin must be >= 5, got {dmin}")
    if dmin > dmax:
        raise ThresholdError(f"dmin {dmin} exceeds dmax {dmax}")


def degree_sweep(dmin: int, dmax: int) -> List[SweepRow]:
    validate_sweep_range(dmin, dmax)
    return [sweep_row(d) for d in range(dmin, dmax + 1)]


def cutoffs(rows: Sequence[SweepRow]) -> Dict[str, Optional[int]]:
    """First degree at which each criterion passes."""
    def first(pick) -> Optional[int]:
        return next((row.d for row in rows if pick(row).holds), None)

    return {
        "gg_existence": first(lambda row: row.gg),
        "uniform_foliation": first(lambda row: row.uniform_foliation),
        "chern_ratio": first(lambda row: row.chern_ratio),
    }


@dataclass(frozen=True)
class DegreeCertificate:
    d: int
    c1sq: Fraction
    c2: Fraction
    theta1: ThresholdBound
    theta2m: Dict[int, Fraction]
    theta2_lower: Fraction
    gg: Verdict
    uniform_foliation: Verdict
    chern_ratio: Verdict
    hyperbolic: bool
    assumptions: Tuple[str, ...] = field(default_factory=tuple)


def certify_degree(d: int) -> DegreeCertificate:
    """Full certified record for a very generic degree-d surface, d >= 6."""
    if d < 6:
        raise ThresholdError(f"certification needs d >= 6, got {d}")
    surface = p3_surface(d)
    chern_ratio = check_chern_ratio_criterion(d)
    gg = check_gg_existence(surface)
    assumptions = tuple(dict.fromkeys((*chern_ratio.assumptions, *gg.assumptions, *HYPERBOLICITY_ASSUMPTIONS)))
    certificate = DegreeCertificate(
        d=d,
        c1sq=surface.c1sq,
        c2=surface.c2,
        theta1=theta1_bounds(d),
        theta2m={m: theta2m_lower(d, m) for m in (3, 4, 5)},
        theta2_lower=theta2_lower_bound(d),
        gg=gg,
        uniform_foliation=check_uniform_foliation(surface),
        chern_ratio=chern_ratio,
        hyperbolic=gg.holds and chern_ratio.holds,
        assumptions=assumptions,
    )
    logger.info("certified degree %d: hyperbolic=%s", d, certificate.hyperbolic, extra={"command": "certify"})
    return certificate
