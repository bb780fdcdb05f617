"""Cohomology of a surface X and of its Semple tower X1, X2.

Classes on X keep only the components that pair algebraically: a constant,
a divisor class in the Picard basis and a number on the point class. Classes
on X2 are polynomials in u1, u2 with such coefficients, reduced by

    u1^2 = -c1 u1 - c2
    u2^2 = -c1(V1) u2 - c2(V1),  c1(V1) = c1 + u1,  c2(V1) = 2 c2 + c1 u1

and truncated above complex dimension 4.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from shared.polyalg import Coefficient, InvariantViolation, MPoly, is_zero
from shared.schemas import SurfaceDocument


logger = logging.getLogger(__name__)

X2_DIMENSION = 4

TABLE_MONOMIALS: Tuple[Tuple[str, int, int, bool], ...] = (
    ("u1^4", 4, 0, False),
    ("u1^3*u2", 3, 1, False),
    ("u1^2*u2^2", 2, 2, False),
    ("u1*u2^3", 1, 3, False),
    ("u2^4", 0, 4, False),
    ("u1^3*F", 3, 0, True),
    ("u1^2*u2*F", 2, 1, True),
    ("u1*u2^2*F", 1, 2, True),
    ("u2^3*F", 0, 3, True),
)


class SurfaceError(ValueError):
    pass


def simplify(value) -> Coefficient:
    """Collapse constant polynomials to ``Fraction`` so numeric surfaces stay numeric."""
    if isinstance(value, MPoly):
        return value.constant_value() if value.is_constant() else value
    if isinstance(value, int):
        return Fraction(value)
    return value


def _dot(xs: Sequence[Coefficient], ys: Sequence[Coefficient]) -> Coefficient:
    total: Coefficient = Fraction(0)
    for x, y in zip(xs, ys):
        if not is_zero(x) and not is_zero(y):
            total = total + x * y
    return simplify(total)


@dataclass(frozen=True)
class SurfaceData:
    c1sq: Coefficient
    c2: Coefficient
    pic_basis: Tuple[str, ...]
    pic_form: Tuple[Tuple[Coefficient, ...], ...]
    c1_coords: Tuple[Coefficient, ...]
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        basis = tuple(self.pic_basis)
        form = tuple(tuple(simplify(x) for x in row) for row in self.pic_form)
        coords = tuple(simplify(x) for x in self.c1_coords)
        object.__setattr__(self, "c1sq", simplify(self.c1sq))
        object.__setattr__(self, "c2", simplify(self.c2))
        object.__setattr__(self, "pic_basis", basis)
        object.__setattr__(self, "pic_form", form)
        object.__setattr__(self, "c1_coords", coords)
        n = len(basis)
        if n == 0:
            raise SurfaceError("pic_basis must not be empty")
        if len(set(basis)) != n:
            raise SurfaceError(f"duplicate names in pic_basis {basis}")
        if len(form) != n or any(len(row) != n for row in form):
            raise SurfaceError(f"pic_form must be {n}x{n}")
        if len(coords) != n:
            raise SurfaceError(f"c1_coords must have {n} entries")
        for i in range(n):
            for j in range(i + 1, n):
                if not is_zero(form[i][j] - form[j][i]):
                    raise SurfaceError(f"pic_form is not symmetric at ({i}, {j})")
        if not is_zero(self.pair(coords, coords) - self.c1sq):
            raise SurfaceError(f"c1_coords give c1^2 = {self.pair(coords, coords)}, expected {self.c1sq}")

    @property
    def rank(self) -> int:
        return len(self.pic_basis)

    def pair(self, x: Sequence[Coefficient], y: Sequence[Coefficient]) -> Coefficient:
        return _dot(x, [_dot(row, y) for row in self.pic_form])

    def is_integral(self) -> bool:
        values = [self.c1sq, self.c2, *self.c1_coords, *(x for row in self.pic_form for x in row)]
        return all(isinstance(v, Fraction) and v.denominator == 1 for v in values)

    # -- classes on X ------------------------------------------------------

    def zero_coords(self) -> Tuple[Fraction, ...]:
        return (Fraction(0),) * self.rank

    def unit(self) -> "CohClass":
        return CohClass(Fraction(1), self.zero_coords(), Fraction(0), self)

    def divisor(self, coords: Sequence[Coefficient]) -> "CohClass":
        if len(coords) != self.rank:
            raise SurfaceError(f"divisor needs {self.rank} coordinates, got {len(coords)}")
        return CohClass(Fraction(0), tuple(coords), Fraction(0), self)

    def divisor_named(self, name: str) -> "CohClass":
        if name not in self.pic_basis:
            raise SurfaceError(f"unknown divisor {name!r}; basis is {self.pic_basis}")
        coords = [Fraction(1) if b == name else Fraction(0) for b in self.pic_basis]
        return self.divisor(coords)

    def default_divisor(self) -> "CohClass":
        name = "F" if "F" in self.pic_basis else self.pic_basis[0]
        return self.divisor_named(name)

    def point(self, value: Coefficient) -> "CohClass":
        return CohClass(Fraction(0), self.zero_coords(), value, self)

    def c1_class(self) -> "CohClass":
        return self.divisor(self.c1_coords)

    def canonical_class(self) -> "CohClass":
        return -self.c1_class()

    def c2_class(self) -> "CohClass":
        return self.point(self.c2)


@dataclass(frozen=True)
class CohClass:
    h0: Coefficient
    h2: Tuple[Coefficient, ...]
    h4: Coefficient
    surface: SurfaceData = field(compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "h0", simplify(self.h0))
        object.__setattr__(self, "h2", tuple(simplify(x) for x in self.h2))
        object.__setattr__(self, "h4", simplify(self.h4))

    def is_zero(self) -> bool:
        return is_zero(self.h0) and all(is_zero(x) for x in self.h2) and is_zero(self.h4)

    def truncate(self, top: int) -> "CohClass":
        """Drop components of complex degree above ``top``."""
        if top >= 2:
            return self
        zero = self.surface.zero_coords()
        if top == 1:
            return CohClass(self.h0, self.h2, Fraction(0), self.surface)
        if top == 0:
            return CohClass(self.h0, zero, Fraction(0), self.surface)
        return CohClass(Fraction(0), zero, Fraction(0), self.surface)

    def dot(self, other: "CohClass") -> Coefficient:
        """Intersection number of the divisor parts."""
        return self.surface.pair(self.h2, other.h2)

    def __add__(self, other: "CohClass") -> "CohClass":
        if not isinstance(other, CohClass):
            return NotImplemented
        return CohClass(
            self.h0 + other.h0,
            tuple(x + y for x, y in zip(self.h2, other.h2)),
            self.h4 + other.h4,
            self.surface,
        )

    def __neg__(self) -> "CohClass":
        return CohClass(-self.h0, tuple(-x for x in self.h2), -self.h4, self.surface)

    def __sub__(self, other: "CohClass") -> "CohClass":
        if not isinstance(other, CohClass):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "CohClass":
        if isinstance(other, CohClass):
            h0 = self.h0 * other.h0
            h2 = tuple(self.h0 * y + other.h0 * x for x, y in zip(self.h2, other.h2))
            h4 = self.h0 * other.h4 + other.h0 * self.h4 + self.dot(other)
            return CohClass(h0, h2, h4, self.surface)
        if isinstance(other, (int, Fraction, MPoly)):
            return CohClass(self.h0 * other, tuple(x * other for x in self.h2), self.h4 * other, self.surface)
        return NotImplemented

    __rmul__ = __mul__


Monomial = Tuple[int, int]


@dataclass(frozen=True)
class SempleClass:
    """Sum of ``coefficient * u1^e1 * u2^e2`` over X2, canonical term order."""

    terms: Tuple[Tuple[Monomial, CohClass], ...]
    surface: SurfaceData = field(compare=False, repr=False)

    @classmethod
    def from_dict(cls, surface: SurfaceData, mapping: Mapping[Monomial, CohClass]) -> "SempleClass":
        kept = []
        for (e1, e2), coeff in mapping.items():
            if e1 < 0 or e2 < 0:
                raise SurfaceError(f"negative exponent in u1^{e1} u2^{e2}")
            coeff = coeff.truncate(X2_DIMENSION - e1 - e2)
            if not coeff.is_zero():
                kept.append(((e1, e2), coeff))
        return cls(tuple(sorted(kept, key=lambda item: item[0])), surface)

    @classmethod
    def pullback(cls, coh: CohClass) -> "SempleClass":
        return cls.from_dict(coh.surface, {(0, 0): coh})

    @classmethod
    def u(cls, surface: SurfaceData, e1: int, e2: int, coeff: Optional[CohClass] = None) -> "SempleClass":
        return cls.from_dict(surface, {(e1, e2): coeff if coeff is not None else surface.unit()})

    def as_dict(self) -> Dict[Monomial, CohClass]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other) -> "SempleClass":
        other = _as_semple(other, self.surface)
        if other is NotImplemented:
            return NotImplemented
        merged = self.as_dict()
        for mono, coeff in other.terms:
            merged[mono] = merged[mono] + coeff if mono in merged else coeff
        return SempleClass.from_dict(self.surface, merged)

    __radd__ = __add__

    def __neg__(self) -> "SempleClass":
        return SempleClass(tuple((mono, -coeff) for mono, coeff in self.terms), self.surface)

    def __sub__(self, other) -> "SempleClass":
        other = _as_semple(other, self.surface)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "SempleClass":
        other = _as_semple(other, self.surface)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "SempleClass":
        if isinstance(other, (int, Fraction, MPoly)):
            return SempleClass.from_dict(self.surface, {mono: coeff * other for mono, coeff in self.terms})
        other = _as_semple(other, self.surface)
        if other is NotImplemented:
            return NotImplemented
        product: Dict[Monomial, CohClass] = {}
        for (a1, a2), ca in self.terms:
            for (b1, b2), cb in other.terms:
                mono = (a1 + b1, a2 + b2)
                if sum(mono) > X2_DIMENSION:
                    continue
                coeff = (ca * cb).truncate(X2_DIMENSION - sum(mono))
                product[mono] = product[mono] + coeff if mono in product else coeff
        return SempleClass.from_dict(self.surface, product)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "SempleClass":
        if exponent < 0:
            raise SurfaceError("negative power of a cohomology class")
        result = SempleClass.pullback(self.surface.unit())
        for _ in range(exponent):
            result = result * self
        return result


def _as_semple(value, surface: SurfaceData):
    if isinstance(value, SempleClass):
        return value
    if isinstance(value, CohClass):
        return SempleClass.pullback(value)
    if isinstance(value, (int, Fraction, MPoly)):
        return SempleClass.pullback(surface.unit() * value)
    return NotImplemented


def u1(surface: SurfaceData) -> SempleClass:
    return SempleClass.u(surface, 1, 0)


def u2(surface: SurfaceData) -> SempleClass:
    return SempleClass.u(surface, 0, 1)


def chern_classes_v1(surface: SurfaceData) -> Tuple[SempleClass, SempleClass]:
    """Chern classes of V1 on X1: (c1 + u1, 2 c2 + c1 u1)."""
    c1 = SempleClass.pullback(surface.c1_class())
    c2 = SempleClass.pullback(surface.c2_class())
    return c1 + u1(surface), c2 * 2 + c1 * u1(surface)


def reduce(c: SempleClass, surface: Optional[SurfaceData] = None) -> SempleClass:
    """Normal form with u1 and u2 exponents at most one."""
    surface = surface or c.surface
    c1 = surface.c1_class()
    c2 = surface.c2_class()
    pending: List[Tuple[Monomial, CohClass]] = list(c.terms)
    result: Dict[Monomial, CohClass] = {}
    while pending:
        (e1, e2), coeff = pending.pop()
        coeff = coeff.truncate(X2_DIMENSION - e1 - e2)
        if coeff.is_zero():
            continue
        if e2 >= 2:
            pending.extend(
                [
                    ((e1, e2 - 1), -(coeff * c1)),
                    ((e1 + 1, e2 - 1), -coeff),
                    ((e1, e2 - 2), -(coeff * c2) * 2),
                    ((e1 + 1, e2 - 2), -(coeff * c1)),
                ]
            )
        elif e1 >= 2:
            pending.extend([((e1 - 1, e2), -(coeff * c1)), ((e1 - 2, e2), -(coeff * c2))])
        else:
            key = (e1, e2)
            result[key] = result[key] + coeff if key in result else coeff
    return SempleClass.from_dict(surface, result)


def integrate(c: SempleClass, level: int, surface: Optional[SurfaceData] = None) -> Coefficient:
    """Degree of the top-dimensional part of ``c`` on X (0), X1 (1) or X2 (2)."""
    if level not in (0, 1, 2):
        raise SurfaceError(f"level must be 0, 1 or 2, got {level}")
    surface = surface or c.surface
    normal = reduce(c, surface).as_dict()
    if level < 2 and any(e2 for (_, e2) in normal):
        raise SurfaceError("class involves u2 and does not live on X1")
    if level == 0 and any(e1 for (e1, _) in normal):
        raise SurfaceError("class involves u1 and does not live on X")
    top = {0: (0, 0), 1: (1, 0), 2: (1, 1)}[level]
    coeff = normal.get(top)
    return coeff.h4 if coeff is not None else Fraction(0)


def intersection_table_x2(surface: SurfaceData, F: Optional[CohClass] = None) -> Dict[str, Coefficient]:
    F = F if F is not None else surface.default_divisor()
    table: Dict[str, Coefficient] = {}
    for name, e1, e2, with_f in TABLE_MONOMIALS:
        coeff = F if with_f else surface.unit()
        table[name] = integrate(SempleClass.u(surface, e1, e2, coeff), 2, surface)
    return table


def _check_closed_form(name: str, ring_value: Coefficient, closed: Coefficient) -> Coefficient:
    if not is_zero(simplify(ring_value - closed)):
        raise InvariantViolation(f"{name}: ring reduction gives {ring_value}, closed form gives {closed}")
    return simplify(closed)


def miyaoka_numbers(surface: SurfaceData, m: int, F: CohClass) -> Tuple[Coefficient, Coefficient]:
    """((u|Z)^2, u|Z . pi*K_X) for Z ~ m u - pi*F on X1."""
    if m < 1:
        raise SurfaceError(f"m must be >= 1, got {m}")
    u = u1(surface)
    z = u * m - F
    c1F = surface.c1_class().dot(F)
    self_intersection = _check_closed_form(
        "(u|Z)^2", integrate(u * u * z, 1, surface), m * (surface.c1sq - surface.c2) + c1F
    )
    canonical = _check_closed_form(
        "u|Z.K", integrate(u * z * surface.canonical_class(), 1, surface), m * surface.c1sq + c1F
    )
    return self_intersection, canonical


def divisor_class_z(surface: SurfaceData, a1: int, a2: int, F: CohClass) -> SempleClass:
    return u1(surface) * a1 + u2(surface) * a2 - F


def weighted_cube_number(surface: SurfaceData, a1: int, a2: int, F: CohClass) -> Coefficient:
    """(2u1 + u2)^3 . (a1 u1 + a2 u2 - pi*F) on X2."""
    h = u1(surface) * 2 + u2(surface)
    ring_value = integrate(h ** 3 * divisor_class_z(surface, a1, a2, F), 2, surface)
    closed = (a1 + a2) * (13 * surface.c1sq - 9 * surface.c2) + 12 * surface.c1_class().dot(F)
    return _check_closed_form("weighted cube number", ring_value, closed)


def lifted_foliation_number(
    surface: SurfaceData,
    m: int,
    F: CohClass,
    g1_u1: Coefficient = Fraction(0),
    g1_c1: Coefficient = Fraction(0),
) -> Coefficient:
    """(2u1 + u2)^2 . {Z~} for the lift of a multi-foliation of degree m.

    The unknown correction G1 enters only through the numbers u1.G1 and c1.G1.
    """
    if m < 1:
        raise SurfaceError(f"m must be >= 1, got {m}")
    c1sq, c2 = surface.c1sq, surface.c2
    c1F = surface.c1_class().dot(F)
    closed = (
        m * m * (4 * c1sq - 3 * c2)
        + m * (5 * c1sq - 3 * c2)
        + (8 * m + 4) * c1F
        + 3 * F.dot(F)
        - (3 * g1_u1 - g1_c1)
    )
    if is_zero(g1_u1) and is_zero(g1_c1):
        h = u1(surface) * 2 + u2(surface)
        z_class = (u1(surface) * m - F) * (u2(surface) + u1(surface) * m - F)
        return _check_closed_form("lifted foliation number", integrate(h * h * z_class, 2, surface), closed)
    return simplify(closed)


@dataclass(frozen=True)
class WeightedBundleFlags:
    rel_effective: bool
    rel_big: bool
    rel_nef: bool
    rel_ample: bool


def weighted_bundle_classify(a1: int, a2: int) -> WeightedBundleFlags:
    return WeightedBundleFlags(
        rel_effective=a1 + a2 >= 0 and a2 >= 0,
        rel_big=a1 + a2 > 0 and a2 > 0,
        rel_nef=a1 >= 2 * a2 >= 0,
        rel_ample=a1 > 2 * a2 > 0,
    )


def direct_image_splitting(a1: int, a2: int) -> List[int]:
    """Splitting type of the direct image of O(a1, a2) on a fibre of X1 -> X."""
    if a2 < 0:
        raise SurfaceError(f"a2 must be >= 0, got {a2}")
    return [a1 + a2 - 3 * j for j in range(a2 + 1)]


def direct_image_in_e2m(a1: int, a2: int) -> Tuple[bool, bool]:
    """(injects into E_{2,m}T*, injection is an isomorphism) for m = a1 + a2."""
    injects = a1 + a2 >= 0
    return injects, injects and a1 - 2 * a2 <= 0


def admissible_horizontal_divisor(a1: int, a2: int) -> bool:
    return a1 >= 2 * a2 >= 0


def semple_dims(n: int, r: int, k: int) -> Tuple[int, int]:
    if n < 1 or not 1 <= r <= n or k < 0:
        raise SurfaceError(f"need n >= 1, 1 <= r <= n, k >= 0; got n={n}, r={r}, k={k}")
    return r, n + k * (r - 1)


def symbolic_surface() -> SurfaceData:
    """Surface with Chern numbers and the pairing on span(c1, F) kept as symbols."""
    c1sq = MPoly.variable("c1sq")
    c1F = MPoly.variable("c1F")
    FF = MPoly.variable("FF")
    return SurfaceData(
        c1sq=c1sq,
        c2=MPoly.variable("c2"),
        pic_basis=("c1", "F"),
        pic_form=((c1sq, c1F), (c1F, FF)),
        c1_coords=(Fraction(1), Fraction(0)),
        label="symbolic",
    )


def surface_from_document(doc: SurfaceDocument, label: str = "") -> SurfaceData:
    return SurfaceData(
        c1sq=Fraction(str(doc.c1sq)),
        c2=Fraction(str(doc.c2)),
        pic_basis=tuple(doc.pic_basis),
        pic_form=tuple(tuple(Fraction(str(x)) for x in row) for row in doc.pic_form),
        c1_coords=tuple(Fraction(str(x)) for x in doc.c1_coords),
        label=label,
    )


def load_surface(path: Union[str, Path]) -> SurfaceData:
    path = Path(path)
    try:
        doc = SurfaceDocument.model_validate_json(path.read_text())
    except OSError as exc:
        raise SurfaceError(f"cannot read surface file {path}: {exc}") from exc
    except ValueError as exc:
        raise SurfaceError(f"invalid surface document {path}: {exc}") from exc
    logger.info("loaded surface document", extra={"command": "load_surface"})
    return surface_from_document(doc, label=path.stem)
