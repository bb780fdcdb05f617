"""Meromorphic connections attached to hypersurface families in P^3, and
section counts for symmetric powers of the cotangent bundle of P^3."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian
from math import comb, prod
from typing import Dict, List, Optional, Sequence, Tuple

from shared.config import get_settings
from shared.polyalg import (
    MPoly,
    RatFunc,
    SingularSystemError,
    det_fraction_free,
    divides,
    lcm_mpoly,
    partial_derivative,
    rank_rational,
    solve_linear,
)


logger = logging.getLogger(__name__)

Z = ("z0", "z1", "z2", "z3")
A = "a"


class FamilyError(ValueError):
    pass


class CapacityError(RuntimeError):
    pass


def z_degrees(poly: MPoly) -> set:
    idx = [i for i, name in enumerate(poly.variables) if name in Z]
    return {sum(exps[i] for i in idx) for exps in poly.terms}


def z_degree(poly: MPoly) -> int:
    degrees = z_degrees(poly)
    if len(degrees) != 1:
        raise FamilyError(f"{poly} is not homogeneous in z")
    return degrees.pop()


@dataclass(frozen=True)
class SurfaceFamily:
    d: int
    s: Tuple[MPoly, MPoly, MPoly, MPoly]
    k: Optional[Tuple[int, int, int, int]] = None

    def __post_init__(self) -> None:
        if len(self.s) != 4:
            raise FamilyError(f"a family needs four sections, got {len(self.s)}")
        names = set(Z)
        for poly in self.s:
            names.update(poly.variables)
        variables = _canonical(names)
        aligned = tuple(poly.with_variables(variables) for poly in self.s)
        for ell, poly in enumerate(aligned):
            if poly.is_zero() or z_degrees(poly) != {self.d}:
                raise FamilyError(f"s_{ell} = {poly} is not homogeneous of degree {self.d} in z")
        object.__setattr__(self, "s", aligned)

    def specialize(self, a_value: Fraction) -> "SurfaceFamily":
        specialized = tuple(poly.substitute({A: a_value}) if A in poly.variables else poly for poly in self.s)
        return SurfaceFamily(self.d, specialized, self.k)


def _canonical(names: Sequence[str]) -> Tuple[str, ...]:
    return tuple(MPoly.constant(0, names).variables)


def fermat_deformation(d: int, k: Sequence[int]) -> SurfaceFamily:
    """s0 = z0^k0 (z0^(d-k0) + a z1^k1 z2^k2 z3^k3), s_i = z_i^d."""
    k = tuple(int(x) for x in k)
    if d < 1:
        raise FamilyError(f"degree must be >= 1, got {d}")
    if len(k) != 4 or min(k) < 0:
        raise FamilyError(f"k must be four non-negative integers, got {k}")
    if sum(k) != d:
        raise FamilyError(f"k = {k} sums to {sum(k)}, expected d = {d}")
    z = [MPoly.variable(name) for name in Z]
    deformation = MPoly.variable(A) * MPoly.monomial({"z1": k[1], "z2": k[2], "z3": k[3]})
    s0 = z[0] ** k[0] * (z[0] ** (d - k[0]) + deformation)
    return SurfaceFamily(d, (s0, z[1] ** d, z[2] ** d, z[3] ** d), k)


def jacobian_matrix(fam: SurfaceFamily) -> List[List[MPoly]]:
    return [[partial_derivative(s, zk) for zk in Z] for s in fam.s]


def jacobian_determinant(fam: SurfaceFamily) -> MPoly:
    return det_fraction_free(jacobian_matrix(fam))


@dataclass(frozen=True)
class Christoffel:
    """gamma[i][j][k] is the symbol Gamma^k_ij."""

    gamma: Tuple[Tuple[Tuple[RatFunc, ...], ...], ...]

    def entry(self, i: int, j: int, k: int) -> RatFunc:
        return self.gamma[i][j][k]

    def entries(self):
        for i, j, k in cartesian(range(4), repeat=3):
            yield (i, j, k), self.gamma[i][j][k]

    def chart(self, indices: Sequence[int] = (1, 2)) -> List[List[List[RatFunc]]]:
        """Formal restriction to the coordinate 2-plane spanned by ``indices``."""
        if len(indices) != 2 or len(set(indices)) != 2:
            raise FamilyError(f"a chart needs two distinct coordinate indices, got {indices}")
        return [[[self.gamma[i][j][k] for k in indices] for j in indices] for i in indices]

    def residuals(self, fam: SurfaceFamily) -> Dict[Tuple[int, int, int], RatFunc]:
        """sum_k Gamma^k_ij ds_l/dz_k - d2 s_l/dz_i dz_j for every ordered (i, j) and l."""
        jac = jacobian_matrix(fam)
        out = {}
        for i, j, ell in cartesian(range(4), repeat=3):
            total = RatFunc(0)
            for k in range(4):
                total = total + self.gamma[i][j][k] * jac[ell][k]
            second = partial_derivative(partial_derivative(fam.s[ell], Z[i]), Z[j])
            out[(i, j, ell)] = total - RatFunc(second)
        return out

    def z_degree_of(self, i: int, j: int, k: int) -> Optional[int]:
        entry = self.gamma[i][j][k]
        if entry.is_zero():
            return None
        return z_degree(entry.num) - z_degree(entry.den)

    def is_homogeneous_of_degree(self, degree: int = -1) -> bool:
        for (i, j, k), entry in self.entries():
            if entry.is_zero():
                continue
            if len(z_degrees(entry.num)) != 1 or len(z_degrees(entry.den)) != 1:
                return False
            if self.z_degree_of(i, j, k) != degree:
                return False
        return True


def solve_connection(fam: SurfaceFamily) -> Christoffel:
    """Solve sum_k Gamma^k_ij ds_l/dz_k = d2 s_l/dz_i dz_j for the ten unordered (i, j)."""
    started = time.perf_counter()
    jac = jacobian_matrix(fam)
    det = det_fraction_free(jac)
    if det.is_zero():
        raise SingularSystemError("Jacobian determinant of the family vanishes identically", det)
    pairs = [(i, j) for i in range(4) for j in range(i, 4)]

    def solve_pair(pair: Tuple[int, int]) -> List[RatFunc]:
        i, j = pair
        rhs = [partial_derivative(partial_derivative(s, Z[i]), Z[j]) for s in fam.s]
        return solve_linear(jac, rhs)

    threads = max(1, get_settings().threads)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            solutions = list(pool.map(solve_pair, pairs))
    else:
        solutions = [solve_pair(pair) for pair in pairs]
    gamma: List[List[List[Optional[RatFunc]]]] = [[[None] * 4 for _ in range(4)] for _ in range(4)]
    for (i, j), solution in zip(pairs, solutions):
        for k in range(4):
            gamma[i][j][k] = solution[k]
            gamma[j][i][k] = solution[k]
    elapsed_ms = int((time.perf_counter() - started) * 1000)
    logger.info("solved connection for d=%s", fam.d, extra={"command": "connection", "elapsed_ms": elapsed_ms})
    return Christoffel(tuple(tuple(tuple(row) for row in plane) for plane in gamma))


def fermat_pole_candidate(d: int, k: Sequence[int]) -> MPoly:
    """d z0^(k1+k2+k3) + a k0 z1^k1 z2^k2 z3^k3."""
    k0, k1, k2, k3 = k
    head = MPoly.monomial({"z0": k1 + k2 + k3}, d)
    tail = MPoly.variable(A) * MPoly.monomial({"z1": k1, "z2": k2, "z3": k3}, k0)
    return head + tail


@dataclass(frozen=True)
class PoleFactor:
    factor: MPoly
    multiplicity: int
    # False for a coordinate hyperplane listed without dividing the common denominator
    from_denominator: bool = True


@dataclass(frozen=True)
class PoleDivisor:
    support: Tuple[PoleFactor, ...]
    total_degree: int
    denominator: MPoly = field(repr=False)
    coordinate_powers: Tuple[int, int, int, int] = (0, 0, 0, 0)
    unmatched: bool = False

    def ratio_to_canonical(self, d: int) -> Fraction:
        """B/K for a degree-d surface, K = (d - 4) h."""
        if d == 4:
            raise FamilyError("K is trivial for d = 4")
        return Fraction(self.total_degree, d - 4)

    def factors(self) -> List[MPoly]:
        return [entry.factor for entry in self.support]

    def denominator_factors(self) -> List[MPoly]:
        return [entry.factor for entry in self.support if entry.from_denominator]


def _is_monomial(poly: MPoly) -> bool:
    return len(poly.terms) == 1


def pole_divisor(gamma: Christoffel, candidates: Sequence[MPoly] = ()) -> PoleDivisor:
    """Pole divisor B of the connection.

    The common denominator of the reduced symbols is split by divisibility:
    coordinate hyperplane powers first, then the caller's candidate factors,
    and whatever is left is kept whole. B is supported on the coordinate
    simplex z0 z1 z2 z3 = 0 together with the non-coordinate factors; a
    coordinate hyperplane absent from the common denominator (z0 when k0 = 1)
    is listed with ``from_denominator=False``, and the powers actually present
    are kept in ``coordinate_powers``.
    """
    denominators = dict.fromkeys(entry.den for _, entry in gamma.entries() if not entry.is_zero())
    common = MPoly.constant(1)
    for den in denominators:
        common = lcm_mpoly(common, den)
    residual = common
    powers = []
    for name in Z:
        power = residual.monomial_content()[residual.variables.index(name)] if name in residual.variables else 0
        powers.append(power)
        if power:
            residual = residual / MPoly.monomial({name: power})
    support = [PoleFactor(MPoly.variable(name), max(power, 1), power > 0) for name, power in zip(Z, powers)]
    for candidate in candidates:
        candidate = candidate.normalized()
        if candidate.is_constant() or _is_monomial(candidate):
            continue
        multiplicity = 0
        while not residual.is_constant():
            quotient = divides(candidate, residual)
            if quotient is None:
                break
            residual = quotient
            multiplicity += 1
        if multiplicity:
            support.append(PoleFactor(candidate, multiplicity))
    unmatched = not residual.is_constant() and z_degree(residual) > 0
    if unmatched:
        logger.warning("pole divisor residual %s matched no candidate; kept whole", residual.normalized())
        support.append(PoleFactor(residual.normalized(), 1))
    total = sum(z_degree(entry.factor) for entry in support)
    return PoleDivisor(tuple(support), total, common, tuple(powers), unmatched)


@dataclass(frozen=True)
class SmoothnessCriterion:
    d: int
    k: Tuple[int, int, int, int]
    lhs_coefficient: int
    rhs: int
    critical_a_power: Fraction
    nonsingular: Optional[bool] = None

    def relation(self) -> str:
        return f"{self.lhs_coefficient} * a^{self.d} = {self.rhs}"


def smoothness_criterion(d: int, k: Sequence[int], a_value: Optional[Fraction] = None) -> SmoothnessCriterion:
    """X_a is singular exactly when a^d prod k_i^k_i = (-d)^d, with 0^0 = 1."""
    k = tuple(int(x) for x in k)
    if len(k) != 4 or min(k) < 0 or sum(k) != d:
        raise FamilyError(f"k = {k} is not a composition of d = {d}")
    lhs = prod(ki ** ki for ki in k)
    rhs = (-d) ** d
    nonsingular = None
    if a_value is not None:
        nonsingular = Fraction(a_value) ** d * lhs != rhs
    return SmoothnessCriterion(d, k, lhs, rhs, Fraction(rhs, lhs), nonsingular)


@dataclass(frozen=True)
class ExclusionBudget:
    d: int
    p: int
    epsilon: int
    t1: Fraction
    half_plus_t1: Fraction
    epsilon_from_t1: Fraction
    epsilon_consistent: bool
    bounds: Dict[int, Fraction]
    uniform_bounds: Dict[int, Fraction]


def nadel_exclusion_budget(d: int) -> ExclusionBudget:
    """Thresholds below which no section of E_{2,m}T*(tK) exists, m = 3, 4, 5."""
    if d < 6:
        raise FamilyError(f"the budget needs d >= 6, got {d}")
    p = (d + 3) // 2
    if not 4 <= p <= d + 4:
        raise FamilyError(f"p = {p} outside [4, d + 4]")
    epsilon = (d + 1) % 2
    t1 = Fraction(p, d - 4) - 1
    half_plus_t1 = Fraction(1, 2) + t1
    epsilon_from_t1 = 2 * (half_plus_t1 * (d - 4) - 3)
    bounds = {
        m: -Fraction(1, 2 * m) + (2 - (3 + Fraction(epsilon, 2)) / m) / (d - 4) for m in (3, 4, 5)
    }
    uniform = {m: -Fraction(1, 2 * m) + (2 - Fraction(7, 2 * m)) / (d - 4) for m in (3, 4, 5)}
    return ExclusionBudget(
        d=d,
        p=p,
        epsilon=epsilon,
        t1=t1,
        half_plus_t1=half_plus_t1,
        epsilon_from_t1=epsilon_from_t1,
        epsilon_consistent=epsilon_from_t1 == epsilon,
        bounds=bounds,
        uniform_bounds=uniform,
    )


def sym_vanishing_bound(m: int, d: int) -> int:
    """Largest k with H^0(X, S^m T*_X (k)) = 0 on a smooth degree-d surface in P^3."""
    return min(2 * m - 1, m - 2 + d)


# -- sections of S^m Omega(k) on P^3 ---------------------------------------


def _compositions(total: int, parts: int = 4):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _bounded_compositions(total: int, bound: Sequence[int]):
    if len(bound) == 1:
        if total <= bound[0]:
            yield (total,)
        return
    for first in range(min(total, bound[0]) + 1):
        for rest in _bounded_compositions(total - first, bound[1:]):
            yield (first,) + rest


@lru_cache(maxsize=4096)
def _block_kernel(delta: Tuple[int, ...], m: int) -> int:
    # unknowns: y-exponents B <= delta with |B| = m; z-exponents are delta - B
    unknowns = list(_bounded_compositions(m, delta))
    if not unknowns:
        return 0
    targets = {b: n for n, b in enumerate(_bounded_compositions(m - 1, delta))}
    images = []
    for b in unknowns:
        row = [0] * len(targets)
        for i in range(4):
            if b[i]:
                image = b[:i] + (b[i] - 1,) + b[i + 1:]
                row[targets[image]] += b[i]
        images.append(row)
    return len(unknowns) - rank_rational(images)


def h0_sym_cotangent_p3(m: int, k: int, max_unknowns: Optional[int] = None) -> int:
    """dim H^0(P^3, S^m Omega(k)) as the kernel of contraction with the Euler field."""
    if m < 0:
        raise FamilyError(f"m must be >= 0, got {m}")
    if k < m:
        return 0
    if m == 0:
        return comb(k + 3, 3)
    cap = max_unknowns if max_unknowns is not None else get_settings().h0_max_unknowns
    unknowns = comb(k - m + 3, 3) * comb(m + 3, 3)
    if unknowns > cap:
        raise CapacityError(f"h0 for (m={m}, k={k}) needs {unknowns} unknowns, cap is {cap}")
    started = time.perf_counter()
    # the contraction preserves the joint multidegree of (z, y); equal up to permutation
    kernel = sum(_block_kernel(tuple(sorted(delta)), m) for delta in _compositions(k))
    logger.debug(
        "h0(S^%d Omega(%d)) = %d",
        m,
        k,
        kernel,
        extra={"command": "h0p3", "elapsed_ms": int((time.perf_counter() - started) * 1000)},
    )
    return kernel
