"""Exact arithmetic kernel: rationals, sparse multivariate polynomials,
rational functions and fraction-free linear algebra.

``MPoly`` keeps the canonical variable order and text format; products,
powers, exact division, gcds, cancellation and determinants are delegated to
sympy's sparse polynomial rings over QQ.
"""

import logging
import re
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import Expr, Poly, Rational, Symbol
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing, ring


logger = logging.getLogger(__name__)

Rat = Fraction
Exponents = Tuple[int, ...]
Scalar = Union[int, Fraction]

VARIABLE_ORDER = ("z0", "z1", "z2", "z3", "a")

_NUMBER_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_VARIABLE_RE = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


class PolyError(ValueError):
    pass


class SingularSystemError(PolyError):
    def __init__(self, message: str, determinant: "MPoly") -> None:
        super().__init__(message)
        self.determinant = determinant


class InvariantViolation(AssertionError):
    pass


def _natural_key(name: str) -> tuple:
    parts = re.split(r"(\d+)", name)
    return tuple((0, int(part), "") if part.isdigit() else (1, 0, part) for part in parts if part)


def variable_key(name: str) -> tuple:
    if name in VARIABLE_ORDER:
        return (0, VARIABLE_ORDER.index(name), ())
    return (1, 0, _natural_key(name))


def _order_key(exps: Exponents) -> tuple:
    # graded-lexicographic, earlier declared variables dominate
    return (sum(exps), exps)


def _is_scalar(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


class MPoly:
    """Sparse polynomial with rational coefficients.

    Variables are kept in canonical order (see ``VARIABLE_ORDER``); terms map
    exponent tuples to nonzero ``Fraction`` coefficients. Instances are treated
    as immutable.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, terms: Optional[Mapping[Exponents, Scalar]] = None, variables: Sequence[str] = ()) -> None:
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise PolyError(f"duplicate variables in {variables}")
        canonical = tuple(sorted(variables, key=variable_key))
        clean: Dict[Exponents, Fraction] = {}
        if terms:
            if canonical != variables:
                perm = [variables.index(name) for name in canonical]
            else:
                perm = None
            for exps, coeff in terms.items():
                if len(exps) != len(variables):
                    raise PolyError(f"exponent vector {exps} does not match variables {variables}")
                if any(e < 0 for e in exps):
                    raise PolyError(f"negative exponent in {exps}")
                coeff = Fraction(coeff)
                if coeff == 0:
                    continue
                key = tuple(exps[i] for i in perm) if perm else tuple(exps)
                total = clean.get(key, 0) + coeff
                if total:
                    clean[key] = total
                else:
                    clean.pop(key, None)
        self.variables: Tuple[str, ...] = canonical
        self.terms: Dict[Exponents, Fraction] = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def _raw(cls, terms: Dict[Exponents, Fraction], variables: Tuple[str, ...]) -> "MPoly":
        poly = cls.__new__(cls)
        poly.variables = variables
        poly.terms = terms
        return poly

    @classmethod
    def variable(cls, name: str) -> "MPoly":
        if not _VARIABLE_RE.match(name):
            raise PolyError(f"invalid variable name {name!r}")
        return cls._raw({(1,): Fraction(1)}, (name,))

    @classmethod
    def constant(cls, value: Scalar, variables: Sequence[str] = ()) -> "MPoly":
        variables = tuple(sorted(variables, key=variable_key))
        value = Fraction(value)
        terms = {(0,) * len(variables): value} if value else {}
        return cls._raw(terms, variables)

    @classmethod
    def monomial(cls, exps: Mapping[str, int], coeff: Scalar = 1) -> "MPoly":
        names = tuple(sorted(exps, key=variable_key))
        return cls({tuple(exps[name] for name in names): coeff}, names)

    # -- variable bookkeeping ---------------------------------------------

    def with_variables(self, variables: Sequence[str]) -> "MPoly":
        variables = tuple(variables)
        if variables == self.variables:
            return self
        missing = set(self.variables) - set(variables)
        if missing:
            used = {self.variables[i] for exps in self.terms for i, e in enumerate(exps) if e}
            if missing & used:
                raise PolyError(f"cannot drop variables {sorted(missing & used)} in use")
        index = {name: i for i, name in enumerate(self.variables)}
        picks = [index.get(name) for name in variables]
        terms = {tuple(exps[i] if i is not None else 0 for i in picks): c for exps, c in self.terms.items()}
        return MPoly._raw(terms, variables)

    # -- predicates and accessors -----------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def is_one(self) -> bool:
        return self.is_constant() and self.constant_value() == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise PolyError(f"{self} is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def degree(self, var: Optional[str] = None) -> Optional[int]:
        """Total degree, or degree in ``var``; ``None`` for the zero polynomial."""
        if not self.terms:
            return None
        if var is None:
            return max(sum(exps) for exps in self.terms)
        idx = self._index(var)
        return max(exps[idx] for exps in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(exps) for exps in self.terms}) <= 1

    def leading_term(self) -> Tuple[Exponents, Fraction]:
        if not self.terms:
            raise PolyError("zero polynomial has no leading term")
        exps = max(self.terms, key=_order_key)
        return exps, self.terms[exps]

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1]

    def sorted_terms(self) -> List[Tuple[Exponents, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: _order_key(item[0]), reverse=True)

    def monomial_content(self) -> Exponents:
        if not self.terms:
            return (0,) * len(self.variables)
        return tuple(min(col) for col in zip(*self.terms)) if self.variables else ()

    def coefficient(self, exps: Mapping[str, int]) -> Fraction:
        key = tuple(exps.get(name, 0) for name in self.variables)
        return self.terms.get(key, Fraction(0))

    def _index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise PolyError(f"unknown variable {var!r}; declared {self.variables}") from None

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = _align(self, other)
        terms = dict(a.terms)
        for exps, c in b.terms.items():
            total = terms.get(exps, 0) + c
            if total:
                terms[exps] = total
            else:
                terms.pop(exps, None)
        return MPoly._raw(terms, a.variables)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw({exps: -c for exps, c in self.terms.items()}, self.variables)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            if other == 0:
                return MPoly._raw({}, self.variables)
            factor = Fraction(other)
            return MPoly._raw({exps: c * factor for exps, c in self.terms.items()}, self.variables)
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = _align(self, other)
        if a.is_constant():
            return b * a.constant_value()
        if b.is_constant():
            return a * b.constant_value()
        return from_sympy(to_sympy(a) * to_sympy(b), a.variables)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            raise PolyError("negative exponent")
        if self.is_constant():
            return MPoly.constant(self.constant_value() ** exponent, self.variables)
        return from_sympy(to_sympy(self) ** exponent, self.variables)

    def __truediv__(self, other):
        if _is_scalar(other):
            if other == 0:
                raise ZeroDivisionError("division of polynomial by zero")
            return self * (Fraction(1) / Fraction(other))
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_constant():
            return self / other.constant_value()
        quotient = divides(other, self)
        if quotient is None:
            raise PolyError(f"{other} does not divide {self}")
        return quotient

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = _align(self, other)
        return a.terms == b.terms

    def __hash__(self):
        key = []
        for exps, c in self.terms.items():
            key.append((tuple((v, e) for v, e in zip(self.variables, exps) if e), c))
        return hash(frozenset(key))

    def __bool__(self):
        return bool(self.terms)

    # -- calculus and substitution ----------------------------------------

    def derivative(self, var: str) -> "MPoly":
        return partial_derivative(self, var)

    def substitute(self, mapping: Mapping[str, Union["MPoly", Scalar]]) -> "MPoly":
        """Replace variables by polynomials or scalars; others stay symbolic."""
        for name in mapping:
            self._index(name)
        keep = [name for name in self.variables if name not in mapping]
        result = MPoly.constant(0, keep)
        powers: Dict[Tuple[str, int], MPoly] = {}
        for exps, c in self.terms.items():
            term = MPoly({tuple(exps[self.variables.index(n)] for n in keep): c}, keep)
            for name, e in zip(self.variables, exps):
                if e and name in mapping:
                    if (name, e) not in powers:
                        powers[(name, e)] = _coerce(mapping[name]) ** e
                    term = term * powers[(name, e)]
            result = result + term
        return result

    def evaluate(self, mapping: Mapping[str, Scalar]) -> Fraction:
        return self.substitute(mapping).constant_value()

    def as_univariate(self, var: str) -> Dict[int, "MPoly"]:
        idx = self._index(var)
        buckets: Dict[int, Dict[Exponents, Fraction]] = {}
        for exps, c in self.terms.items():
            stripped = exps[:idx] + (0,) + exps[idx + 1:]
            buckets.setdefault(exps[idx], {})[stripped] = c
        return {k: MPoly._raw(v, self.variables) for k, v in buckets.items()}

    # -- normalization -----------------------------------------------------

    def normalization_factor(self) -> Fraction:
        if not self.terms:
            return Fraction(1)
        denominators = lcm(*(c.denominator for c in self.terms.values()))
        numerators = gcd(*(int(c * denominators) for c in self.terms.values()))
        factor = Fraction(denominators, numerators)
        if self.leading_coefficient() < 0:
            factor = -factor
        return factor

    def normalized(self) -> "MPoly":
        """Integer-primitive form with positive leading coefficient."""
        return self * self.normalization_factor()

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                name if e == 1 else f"{name}^{e}" for name, e in zip(self.variables, exps) if e
            )
            magnitude = abs(c)
            if not mono:
                body = str(magnitude)
            elif magnitude == 1:
                body = mono
            else:
                body = f"{magnitude} * {mono}"
            if not pieces:
                pieces.append(body if c > 0 else f"-{body}")
            else:
                pieces.append(f" + {body}" if c > 0 else f" - {body}")
        return "".join(pieces)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"MPoly({self.to_text()!r})"


Coefficient = Union[MPoly, Fraction, int]


def _coerce(value) -> MPoly:
    if isinstance(value, MPoly):
        return value
    if _is_scalar(value):
        return MPoly.constant(value)
    return NotImplemented


def as_mpoly(value) -> MPoly:
    poly = _coerce(value)
    if poly is NotImplemented:
        raise PolyError(f"cannot interpret {value!r} as a polynomial")
    return poly


def _align(p: MPoly, q: MPoly) -> Tuple[MPoly, MPoly]:
    if p.variables == q.variables:
        return p, q
    union = tuple(sorted(set(p.variables) | set(q.variables), key=variable_key))
    return p.with_variables(union), q.with_variables(union)


def common_variables(polys: Iterable[MPoly]) -> Tuple[str, ...]:
    names = set()
    for poly in polys:
        names.update(poly.variables)
    return tuple(sorted(names, key=variable_key))


# -- sympy bridge ---------------------------------------------------------


@lru_cache(maxsize=256)
def poly_ring(variables: Tuple[str, ...]) -> PolyRing:
    """QQ[variables] in graded-lexicographic order."""
    if not variables:
        raise PolyError("a polynomial ring needs at least one variable")
    R, *_ = ring([Symbol(name) for name in variables], QQ, grlex)
    return R


def _fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def _qq(value: Scalar):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def to_sympy(poly: MPoly) -> PolyElement:
    R = poly_ring(poly.variables)
    return R.from_dict({exps: _qq(c) for exps, c in poly.terms.items()})


def from_sympy(element: PolyElement, variables: Sequence[str]) -> MPoly:
    return MPoly._raw({tuple(exps): _fraction(c) for exps, c in element.items() if c}, tuple(variables))


def to_expr(value) -> Expr:
    if isinstance(value, MPoly):
        if value.variables:
            return to_sympy(value).as_expr()
        value = value.constant_value()
    value = Fraction(value)
    return Rational(value.numerator, value.denominator)


def from_expr(expr: Expr) -> Union[MPoly, Fraction]:
    """Inverse of ``to_expr`` for polynomial expressions with rational coefficients."""
    names = tuple(sorted((str(s) for s in expr.free_symbols), key=variable_key))
    if not names:
        value = Rational(expr)
        return Fraction(int(value.p), int(value.q))
    poly = Poly(expr, *(Symbol(name) for name in names), domain=QQ)
    return MPoly({monom: Fraction(int(c.p), int(c.q)) for monom, c in poly.terms()}, names)


def parse_mpoly(text: str, variables: Sequence[str] = ()) -> MPoly:
    """Parse ``c * z0^e0*z1^e1 + ...`` with ``c`` as ``p/q``."""
    compact = re.sub(r"\s+", "", text)
    if not compact:
        raise PolyError("empty polynomial text")
    chunks = re.findall(r"[+-]?[^+-]+", compact)
    if "".join(chunks) != compact:
        raise PolyError(f"malformed polynomial text {text!r}")
    parsed: List[Tuple[Fraction, Dict[str, int]]] = []
    names = list(variables)
    for chunk in chunks:
        sign = -1 if chunk.startswith("-") else 1
        body = chunk.lstrip("+-")
        coeff = Fraction(sign)
        exps: Dict[str, int] = {}
        for factor in body.split("*"):
            if not factor:
                raise PolyError(f"malformed term {chunk!r}")
            if _NUMBER_RE.match(factor):
                coeff *= Fraction(factor)
                continue
            name, _, power = factor.partition("^")
            if not _VARIABLE_RE.match(name) or (power and not power.isdigit()):
                raise PolyError(f"malformed factor {factor!r}")
            exps[name] = exps.get(name, 0) + (int(power) if power else 1)
            if name not in names:
                names.append(name)
        parsed.append((coeff, exps))
    ordered = tuple(sorted(names, key=variable_key))
    result = MPoly.constant(0, ordered)
    for coeff, exps in parsed:
        result = result + MPoly({tuple(exps.get(n, 0) for n in ordered): coeff}, ordered)
    return result


def poly_arith(p, q, op: str, exponent: Optional[int] = None) -> MPoly:
    p = as_mpoly(p)
    if op == "pow":
        if exponent is None:
            value = as_mpoly(q).constant_value()
            if value.denominator != 1:
                raise PolyError(f"exponent must be an integer, got {value}")
            exponent = int(value)
        return p ** exponent
    q = as_mpoly(q)
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise PolyError(f"unknown operation {op!r}")


def partial_derivative(p: MPoly, var: str) -> MPoly:
    idx = p._index(var)
    terms: Dict[Exponents, Fraction] = {}
    for exps, c in p.terms.items():
        e = exps[idx]
        if e:
            terms[exps[:idx] + (e - 1,) + exps[idx + 1:]] = c * e
    return MPoly._raw(terms, p.variables)


def divides(p, q) -> Optional[MPoly]:
    """Quotient ``r`` with ``q == p * r`` if the division is exact, else ``None``."""
    p, q = _align(as_mpoly(p), as_mpoly(q))
    if p.is_zero():
        raise PolyError("division by the zero polynomial")
    if q.is_zero():
        return MPoly._raw({}, p.variables)
    if p.is_constant():
        return q / p.constant_value()
    # one divisor: zero remainder iff exact
    quotient, remainder = to_sympy(q).div(to_sympy(p))
    if remainder:
        return None
    return from_sympy(quotient, p.variables)


def _exact_quotient(q: MPoly, p: MPoly) -> MPoly:
    if p.is_one():
        return q
    result = divides(p, q)
    if result is None:
        raise InvariantViolation(f"expected exact division of {q} by {p}")
    return result


def gcd_mpoly(p, q) -> MPoly:
    p, q = _align(as_mpoly(p), as_mpoly(q))
    if p.is_zero():
        return q.normalized()
    if q.is_zero():
        return p.normalized()
    if p.is_constant() or q.is_constant():
        return MPoly.constant(1, p.variables)
    return from_sympy(to_sympy(p).gcd(to_sympy(q)), p.variables).normalized()


def lcm_mpoly(p, q) -> MPoly:
    p, q = _align(as_mpoly(p), as_mpoly(q))
    if p.is_zero() or q.is_zero():
        return MPoly.constant(0, p.variables)
    return _exact_quotient(p * q, gcd_mpoly(p, q)).normalized()


def cancel_mpoly(num, den) -> Tuple[MPoly, MPoly]:
    """``(n, d)`` with ``n/d == num/den`` and ``gcd(n, d) == 1``."""
    num, den = _align(as_mpoly(num), as_mpoly(den))
    if num.is_zero() or (num.is_constant() and den.is_constant()):
        return num, den
    n, d = to_sympy(num).cancel(to_sympy(den))
    return from_sympy(n, num.variables), from_sympy(d, num.variables)


# -- rational functions ---------------------------------------------------


class RatFunc:
    """Reduced fraction ``num/den`` with a normalized denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1, reduce: bool = True) -> None:
        num, den = _align(as_mpoly(num), as_mpoly(den))
        if den.is_zero():
            raise PolyError("rational function with zero denominator")
        if num.is_zero():
            den = MPoly.constant(1, den.variables)
        elif reduce and not den.is_constant():
            num, den = cancel_mpoly(num, den)
        factor = den.normalization_factor()
        self.num: MPoly = num * factor
        self.den: MPoly = den * factor

    @classmethod
    def _coerce(cls, value) -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        poly = _coerce(value)
        if poly is NotImplemented:
            return NotImplemented
        return cls(poly)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def degree(self) -> Optional[int]:
        if self.num.is_zero():
            return None
        return self.num.degree() - self.den.degree()

    def is_homogeneous(self) -> bool:
        return self.num.is_homogeneous() and self.den.is_homogeneous()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def __add__(self, other):
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        result = RatFunc.__new__(RatFunc)
        result.num = -self.num
        result.den = self.den
        return result

    def __sub__(self, other):
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, exponent: int):
        if exponent < 0:
            return RatFunc(1) / (self ** -exponent)
        return RatFunc(self.num ** exponent, self.den ** exponent, reduce=False)

    def __eq__(self, other):
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.num.is_zero()

    def __str__(self):
        if self.den.is_one():
            return self.num.to_text()
        return f"({self.num.to_text()})/({self.den.to_text()})"

    def __repr__(self):
        return f"RatFunc({self})"


def is_zero(value) -> bool:
    if isinstance(value, (MPoly, RatFunc)):
        return value.is_zero()
    return value == 0


# -- linear algebra -------------------------------------------------------


def _square_matrix(matrix: Sequence[Sequence]) -> List[List[MPoly]]:
    rows = [list(row) for row in matrix]
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise PolyError(f"matrix is not square: {n} rows, row lengths {[len(r) for r in rows]}")
    polys = [[as_mpoly(x) for x in row] for row in rows]
    variables = common_variables(x for row in polys for x in row)
    return [[x.with_variables(variables) for x in row] for row in polys]


def det_fraction_free(matrix: Sequence[Sequence]) -> MPoly:
    """Determinant by Bareiss elimination over QQ[variables]; every division is exact."""
    a = _square_matrix(matrix)
    n = len(a)
    if n == 0:
        return MPoly.constant(1)
    variables = a[0][0].variables
    if not variables:
        rows = [[_qq(x.constant_value()) for x in row] for row in a]
        return MPoly.constant(_fraction(DomainMatrix(rows, (n, n), QQ).det()))
    R = poly_ring(variables)
    rows = [[to_sympy(x) for x in row] for row in a]
    return from_sympy(DomainMatrix(rows, (n, n), R.to_domain()).det(), variables)


def solve_linear(matrix: Sequence[Sequence], rhs: Sequence) -> List[RatFunc]:
    """Cramer's rule over the polynomial ring; components are gcd-reduced."""
    a = _square_matrix(matrix)
    n = len(a)
    if len(rhs) != n:
        raise PolyError(f"right-hand side has length {len(rhs)}, expected {n}")
    determinant = det_fraction_free(a)
    if determinant.is_zero():
        raise SingularSystemError("singular linear system: determinant vanishes identically", determinant)
    solution = []
    for col in range(n):
        replaced = [row[:col] + [rhs[i]] + row[col + 1:] for i, row in enumerate(a)]
        solution.append(RatFunc(det_fraction_free(replaced), determinant))
    return solution


def rank_rational(rows: Sequence[Sequence[Scalar]]) -> int:
    """Rank of a rational matrix, reduced in sparse form."""
    if not rows or not rows[0]:
        return 0
    shape = (len(rows), len(rows[0]))
    entries = {}
    for i, row in enumerate(rows):
        nonzero = {j: _qq(x) for j, x in enumerate(row) if x}
        if nonzero:
            entries[i] = nonzero
    if not entries:
        return 0
    return DomainMatrix(entries, shape, QQ).rank()
