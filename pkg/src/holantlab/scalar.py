"""Exact cyclotomic scalars plus the float fallback backend.

The exact backend represents numbers in Q(zeta_N) for N a multiple of 8.
A value is a vector of phi(N) rationals over the power basis
1, zeta, ..., zeta^(phi(N)-1), reduced modulo the N-th cyclotomic
polynomial. Forcing 8 | N keeps the imaginary unit (zeta_N^(N/4)),
sqrt(2) (zeta_8 + zeta_8^-1) and the eighth root of unity available in
every order, which is what the signature algebra needs.

Values of different orders interoperate by embedding both into
Q(zeta_lcm), where zeta_N maps to zeta_M^(M/N).
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterator, Optional, Union

from .errors import BackendMismatch, DomainError

Rational = Union[int, Fraction]

_MAX_ORDER = 1 << 20


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _divisors(n: int) -> Iterator[int]:
    d = 1
    while d * d <= n:
        if n % d == 0:
            yield d
            if d != n // d:
                yield n // d
        d += 1


def _poly_div_exact(num: list[int], den: tuple[int, ...]) -> list[int]:
    """Exact division of integer polynomials (ascending coefficients)."""
    num = list(num)
    deg_d = len(den) - 1
    lead = den[-1]
    out = [0] * (len(num) - deg_d)
    for k in range(len(num) - 1, deg_d - 1, -1):
        c = num[k]
        if c == 0:
            continue
        q, r = divmod(c, lead)
        if r != 0:
            raise ArithmeticError("non-exact polynomial division")
        out[k - deg_d] = q
        for j, dj in enumerate(den):
            num[k - deg_d + j] -= q * dj
    if any(num[: deg_d]) or any(num[deg_d:]):
        # num should be identically zero now
        if any(num):
            raise ArithmeticError("non-exact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, ascending degree."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in sorted(_divisors(n)):
        if d < n:
            poly = _poly_div_exact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _order_tables(n: int) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """(phi(n), rows) where rows[m] = x^m mod Phi_n for m in [0, 2n]."""
    phi_poly = cyclotomic_polynomial(n)
    deg = len(phi_poly) - 1
    rows: list[tuple[int, ...]] = []
    cur = [0] * deg
    cur[0] = 1
    rows.append(tuple(cur))
    for _ in range(2 * n):
        nxt = [0] + cur[: deg - 1] if deg > 1 else [0]
        carry = cur[deg - 1]
        if deg == 1:
            nxt = [0]
            carry = cur[0]
        if carry:
            # x^deg = -(phi_poly without leading term)
            for j in range(deg):
                nxt[j] -= carry * phi_poly[j]
        cur = nxt
        rows.append(tuple(cur))
    return deg, tuple(rows)


def euler_phi(n: int) -> int:
    return _order_tables(n)[0]


_ZERO = Fraction(0)
_ONE = Fraction(1)


class Cyclo:
    """An element of Q(zeta_order), order a multiple of 8.

    Immutable. `coeffs` has length phi(order), entries are Fractions.
    Equality works across orders via embedding; instances are not
    hashable (use Signature.canonical_key for dict/set deduplication).
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: tuple[Fraction, ...]):
        self.order = order
        self.coeffs = coeffs

    # -- constructors ---------------------------------------------------

    @staticmethod
    def from_rational(q: Rational, order: int = 8) -> "Cyclo":
        phi = euler_phi(order)
        c = [_ZERO] * phi
        c[0] = Fraction(q)
        return Cyclo(order, tuple(c))

    @staticmethod
    def root_of_unity(order: int, exponent: int) -> "Cyclo":
        """zeta_order^exponent, lifted so the stored order is a multiple of 8."""
        if order < 1:
            raise DomainError(f"root order must be positive, got {order}")
        lifted = _lcm(order, 8)
        if lifted > _MAX_ORDER:
            raise DomainError(f"cyclotomic order {lifted} exceeds cap {_MAX_ORDER}")
        exponent = (exponent * (lifted // order)) % lifted
        phi, rows = _order_tables(lifted)
        return Cyclo(lifted, tuple(Fraction(v) for v in rows[exponent]))

    @staticmethod
    def zero(order: int = 8) -> "Cyclo":
        return Cyclo.from_rational(0, order)

    @staticmethod
    def one(order: int = 8) -> "Cyclo":
        return Cyclo.from_rational(1, order)

    # -- order handling --------------------------------------------------

    def embed(self, order: int) -> "Cyclo":
        """Re-express in Q(zeta_order); requires self.order | order."""
        if order == self.order:
            return self
        if order % self.order != 0:
            raise DomainError(
                f"cannot embed order {self.order} into non-multiple {order}"
            )
        if order > _MAX_ORDER:
            raise DomainError(f"cyclotomic order {order} exceeds cap {_MAX_ORDER}")
        step = order // self.order
        phi, rows = _order_tables(order)
        out = [_ZERO] * phi
        for k, c in enumerate(self.coeffs):
            if c:
                row = rows[k * step]
                for j, r in enumerate(row):
                    if r:
                        out[j] += c * r
        return Cyclo(order, tuple(out))

    def _common(self, other: "Cyclo") -> tuple["Cyclo", "Cyclo"]:
        if self.order == other.order:
            return self, other
        m = _lcm(self.order, other.order)
        return self.embed(m), other.embed(m)

    @property
    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise DomainError(f"{self!r} is not rational")
        return self.coeffs[0]

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> Optional["Cyclo"]:
        if isinstance(other, Cyclo):
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclo.from_rational(other, 8)
        return None

    def __add__(self, other) -> "Cyclo":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._common(o)
        return Cyclo(a.order, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "Cyclo":
        return Cyclo(self.order, tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "Cyclo":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "Cyclo":
        return (-self) + other

    def __mul__(self, other) -> "Cyclo":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # rational fast paths keep the hot loops cheap
        if o.is_rational:
            q = o.coeffs[0]
            return Cyclo(self.order, tuple(c * q for c in self.coeffs))
        if self.is_rational:
            q = self.coeffs[0]
            return Cyclo(o.order, tuple(c * q for c in o.coeffs))
        a, b = self._common(o)
        phi, rows = _order_tables(a.order)
        acc = [_ZERO] * (2 * phi - 1)
        for k, ck in enumerate(a.coeffs):
            if not ck:
                continue
            for j, cj in enumerate(b.coeffs):
                if cj:
                    acc[k + j] += ck * cj
        out = list(acc[:phi])
        for m in range(phi, 2 * phi - 1):
            c = acc[m]
            if c:
                row = rows[m]
                for j, r in enumerate(row):
                    if r:
                        out[j] += c * r
        return Cyclo(a.order, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "Cyclo":
        """Multiplicative inverse via extended Euclid mod Phi_order."""
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero cyclotomic scalar")
        if self.is_rational:
            return Cyclo.from_rational(1 / self.coeffs[0], self.order)
        phi_poly = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        a = list(self.coeffs)
        # extended gcd of a and phi_poly over Q[x]
        r0, r1 = phi_poly, _trim(a)
        s0, s1 = [_ZERO], [_ONE]
        while _degree(r1) > 0:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, _trim(r)
            s0, s1 = s1, _trim(_poly_sub(s0, _poly_mul(q, s1)))
        if not r1 or r1 == [_ZERO]:
            raise ZeroDivisionError("not invertible (zero divisor?)")
        inv_lead = 1 / r1[0]
        phi = euler_phi(self.order)
        coeffs = [c * inv_lead for c in s1]
        coeffs = coeffs + [_ZERO] * (phi - len(coeffs))
        return Cyclo(self.order, tuple(coeffs[:phi]))

    def __truediv__(self, other) -> "Cyclo":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_rational:
            q = o.coeffs[0]
            if not q:
                raise ZeroDivisionError("division by zero scalar")
            return Cyclo(self.order, tuple(c / q for c in self.coeffs))
        a, b = self._common(o)
        return a * b.inverse()

    def __rtruediv__(self, other) -> "Cyclo":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int) -> "Cyclo":
        if n < 0:
            return self.inverse() ** (-n)
        out = Cyclo.one(self.order)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "Cyclo":
        """Complex conjugate: zeta^k maps to zeta^(order-k)."""
        n = self.order
        phi, rows = _order_tables(n)
        out = [_ZERO] * phi
        for k, c in enumerate(self.coeffs):
            if c:
                row = rows[(n - k) % n]
                for j, r in enumerate(row):
                    if r:
                        out[j] += c * r
        return Cyclo(n, tuple(out))

    def times_i_power(self, k: int) -> "Cyclo":
        """Fast multiply by i^k."""
        k %= 4
        if k == 0:
            return self
        return self * Cyclo.root_of_unity(self.order, (self.order // 4) * k)

    def scale_fraction(self, p, q=1) -> "Cyclo":
        """Multiply by the rational p/q without touching the order."""
        r = Fraction(p, q)
        return Cyclo(self.order, tuple(c * r for c in self.coeffs))

    # -- predicates and views ----------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def is_real(self) -> bool:
        return self.conj() == self

    def norm_squared(self) -> "Cyclo":
        return self * self.conj()

    def approx(self) -> complex:
        base = cmath.exp(2j * cmath.pi / self.order)
        total = 0j
        for k, c in enumerate(self.coeffs):
            if c:
                total += float(c) * base**k
        return total

    def __bool__(self) -> bool:
        return not self.is_zero

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.order == o.order:
            return self.coeffs == o.coeffs
        a, b = self._common(o)
        return a.coeffs == b.coeffs

    __hash__ = None  # type: ignore[assignment]  # use Signature.canonical_key

    def __repr__(self) -> str:
        terms = [
            f"{c}*z{self.order}^{k}" if k else f"{c}"
            for k, c in enumerate(self.coeffs)
            if c
        ]
        return "Cyclo(" + (" + ".join(terms) or "0") + ")"

    def key(self) -> tuple:
        """Hashable canonical key (order plus coefficient tuple)."""
        return (self.order, self.coeffs)


def _trim(p: list[Fraction]) -> list[Fraction]:
    while len(p) > 1 and not p[-1]:
        p.pop()
    return p


def _degree(p: list[Fraction]) -> int:
    return len(_trim(list(p))) - 1 if any(p) else -1


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    a = a + [_ZERO] * (n - len(a))
    b = b + [_ZERO] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def _poly_divmod(
    num: list[Fraction], den: list[Fraction]
) -> tuple[list[Fraction], list[Fraction]]:
    num = list(num)
    den = _trim(list(den))
    dd = len(den) - 1
    if dd < 0:
        raise ZeroDivisionError
    q = [_ZERO] * max(1, len(num) - dd)
    lead = den[-1]
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        if c:
            f = c / lead
            q[k - dd] = f
            for j, dj in enumerate(den):
                num[k - dd + j] -= f * dj
    return q, num[:dd] if dd else [_ZERO]


# -- frequently used constants ------------------------------------------


def i_unit() -> Cyclo:
    return Cyclo.root_of_unity(4, 1)


def sqrt2() -> Cyclo:
    """zeta_8 + zeta_8^-1."""
    return Cyclo.root_of_unity(8, 1) + Cyclo.root_of_unity(8, 7)


def alpha() -> Cyclo:
    """(1+i)/sqrt(2), the primitive eighth root of unity."""
    return Cyclo.root_of_unity(8, 1)


@lru_cache(maxsize=None)
def _squarefree_split(n: int) -> tuple[int, int]:
    """n = square * squarefree; returns (sqrt(square), squarefree)."""
    m, d = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        m *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1
    d *= n
    return m, d


def _sqrt_prime(p: int) -> Cyclo:
    """Exact sqrt(p) for prime p via quadratic Gauss sums."""
    if p == 2:
        return sqrt2()
    g = Cyclo.zero(_lcm(p, 8))
    for t in range(1, p):
        ls = pow(t, (p - 1) // 2, p)  # Legendre symbol, 1 or p-1
        term = Cyclo.root_of_unity(p, t)
        g = g + term if ls == 1 else g - term
    if p % 4 == 1:
        return g
    # for p = 3 mod 4 the Gauss sum equals i*sqrt(p)
    return g * i_unit().inverse()


def sqrt_rational(q: Rational) -> Cyclo:
    """An exact square root of the rational q (principal branch, times i
    for negative q). The resulting order can be large for big squarefree
    parts; callers on hot paths should prefer scalar-free formulations."""
    q = Fraction(q)
    if q == 0:
        return Cyclo.zero()
    negative = q < 0
    if negative:
        q = -q
    # sqrt(a/b) = sqrt(a*b)/b
    n = q.numerator * q.denominator
    m, d = _squarefree_split(n)
    out = Cyclo.from_rational(Fraction(m, q.denominator))
    for p in _prime_factors(d):
        out = out * _sqrt_prime(p)
    if negative:
        out = out * i_unit()
    return out


def _prime_factors(n: int) -> Iterator[int]:
    p = 2
    while p * p <= n:
        if n % p == 0:
            yield p
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        yield n


def root_of_unity_exponent(x: Cyclo) -> Optional[tuple[int, int]]:
    """If x is a root of unity, return (order, k) with x = zeta_order^k.

    In Q(zeta_N) with 8 | N the roots of unity are exactly the powers of
    zeta_N, so a scan over N candidates decides membership.
    """
    n = x.order
    phi, rows = _order_tables(n)
    for k in range(n):
        if all(
            x.coeffs[j] == rows[k][j] for j in range(phi)
        ):
            return n, k
    return None


# -- backends ------------------------------------------------------------


class ExactBackend:
    """Scalar operations over Q(zeta_N). Singleton: EXACT."""

    name = "exact"
    is_exact = True

    def coerce(self, v):
        if isinstance(v, Cyclo):
            return v
        if isinstance(v, (int, Fraction)):
            return Cyclo.from_rational(v)
        if isinstance(v, complex) or isinstance(v, float):
            raise BackendMismatch(
                f"exact backend cannot absorb inexact value {v!r}"
            )
        raise BackendMismatch(f"cannot coerce {type(v).__name__} to exact scalar")

    def zero(self):
        return Cyclo.zero()

    def one(self):
        return Cyclo.one()

    def eq(self, a, b) -> bool:
        return a == b

    def is_zero(self, a) -> bool:
        return a.is_zero

    def is_real(self, a) -> bool:
        return a.is_real

    def conj(self, a):
        return a.conj()

    def div(self, a, b):
        return a / b

    def as_complex(self, a) -> complex:
        return a.approx()

    def scalar_key(self, a):
        return a.key()


class FloatBackend:
    """Complex floats with a global comparison tolerance. Singleton: FLOAT."""

    name = "float"
    is_exact = False

    def coerce(self, v):
        if isinstance(v, Cyclo):
            return v.approx()
        if isinstance(v, (int, float, complex, Fraction)):
            return complex(v)
        raise BackendMismatch(f"cannot coerce {type(v).__name__} to float scalar")

    def zero(self):
        return 0j

    def one(self):
        return 1 + 0j

    @property
    def epsilon(self) -> float:
        from . import config

        return config.get_epsilon()

    def eq(self, a, b) -> bool:
        return abs(a - b) <= self.epsilon

    def is_zero(self, a) -> bool:
        return abs(a) <= self.epsilon

    def is_real(self, a) -> bool:
        return abs(a.imag) <= self.epsilon

    def conj(self, a):
        return a.conjugate()

    def div(self, a, b):
        return a / b

    def as_complex(self, a) -> complex:
        return complex(a)

    def scalar_key(self, a):
        # stable within one run; only used for best-effort dedup
        return (round(a.real, 9), round(a.imag, 9))


EXACT = ExactBackend()
FLOAT = FloatBackend()


def backend_by_name(name: str):
    if name == "exact":
        return EXACT
    if name == "float":
        return FLOAT
    raise DomainError(f"unknown backend {name!r}")
