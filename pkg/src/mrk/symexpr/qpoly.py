"""Dense univariate polynomials over Q and rational functions of one parameter.

Coefficient lists are stored low degree first, e.g. ``(1, 0, 3)`` is ``1 + 3x^2``.
The rational functions are used as symbolic exponents such as ``m - 1`` or
``2/(m + 2)`` where ``m`` is a declared integer parameter.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence


def _trim(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(Fraction(c) for c in coeffs[:n])


class QPoly:
    """Polynomial with rational coefficients; the zero polynomial has no coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        self.coeffs = _trim([Fraction(c) for c in coeffs])

    @classmethod
    def const(cls, c) -> QPoly:
        return cls([c])

    @classmethod
    def x(cls) -> QPoly:
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    def const_value(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, QPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"QPoly({[str(c) for c in self.coeffs]})"

    def __add__(self, other: QPoly) -> QPoly:
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return QPoly(out)

    def __neg__(self) -> QPoly:
        return QPoly([-c for c in self.coeffs])

    def __sub__(self, other: QPoly) -> QPoly:
        return self + (-other)

    def __mul__(self, other) -> QPoly:
        if not isinstance(other, QPoly):
            return QPoly([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return QPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return QPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> QPoly:
        result = QPoly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: QPoly) -> tuple[QPoly, QPoly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - dq - 1, -1, -1):
            c = rem[k + dq] / other.lead
            quot[k] = c
            for j, b in enumerate(other.coeffs):
                rem[k + j] -= c * b
        return QPoly(quot), QPoly(rem[:dq] if dq > 0 else [])

    def monic(self) -> QPoly:
        if self.is_zero():
            return self
        return self * (1 / self.lead)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift(self, a) -> QPoly:
        """Return p(x + a)."""
        out = QPoly()
        xa = QPoly([a, 1])
        for c in reversed(self.coeffs):
            out = out * xa + QPoly([c])
        return out

    def derivative(self) -> QPoly:
        return QPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def sqrt(self) -> QPoly | None:
        """Exact square root with positive leading coefficient, or None."""
        if self.is_zero():
            return QPoly()
        if self.degree % 2:
            return None
        lead_root = rational_sqrt(self.lead)
        if lead_root is None:
            return None
        # Coefficients of the root, highest first, from matching the top half.
        half = self.degree // 2
        root = [Fraction(0)] * (half + 1)
        root[half] = lead_root
        for k in range(half - 1, -1, -1):
            # coefficient of x^(half + k) in root^2
            acc = self.coeffs[half + k]
            for i in range(k + 1, half):
                j = half + k - i
                if k < j <= half:
                    acc -= root[i] * root[j]
            root[k] = acc / (2 * lead_root)
        cand = QPoly(root)
        return cand if cand * cand == self else None


def gcd(a: QPoly, b: QPoly) -> QPoly:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


def rational_sqrt(q: Fraction) -> Fraction | None:
    q = Fraction(q)
    if q < 0:
        return None
    n, d = isqrt(q.numerator), isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def _divisors(n: int) -> list[int]:
    from .expr import factor_int

    divs = [1]
    for p, k in factor_int(abs(n)).items():
        divs = [d * p**i for d in divs for i in range(k + 1)]
    return divs


def primitive_part(p: QPoly) -> tuple[Fraction, list[int]]:
    """(content, integer coefficients) with p = content * prim and prim primitive, lead > 0."""
    from math import gcd as igcd, lcm

    if p.is_zero():
        return Fraction(0), []
    den = lcm(*[c.denominator for c in p.coeffs])
    ints = [int(c * den) for c in p.coeffs]
    g = 0
    for c in ints:
        g = igcd(g, c)
    if ints[-1] < 0:
        g = -g
    return Fraction(g, den), [c // g for c in ints]


def factor_linear(p: QPoly) -> tuple[Fraction, list[tuple[QPoly, int]], QPoly]:
    """Split off rational roots: p = content * prod(f_i^k_i) * rest.

    Each f_i is a primitive integer linear polynomial with positive leading
    coefficient; ``rest`` is primitive with no rational roots.
    """
    content, ints = primitive_part(p)
    if not ints:
        return content, [], QPoly()
    rest = QPoly(ints)
    factors: list[tuple[QPoly, int]] = []
    while rest.degree >= 1:
        if rest.coeffs[0] == 0:
            root = Fraction(0)
        else:
            root = None
            a0, an = int(rest.coeffs[0]), int(rest.lead)
            for num in _divisors(a0):
                for den in _divisors(an):
                    for cand in (Fraction(num, den), Fraction(-num, den)):
                        if rest(cand) == 0:
                            root = cand
                            break
                    if root is not None:
                        break
                if root is not None:
                    break
            if root is None:
                break
        lin = QPoly([-root.numerator, root.denominator])
        k = 0
        while rest.degree >= 1 and rest(root) == 0:
            rest = rest.divmod(lin)[0]
            k += 1
        factors.append((lin, k))
    c2, ints2 = primitive_part(rest)
    return content * c2, factors, QPoly(ints2)


@dataclass(frozen=True)
class Param:
    """A declared parameter that may appear in exponents.

    ``minimum`` is an inclusive lower bound used to decide exponent signs.
    """

    name: str
    integer: bool = False
    minimum: Fraction | None = None


class ParamExponent:
    """Reduced rational function num(m)/den(m) of one parameter, den monic.

    Construct through :func:`make_exponent`, which collapses constants to
    :class:`Fraction`.
    """

    __slots__ = ("param", "num", "den", "_hash")

    def __init__(self, param: Param, num: QPoly, den: QPoly):
        self.param = param
        self.num = num
        self.den = den
        self._hash = hash((param.name, num, den))

    def __eq__(self, other):
        if isinstance(other, ParamExponent):
            return (self.param.name, self.num, self.den) == (other.param.name, other.num, other.den)
        return False

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"ParamExponent({self.param.name}: {self.num.coeffs}/{self.den.coeffs})"

    def _parts(self, other):
        if isinstance(other, ParamExponent):
            if other.param.name != self.param.name:
                raise ValueError(
                    f"exponents in two parameters ({self.param.name}, {other.param.name}) are not supported"
                )
            return other.num, other.den
        other = Fraction(other)
        return QPoly([other]), QPoly([1])

    def __add__(self, other):
        n, d = self._parts(other)
        return make_exponent(self.param, self.num * d + n * self.den, self.den * d)

    __radd__ = __add__

    def __neg__(self):
        return make_exponent(self.param, -self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        n, d = self._parts(other)
        return make_exponent(self.param, self.num * n, self.den * d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        n, d = self._parts(other)
        return make_exponent(self.param, self.num * d, self.den * n)

    def __rtruediv__(self, other):
        n, d = self._parts(other)
        return make_exponent(self.param, n * self.den, d * self.num)

    def evaluate(self, value) -> Fraction:
        den = self.den(Fraction(value))
        if den == 0:
            raise ZeroDivisionError(f"exponent pole at {self.param.name} = {value}")
        return self.num(Fraction(value)) / den

    def sign(self) -> int | None:
        """+1/-1 if the sign is fixed on the parameter's domain, else None."""
        lo = self.param.minimum
        if lo is None:
            return None
        sn = _sign_on_ray(self.num, lo)
        sd = _sign_on_ray(self.den, lo)
        if sn is None or sd is None:
            return None
        return sn * sd

    def split_integer_part(self) -> tuple[int, ParamExponent | Fraction]:
        """Write self = k + rest with k the integer constant quotient, if any."""
        q, r = self.num.divmod(self.den)
        if q.is_const() and q.const_value().denominator == 1:
            k = int(q.const_value())
            if k:
                return k, make_exponent(self.param, r, self.den)
        return 0, self


def _sign_on_ray(p: QPoly, lo: Fraction) -> int | None:
    # Descartes-style certificate: after x = lo + u every coefficient has one sign.
    shifted = p.shift(lo).coeffs
    if not shifted:
        return None
    if shifted[0] == 0:
        return None
    if all(c >= 0 for c in shifted):
        return 1
    if all(c <= 0 for c in shifted):
        return -1
    return None


Exponent = "Fraction | ParamExponent"


def make_exponent(param: Param, num: QPoly, den: QPoly):
    if den.is_zero():
        raise ZeroDivisionError("exponent with zero denominator")
    if num.is_zero():
        return Fraction(0)
    g = gcd(num, den)
    num = num.divmod(g)[0]
    den = den.divmod(g)[0]
    lead = den.lead
    num, den = num * (1 / lead), den * (1 / lead)
    if den.is_const() and num.is_const():
        return num.const_value() / den.const_value()
    return ParamExponent(param, num, den)


def param_symbol_exponent(param: Param) -> ParamExponent:
    return ParamExponent(param, QPoly.x(), QPoly([1]))


def exponent_sign(e) -> int | None:
    if isinstance(e, ParamExponent):
        return e.sign()
    e = Fraction(e)
    return (e > 0) - (e < 0)


def is_integer_exponent(e) -> bool:
    return not isinstance(e, ParamExponent) and Fraction(e).denominator == 1
