"""Exact scalar arithmetic: Gaussian rationals, multivariate polynomials,
rational functions of the conormal variable with poles restricted to ±i,
the half-plane projection, residue-based line integration, and unit-sphere
monomial moments.

Everything in this module is exact; floats appear only in ``evaluate``
helpers used by the numeric oracles.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Mapping


class DivergentSymbol(ValueError):
    """Raised when a projection/integral is requested for a non-proper symbol."""


class ConditionallyConvergent(ValueError):
    """Raised for degree-gap-1 integrands (not absolutely integrable)."""


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

class GaussianRational:
    """Exact element of Q(i): re + im*i with Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def __add__(self, other):
        other = _as_gr(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gr(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_gr(other) - self

    def __mul__(self, other):
        other = _as_gr(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * _as_gr(other).inverse()

    def __rtruediv__(self, other):
        return _as_gr(other) * self.inverse()

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = GR_ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.re == other and self.im == 0
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(self.re, self.im)

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}*i)"


def _as_gr(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to GaussianRational")


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)


# ---------------------------------------------------------------------------
# Multivariate polynomials over Q(i) in named formal symbols
# ---------------------------------------------------------------------------

Mono = tuple  # tuple[tuple[str, int], ...] sorted by symbol name

_EMPTY: Mono = ()


def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for name, e in b:
        merged[name] = merged.get(name, 0) + e
    return tuple(sorted((n, e) for n, e in merged.items() if e))


class ScalarPoly:
    """Polynomial with GaussianRational coefficients; zero coefficients absent."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Mono, GaussianRational] | None = None, _clean=True):
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = {m: c for m, c in terms.items() if not c.is_zero()}
        else:
            self.terms = dict(terms)

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c) -> "ScalarPoly":
        c = _as_gr(c)
        return cls({} if c.is_zero() else {_EMPTY: c}, _clean=False)

    @classmethod
    def symbol(cls, name: str, exp: int = 1) -> "ScalarPoly":
        return cls({((name, exp),): GR_ONE}, _clean=False)

    @classmethod
    def zero(cls) -> "ScalarPoly":
        return cls({}, _clean=False)

    @classmethod
    def one(cls) -> "ScalarPoly":
        return cls.const(1)

    # -- ring operations ----------------------------------------------------
    def __add__(self, other):
        other = _as_poly(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, GR_ZERO) + c
            if s.is_zero():
                out.pop(m, None)
            else:
                out[m] = s
        return ScalarPoly(out, _clean=False)

    __radd__ = __add__

    def __neg__(self):
        return ScalarPoly({m: -c for m, c in self.terms.items()}, _clean=False)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) + (-self)

    def __mul__(self, other):
        other = _as_poly(other)
        out: dict[Mono, GaussianRational] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, GR_ZERO) + c1 * c2
                if s.is_zero():
                    out.pop(m, None)
                else:
                    out[m] = s
        return ScalarPoly(out, _clean=False)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a nonzero constant (or constant polynomial)."""
        if isinstance(other, ScalarPoly):
            c = other.constant_value()
            if c is None:
                raise ZeroDivisionError("division by non-constant polynomial unsupported")
            other = c
        other = _as_gr(other)
        if other.is_zero():
            raise ZeroDivisionError("division by structurally-zero polynomial")
        inv = other.inverse()
        return ScalarPoly({m: c * inv for m, c in self.terms.items()}, _clean=False)

    def __pow__(self, k: int):
        out = ScalarPoly.one()
        for _ in range(k):
            out = out * self
        return out

    # -- queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self) -> GaussianRational | None:
        """The value if this polynomial is constant, else None."""
        if not self.terms:
            return GR_ZERO
        if len(self.terms) == 1 and _EMPTY in self.terms:
            return self.terms[_EMPTY]
        return None

    def symbols(self) -> set:
        out = set()
        for m in self.terms:
            out.update(name for name, _ in m)
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = ScalarPoly.const(other)
        if not isinstance(other, ScalarPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- calculus and substitution ------------------------------------------
    def derivative(self, name: str) -> "ScalarPoly":
        out: dict[Mono, GaussianRational] = {}
        for m, c in self.terms.items():
            for i, (n, e) in enumerate(m):
                if n == name:
                    newm = m[:i] + ((n, e - 1),) if e > 1 else m[:i] + m[i + 1:]
                    newm = tuple(sorted(newm))
                    s = out.get(newm, GR_ZERO) + c * e
                    if s.is_zero():
                        out.pop(newm, None)
                    else:
                        out[newm] = s
        return ScalarPoly(out, _clean=False)

    def subs(self, name: str, value: "ScalarPoly | GaussianRational | int") -> "ScalarPoly":
        value = _as_poly(value)
        out = ScalarPoly.zero()
        for m, c in self.terms.items():
            piece = ScalarPoly({_EMPTY: c}, _clean=False)
            for n, e in m:
                if n == name:
                    piece = piece * value ** e
                else:
                    piece = piece * ScalarPoly.symbol(n, e)
            out = out + piece
        return out

    def subs_many(self, table: Mapping[str, "ScalarPoly"]) -> "ScalarPoly":
        out = self
        for name, value in table.items():
            out = out.subs(name, value)
        return out

    def evaluate(self, env: Mapping[str, complex]) -> complex:
        total = 0j
        for m, c in self.terms.items():
            v = complex(c)
            for n, e in m:
                v *= env[n] ** e
            total += v
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(f"{n}^{e}" if e > 1 else n for n, e in m)
            bits.append(f"{c!r}*{mono}" if mono else repr(c))
        return " + ".join(bits)


def _as_poly(x) -> ScalarPoly:
    if isinstance(x, ScalarPoly):
        return x
    if isinstance(x, (int, Fraction, GaussianRational)):
        return ScalarPoly.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to ScalarPoly")


def reduce_unit_norm(poly: ScalarPoly, coords: Iterable[str]) -> ScalarPoly:
    """Reduce modulo the cosphere constraint sum(coords^2) = 1.

    Eliminates the square of the last coordinate: c_last^2 -> 1 - sum(others^2).
    """
    coords = list(coords)
    if not coords:
        return poly
    target = coords[-1]
    others = coords[:-1]
    rest = ScalarPoly.one()
    for n in others:
        rest = rest - ScalarPoly.symbol(n, 2)
    out = ScalarPoly.zero()
    for m, c in poly.terms.items():
        piece = ScalarPoly({_EMPTY: c}, _clean=False)
        for n, e in m:
            if n == target and e >= 2:
                piece = piece * rest ** (e // 2)
                if e % 2:
                    piece = piece * ScalarPoly.symbol(target)
            else:
                piece = piece * ScalarPoly.symbol(n, e)
        out = out + piece
    return out


# ---------------------------------------------------------------------------
# Rational functions of xi_n with poles only at +/- i
# ---------------------------------------------------------------------------

class RationalXi:
    """num(xi) / ((xi - i)^mp * (xi + i)^mm), num with ScalarPoly coefficients.

    Canonical form: the numerator shares no (xi -+ i) factor with the
    denominator.  Values produced by the symbol builders are proper
    (deg num < mp + mm); intermediate arithmetic may be polynomial/improper.
    """

    __slots__ = ("num", "mp", "mm")

    def __init__(self, num: Iterable, mp: int = 0, mm: int = 0, _normalize=True):
        coeffs = [_as_poly(c) for c in num]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.num = tuple(coeffs)
        self.mp = mp
        self.mm = mm
        if _normalize:
            self._normalize()

    # -- canonicalization ---------------------------------------------------
    def _normalize(self):
        if not self.num:
            self.mp = 0
            self.mm = 0
            return
        for root, attr in ((GR_I, "mp"), (-GR_I, "mm")):
            while getattr(self, attr) > 0 and self.num:
                quot, rem = _synth_div(self.num, root)
                if rem.is_zero():
                    self.num = tuple(quot)
                    setattr(self, attr, getattr(self, attr) - 1)
                else:
                    break

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls):
        return cls((), 0, 0, _normalize=False)

    @classmethod
    def const(cls, c):
        return cls((c,), 0, 0)

    @classmethod
    def xi(cls):
        return cls((0, 1), 0, 0)

    @classmethod
    def inv_norm_sq(cls, k: int = 1):
        """1 / (1 + xi^2)^k, the on-cosphere |xi|^{-2k}."""
        return cls((1,), k, k, _normalize=False)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = _as_rx(other)
        mp = max(self.mp, other.mp)
        mm = max(self.mm, other.mm)
        a = _poly_mul(self.num, _pole_poly(mp - self.mp, mm - self.mm))
        b = _poly_mul(other.num, _pole_poly(mp - other.mp, mm - other.mm))
        return RationalXi(_poly_add(a, b), mp, mm)

    __radd__ = __add__

    def __neg__(self):
        return RationalXi([-c for c in self.num], self.mp, self.mm, _normalize=False)

    def __sub__(self, other):
        return self + (-_as_rx(other))

    def __rsub__(self, other):
        return _as_rx(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, ScalarPoly)):
            c = _as_poly(other)
            return RationalXi([p * c for p in self.num], self.mp, self.mm)
        other = _as_rx(other)
        return RationalXi(_poly_mul(self.num, other.num), self.mp + other.mp, self.mm + other.mm)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = _as_rx(other)
        return self.num == other.num and self.mp == other.mp and self.mm == other.mm

    def __hash__(self):
        return hash((self.num, self.mp, self.mm))

    def is_zero(self) -> bool:
        return not self.num

    # -- structure ------------------------------------------------------------
    @property
    def numerator_degree(self) -> int:
        return len(self.num) - 1 if self.num else -1

    def degree_gap(self) -> int:
        """Denominator degree minus numerator degree (decay order at infinity)."""
        return (self.mp + self.mm) - self.numerator_degree

    def is_proper(self) -> bool:
        return self.is_zero() or self.degree_gap() >= 1

    def map_coeffs(self, fn) -> "RationalXi":
        return RationalXi([fn(c) for c in self.num], self.mp, self.mm)

    # -- calculus -------------------------------------------------------------
    def derivative(self) -> "RationalXi":
        """d/dxi via the quotient rule; pole orders each increase by one."""
        if self.is_zero():
            return self
        dnum = [c * (k + 1) for k, c in enumerate(self.num[1:])]
        # N' * (xi-i)(xi+i) - N * (mp*(xi+i) + mm*(xi-i))
        a = _poly_mul(dnum, (_as_poly(1), _as_poly(0), _as_poly(1)))  # (1 + xi^2)
        b = _poly_mul(self.num,
                      [_as_poly(GR_I * (self.mp - self.mm)), _as_poly(self.mp + self.mm)])
        return RationalXi(_poly_sub(a, b), self.mp + 1, self.mm + 1)

    # -- the half-plane projection and line integral ---------------------------
    def _upper_taylor(self, order: int) -> list[ScalarPoly]:
        """Taylor coefficients of num(i+u) * (2i+u)^{-mm} up to u^{order-1}."""
        shifted = _shift_poly(self.num, GR_I)  # num(i + u)
        inv = _inv_binomial_series(GR_I * 2, self.mm, order)
        out = []
        for k in range(order):
            acc = ScalarPoly.zero()
            for j in range(k + 1):
                if j < len(shifted):
                    acc = acc + shifted[j] * inv[k - j]
            out.append(acc)
        return out

    def pi_plus(self) -> "RationalXi":
        """Partial-fraction part with poles only at xi = +i (Cauchy projection)."""
        if self.is_zero():
            return self
        if not self.is_proper():
            raise DivergentSymbol("divergent symbol")
        if self.mp == 0:
            return RationalXi.zero()
        coeffs = self._upper_taylor(self.mp)
        # pi+ f = sum_{k=1..mp} A_k/(xi-i)^k with A_{mp-j} = coeffs[j]
        num: list[ScalarPoly] = [ScalarPoly.zero()] * self.mp
        basis = [_as_poly(1)]
        for j in range(self.mp):
            num = _poly_add(num, [coeffs[j] * b for b in basis])
            basis = _poly_mul(basis, [_as_poly(-GR_I), _as_poly(1)])  # *(xi - i)
        return RationalXi(num, self.mp, 0)

    def pi_minus(self) -> "RationalXi":
        return self - self.pi_plus()

    def residue_at_plus_i(self) -> ScalarPoly:
        if not self.is_proper():
            raise DivergentSymbol("divergent symbol")
        if self.mp == 0:
            return ScalarPoly.zero()
        return self._upper_taylor(self.mp)[self.mp - 1]

    def integrate_pi_coefficient(self) -> ScalarPoly:
        """(1/pi) * integral over R: equals 2i * residue at +i.  Exact."""
        if self.is_zero():
            return ScalarPoly.zero()
        gap = self.degree_gap()
        if gap <= 0:
            raise DivergentSymbol("divergent symbol")
        if gap == 1:
            raise ConditionallyConvergent("conditionally convergent, unsupported")
        return self.residue_at_plus_i() * (GR_I * 2)

    # -- numeric evaluation (oracles only) --------------------------------------
    def evaluate(self, xi: complex, env: Mapping[str, complex] | None = None) -> complex:
        env = env or {}
        num = sum(c.evaluate(env) * xi ** k for k, c in enumerate(self.num))
        return num / ((xi - 1j) ** self.mp * (xi + 1j) ** self.mm)

    def __repr__(self):
        num = " + ".join(f"({c!r})*xi^{k}" if k else f"({c!r})"
                         for k, c in enumerate(self.num)) or "0"
        den = ""
        if self.mp:
            den += f"(xi-i)^{self.mp}"
        if self.mm:
            den += f"(xi+i)^{self.mm}"
        return f"[{num}] / [{den or '1'}]"


def _as_rx(x) -> RationalXi:
    if isinstance(x, RationalXi):
        return x
    if isinstance(x, (int, Fraction, GaussianRational, ScalarPoly)):
        return RationalXi((x,), 0, 0)
    raise TypeError(f"cannot coerce {type(x).__name__} to RationalXi")


def _poly_add(a, b):
    n = max(len(a), len(b))
    out = []
    for k in range(n):
        x = a[k] if k < len(a) else ScalarPoly.zero()
        y = b[k] if k < len(b) else ScalarPoly.zero()
        out.append(_as_poly(x) + _as_poly(y))
    return out


def _poly_sub(a, b):
    return _poly_add(a, [-_as_poly(c) for c in b])


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [ScalarPoly.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        x = _as_poly(x)
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * _as_poly(y)
    return out


def _pole_poly(kp: int, km: int):
    """Coefficients of (xi - i)^kp * (xi + i)^km."""
    out = [_as_poly(1)]
    for _ in range(kp):
        out = _poly_mul(out, [_as_poly(-GR_I), _as_poly(1)])
    for _ in range(km):
        out = _poly_mul(out, [_as_poly(GR_I), _as_poly(1)])
    return out


def _synth_div(coeffs, root: GaussianRational):
    """Divide by (xi - root); returns (quotient coeffs, remainder poly)."""
    quot = [ScalarPoly.zero()] * (len(coeffs) - 1)
    carry = ScalarPoly.zero()
    for k in range(len(coeffs) - 1, 0, -1):
        carry = coeffs[k] + carry * root
        quot[k - 1] = carry
    rem = coeffs[0] + carry * root
    return quot, rem


def _shift_poly(coeffs, a: GaussianRational):
    """Coefficients of p(a + u) given those of p(xi)."""
    out = [ScalarPoly.zero()] * len(coeffs)
    for k, c in enumerate(coeffs):
        # c * (a + u)^k: coefficient of u^j is C(k, j) * a^(k - j)
        for j in range(k + 1):
            out[j] = out[j] + c * (a ** (k - j) * comb(k, j))
    return out


def _inv_binomial_series(a: GaussianRational, b: int, order: int):
    """Taylor coefficients of (a + u)^(-b) around u = 0, up to u^(order-1)."""
    if b == 0:
        return [_as_poly(1)] + [ScalarPoly.zero()] * (order - 1)
    inv_a = a.inverse()
    out = []
    c = inv_a ** b
    for k in range(order):
        out.append(_as_poly(c))
        c = c * GaussianRational(Fraction(-(b + k), k + 1)) * inv_a
    return out


# ---------------------------------------------------------------------------
# Symbolic result values: exact coefficient times a unit word
# ---------------------------------------------------------------------------

# numeric values of the opaque units (lossy rendering only)
_UNIT_NUMERIC = {
    "pi": 3.141592653589793,
    "Omega2": 4 * 3.141592653589793,            # vol(S^2)
    "Omega3": 2 * 3.141592653589793 ** 2,       # vol(S^3)
    "Omega4": Fraction(8, 3) * 3.141592653589793 ** 2,  # vol(S^4)
}

_PRIME_BASES = (2, 3, 5, 7, 11, 13)


class UnitValue:
    """coefficient * product(base^exponent).

    Bases are "pi", opaque units (Omega3, h'(0), Vol_dM, dx', l~2^q, I_Gr,b,
    integral placeholders) with Fraction exponents, and small prime bases for
    radicals such as 2^(1/2).  Compared exactly; addition requires equal units.
    """

    __slots__ = ("coeff", "powers")

    def __init__(self, coeff, powers: Mapping[str, Fraction] | None = None):
        self.coeff = _as_gr(coeff)
        pw: dict[str, Fraction] = {}
        for base, e in (powers or {}).items():
            e = Fraction(e)
            if e == 0:
                continue
            pw[base] = pw.get(base, Fraction(0)) + e
        # fold integer powers of numeric prime bases into the coefficient
        for base in list(pw):
            if base.isdigit():
                n = int(pw[base].__floor__())
                frac = pw[base] - n
                if n:
                    self.coeff = self.coeff * (GaussianRational(int(base)) ** n)
                if frac:
                    pw[base] = frac
                else:
                    del pw[base]
        if self.coeff.is_zero():
            pw = {}
        self.powers = dict(sorted(pw.items()))

    @classmethod
    def zero(cls):
        return cls(0)

    @classmethod
    def unit(cls, name: str, exp=1, coeff=1):
        return cls(coeff, {name: Fraction(exp)})

    def is_zero(self):
        return self.coeff.is_zero()

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return UnitValue(self.coeff * other, self.powers)
        merged = dict(self.powers)
        for b, e in other.powers.items():
            merged[b] = merged.get(b, Fraction(0)) + e
        return UnitValue(self.coeff * other.coeff, merged)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return UnitValue(self.coeff / other, self.powers)
        inv = UnitValue(other.coeff.inverse(), {b: -e for b, e in other.powers.items()})
        return self * inv

    def __neg__(self):
        return UnitValue(-self.coeff, self.powers)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.powers != other.powers:
            raise ValueError(f"unit mismatch: {self.powers} vs {other.powers}")
        return UnitValue(self.coeff + other.coeff, self.powers)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.coeff == other and not self.powers
        if not isinstance(other, UnitValue):
            return NotImplemented
        return self.coeff == other.coeff and self.powers == other.powers

    def __hash__(self):
        return hash((self.coeff, tuple(self.powers.items())))

    def substitute(self, name: str, value: "UnitValue") -> "UnitValue":
        """Replace an opaque unit by another exact value (e.g. dx' -> Vol)."""
        if name not in self.powers:
            return self
        e = self.powers[name]
        if e != int(e) or e < 0:
            raise ValueError(f"cannot substitute fractional power of {name}")
        rest = {b: x for b, x in self.powers.items() if b != name}
        out = UnitValue(self.coeff, rest)
        for _ in range(int(e)):
            out = out * value
        return out

    def numeric(self, extra: Mapping[str, float] | None = None) -> complex:
        """Lossy float rendering; opaque units need values in the table."""
        table = dict(_UNIT_NUMERIC)
        if extra:
            table.update(extra)
        v = complex(self.coeff)
        for b, e in self.powers.items():
            if b.isdigit():
                v *= float(int(b)) ** float(e)
            elif b in table:
                v *= float(table[b]) ** float(e)
            else:
                raise KeyError(f"no numeric value for unit {b!r}")
        return v

    def json_obj(self):
        units = []
        for b, e in self.powers.items():
            if e == 1:
                units.append(b)
            else:
                units.append(f"{b}^{e}")
        coef = (_frac_str(self.coeff.re) if self.coeff.im == 0
                else {"re": _frac_str(self.coeff.re), "im": _frac_str(self.coeff.im)})
        return {"coef": coef, "unit": units}

    def __repr__(self):
        if self.is_zero():
            return "0"
        bits = [repr(self.coeff)]
        for b, e in self.powers.items():
            bits.append(b if e == 1 else f"{b}^{e}")
        return "*".join(bits)


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def integrate_line(f: RationalXi) -> UnitValue:
    """Exact line integral over R of a proper rational function: 2*pi*i*Res(+i).

    Requires a symbol-free coefficient ring; degree gap >= 2.
    """
    coeff = f.integrate_pi_coefficient().constant_value()
    if coeff is None:
        raise ValueError("integrand coefficients carry formal symbols; "
                         "use integrate_pi_coefficient for the symbolic path")
    return UnitValue(coeff, {"pi": Fraction(1)})


# ---------------------------------------------------------------------------
# Unit-sphere moments
# ---------------------------------------------------------------------------

def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def sphere_moment_ratio(exponents: Iterable[int], m: int) -> Fraction:
    """integral over S^{m-1} of x^alpha, as a fraction of the total measure.

    Gamma-product formula; zero when any exponent is odd.
    """
    if m < 1:
        raise ValueError("ambient dimension must be >= 1")
    alphas = list(exponents)
    if any(a < 0 for a in alphas):
        raise ValueError("negative exponent")
    if any(a % 2 for a in alphas):
        return Fraction(0)
    total = sum(alphas)
    if total == 0:
        return Fraction(1)
    num = 1
    for a in alphas:
        num *= _double_factorial(a - 1)
    den = 1
    for j in range(total // 2):
        den *= m + 2 * j
    return Fraction(num, den)


def sphere_measure(m: int) -> UnitValue:
    """vol(S^{m-1}) as an exact rational times a power of pi."""
    if m % 2 == 0:
        j = m // 2
        return UnitValue(Fraction(2, factorial(j - 1)), {"pi": Fraction(j)})
    j = (m - 1) // 2
    return UnitValue(Fraction(2 ** (j + 1), _double_factorial(m - 2)), {"pi": Fraction(j)})


def sphere_moment(exponents: Iterable[int], m: int) -> UnitValue:
    """Exact moment as a rational multiple of the opaque unit Omega_{m-1}."""
    q = sphere_moment_ratio(exponents, m)
    return UnitValue(q, {f"Omega{m - 1}": Fraction(1)})


def sphere_integrate(poly: ScalarPoly, coords: list[str], m: int) -> ScalarPoly:
    """Integrate a polynomial in the sphere coordinates over S^{m-1}.

    Returns the coefficient of the total measure (a polynomial in the
    remaining symbols).  Coordinates not listed are treated as constants.
    """
    coord_set = set(coords)
    out: dict[Mono, GaussianRational] = {}
    for mono, c in poly.terms.items():
        exps = {n: e for n, e in mono if n in coord_set}
        rest = tuple((n, e) for n, e in mono if n not in coord_set)
        ratio = sphere_moment_ratio([exps.get(n, 0) for n in coords], m)
        if ratio == 0:
            continue
        s = out.get(rest, GR_ZERO) + c * ratio
        if s.is_zero():
            out.pop(rest, None)
        else:
            out[rest] = s
    return ScalarPoly(out, _clean=False)
