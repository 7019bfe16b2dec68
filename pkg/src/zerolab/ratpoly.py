"""Exact scalar arithmetic: rationals, univariate polynomials, rational
functions, and numeric root extraction with exact multiplicities.

All symbolic computation in this package runs over exact rationals
(`fractions.Fraction`); floating point only enters at the rooting /
eigenvalue boundary.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

Scalar = Union[int, Fraction]

#: default absolute tolerance for clustering numeric roots
ROOT_TOL = 1e-9


class RatPolyError(Exception):
    """Base error for the exact-arithmetic layer."""


class DomainError(RatPolyError):
    """Raised when an operation is called outside its domain (e.g. gcd(0, 0))."""


class NumericError(RatPolyError):
    """Raised when a numeric refinement fails to converge.

    Carries the best iterate found so far in ``best``.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and number-strings ("3", "-4.6", "3/7") to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.replace("−", "-").strip())
    if isinstance(x, float):
        # floats are accepted for convenience but converted via their repr so
        # that "0.1" means 1/10, not the binary expansion
        return Fraction(repr(x))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class Poly:
    """Univariate polynomial over exact rationals.

    Coefficients are stored lowest degree first; the zero polynomial has an
    empty coefficient tuple.  Instances are immutable and hashable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------
    @staticmethod
    def const(c) -> "Poly":
        return Poly([as_fraction(c)])

    @staticmethod
    def x() -> "Poly":
        return Poly([0, 1])

    @staticmethod
    def monomial(k: int, c=1) -> "Poly":
        return Poly([0] * k + [as_fraction(c)])

    @staticmethod
    def from_roots(roots: Sequence) -> "Poly":
        p = Poly([1])
        for r in roots:
            p = p * Poly([-as_fraction(r), 1])
        return p

    # -- basic structure ----------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def lead(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise DomainError("negative polynomial power")
        out = Poly([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divmod(self, other: "Poly"):
        """Exact polynomial division with remainder."""
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        d = other.degree
        lead = other.lead
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i] / lead
            if c:
                q[i - d] = c
                for j, oc in enumerate(other.coeffs):
                    rem[i - d + j] -= c * oc
        return Poly(q), Poly(rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise DomainError("division was expected to be exact")
        return q

    def divides(self, other: "Poly") -> bool:
        if self.is_zero():
            return other.is_zero()
        return other.divmod(self)[1].is_zero()

    # -- calculus / evaluation ------------------------------------------
    def deriv(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        """Evaluate with Horner's scheme; exact for Fraction inputs."""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
        else:
            acc = 0.0 if not isinstance(x, complex) else 0.0 + 0.0j
        for c in reversed(self.coeffs):
            if isinstance(x, (int, Fraction)):
                acc = acc * x + c
            else:
                acc = acc * x + float(c)
        return acc

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.lead
        if lead == 1:
            return self
        return Poly([c / lead for c in self.coeffs])

    def shift(self, k: int) -> "Poly":
        """Multiply by s**k (k >= 0)."""
        if self.is_zero():
            return self
        return Poly((Fraction(0),) * k + self.coeffs)

    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=float)

    # -- pretty printing -------------------------------------------------
    def __repr__(self):
        return f"Poly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


def _coerce(x) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly.const(as_fraction(x))


def format_poly(p: Poly, var: str = "s") -> str:
    """Human readable form, highest power first, e.g. ``s^2 + 3s + 2``."""
    if p.is_zero():
        return "0"
    parts = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            v = var if i == 1 else f"{var}^{i}"
            body = v if mag == 1 else f"{mag}{v}"
        parts.append((sign, body))
    sign, body = parts[0]
    text = body if sign == "+" else f"-{body}"
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic greatest common divisor via the Euclidean remainder chain."""
    if p.is_zero() and q.is_zero():
        raise DomainError("gcd(0, 0) is undefined")
    a, b = p, q
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_lcm(p: Poly, q: Poly) -> Poly:
    if p.is_zero() or q.is_zero():
        return Poly()
    return (p * q).exact_div(poly_gcd(p, q)).monic()


def poly_gcd_many(polys: Iterable[Poly]) -> Poly:
    """Monic gcd of a collection, ignoring zero entries."""
    acc = Poly()
    for p in polys:
        if p.is_zero():
            continue
        acc = p.monic() if acc.is_zero() else poly_gcd(acc, p)
        if acc.is_constant() and not acc.is_zero():
            return Poly([1])
    if acc.is_zero():
        raise DomainError("gcd of an all-zero collection")
    return acc


def poly_lcm_many(polys: Iterable[Poly]) -> Poly:
    acc = Poly([1])
    for p in polys:
        acc = poly_lcm(acc, p)
    return acc


def squarefree_decompose(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: return [(factor, multiplicity)] with pairwise coprime,
    squarefree, monic factors whose weighted product reconstructs ``p`` up to
    a constant.  Constant-only content is dropped."""
    if p.is_zero():
        raise DomainError("cannot decompose the zero polynomial")
    p = p.monic()
    if p.degree < 1:
        return []
    dp = p.deriv()
    a = poly_gcd(p, dp)
    b = p.exact_div(a)
    c = dp.exact_div(a)
    d = c - b.deriv()
    out: list[tuple[Poly, int]] = []
    i = 1
    while b.degree >= 1:
        f = poly_gcd(b, d) if not d.is_zero() else b.monic()
        if f.degree >= 1:
            out.append((f.monic(), i))
        b2 = b.exact_div(f)
        c2 = d.exact_div(f)
        d = c2 - b2.deriv()
        b = b2
        i += 1
    return out


class RootSet:
    """Numeric roots of an exact polynomial, with exact multiplicities."""

    __slots__ = ("roots",)

    def __init__(self, roots: Sequence[tuple[complex, int]]):
        self.roots = tuple((complex(r), int(m)) for r, m in roots)

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)

    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.roots)

    def expanded(self) -> list[complex]:
        out: list[complex] = []
        for r, m in self.roots:
            out.extend([r] * m)
        return out

    def __repr__(self):
        items = ", ".join(
            f"{r:.6g}" + (f" (x{m})" if m > 1 else "") for r, m in self.roots
        )
        return f"RootSet({items})"


def _newton_refine(p: Poly, z: complex, steps: int = 50) -> complex:
    dp = p.deriv()
    scale = max(abs(float(c)) for c in p.coeffs)
    best = z
    best_val = abs(p(complex(z)))
    for _ in range(steps):
        fz = p(complex(z))
        if abs(fz) < 1e-16 * scale:
            return complex(z)
        dz = dp(complex(z))
        if dz == 0:
            break
        z = z - fz / dz
        val = abs(p(complex(z)))
        if val < best_val:
            best, best_val = z, val
    return complex(best)


def _companion_roots(p: Poly) -> list[complex]:
    """Eigenvalues of the (balanced) companion matrix of a monic polynomial."""
    n = p.degree
    if n == 0:
        return []
    if n == 1:
        return [complex(-p.coeffs[0] / p.coeffs[1])]
    pm = p.monic()
    comp = np.zeros((n, n), dtype=float)
    comp[:-1, 1:] = np.eye(n - 1)
    comp[-1, :] = [-float(c) for c in pm.coeffs[:-1]]
    return list(np.linalg.eigvals(comp))


def roots(p: Poly, tol: float = ROOT_TOL) -> RootSet:
    """Numeric roots with exact multiplicities.

    Each squarefree factor is rooted via companion-matrix eigenvalues and
    Newton-refined on the exact factor.  Conjugate pairs of real polynomials
    are symmetrised within ``tol``.
    """
    if p.is_zero():
        raise DomainError("cannot root the zero polynomial")
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    found: list[tuple[complex, int]] = []
    for factor, mult in squarefree_decompose(p):
        raw = [_newton_refine(factor, z) for z in _companion_roots(factor)]
        scale = max(abs(float(c)) for c in factor.coeffs)
        for z in raw:
            if abs(factor(z)) > math.sqrt(tol) * scale * (1 + abs(z)) ** factor.degree:
                raise NumericError(
                    f"root refinement did not converge for {factor}", best=z
                )
        raw = _pair_conjugates(raw, tol)
        found.extend((z, mult) for z in raw)
    found.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    return RootSet(found)


def _pair_conjugates(zs: list[complex], tol: float) -> list[complex]:
    out: list[complex] = []
    pool = list(zs)
    while pool:
        z = pool.pop()
        if abs(z.imag) <= tol * (1 + abs(z)):
            out.append(complex(z.real, 0.0))
            continue
        mate_i = None
        for i, w in enumerate(pool):
            if abs(w - z.conjugate()) <= 100 * tol * (1 + abs(z)):
                mate_i = i
                break
        if mate_i is None:
            out.append(z)
            continue
        w = pool.pop(mate_i)
        re = (z.real + w.real) / 2
        im = (abs(z.imag) + abs(w.imag)) / 2
        out.append(complex(re, im))
        out.append(complex(re, -im))
    return out


def cluster_match(
    a: Sequence[complex], b: Sequence[complex], tol: float = 1e-6
) -> bool:
    """Multiset equality of complex values: two roots match when
    ``|z1 - z2| <= tol * (1 + |z1|)``."""
    if len(a) != len(b):
        return False
    pool = list(b)
    for z in a:
        hit = None
        for i, w in enumerate(pool):
            if abs(z - w) <= tol * (1 + abs(z)):
                hit = i
                break
        if hit is None:
            return False
        pool.pop(hit)
    return True


def multiset_intersect(
    a: Sequence[complex], b: Sequence[complex], tol: float = 1e-6
) -> list[complex]:
    """Multiset intersection under the clustering tolerance."""
    pool = list(b)
    out = []
    for z in a:
        for i, w in enumerate(pool):
            if abs(z - w) <= tol * (1 + abs(z)):
                out.append((z + w) / 2)
                pool.pop(i)
                break
    return out


def multiset_difference(
    a: Sequence[complex], b: Sequence[complex], tol: float = 1e-6
) -> list[complex]:
    """Multiset a minus b under the clustering tolerance."""
    out = list(a)
    for w in b:
        for i, z in enumerate(out):
            if abs(z - w) <= tol * (1 + abs(z)):
                out.pop(i)
                break
    return out


class RatFn:
    """Rational function num/den in lowest terms with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _coerce(num)
        den = Poly([1]) if den is None else _coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = Poly(), Poly([1])
        else:
            g = poly_gcd(num, den)
            if g.degree >= 1:
                num, den = num.exact_div(g), den.exact_div(g)
            lead = den.lead
            if lead != 1:
                num = Poly([c / lead for c in num.coeffs])
                den = den.monic()
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RatFn is immutable")

    @staticmethod
    def const(c) -> "RatFn":
        return RatFn(Poly.const(c))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den == Poly([1])

    def is_strictly_proper(self) -> bool:
        return self.is_zero() or self.num.degree < self.den.degree

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            other = RatFn(other)
        if not isinstance(other, RatFn):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = _coerce_rat(other)
        return RatFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFn(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_coerce_rat(other))

    def __rsub__(self, other):
        return _coerce_rat(other) + (-self)

    def __mul__(self, other):
        other = _coerce_rat(other)
        return RatFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_rat(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _coerce_rat(other) / self

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def __repr__(self):
        if self.is_polynomial():
            return f"RatFn({format_poly(self.num)!r})"
        return f"RatFn({format_poly(self.num)!r} / {format_poly(self.den)!r})"

    def __str__(self):
        if self.is_polynomial():
            return format_poly(self.num)
        return f"({format_poly(self.num)})/({format_poly(self.den)})"


def _coerce_rat(x) -> RatFn:
    if isinstance(x, RatFn):
        return x
    if isinstance(x, Poly):
        return RatFn(x)
    return RatFn(Poly.const(as_fraction(x)))
