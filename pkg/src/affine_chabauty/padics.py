"""Capped absolute-precision arithmetic in Qp.

A value is stored as p^v * u + O(p^N) with u a unit modulo p^(N-v).
Exact zero is representable (v = N = INF) and distinct from a value that
is merely indistinguishable from zero at precision N (v = N, u = 0).
All numbers are immutable; every operation returns a fresh object and
propagates provable precision only.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotAUnit, PrecisionLoss, ZeroInput

INF = 10 ** 9  # sentinel for +infinity; real valuations/precisions stay far below


def _vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class PadicNumber:
    __slots__ = ("p", "v", "u", "N")

    def __init__(self, p: int, v: int, u: int, N: int):
        self.p = p
        self.v = v
        self.u = u
        self.N = N

    # -- constructors ------------------------------------------------------

    @classmethod
    def exact_zero(cls, p: int) -> "PadicNumber":
        return cls(p, INF, 0, INF)

    @classmethod
    def unknown_zero(cls, p: int, N: int) -> "PadicNumber":
        """The class O(p^N): zero to precision N."""
        return cls(p, N, 0, N)

    @classmethod
    def from_int(cls, n: int, p: int, N: int) -> "PadicNumber":
        if N >= INF:
            raise ValueError("finite precision required")
        if n == 0:
            return cls.exact_zero(p)
        v = _vp(n, p)
        if v >= N:
            return cls.unknown_zero(p, N)
        u = (n // p ** v) % p ** (N - v)
        return cls(p, v, u, N)

    @classmethod
    def from_rational(cls, x, p: int, N: int) -> "PadicNumber":
        if N >= INF:
            raise ValueError("finite precision required")
        x = Fraction(x)
        if x == 0:
            return cls.exact_zero(p)
        num, den = x.numerator, x.denominator
        vn, vd = _vp(num, p), _vp(den, p)
        v = vn - vd
        if v >= N:
            return cls.unknown_zero(p, N)
        m = p ** (N - v)
        u = (num // p ** vn) * pow(den // p ** vd, -1, m) % m
        return cls(p, v, u, N)

    # -- predicates --------------------------------------------------------

    def is_exact_zero(self) -> bool:
        return self.v >= INF

    def is_zero(self) -> bool:
        """Indistinguishable from zero at the stored precision."""
        return self.u == 0

    def is_unit(self) -> bool:
        return self.v == 0 and self.u != 0

    def valuation(self) -> int:
        """Known valuation; for zeros this is a lower bound (INF if exact)."""
        return self.v

    def precision(self) -> int:
        return self.N

    # -- representatives ---------------------------------------------------

    def lift(self) -> Fraction:
        """The representative p^v * u as an exact rational (0 for zeros)."""
        if self.u == 0:
            return Fraction(0)
        return Fraction(self.u) * Fraction(self.p) ** self.v

    def residue(self, k: int) -> int:
        """Integer representative modulo p^k; requires v >= 0 and k <= N."""
        if k > self.N:
            raise PrecisionLoss(f"residue mod p^{k} requested at precision O(p^{self.N})")
        if self.u == 0:
            return 0
        if self.v < 0:
            raise ValueError("negative valuation has no integer residue")
        return (self.u * self.p ** self.v) % self.p ** k

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other, add: bool):
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        if isinstance(other, (int, Fraction)):
            x = Fraction(other)
            if x == 0:
                return PadicNumber.exact_zero(self.p)
            if self.is_exact_zero():
                if add:
                    raise ValueError("exact zero +- exact rational: materialize explicitly")
                return PadicNumber.exact_zero(self.p)  # product shortcut
            if add:
                N = self.N
            else:
                vo = _vp(x.numerator, self.p) - _vp(x.denominator, self.p)
                N = vo + (self.N - self.v)  # matched relative precision: lossless product
            return PadicNumber.from_rational(x, self.p, N)
        return None

    def __add__(self, other):
        o = self._coerce(other, add=True)
        if o is None:
            return NotImplemented
        if self.is_exact_zero():
            return o
        if o.is_exact_zero():
            return self
        p = self.p
        N = min(self.N, o.N)
        w = min(self.v, o.v)
        m = p ** (N - w)
        s = (self.u * p ** (self.v - w) + o.u * p ** (o.v - w)) % m
        if s == 0:
            return PadicNumber.unknown_zero(p, N)
        dv = _vp(s, p)
        if w + dv >= N:
            return PadicNumber.unknown_zero(p, N)
        return PadicNumber(p, w + dv, s // p ** dv, N)

    __radd__ = __add__

    def __neg__(self):
        if self.u == 0:
            return self
        return PadicNumber(self.p, self.v, -self.u % self.p ** (self.N - self.v), self.N)

    def __sub__(self, other):
        o = self._coerce(other, add=True)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other, add=False)
        if o is None:
            return NotImplemented
        p = self.p
        if self.is_exact_zero() or o.is_exact_zero():
            return PadicNumber.exact_zero(p)
        N = min(self.v + o.N, o.v + self.N)
        v = self.v + o.v
        if v >= N:
            return PadicNumber.unknown_zero(p, N)
        u = (self.u * o.u) % p ** (N - v)
        return PadicNumber(p, v, u, N)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.u == 0:
            raise ZeroInput("cannot invert a (possible) zero")
        p, v, N = self.p, self.v, self.N
        rel = N - v
        u = pow(self.u, -1, p ** rel)
        return PadicNumber(p, -v, u, rel - v)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            x = Fraction(other)
            if x == 0:
                raise ZeroDivisionError("division by zero scalar")
            if self.is_exact_zero():
                return self
            vo = _vp(x.numerator, self.p) - _vp(x.denominator, self.p)
            if self.u == 0:
                return PadicNumber.unknown_zero(self.p, self.N - vo)
        o = self._coerce(other, add=False)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k == 0:
            if self.is_exact_zero():
                raise ZeroInput("0^0")
            return PadicNumber.from_int(1, self.p, max(self.N - self.v, 1))
        x = self if k > 0 else self.inverse()
        out = x
        for _ in range(abs(k) - 1):
            out = out * x
        return out

    def at_precision(self, N: int) -> "PadicNumber":
        """Truncate (never extend) the stored precision to N."""
        if N >= self.N:
            return self
        if self.u == 0 or self.v >= N:
            return PadicNumber.unknown_zero(self.p, N)
        return PadicNumber(self.p, self.v, self.u % self.p ** (N - self.v), N)

    # -- comparisons -------------------------------------------------------

    def compare(self, other) -> str:
        """Three-valued comparison: 'equal', 'distinct' or 'indistinguishable'.

        'equal' means agreement modulo p^min(N1, N2); 'indistinguishable'
        means both operands are themselves zero classes of finite precision.
        """
        if isinstance(other, (int, Fraction)):
            if self.is_exact_zero():
                return "equal" if Fraction(other) == 0 else "distinct"
            other = PadicNumber.from_rational(other, self.p, self.N)
        d = self - other
        if d.is_exact_zero():
            return "equal"
        if not d.is_zero():
            return "distinct"
        if self.is_zero() and other.is_zero():
            return "indistinguishable"
        return "equal"

    def __eq__(self, other):
        if isinstance(other, (PadicNumber, int, Fraction)):
            return self.compare(other) != "distinct"
        return NotImplemented

    def __hash__(self):
        raise TypeError("PadicNumber is approximate and unhashable")

    # -- rendering ---------------------------------------------------------

    def digits(self, lo: int | None = None, hi: int | None = None) -> list[int]:
        """Base-p digits a_lo .. a_{hi-1} of the representative."""
        lo = (self.v if self.v < INF else 0) if lo is None else lo
        hi = self.N if hi is None else hi
        out = []
        for k in range(lo, hi):
            if self.u == 0 or k < self.v:
                out.append(0)
            else:
                out.append((self.u // self.p ** (k - self.v)) % self.p)
        return out

    def __str__(self):
        return render_padic(self)

    __repr__ = __str__


def render_padic(x: PadicNumber) -> str:
    """Digit-string form 'a0 + a1*p + a2*p^2 + ... + O(p^N)'."""
    if x.is_exact_zero():
        return "0"
    tail = f"O({x.p}^{x.N})"
    if x.u == 0:
        return tail
    terms = []
    n = x.u
    k = x.v
    while n > 0 and k < x.N:
        d = n % x.p
        if d:
            if k == 0:
                terms.append(f"{d}")
            elif k == 1:
                terms.append(f"{x.p}" if d == 1 else f"{d}*{x.p}")
            else:
                terms.append(f"{x.p}^{k}" if d == 1 else f"{d}*{x.p}^{k}")
        n //= x.p
        k += 1
    return " + ".join(terms + [tail]) if terms else tail


def parse_padic(s: str, p: int) -> PadicNumber:
    """Parse the digit-string convention produced by render_padic."""
    s = s.strip().replace("·", "*").replace(" ", "")
    if s == "0":
        return PadicNumber.exact_zero(p)
    N = None
    total = Fraction(0)
    for term in s.split("+"):
        if not term:
            continue
        if term.startswith("O("):
            body = term[2:-1]
            base, _, exp = body.partition("^")
            if int(base) != p:
                raise ValueError(f"prime mismatch in {term}")
            N = int(exp) if exp else 1
            continue
        digit = Fraction(1)
        if "*" in term:
            d, _, pw = term.partition("*")
            digit = Fraction(d)
        else:
            pw = term
        if pw.startswith(f"{p}^"):
            k = int(pw[len(str(p)) + 1:])
        elif pw == str(p):
            k = 1
        else:
            digit, k = Fraction(pw), 0
        total += digit * Fraction(p) ** k
    if N is None:
        raise ValueError(f"missing O(p^N) tail in {s!r}")
    return PadicNumber.from_rational(total, p, N)


# -- unit roots and lifting ------------------------------------------------

def teichmuller(x: PadicNumber) -> PadicNumber:
    """The (p-1)-th root of unity congruent to the unit x modulo p."""
    if not x.is_unit():
        raise NotAUnit("teichmuller lift requires a unit")
    p, N = x.p, x.N
    if p == 2:
        return PadicNumber.from_int(1, 2, N)
    t = x.u % p
    k = 1
    while k < N:  # Newton for T^(p-1) = 1 doubles correct digits
        k = min(2 * k, N)
        m = p ** k
        f = (pow(t, p - 1, m) - 1) % m
        df = ((p - 1) * pow(t, p - 2, m)) % m
        t = (t - f * pow(df, -1, m)) % m
    return PadicNumber.from_int(t, p, N)


def iwasawa_log(x: PadicNumber) -> PadicNumber:
    """p-adic logarithm under the branch log(p) = 0.

    Strips p^v and the Teichmuller part, then evaluates
    log(1+z) = sum_k (-1)^(k+1) z^k / k.
    """
    if x.is_zero():
        raise ZeroInput("log of (possible) zero")
    p = x.p
    unit = PadicNumber(p, 0, x.u, x.N - x.v)  # the branch kills p^v
    one_unit = unit / teichmuller(unit)
    z = one_unit - 1
    if z.is_zero():
        return PadicNumber.unknown_zero(p, z.N if not z.is_exact_zero() else unit.N)
    N = z.N
    out = PadicNumber.unknown_zero(p, N)
    term = z  # (-1)^(k+1) z^k
    k = 1
    while True:
        if term.u != 0:
            out = out + term / k
        k += 1
        if k * z.v - _digits_base_p(k, p) >= N:
            break
        term = term * (-z)
    return out


def _digits_base_p(k: int, p: int) -> int:
    d = 0
    while k:
        k //= p
        d += 1
    return d


def sqrt(x: PadicNumber, sign_hint: int | None = None) -> PadicNumber:
    """Square root of x (p odd, even valuation, square unit part).

    sign_hint, if given, selects the root congruent to it mod p.
    """
    if x.is_zero():
        if x.is_exact_zero():
            return x
        raise ZeroInput("sqrt of possible zero cannot be certified")
    p = x.p
    if p == 2:
        raise NotImplementedError("p = 2 not supported")
    if x.v % 2:
        raise ValueError("odd valuation: square root not in Qp")
    rel = x.N - x.v
    r = _tonelli(x.u % p, p)
    if pow(r, 2, p) != x.u % p:
        raise ValueError("unit part is not a quadratic residue")
    if sign_hint is not None and r % p != sign_hint % p:
        r = p - r
    k = 1
    while k < rel:
        k = min(2 * k, rel)
        mk = p ** k
        r = (r - (r * r - x.u) * pow(2 * r, -1, mk)) % mk
    return PadicNumber(p, x.v // 2, r % p ** rel, x.v // 2 + rel)


def _tonelli(a: int, p: int) -> int:
    """Square root mod p (p odd prime, a a quadratic residue)."""
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def nth_root(x: PadicNumber, n: int, residue_hint: int) -> PadicNumber:
    """The n-th root of the unit x congruent to residue_hint mod p (p not dividing n)."""
    if not x.is_unit():
        raise NotAUnit("nth_root requires a unit")
    p, rel = x.p, x.N
    if n % p == 0:
        raise ValueError("p divides the root order")
    if pow(residue_hint, n, p) != x.u % p:
        raise ValueError("residue_hint is not an n-th root mod p")
    r = residue_hint % p
    k = 1
    while k < rel:
        k = min(2 * k, rel)
        m = p ** k
        f = (pow(r, n, m) - x.u) % m
        df = (n * pow(r, n - 1, m)) % m
        r = (r - f * pow(df, -1, m)) % m
    return PadicNumber(p, 0, r % p ** rel, rel)


def hensel_lift_root(coeffs: list[int], r0: int, p: int, N: int) -> int:
    """Lift a simple root r0 (mod p) of an integer polynomial to mod p^N."""
    def ev(cs, t, m):
        acc = 0
        for c in reversed(cs):
            acc = (acc * t + c) % m
        return acc

    dcoeffs = [k * c for k, c in enumerate(coeffs)][1:]
    if ev(dcoeffs, r0, p) == 0:
        raise ValueError("root is not simple mod p")
    r, k = r0 % p, 1
    while k < N:
        k = min(2 * k, N)
        m = p ** k
        r = (r - ev(coeffs, r, m) * pow(ev(dcoeffs, r, m), -1, m)) % m
    return r
