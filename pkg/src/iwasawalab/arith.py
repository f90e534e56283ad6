"""Exact number-theoretic arithmetic substrate.

Three value families live here:

* :class:`CycloNumber` -- exact elements of the m-th cyclotomic field,
  stored on the power basis of a primitive m-th root of unity modulo the
  m-th cyclotomic polynomial, with `fractions.Fraction` coordinates.
  Equality is syntactic on the canonical form, so identities such as
  ``G * Gbar == p`` are decidable exactly.

* :class:`PadicNumber` -- truncated elements of Z_p or of a named finite
  extension.  Supported extension shapes: unramified of degree f,
  "cyclotomic-Eisenstein" generated by a primitive p^k-th root of unity,
  and the mixed (unramified tensor Eisenstein) compositum.  All
  coefficients are kept modulo p^N; valuations are reported in units
  where v(p) = 1, so the Eisenstein uniformizer has valuation 1/phi(p^k).

* :class:`QuadFieldElem` -- exact elements a + b*sqrt(-d) of the nine
  imaginary quadratic fields of class number one, with d in
  {3,4,7,8,11,19,43,67,163}.

No floating point is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

__all__ = [
    "MAX_CONDUCTOR",
    "euler_phi",
    "factorize",
    "is_prime",
    "primitive_root",
    "discrete_log",
    "legendre_symbol",
    "crt_pair",
    "cyclotomic_poly",
    "CycloNumber",
    "zeta",
    "cyclo_arith",
    "PadicRing",
    "PadicNumber",
    "teichmuller",
    "padic_sqrt",
    "embed_cyclo_padic",
    "padic_ring_for_conductor",
    "QuadFieldElem",
    "CLASS_NUMBER_ONE_DISCS",
]

# Conductor guard: merged conductors beyond this raise instead of silently
# producing huge polynomial rings.
MAX_CONDUCTOR = 3000


class ArithError(ValueError):
    """Raised on domain violations (division by zero, bad precision, ...)."""


# ---------------------------------------------------------------------------
# elementary number theory helpers
# ---------------------------------------------------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization as {prime: exponent}; trial division (small n)."""
    if n <= 0:
        raise ArithError(f"factorize expects a positive integer, got {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    phi = 1
    for p, e in factorize(n).items():
        phi *= (p - 1) * p ** (e - 1)
    return phi


def multiplicative_order(a: int, n: int) -> int:
    if gcd(a, n) != 1:
        raise ArithError(f"{a} is not a unit mod {n}")
    order = 1
    x = a % n
    while x != 1:
        x = x * a % n
        order += 1
        if order > n:
            raise ArithError("order computation overflow")
    return order


def primitive_root(q: int) -> int:
    """Smallest primitive root modulo q (q а prime power p^k, p odd, or q in {1,2,4})."""
    if q in (1, 2):
        return 1
    phi = euler_phi(q)
    prime_divs = list(factorize(phi))
    for g in range(2, q):
        if gcd(g, q) != 1:
            continue
        if all(pow(g, phi // r, q) != 1 for r in prime_divs):
            return g
    raise ArithError(f"no primitive root mod {q}")


def discrete_log(a: int, base: int, q: int) -> int:
    """Exponent e with base^e = a mod q; brute force (groups here are tiny)."""
    a %= q
    x = 1
    for e in range(euler_phi(q)):
        if x == a:
            return e
        x = x * base % q
    raise ArithError(f"{a} is not a power of {base} mod {q}")


def legendre_symbol(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    """x mod m1*m2 with x = r1 mod m1, x = r2 mod m2 (coprime moduli)."""
    if gcd(m1, m2) != 1:
        raise ArithError("crt_pair needs coprime moduli")
    inv = pow(m1, -1, m2)
    return (r1 + m1 * ((r2 - r1) * inv % m2)) % (m1 * m2)


# ---------------------------------------------------------------------------
# integer polynomial utilities (dense lists, low degree first)
# ---------------------------------------------------------------------------

def _poly_divmod_int(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Exact division of integer polynomials with monic divisor."""
    num = list(num)
    dd = len(den) - 1
    if den[-1] != 1:
        raise ArithError("divisor must be monic")
    quot = [0] * max(1, len(num) - dd)
    while len(num) - 1 >= dd and any(num):
        k = len(num) - 1
        if num[k] == 0:
            num.pop()
            continue
        c = num[k]
        quot[k - dd] = c
        for i, dc in enumerate(den):
            num[k - dd + i] -= c * dc
        num.pop()
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return quot, num


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Coefficients (low first) of the m-th cyclotomic polynomial."""
    if m == 1:
        return (-1, 1)
    poly = [0] * m + [1]
    poly[0] = -1  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            poly, rem = _poly_divmod_int(poly, list(cyclotomic_poly(d)))
            if any(rem):
                raise ArithError("cyclotomic division failed")
    return tuple(poly)


@lru_cache(maxsize=None)
def _reduction_rows(m: int) -> tuple[tuple[Fraction, ...], ...]:
    """x^k mod Phi_m for k in [phi(m), 2*phi(m)-2], as coordinate rows."""
    phi = euler_phi(m)
    mod = cyclotomic_poly(m)
    rows: list[tuple[Fraction, ...]] = []
    # x^phi = -sum_{i<phi} mod[i] x^i   (Phi_m is monic)
    current = [Fraction(-mod[i]) for i in range(phi)]
    rows.append(tuple(current))
    for _ in range(phi - 2):
        shifted = [Fraction(0)] + current[:-1]
        top = current[-1]
        if top:
            for i in range(phi):
                shifted[i] += top * rows[0][i]
        current = shifted
        rows.append(tuple(current))
    return tuple(rows)


_ZETA_POWER_CACHE: dict[int, list[tuple[Fraction, ...]]] = {}


def _zeta_power_coords(m: int, k: int) -> tuple[Fraction, ...]:
    """Coordinates of zeta_m^k on the power basis (k arbitrary integer)."""
    phi = euler_phi(m)
    k %= m
    table = _ZETA_POWER_CACHE.setdefault(m, [])
    if not table:
        for i in range(phi):
            coords = [Fraction(0)] * phi
            coords[i] = Fraction(1)
            table.append(tuple(coords))
    while len(table) <= k:
        rows = _reduction_rows(m)
        prev = table[-1]
        top = prev[-1]
        shifted = [Fraction(0)] + list(prev[:-1])
        if top:
            for i in range(phi):
                shifted[i] += top * rows[0][i]
        table.append(tuple(shifted))
    return table[k]


# ---------------------------------------------------------------------------
# CycloNumber
# ---------------------------------------------------------------------------

class CycloNumber:
    """Exact cyclotomic number: coefficient vector on the power basis mod Phi_m."""

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs):
        if m < 1:
            raise ArithError("conductor must be positive")
        if m > MAX_CONDUCTOR:
            raise ArithError(f"conductor {m} exceeds configured bound {MAX_CONDUCTOR}")
        phi = euler_phi(m)
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) != phi:
            raise ArithError(f"need {phi} coordinates for conductor {m}, got {len(coeffs)}")
        self.m = m
        self.coeffs = tuple(coeffs)

    # -- constructors -------------------------------------------------

    @classmethod
    def _make(cls, m: int, coeffs: tuple) -> "CycloNumber":
        # internal fast path: coeffs are already exact Fractions of the
        # right length; skips the public constructor's re-validation
        self = object.__new__(cls)
        self.m = m
        self.coeffs = coeffs
        return self

    @staticmethod
    def from_rational(x, m: int = 1) -> "CycloNumber":
        phi = euler_phi(m)
        coeffs = [Fraction(0)] * phi
        coeffs[0] = Fraction(x)
        return CycloNumber(m, coeffs)

    @staticmethod
    def zeta_power(m: int, k: int = 1) -> "CycloNumber":
        return CycloNumber(m, _zeta_power_coords(m, k))

    # -- structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ArithError(f"{self} is not rational")
        return self.coeffs[0]

    def lift_to(self, big_m: int) -> "CycloNumber":
        """Image under Q(zeta_m) -> Q(zeta_M) for m | M (exact, injective)."""
        if big_m % self.m != 0:
            raise ArithError(f"{self.m} does not divide {big_m}")
        if big_m == self.m:
            return self
        step = big_m // self.m
        phi = euler_phi(big_m)
        out = [Fraction(0)] * phi
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            for i, z in enumerate(_zeta_power_coords(big_m, k * step)):
                if z:
                    out[i] += c * z
        return CycloNumber(big_m, out)

    def descend_to(self, small_m: int) -> "CycloNumber":
        """Inverse of lift_to when the value lies in Q(zeta_small_m)."""
        if self.m % small_m != 0:
            raise ArithError(f"{small_m} does not divide {self.m}")
        if small_m == self.m:
            return self
        phi_s = euler_phi(small_m)
        basis = [CycloNumber.zeta_power(small_m, k).lift_to(self.m) for k in range(phi_s)]
        # solve sum_k x_k * basis[k] = self by Gaussian elimination over Q
        phi_b = euler_phi(self.m)
        rows = [[basis[k].coeffs[i] for k in range(phi_s)] + [self.coeffs[i]]
                for i in range(phi_b)]
        sol = _solve_exact(rows, phi_s)
        if sol is None:
            raise ArithError("value does not lie in the requested subfield")
        return CycloNumber(small_m, sol)

    # -- arithmetic ---------------------------------------------------

    @staticmethod
    def _merge(a: "CycloNumber", b: "CycloNumber") -> tuple["CycloNumber", "CycloNumber"]:
        if a.m == b.m:
            return a, b
        m = a.m * b.m // gcd(a.m, b.m)
        if m > MAX_CONDUCTOR:
            raise ArithError(f"merged conductor {m} exceeds configured bound {MAX_CONDUCTOR}")
        return a.lift_to(m), b.lift_to(m)

    @staticmethod
    def _coerce(x) -> "CycloNumber":
        if isinstance(x, CycloNumber):
            return x
        if isinstance(x, (int, Fraction)):
            return CycloNumber.from_rational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to CycloNumber")

    def __add__(self, other):
        other = CycloNumber._coerce(other)
        a, b = CycloNumber._merge(self, other)
        return CycloNumber._make(a.m, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber._make(self.m, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-CycloNumber._coerce(other))

    def __rsub__(self, other):
        return CycloNumber._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return CycloNumber._make(self.m, tuple(c * q for c in self.coeffs))
        other = CycloNumber._coerce(other)
        a, b = CycloNumber._merge(self, other)
        phi = len(a.coeffs)
        prod = [Fraction(0)] * (2 * phi - 1)
        for i, x in enumerate(a.coeffs):
            if x == 0:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    prod[i + j] += x * y
        return CycloNumber._make(a.m, tuple(_reduce_coords(a.m, prod)))

    __rmul__ = __mul__

    def mul_root(self, m: int, k: int) -> "CycloNumber":
        """Fast multiplication by zeta_m^k (monomial shift, no full product)."""
        if self.m % m != 0:
            return (self.lift_to(self.m * m // gcd(self.m, m))).mul_root(m, k)
        step = (self.m // m) * (k % m)
        phi = len(self.coeffs)
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        out = [0] * phi
        for i, c in enumerate(ints):
            if c == 0:
                continue
            for j, z in _zeta_power_sparse_int(self.m, i + step):
                out[j] += c * z
        return CycloNumber._make(self.m, tuple(Fraction(b, den) for b in out))

    def inverse(self) -> "CycloNumber":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in cyclotomic field")
        if self.is_rational():
            return CycloNumber.from_rational(1 / self.coeffs[0], self.m)
        # extended gcd of self (as polynomial) with Phi_m over Q[x]
        mod = [Fraction(c) for c in cyclotomic_poly(self.m)]
        inv = _poly_modular_inverse(list(self.coeffs), mod)
        return CycloNumber(self.m, _reduce_coords(self.m, inv))

    def __truediv__(self, other):
        other = CycloNumber._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return CycloNumber._coerce(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = CycloNumber.from_rational(1, self.m)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def galois(self, a: int) -> "CycloNumber":
        """Image under zeta_m -> zeta_m^a (a coprime to m)."""
        if gcd(a, self.m) != 1:
            raise ArithError(f"{a} is not coprime to conductor {self.m}")
        phi = len(self.coeffs)
        out = [Fraction(0)] * phi
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            for j, z in enumerate(_zeta_power_coords(self.m, i * a)):
                if z:
                    out[j] += c * z
        return CycloNumber(self.m, out)

    def conjugate(self) -> "CycloNumber":
        """Complex conjugation zeta -> zeta^-1."""
        return self.galois(self.m - 1) if self.m > 1 else self

    # -- comparisons / hashing -----------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, CycloNumber):
            return NotImplemented
        a, b = CycloNumber._merge(self, other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        # lifted copies at different conductors compare equal, so irrational
        # values hash to a class constant to keep the hash/eq contract
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash("CycloNumber:irrational")

    def __repr__(self):
        if self.is_rational():
            return f"Cyclo({self.coeffs[0]})"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                terms.append(f"{c}*z{self.m}^{i}" if c != 1 else f"z{self.m}^{i}")
        return "Cyclo(" + " + ".join(terms) + ")"


def _reduce_coords(m: int, prod: list[Fraction]) -> list[Fraction]:
    phi = euler_phi(m)
    if len(prod) <= phi:
        return list(prod) + [Fraction(0)] * (phi - len(prod))
    rows = _reduction_rows(m)
    out = list(prod[:phi])
    for k in range(phi, len(prod)):
        c = prod[k]
        if c == 0:
            continue
        row = rows[k - phi]
        for i in range(phi):
            if row[i]:
                out[i] += c * row[i]
    return out


def _poly_modular_inverse(a: list[Fraction], mod: list[Fraction]) -> list[Fraction]:
    """Inverse of a modulo mod in Q[x] via extended Euclid."""
    def trim(p):
        while len(p) > 1 and p[-1] == 0:
            p.pop()
        return p

    def pdivmod(num, den):
        num = list(num)
        q = [Fraction(0)] * max(1, len(num) - len(den) + 1)
        while len(num) >= len(den) and any(num):
            if num[-1] == 0:
                num.pop()
                continue
            c = num[-1] / den[-1]
            k = len(num) - len(den)
            q[k] = c
            for i, dc in enumerate(den):
                num[k + i] -= c * dc
            num.pop()
        return trim(q), trim(num if num else [Fraction(0)])

    r0, r1 = list(mod), trim(list(a))
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while any(r1):
        q, r = pdivmod(r0, r1)
        # s = s0 - q*s1
        s = [Fraction(0)] * max(len(s0), len(q) + len(s1) - 1)
        for i, c in enumerate(s0):
            s[i] += c
        for i, qc in enumerate(q):
            if qc == 0:
                continue
            for j, sc in enumerate(s1):
                if sc:
                    s[i + j] -= qc * sc
        r0, r1, s0, s1 = r1, r, s1, trim(s)
        if len(r0) == 1:
            break
    if len(r0) != 1 or r0[0] == 0:
        raise ArithError("element is a zero divisor (should not happen in a field)")
    lead = r0[0]
    return [c / lead for c in s0]


def _solve_exact(rows: list[list[Fraction]], ncols: int):
    """Solve an overdetermined exact linear system; None if inconsistent."""
    rows = [list(r) for r in rows]
    nrows = len(rows)
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    sol = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        sol[c] = rows[i][ncols]
    # consistency: rows beyond rank must have zero rhs, and solution must verify
    for i in range(len(pivots), nrows):
        if rows[i][ncols] != 0:
            return None
    return sol


def zeta(m: int, k: int = 1) -> CycloNumber:
    """Primitive m-th root of unity raised to the k-th power."""
    return CycloNumber.zeta_power(m, k)


_ZETA_POWER_INT_CACHE: dict[tuple[int, int], tuple] = {}


def _zeta_power_sparse_int(m: int, k: int):
    """Sparse integer form of the zeta_m^k coordinates (reduction by the
    monic integer cyclotomic polynomial keeps everything integral)."""
    key = (m, k % m)
    hit = _ZETA_POWER_INT_CACHE.get(key)
    if hit is not None:
        return hit
    coords = _zeta_power_coords(m, k)
    sparse = []
    for j, z in enumerate(coords):
        if z:
            sparse.append((j, z.numerator))
    out = tuple(sparse)
    _ZETA_POWER_INT_CACHE[key] = out
    return out


def accumulate_root_multiple(buf: list, big_m: int, x: CycloNumber,
                             m: int, k: int) -> None:
    """buf += x * zeta_m^k in place; buf holds coordinates at conductor big_m.

    Hot-loop helper for Fourier sums: avoids intermediate CycloNumber
    allocations.  Requires x.m | big_m and m | big_m.
    """
    if big_m % x.m or big_m % m:
        raise ArithError("buffer conductor must absorb both factors")
    lift = big_m // x.m
    shift = (big_m // m) * (k % m)
    for i, c in enumerate(x.coeffs):
        if c == 0:
            continue
        for j, z in _zeta_power_sparse_int(big_m, i * lift + shift):
            buf[j] += c * z


def accumulate_root_multiple_int(buf: list, big_m: int, int_coeffs, lift: int,
                                 shift: int) -> None:
    """Integer version: buf and int_coeffs are plain integers."""
    for i, c in enumerate(int_coeffs):
        if c == 0:
            continue
        for j, z in _zeta_power_sparse_int(big_m, i * lift + shift):
            buf[j] += c * z


def common_denominator_scale(values) -> tuple[int, list]:
    """(D, integer coefficient vectors) with D the lcm of all denominators."""
    d = 1
    for v in values:
        for c in v.coeffs:
            d = d * c.denominator // gcd(d, c.denominator)
    scaled = [tuple(int(c * d) for c in v.coeffs) for v in values]
    return d, scaled


def cyclo_arith(x: CycloNumber, y: CycloNumber | None, op: str) -> CycloNumber:
    """Dispatch wrapper: op in {'add','mul','inv'} (inv ignores y)."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inverse()
    raise ArithError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# truncated p-adic arithmetic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _RingKey:
    p: int
    precision: int
    unram_degree: int
    eisenstein_pk: int


class PadicRing:
    """Truncated valuation ring of Q_p or a named extension.

    descriptor: 'base', 'unramified(f)', 'cyclotomic-eisenstein(p^k)' or
    'mixed(f, p^k)'.  Elements are coordinate vectors on the basis
    beta^i * zeta^j (i < f, j < phi(p^k)) with entries mod p^N, where beta
    generates the unramified part and zeta is a primitive p^k-th root of
    unity.  v(p) = 1, v(zeta - 1) = 1/phi(p^k).
    """

    _instances: dict[_RingKey, "PadicRing"] = {}

    def __new__(cls, p: int, precision: int, unram_degree: int = 1, eisenstein_pk: int = 1):
        key = _RingKey(p, precision, unram_degree, eisenstein_pk)
        inst = cls._instances.get(key)
        if inst is None:
            inst = super().__new__(cls)
            inst._init(key)
            cls._instances[key] = inst
        return inst

    def _init(self, key: _RingKey):
        p, N, f, pk = key.p, key.precision, key.unram_degree, key.eisenstein_pk
        if p < 5 or not is_prime(p):
            raise ArithError(f"prime must be >= 5 and prime, got {p}")
        if N < 1:
            raise ArithError("precision must be positive")
        if pk != 1:
            fac = factorize(pk)
            if list(fac) != [p]:
                raise ArithError(f"eisenstein part must be a power of {p}, got {pk}")
        self.p = p
        self.precision = N
        self.unram_degree = f
        self.eisenstein_pk = pk
        self.e = euler_phi(pk) if pk > 1 else 1
        self.pN = p ** N
        self.dim = f * self.e
        self._unram_mod = _find_unramified_modulus(p, f, self.pN) if f > 1 else None
        self._unram_rows = None
        self._eis_rows = None
        self._frob_image = None
        self._teich_gen = None

    # -- descriptor ------------------------------------------------------

    @property
    def descriptor(self) -> str:
        f, pk = self.unram_degree, self.eisenstein_pk
        if f == 1 and pk == 1:
            return "base"
        if pk == 1:
            return f"unramified({f})"
        if f == 1:
            return f"cyclotomic-eisenstein({pk})"
        return f"mixed({f},{pk})"

    def __repr__(self):
        return f"PadicRing(p={self.p}, N={self.precision}, {self.descriptor})"

    def residue_cardinality(self) -> int:
        return self.p ** self.unram_degree

    # -- element constructors ---------------------------------------------

    def zero(self) -> "PadicNumber":
        return PadicNumber(self, (0,) * self.dim)

    def one(self) -> "PadicNumber":
        coords = [0] * self.dim
        coords[0] = 1
        return PadicNumber(self, tuple(coords))

    def from_int(self, n: int) -> "PadicNumber":
        coords = [0] * self.dim
        coords[0] = n % self.pN
        return PadicNumber(self, tuple(coords))

    def from_fraction(self, q) -> "PadicNumber":
        q = Fraction(q)
        den = q.denominator
        if den % self.p == 0:
            raise ArithError(f"denominator of {q} is divisible by p={self.p}")
        val = q.numerator * pow(den, -1, self.pN) % self.pN
        return self.from_int(val)

    def from_coords(self, coords) -> "PadicNumber":
        coords = [c % self.pN for c in coords]
        if len(coords) != self.dim:
            raise ArithError("coordinate length mismatch")
        return PadicNumber(self, tuple(coords))

    def unram_gen(self) -> "PadicNumber":
        if self.unram_degree == 1:
            raise ArithError("base ring has no unramified generator")
        coords = [0] * self.dim
        coords[self.e] = 1  # beta^1 * zeta^0
        return PadicNumber(self, tuple(coords))

    def zeta_gen(self) -> "PadicNumber":
        if self.eisenstein_pk == 1:
            raise ArithError("ring has no ramified part")
        coords = [0] * self.dim
        coords[1] = 1  # beta^0 * zeta^1
        return PadicNumber(self, tuple(coords))

    def uniformizer(self) -> "PadicNumber":
        if self.eisenstein_pk == 1:
            return self.from_int(self.p)
        return self.zeta_gen() - self.one()

    # -- internal reduction tables ----------------------------------------

    def _unram_reduction(self):
        # rows for beta^k, k in [f, 2f-2]
        if self._unram_rows is None:
            f = self.unram_degree
            mod = self._unram_mod
            rows = []
            current = [(-mod[i]) % self.pN for i in range(f)]
            rows.append(list(current))
            for _ in range(f - 2):
                top = current[-1]
                current = [0] + current[:-1]
                if top:
                    for i in range(f):
                        current[i] = (current[i] + top * rows[0][i]) % self.pN
                rows.append(list(current))
            self._unram_rows = rows
        return self._unram_rows

    def _eis_reduction(self):
        # rows for zeta^k, k in [e, 2e-2]; Phi_{p^k}(zeta) = 0
        if self._eis_rows is None:
            e = self.e
            mod = cyclotomic_poly(self.eisenstein_pk)
            rows = []
            current = [(-mod[i]) % self.pN for i in range(e)]
            rows.append(list(current))
            for _ in range(e - 2):
                top = current[-1]
                current = [0] + current[:-1]
                if top:
                    for i in range(e):
                        current[i] = (current[i] + top * rows[0][i]) % self.pN
                rows.append(list(current))
            self._eis_rows = rows
        return self._eis_rows

    # -- canonical multiplicative generator of the Teichmueller part -------

    def teichmuller_generator(self) -> "PadicNumber":
        """Canonical generator of the roots of unity of order p^f - 1."""
        if self._teich_gen is not None:
            return self._teich_gen
        p, f = self.p, self.unram_degree
        target = p ** f - 1
        prime_divs = list(factorize(target))
        if f == 1:
            cand = self.from_int(primitive_root(p))
            gen = _teichmuller_lift(cand)
        else:
            gen = None
            shift = 0
            while gen is None:
                cand = self.unram_gen() + self.from_int(shift)
                if not cand.is_unit():
                    shift += 1
                    continue
                t = _teichmuller_lift(cand)
                if all((t ** (target // q)) != self.one() for q in prime_divs):
                    gen = t
                shift += 1
                if shift > 4 * p:
                    raise ArithError("failed to locate a multiplicative generator")
        self._teich_gen = gen
        return gen

    def add_zeta_shifted(self, buf: list, coords, shift: int, scalar: int = 1) -> None:
        """buf += scalar * coords * zeta^shift, in place, mod p^N.

        The Eisenstein modulus is the p^k-th cyclotomic polynomial, so the
        shifted powers reduce through the same sparse integer rows as exact
        cyclotomic arithmetic.
        """
        e, f, pN = self.e, self.unram_degree, self.pN
        if e == 1:
            for idx, c in enumerate(coords):
                if c:
                    buf[idx] = (buf[idx] + scalar * c) % pN
            return
        pk = self.eisenstein_pk
        shift %= pk
        for i in range(f):
            base = i * e
            for jz in range(e):
                c = coords[base + jz]
                if c:
                    cs = scalar * c
                    for idx, zval in _zeta_power_sparse_int(pk, jz + shift):
                        buf[base + idx] = (buf[base + idx] + cs * zval) % pN
        return

    def mul_zeta_power(self, x: "PadicNumber", shift: int) -> "PadicNumber":
        """x * zeta^shift via sparse index shifting (no dense product)."""
        buf = [0] * self.dim
        self.add_zeta_shifted(buf, x.coords, shift)
        return PadicNumber(self, tuple(buf))

    def zeta_substitution(self, x: "PadicNumber", a: int) -> "PadicNumber":
        """The inertia action zeta -> zeta^a, coordinatewise via sparse rows."""
        if self.eisenstein_pk == 1:
            return x
        e, f, pN = self.e, self.unram_degree, self.pN
        pk = self.eisenstein_pk
        buf = [0] * self.dim
        for i in range(f):
            base = i * e
            for jz in range(e):
                c = x.coords[base + jz]
                if c:
                    for idx, zval in _zeta_power_sparse_int(pk, a * jz):
                        buf[base + idx] = (buf[base + idx] + c * zval) % pN
        return PadicNumber(self, tuple(buf))

    def frobenius(self, x: "PadicNumber") -> "PadicNumber":
        """Ring automorphism lifting the p-power map on the residue field.

        Acts as identity on the Eisenstein part (zeta is fixed: this is the
        Frobenius of the unramified subextension, which is what the descent
        checks need).
        """
        if self.unram_degree == 1:
            return x
        if self._frob_image is None:
            beta = self.unram_gen()
            # Hensel-lift the root of the unramified modulus congruent to beta^p
            y = beta ** self.p
            mod = list(self._unram_mod) + [1]
            for _ in range(self.precision.bit_length() + 2):
                fy = _eval_int_poly(mod, y)
                dfy = _eval_int_poly([i * c % self.pN for i, c in enumerate(mod)][1:], y)
                y = y - fy * dfy.inverse()
            self._frob_image = y
        img = self._frob_image
        # rewrite x = sum_{i,j} c_ij beta^i zeta^j with beta -> img
        e, f = self.e, self.unram_degree
        acc = self.zero()
        pw = self.one()
        for i in range(f):
            slice_coords = [0] * self.dim
            for j in range(e):
                slice_coords[j] = x.coords[i * e + j]
            acc = acc + PadicNumber(self, tuple(slice_coords)) * pw
            pw = pw * img
        return acc


def _eval_int_poly(coeffs: list[int], x: "PadicNumber") -> "PadicNumber":
    acc = x.ring.zero()
    for c in reversed(coeffs):
        acc = acc * x + x.ring.from_int(c)
    return acc


def _find_unramified_modulus(p: int, f: int, pN: int) -> tuple[int, ...]:
    """Monic degree-f polynomial irreducible mod p, coefficients mod p^N.

    Returned as the low coefficients (length f); the leading 1 is implicit.
    """
    def irreducible_mod_p(low: list[int]) -> bool:
        # poly = x^f + ... ; irreducible iff gcd(x^{p^i} - x, poly) = 1 for i < f
        # and x^{p^f} = x mod poly.
        mod = [c % p for c in low] + [1]

        def mulmod(a, b):
            prod = [0] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        if y:
                            prod[i + j] = (prod[i + j] + x * y) % p
            # reduce
            while len(prod) > f:
                top = prod.pop()
                if top:
                    k = len(prod) - f
                    for i in range(f):
                        prod[k + i] = (prod[k + i] - top * mod[i]) % p
            return prod + [0] * (f - len(prod))

        def powx(exp):
            result = [0] * f
            result[0] = 1
            base = ([0, 1] + [0] * (f - 2))[:f] if f >= 2 else [0]
            while exp:
                if exp & 1:
                    result = mulmod(result, base)
                base = mulmod(base, base)
                exp >>= 1
            return result

        x_poly = ([0, 1] + [0] * (f - 2))[:f]
        for i in range(1, f):
            xi = powx(p ** i)
            diff = [(a - b) % p for a, b in zip(xi, x_poly)]
            # gcd(diff, mod) must be 1: check diff is a unit mod (mod, p),
            # cheap version: diff nonzero and f prime -> enough; general: poly gcd
            if not any(diff):
                return False
            if _poly_gcd_deg_mod_p(diff, mod, p) != 0:
                return False
        xf = powx(p ** f)
        return xf == x_poly

    for b in range(1, p):
        for a in range(p):
            low = [b] + [a] + [0] * (f - 2) if f >= 2 else [b]
            low = low[:f]
            if irreducible_mod_p(low):
                return tuple(c % pN for c in low)
    raise ArithError("no irreducible polynomial found (unexpected)")


def _poly_gcd_deg_mod_p(a: list[int], b: list[int], p: int) -> int:
    def trim(x):
        x = list(x)
        while len(x) > 1 and x[-1] % p == 0:
            x.pop()
        return x

    a, b = trim(a), trim(b)
    while any(c % p for c in b):
        # a mod b
        a = trim(a)
        while len(a) >= len(b) and any(c % p for c in a):
            if a[-1] % p == 0:
                a.pop()
                continue
            c = a[-1] * pow(b[-1], -1, p) % p
            k = len(a) - len(b)
            for i in range(len(b)):
                a[k + i] = (a[k + i] - c * b[i]) % p
            a.pop()
        a, b = b, trim(a if any(a) else [0])
        if not any(b):
            break
    a = trim(a)
    return len(a) - 1


class PadicNumber:
    """Element of a :class:`PadicRing`; immutable coordinate vector mod p^N."""

    __slots__ = ("ring", "coords")

    def __init__(self, ring: PadicRing, coords: tuple[int, ...]):
        self.ring = ring
        self.coords = coords

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "PadicNumber"):
        if self.ring is not other.ring:
            raise ArithError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ring.from_int(other)
        self._check(other)
        pN = self.ring.pN
        return PadicNumber(self.ring, tuple((a + b) % pN for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        pN = self.ring.pN
        return PadicNumber(self.ring, tuple(-a % pN for a in self.coords))

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.ring.from_int(other)
        return self + (-other)

    def __rsub__(self, other):
        return self.ring.from_int(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            pN = self.ring.pN
            return PadicNumber(self.ring, tuple(a * other % pN for a in self.coords))
        if isinstance(other, Fraction):
            return self * self.ring.from_fraction(other)
        self._check(other)
        ring = self.ring
        e, f, pN = ring.e, ring.unram_degree, ring.pN
        # polynomial product in beta (degree f) and zeta (degree e)
        size_b, size_e = 2 * f - 1, 2 * e - 1
        prod = [0] * (size_b * size_e)
        for i1 in range(f):
            base1 = i1 * e
            for j1 in range(e):
                c1 = self.coords[base1 + j1]
                if c1 == 0:
                    continue
                for i2 in range(f):
                    base2 = i2 * e
                    row = (i1 + i2) * size_e
                    for j2 in range(e):
                        c2 = other.coords[base2 + j2]
                        if c2:
                            idx = row + j1 + j2
                            prod[idx] = (prod[idx] + c1 * c2) % pN
        # reduce zeta part within each beta-degree slot
        if e > 1:
            rows = ring._eis_reduction()
            for bi in range(size_b):
                row0 = bi * size_e
                for k in range(size_e - 1, e - 1, -1):
                    c = prod[row0 + k]
                    if c:
                        prod[row0 + k] = 0
                        red = rows[k - e]
                        for i in range(e):
                            if red[i]:
                                prod[row0 + i] = (prod[row0 + i] + c * red[i]) % pN
        # reduce beta part
        out = [0] * ring.dim
        if f > 1:
            urows = ring._unram_reduction()
            for bi in range(size_b - 1, f - 1, -1):
                row0 = bi * size_e
                red = urows[bi - f]
                for j in range(e):
                    c = prod[row0 + j]
                    if c:
                        for i in range(f):
                            if red[i]:
                                k = i * e + j
                                out[k] = (out[k] + c * red[i]) % pN
            for bi in range(f):
                for j in range(e):
                    out[bi * e + j] = (out[bi * e + j] + prod[bi * size_e + j]) % pN
        else:
            for j in range(e):
                out[j] = prod[j]
        return PadicNumber(ring, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- valuation / units --------------------------------------------------

    def _tbasis_slices(self) -> list[list[int]]:
        """Per-beta-degree coordinates rewritten on the (zeta-1) power basis."""
        ring = self.ring
        e = ring.e
        out = []
        for i in range(ring.unram_degree):
            zslice = list(self.coords[i * e:(i + 1) * e])
            # zeta^j = (1+T)^j: invert the binomial transform to get T-coords
            out.append(_zeta_to_t_basis(zslice, ring))
        return out

    def valuation(self) -> Fraction | None:
        """Valuation with v(p) = 1; None means >= precision (indistinguishable from 0)."""
        ring = self.ring
        p, N, e = ring.p, ring.precision, ring.e
        best: Fraction | None = None
        if e == 1:
            for c in self.coords:
                if c % ring.pN == 0:
                    continue
                v = Fraction(_int_val(c, p, N))
                best = v if best is None or v < best else best
        else:
            for tcoords in self._tbasis_slices():
                for j, c in enumerate(tcoords):
                    if c % ring.pN == 0:
                        continue
                    v = Fraction(_int_val(c, p, N)) + Fraction(j, e)
                    best = v if best is None or v < best else best
        return best

    def is_zero(self) -> bool:
        return all(c % self.ring.pN == 0 for c in self.coords)

    def is_unit(self) -> bool:
        v = self.valuation()
        return v is not None and v == 0

    def residue(self) -> tuple[int, ...]:
        """Image in the residue field F_{p^f} (zeta goes to 1)."""
        ring = self.ring
        e, p = ring.e, ring.p
        out = []
        for i in range(ring.unram_degree):
            out.append(sum(self.coords[i * e:(i + 1) * e]) % p)
        return tuple(out)

    def inverse(self) -> "PadicNumber":
        ring = self.ring
        if not self.is_unit():
            raise ArithError("cannot invert a non-unit at this precision")
        # invert residue in F_{p^f}, lift by Newton iteration
        res = self.residue()
        if ring.unram_degree == 1:
            x = ring.from_int(pow(res[0], -1, ring.p))
        else:
            mod = [c % ring.p for c in ring._unram_mod] + [1]
            inv_res = _ff_inverse(list(res), mod, ring.p)
            coords = [0] * ring.dim
            for i, c in enumerate(inv_res):
                coords[i * ring.e] = c
            x = PadicNumber(ring, tuple(coords))
        two = ring.from_int(2)
        steps = max(6, ring.precision.bit_length() + ring.e.bit_length() + 3)
        for _ in range(steps):
            err = two - self * x
            x = x * err
            if (self * x) == ring.one():
                return x
        if (self * x) == ring.one():
            return x
        raise ArithError("inverse iteration failed to converge (precision loss)")

    def __truediv__(self, other):
        if isinstance(other, int):
            other = self.ring.from_int(other)
        return self * other.inverse()

    def divide_exact_p_power(self, k: int) -> "PadicNumber":
        """Divide by p^k when every coordinate is divisible; drops precision by k."""
        ring = self.ring
        pk = ring.p ** k
        if any(c % pk for c in self.coords):
            raise ArithError(f"element is not divisible by p^{k}")
        smaller = PadicRing(ring.p, ring.precision - k, ring.unram_degree, ring.eisenstein_pk)
        return smaller.from_coords([c // pk for c in self.coords])

    def reduce_precision(self, n: int) -> "PadicNumber":
        ring = self.ring
        if n > ring.precision:
            raise ArithError("cannot increase precision")
        smaller = PadicRing(ring.p, n, ring.unram_degree, ring.eisenstein_pk)
        return smaller.from_coords(self.coords)

    # -- comparisons ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.from_int(other)
        if not isinstance(other, PadicNumber):
            return NotImplemented
        a, b = self, other
        if a.ring is not b.ring:
            if (a.ring.p, a.ring.unram_degree, a.ring.eisenstein_pk) != (
                    b.ring.p, b.ring.unram_degree, b.ring.eisenstein_pk):
                return False
            n = min(a.ring.precision, b.ring.precision)
            a, b = a.reduce_precision(n), b.reduce_precision(n)
        return a.coords == b.coords

    def __hash__(self):
        return hash((self.ring.p, self.ring.precision, self.ring.unram_degree,
                     self.ring.eisenstein_pk, self.coords))

    def __repr__(self):
        ring = self.ring
        if ring.dim == 1:
            return f"Padic({self.coords[0]} mod {ring.p}^{ring.precision})"
        return f"Padic({list(self.coords)} in {ring.descriptor} mod {ring.p}^{ring.precision})"


@lru_cache(maxsize=None)
def _t_transform_matrix(pk: int, pN: int) -> tuple[tuple[int, ...], ...]:
    """Matrix sending zeta-power coords to (zeta-1)-power coords, mod p^N.

    zeta^j = sum_i C(j, i) T^i, so t_i = sum_j C(j, i) z_j.
    """
    from math import comb
    e = euler_phi(pk)
    rows = []
    for i in range(e):
        row = [0] * e
        for j in range(i, e):
            row[j] = comb(j, i) % pN
        rows.append(tuple(row))
    return tuple(rows)


def _zeta_to_t_basis(zcoords: list[int], ring: PadicRing) -> list[int]:
    pk, pN = ring.eisenstein_pk, ring.pN
    e = ring.e
    mat = _t_transform_matrix(pk, pN)
    out = []
    for i in range(e):
        row = mat[i]
        out.append(sum(row[j] * zcoords[j] for j in range(e) if zcoords[j]) % pN)
    return out


def _int_val(c: int, p: int, cap: int) -> int:
    v = 0
    while c % p == 0 and v < cap:
        c //= p
        v += 1
    return v


def _ff_inverse(a: list[int], mod: list[int], p: int) -> list[int]:
    """Inverse in F_p[x]/(mod) by extended Euclid over F_p."""
    def trim(x):
        while len(x) > 1 and x[-1] % p == 0:
            x.pop()
        return x

    def pdivmod(num, den):
        num = [c % p for c in num]
        q = [0] * max(1, len(num) - len(den) + 1)
        inv_lead = pow(den[-1], -1, p)
        while len(num) >= len(den) and any(num):
            if num[-1] % p == 0:
                num.pop()
                continue
            c = num[-1] * inv_lead % p
            k = len(num) - len(den)
            q[k] = c
            for i, dc in enumerate(den):
                num[k + i] = (num[k + i] - c * dc) % p
            num.pop()
        return trim(q), trim(num if num else [0])

    r0, r1 = [c % p for c in mod], trim([c % p for c in a])
    s0, s1 = [0], [1]
    while any(r1):
        q, r = pdivmod(r0, r1)
        s = [0] * max(len(s0), len(q) + len(s1) - 1)
        for i, c in enumerate(s0):
            s[i] = (s[i] + c) % p
        for i, qc in enumerate(q):
            if qc:
                for j, sc in enumerate(s1):
                    if sc:
                        s[i + j] = (s[i + j] - qc * sc) % p
        r0, r1, s0, s1 = r1, r, s1, trim(s)
        if len(r0) == 1 and r0[0] % p:
            break
    if len(r0) != 1 or r0[0] % p == 0:
        raise ArithError("not invertible in residue field")
    lead_inv = pow(r0[0], -1, p)
    out = [c * lead_inv % p for c in s0]
    deg = len(mod) - 1
    return (out + [0] * deg)[:deg]


def _teichmuller_lift(x: PadicNumber) -> PadicNumber:
    """Limit of x^(p^f)^n: the root of unity congruent to x mod the maximal ideal."""
    ring = x.ring
    q = ring.p ** ring.unram_degree
    y = x
    for _ in range(ring.precision + 2):
        y2 = y ** q
        if y2 == y:
            return y2
        y = y2
    return y


def teichmuller(a: int, p: int, precision: int) -> PadicNumber:
    """The (p-1)-st root of unity in Z_p congruent to a mod p."""
    if a % p == 0:
        raise ArithError(f"{a} is divisible by {p}; no Teichmueller lift")
    ring = PadicRing(p, precision)
    return ring.from_int(pow(a, p ** (precision - 1), ring.pN))


def padic_sqrt(x: PadicNumber | int, p: int | None = None, precision: int | None = None) -> PadicNumber:
    """Square root of a unit of Z_p whose residue is a quadratic residue.

    Of the two roots, returns the one whose residue mod p lies in
    {1, ..., (p-1)/2}; this tie-break is fixed so downstream identity checks
    are convention-stable.
    """
    if isinstance(x, int):
        if p is None or precision is None:
            raise ArithError("integer input needs p and precision")
        x = PadicRing(p, precision).from_int(x)
    ring = x.ring
    if ring.unram_degree != 1 or ring.eisenstein_pk != 1:
        raise ArithError("padic_sqrt is defined on the base ring only")
    v = x.valuation()
    if v is None or v != 0:
        raise ArithError("padic_sqrt needs a unit (zero valuation)")
    a0 = x.coords[0] % ring.p
    if legendre_symbol(a0, ring.p) != 1:
        raise ArithError(f"{a0} is not a quadratic residue mod {ring.p}")
    r0 = next(r for r in range(1, ring.p) if r * r % ring.p == a0)
    y = ring.from_int(r0)
    inv2 = ring.from_int(pow(2, -1, ring.pN))
    for _ in range(ring.precision.bit_length() + 2):
        y = (y + x * y.inverse()) * inv2
    if not (y * y == x):
        raise ArithError("sqrt iteration failed to converge")
    if y.coords[0] % ring.p > (ring.p - 1) // 2:
        y = -y
    return y


# ---------------------------------------------------------------------------
# embedding of cyclotomic numbers into p-adic rings
# ---------------------------------------------------------------------------

def padic_ring_for_conductor(p: int, m: int, precision: int,
                             min_unram_degree: int = 1) -> PadicRing:
    """Smallest supported ring in which Q(zeta_m) embeds at the prime p."""
    pk = 1
    mm = m
    while mm % p == 0:
        pk = pk * p if pk > 1 else p
        mm //= p
    f = 1 if mm == 1 else multiplicative_order(p, mm)
    f = max(f, min_unram_degree)
    return PadicRing(p, precision, f, pk)


def embed_cyclo_padic(x: CycloNumber, ring: PadicRing) -> PadicNumber:
    """Fixed ring embedding Q(zeta_m) -> ring.

    Prime-to-p roots of unity land on Teichmueller representatives through the
    ring's canonical multiplicative generator; p-power roots land on the
    Eisenstein generator.  The choice of prime above p is exactly the choice
    of this map, which is deterministic per ring.
    """
    m = x.m
    pk_part = 1
    mm = m
    while mm % ring.p == 0:
        pk_part = pk_part * ring.p if pk_part > 1 else ring.p
        mm //= ring.p
    if pk_part > ring.eisenstein_pk:
        raise ArithError(
            f"conductor {m} needs eisenstein part {pk_part}, ring has {ring.eisenstein_pk}")
    q = ring.p ** ring.unram_degree
    if mm > 1 and (q - 1) % mm != 0:
        raise ArithError(
            f"conductor {m} needs mu_{mm} in the residue field; "
            f"unramified degree {ring.unram_degree} is insufficient")
    zimg = ring.one()
    if mm > 1:
        gen = ring.teichmuller_generator()
        zimg = zimg * gen ** ((q - 1) // mm * pow(pk_part, -1, mm))
    if pk_part > 1:
        zroot = ring.zeta_gen() ** (ring.eisenstein_pk // pk_part)
        zimg = zimg * zroot ** pow(mm, -1, pk_part)
    acc = ring.zero()
    pw = ring.one()
    for c in x.coeffs:
        if c != 0:
            acc = acc + pw * ring.from_fraction(c)
        pw = pw * zimg
    return acc


# ---------------------------------------------------------------------------
# imaginary quadratic field elements
# ---------------------------------------------------------------------------

CLASS_NUMBER_ONE_DISCS = (3, 4, 7, 8, 11, 19, 43, 67, 163)


@dataclass(frozen=True)
class QuadFieldElem:
    """a + b*sqrt(-d) with exact rational a, b; d a class-number-one parameter."""

    d: int
    a: Fraction
    b: Fraction

    def __post_init__(self):
        if self.d not in CLASS_NUMBER_ONE_DISCS:
            raise ArithError(f"unsupported discriminant parameter {self.d}")
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @staticmethod
    def rational(d: int, x) -> "QuadFieldElem":
        return QuadFieldElem(d, Fraction(x), Fraction(0))

    @staticmethod
    def sqrt_minus_d(d: int) -> "QuadFieldElem":
        return QuadFieldElem(d, Fraction(0), Fraction(1))

    def _check(self, other: "QuadFieldElem"):
        if self.d != other.d:
            raise ArithError("mixed quadratic fields")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QuadFieldElem.rational(self.d, other)
        self._check(other)
        return QuadFieldElem(self.d, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadFieldElem(self.d, -self.a, -self.b)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QuadFieldElem.rational(self.d, other)
        return self + (-other)

    def __rsub__(self, other):
        return QuadFieldElem.rational(self.d, other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return QuadFieldElem(self.d, self.a * q, self.b * q)
        self._check(other)
        return QuadFieldElem(
            self.d,
            self.a * other.a - self.d * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadFieldElem":
        return QuadFieldElem(self.d, self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a + self.d * self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def inverse(self) -> "QuadFieldElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero has no inverse")
        return QuadFieldElem(self.d, self.a / n, -self.b / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return self * other.inverse()

    def embed_split(self, p: int, precision: int) -> PadicNumber:
        """Image in Q_p for split p (sqrt(-d) goes to the canonical padic_sqrt)."""
        ring = PadicRing(p, precision)
        delta = padic_sqrt(ring.from_int(-self.d))
        den = lcm(self.a.denominator, self.b.denominator)
        if den % p == 0:
            raise ArithError(
                "element has p in a denominator; "
                "use valuation_at_split_prime for valuations")
        return ring.from_fraction(self.a) + ring.from_fraction(self.b) * delta

    def valuation_at_split_prime(self, p: int, precision: int = 12) -> Fraction:
        """v_p(a + b*delta) for the canonical prime above split p."""
        if self.is_zero():
            raise ArithError("zero has no finite valuation")
        den = lcm(self.a.denominator, self.b.denominator)
        t = _int_val(den, p, precision + 8)
        scaled = self * Fraction(p) ** t
        ring = PadicRing(p, precision + t + 2)
        delta = padic_sqrt(ring.from_int(-self.d))
        emb = ring.from_fraction(scaled.a) + ring.from_fraction(scaled.b) * delta
        v = emb.valuation()
        if v is None:
            raise ArithError("precision insufficient to resolve valuation")
        return v - t

    def __repr__(self):
        return f"Quad({self.a} + {self.b}*sqrt(-{self.d}))"


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)
