"""Multivariate rational-function engine over cyclotomic scalars.

The engine exists to replay interpolation-ratio cancellations: both sides of
an interpolation formula are assembled as products of period symbols, Euler
polynomial factors, and opaque atoms (L-series values, prime-to-p local
constants, Frobenius values), and their quotient is reduced to canonical
form.  A clean reduction is a monomial in the period symbols; any residual
polynomial factor or unresolved atom is the failure detector and is reported
verbatim.

Canonical form: a fraction with numerator and denominator kept as multisets
of primitive polynomial factors in a fixed graded-lexicographic monomial
order, leading coefficients normalized into the scalar, the relation
u * w = p^(k-1) * eps_f applied by eliminating w, and i reduced modulo
i^2 = -1.  L-values and prime-to-p epsilon factors are opaque unit atoms with
an explicit rewrite-rule list (inductivity, imprimitivity, epsilon
splitting, the functional equation); nothing analytic is ever estimated.
Expansions of the Gamma function happen at positive integers only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .arith import CycloNumber, zeta
from .chargroup import FinAbGroup, GroupChar, SemidirectGroup, char_table, conductor_exponent
from .grpring import Measure, assemble_from_components, idempotent_split
from .reps import ArtinRep, classify_irreps, rep_invariants

__all__ = [
    "SymError",
    "Relation",
    "SymExpr",
    "SYM",
    "SymCoeffs",
    "gamma_ratio",
    "RatioContext",
    "build_char_interpolation_rhs",
    "build_rep_interpolation_rhs",
    "reduce_ratio",
    "expected_period_ratio",
    "build_period_correction",
    "period_correction_inverse",
    "TwistUnitData",
    "ThetaRecord",
    "build_twist_unit",
    "twist_unit_evaluation",
    "twist_unit_expected",
    "check_twist_reproduces_variant",
]


class SymError(ValueError):
    pass


# base symbols
OM_PLUS = "Om+"
OM_MINUS = "Om-"
OM_INF = "Ominf"
OM_P = "Omp"
TWO_PI = "2pi"
I_UNIT = "i"
U = "u"
W = "w"
P = "p"
EPS_F = "eps_f"


@dataclass(frozen=True)
class Relation:
    """u * w = p^(k-1) * eps_f(p); weight 2 with trivial nebentypus by default."""

    k: int = 2
    trivial_nebentypus: bool = True


Mono = tuple[tuple[str, int], ...]  # sorted, nonzero exponents


def _mono_from_dict(d: dict) -> Mono:
    return tuple(sorted((s, e) for s, e in d.items() if e))


def _mono_mul(a: Mono, b: Mono) -> Mono:
    d = dict(a)
    for s, e in b:
        d[s] = d.get(s, 0) + e
    return _mono_from_dict(d)


def _mono_pow(a: Mono, n: int) -> Mono:
    return _mono_from_dict({s: e * n for s, e in a})


def _mono_key(m: Mono):
    return (sum(e for _, e in m), m)


Poly = tuple[tuple[Mono, CycloNumber], ...]  # sorted descending by _mono_key


def _poly_from_dict(d: dict) -> Poly:
    items = [(m, c) for m, c in d.items() if not c.is_zero()]
    items.sort(key=lambda t: _mono_key(t[0]), reverse=True)
    return tuple(items)


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: dict = {}
    for ma, ca in a:
        for mb, cb in b:
            m = _mono_mul(ma, mb)
            c = ca * cb
            out[m] = out[m] + c if m in out else c
    return _poly_from_dict(out)


def _poly_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for m, c in b:
        out[m] = out[m] + c if m in out else c
    return _poly_from_dict(out)


def _poly_scale(a: Poly, s: CycloNumber) -> Poly:
    return _poly_from_dict({m: c * s for m, c in a})


def _mono_divides(a: Mono, b: Mono) -> bool:
    db = dict(b)
    return all(db.get(s, 0) >= e for s, e in a)


def _mono_div(b: Mono, a: Mono) -> Mono:
    d = dict(b)
    for s, e in a:
        d[s] = d.get(s, 0) - e
    return _mono_from_dict(d)


def _poly_divide_exact(num: Poly, den: Poly) -> Poly | None:
    """Multivariate long division; quotient if the remainder vanishes."""
    if not den:
        raise SymError("division by the zero polynomial")
    rem = dict(num)
    quot: dict = {}
    lead_m, lead_c = den[0]
    guard = 0
    while rem:
        guard += 1
        if guard > 4096:
            return None
        m = max(rem, key=_mono_key)
        c = rem[m]
        if not _mono_divides(lead_m, m):
            return None
        qm = _mono_div(m, lead_m)
        qc = c / lead_c
        quot[qm] = quot.get(qm, CycloNumber.from_rational(0)) + qc
        for dm, dc in den:
            t = _mono_mul(qm, dm)
            nc = rem.get(t, CycloNumber.from_rational(0)) - qc * dc
            if nc.is_zero():
                rem.pop(t, None)
            else:
                rem[t] = nc
    return _poly_from_dict(quot)


class SymExpr:
    """Canonical factored fraction; immutable."""

    __slots__ = ("rel", "scalar", "mono", "num", "den")

    def __init__(self, rel: Relation, scalar, mono=None, num=(), den=(), _raw=False):
        if not isinstance(scalar, CycloNumber):
            scalar = CycloNumber.from_rational(Fraction(scalar))
        mono = mono or ()
        if isinstance(mono, dict):
            mono = _mono_from_dict(mono)
        if _raw:
            self.rel, self.scalar, self.mono, self.num, self.den = rel, scalar, mono, num, den
            return
        scalar, mono, num, den = _normalize(rel, scalar, mono, list(num), list(den))
        self.rel = rel
        self.scalar = scalar
        self.mono = mono
        self.num = num
        self.den = den

    # -- constructors -----------------------------------------------------

    @staticmethod
    def const(value, rel: Relation = Relation()) -> "SymExpr":
        return SymExpr(rel, value)

    @staticmethod
    def sym(name: str, power: int = 1, rel: Relation = Relation()) -> "SymExpr":
        return SymExpr(rel, 1, {name: power})

    @staticmethod
    def poly(terms: dict, rel: Relation = Relation()) -> "SymExpr":
        """terms: mono-dict -> scalar; a single polynomial factor."""
        p = _poly_from_dict({
            _mono_from_dict(dict(m)): (c if isinstance(c, CycloNumber)
                                       else CycloNumber.from_rational(Fraction(c)))
            for m, c in terms.items()})
        return SymExpr(rel, 1, (), [p], ())

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.scalar.is_zero()

    def is_monomial(self) -> bool:
        return not self.num and not self.den and not self.is_zero()

    def is_one(self) -> bool:
        return self.is_monomial() and not self.mono and self.scalar == 1

    def atoms(self) -> list[tuple[str, int]]:
        return [(s, e) for s, e in self.mono if s.startswith("@")]

    # -- arithmetic ------------------------------------------------------------

    def _chk(self, other: "SymExpr"):
        if self.rel != other.rel:
            raise SymError(f"relation mismatch: {self.rel} vs {other.rel}")

    def __mul__(self, other):
        if not isinstance(other, SymExpr):
            other = SymExpr(self.rel, other)
        self._chk(other)
        if self.is_zero() or other.is_zero():
            return SymExpr(self.rel, 0)
        return SymExpr(self.rel, self.scalar * other.scalar,
                       _mono_mul(self.mono, other.mono),
                       list(self.num) + list(other.num),
                       list(self.den) + list(other.den))

    __rmul__ = __mul__

    def inverse(self) -> "SymExpr":
        if self.is_zero():
            raise SymError("division by zero expression")
        return SymExpr(self.rel, self.scalar.inverse(), _mono_pow(self.mono, -1),
                       list(self.den), list(self.num))

    def __truediv__(self, other):
        if not isinstance(other, SymExpr):
            other = SymExpr(self.rel, other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return SymExpr(self.rel, other) / self

    def __pow__(self, n: int):
        if n == 0:
            return SymExpr(self.rel, 1)
        base = self if n > 0 else self.inverse()
        result = SymExpr(self.rel, 1)
        for _ in range(abs(n)):
            result = result * base
        return result

    def __neg__(self):
        return SymExpr(self.rel, -self.scalar, self.mono, list(self.num), list(self.den),
                       _raw=False)

    def _as_poly_pair(self) -> tuple[Poly, list[Poly]]:
        """(expanded numerator polynomial, denominator factor list)."""
        pos = {s: e for s, e in self.mono if e > 0}
        neg = {s: -e for s, e in self.mono if e < 0}
        npoly: Poly = ((_mono_from_dict(pos), self.scalar),)
        for p in self.num:
            npoly = _poly_mul(npoly, p)
        dens = list(self.den)
        if neg:
            dens.append(((_mono_from_dict(neg), CycloNumber.from_rational(1)),))
        return npoly, dens

    def __add__(self, other):
        if not isinstance(other, SymExpr):
            other = SymExpr(self.rel, other)
        self._chk(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        n1, d1 = self._as_poly_pair()
        n2, d2 = other._as_poly_pair()
        left = n1
        for p in d2:
            left = _poly_mul(left, p)
        right = n2
        for p in d1:
            right = _poly_mul(right, p)
        total = _poly_add(left, right)
        if not total:
            return SymExpr(self.rel, 0)
        return SymExpr(self.rel, 1, (), [total], d1 + d2)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, SymExpr):
            other = SymExpr(self.rel, other)
        return self + (-other)

    def __rsub__(self, other):
        return SymExpr(self.rel, other) - self

    # -- comparisons -------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, SymExpr):
            if self.is_zero():
                return Fraction(other) == 0
            return self.is_monomial() and not self.mono and self.scalar == other
        if self.rel != other.rel:
            return False
        if (self.scalar, self.mono) == (other.scalar, other.mono) and \
                self.num == other.num and self.den == other.den:
            return True
        diff = self - other
        return diff.is_zero()

    def __hash__(self):
        raise TypeError("symbolic expressions are not hashable")

    # -- rendering ------------------------------------------------------------

    def render(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        if self.scalar != 1 or (not self.mono and not self.num):
            parts.append(_render_cyclo(self.scalar))
        for s, e in self.mono:
            parts.append(s if e == 1 else f"{s}^{e}")
        for p in self.num:
            parts.append("(" + _render_poly(p) + ")")
        text = " * ".join(parts) if parts else "1"
        if self.den:
            text += " / [" + " * ".join("(" + _render_poly(p) + ")" for p in self.den) + "]"
        return text

    def __repr__(self):
        return f"SymExpr({self.render()})"

    # -- substitution ----------------------------------------------------------

    def substitute_pair(self, env: dict, ring):
        """(numerator value, denominator value) in the given coefficient ring."""

        def mono_val(m: Mono):
            nv, dv = ring.one(), ring.one()
            for s, e in m:
                if s not in env:
                    raise SymError(f"no substitution for symbol {s!r}")
                base = env[s]
                if e > 0:
                    for _ in range(e):
                        nv = nv * base
                else:
                    for _ in range(-e):
                        dv = dv * base
            return nv, dv

        def poly_val(p: Poly):
            total = ring.zero()
            for m, c in p:
                nv, dv = mono_val(m)
                if dv != ring.one():
                    raise SymError("polynomial factors must clear denominators first")
                total = total + ring.from_cyclo(c) * nv
            return total

        nv, dv = mono_val(self.mono)
        nv = nv * ring.from_cyclo(self.scalar)
        for p in self.num:
            nv = nv * poly_val(p)
        for p in self.den:
            dv = dv * poly_val(p)
        return nv, dv


def _render_cyclo(c: CycloNumber) -> str:
    if c.is_rational():
        return str(c.rational_value())
    return repr(c)


def _render_poly(p: Poly) -> str:
    terms = []
    for m, c in p:
        bits = [f"{s}^{e}" if e != 1 else s for s, e in m]
        cs = _render_cyclo(c)
        if bits:
            terms.append((cs + "*" if cs != "1" else "") + "*".join(bits))
        else:
            terms.append(cs)
    return " + ".join(terms) if terms else "0"


def _reduce_term(rel: Relation, mono_d: dict, coeff: CycloNumber):
    """Apply w-elimination and i-reduction to one term; mutates mono_d copy."""
    d = dict(mono_d)
    if W in d:
        e = d.pop(W)
        # w = p^(k-1) eps_f / u
        d[P] = d.get(P, 0) + (rel.k - 1) * e
        if not rel.trivial_nebentypus:
            d[EPS_F] = d.get(EPS_F, 0) + e
        d[U] = d.get(U, 0) - e
    if I_UNIT in d:
        e = d.pop(I_UNIT) % 4
        if e >= 2:
            coeff = -coeff
            e -= 2
        if e:
            d[I_UNIT] = e
    return {s: v for s, v in d.items() if v}, coeff


def _normalize(rel: Relation, scalar: CycloNumber, mono: Mono,
               num: list, den: list):
    if scalar.is_zero():
        return CycloNumber.from_rational(0), (), (), ()
    # monomial part
    md, scalar = _reduce_term(rel, dict(mono), scalar)
    # polynomial factors
    def canon(p) -> tuple[dict, Poly] | None:
        if isinstance(p, tuple):
            terms = {m: c for m, c in p}
        else:
            terms = dict(p)
        fixed: dict = {}
        for m, c in terms.items():
            mdict, c2 = _reduce_term(rel, dict(m), c)
            key = _mono_from_dict(mdict)
            fixed[key] = fixed.get(key, CycloNumber.from_rational(0)) + c2
        fixed = {m: c for m, c in fixed.items() if not c.is_zero()}
        if not fixed:
            return None  # zero factor
        # clear negative exponents
        mins: dict = {}
        for m in fixed:
            for s, e in m:
                if e < 0:
                    mins[s] = min(mins.get(s, 0), e)
        shift = {s: -e for s, e in mins.items()}
        if shift:
            shifted = {}
            for m, c in fixed.items():
                shifted[_mono_mul(m, _mono_from_dict(shift))] = c
            fixed = shifted
        poly = _poly_from_dict(fixed)
        return ({s: -e for s, e in shift.items()}, poly)

    new_num: list[Poly] = []
    new_den: list[Poly] = []
    for side_in, side_out, sign in ((num, new_num, 1), (den, new_den, -1)):
        for p in side_in:
            res = canon(p)
            if res is None:
                if sign == 1:
                    return CycloNumber.from_rational(0), (), (), ()
                raise SymError("zero polynomial in a denominator")
            shift_mono, poly = res
            for s, e in shift_mono.items():
                md[s] = md.get(s, 0) + sign * e
            # fold single-term polys into the monomial part
            if len(poly) == 1:
                m, c = poly[0]
                for s, e in m:
                    md[s] = md.get(s, 0) + sign * e
                scalar = scalar * c if sign == 1 else scalar * c.inverse()
                continue
            # pull the leading coefficient into the scalar
            lead = poly[0][1]
            if not (lead == 1):
                poly = _poly_scale(poly, lead.inverse())
                scalar = scalar * lead if sign == 1 else scalar * lead.inverse()
            side_out.append(poly)
    # cancel identical factors
    i = 0
    while i < len(new_num):
        p = new_num[i]
        if p in new_den:
            new_den.remove(p)
            new_num.pop(i)
            continue
        i += 1
    # attempted exact division both ways
    changed = True
    while changed and new_num and new_den:
        changed = False
        for i, n in enumerate(new_num):
            for j, d in enumerate(new_den):
                q = _poly_divide_exact(n, d)
                if q is not None:
                    new_num.pop(i)
                    new_den.pop(j)
                    res = canon(q)
                    if res is None:
                        return CycloNumber.from_rational(0), (), (), ()
                    shift_mono, poly = res
                    for s, e in shift_mono.items():
                        md[s] = md.get(s, 0) + e
                    if len(poly) == 1:
                        m, c = poly[0]
                        for s, e in m:
                            md[s] = md.get(s, 0) + e
                        scalar = scalar * c
                    else:
                        lead = poly[0][1]
                        if not (lead == 1):
                            poly = _poly_scale(poly, lead.inverse())
                            scalar = scalar * lead
                        new_num.append(poly)
                    changed = True
                    break
                q = _poly_divide_exact(d, n)
                if q is not None:
                    new_den.pop(j)
                    new_num.pop(i)
                    res = canon(q)
                    if res is None:
                        raise SymError("zero polynomial in a denominator")
                    shift_mono, poly = res
                    for s, e in shift_mono.items():
                        md[s] = md.get(s, 0) - e
                    if len(poly) == 1:
                        m, c = poly[0]
                        for s, e in m:
                            md[s] = md.get(s, 0) - e
                        scalar = scalar * c.inverse()
                    else:
                        lead = poly[0][1]
                        if not (lead == 1):
                            poly = _poly_scale(poly, lead.inverse())
                            scalar = scalar * lead.inverse()
                        new_den.append(poly)
                    changed = True
                    break
            if changed:
                break
    new_num.sort(key=_render_poly)
    new_den.sort(key=_render_poly)
    return scalar, _mono_from_dict(md), tuple(new_num), tuple(new_den)


# ---------------------------------------------------------------------------
# coefficient-ring adapter so measures can carry symbolic coefficients
# ---------------------------------------------------------------------------

class SymCoeffs:
    name = "symbolic"

    def __init__(self, rel: Relation = Relation()):
        self.rel = rel

    def zero(self):
        return SymExpr(self.rel, 0)

    def one(self):
        return SymExpr(self.rel, 1)

    def from_int(self, n):
        return SymExpr(self.rel, n)

    def from_fraction(self, q):
        return SymExpr(self.rel, Fraction(q))

    def from_cyclo(self, c):
        return SymExpr(self.rel, c)

    def is_zero(self, x):
        return x.is_zero()

    def inv(self, x):
        return x.inverse()

    def mul_by_root(self, x, m, k):
        return x * SymExpr(self.rel, zeta(m, k))


SYM = SymCoeffs()


# ---------------------------------------------------------------------------
# Gamma bookkeeping
# ---------------------------------------------------------------------------

def gamma_ratio(k: int, j: int, rel: Relation | None = None) -> SymExpr:
    """Gamma_psi(1-j) / Gamma_psibar(k-1+j) in canonical form.

    Computed two ways and compared: from the definition
    Gamma_phi(s) = Gamma(s - min(type)) / (2pi)^(s - min(type)) for the types
    (k-1, 0) and (0, k-1), and from the displayed closed form
    Gamma(1-j)/Gamma(k-1+j) * (2pi)^(k-2+2j).  Gamma is expanded at positive
    integers only; a pole argument raises.
    """
    rel = rel or Relation(k=k)
    if 1 - j <= 0 or k - 1 + j <= 0:
        raise SymError(f"Gamma pole at (k={k}, j={j}); expansion refused")
    # definition path: types (k-1,0) and (0,k-1) both have min = 0
    via_definition = (
        SymExpr(rel, Fraction(factorial(-j)))
        / SymExpr(rel, Fraction(factorial(k - 2 + j)))
        * SymExpr.sym(TWO_PI, -(1 - j), rel) / SymExpr.sym(TWO_PI, -(k - 1 + j), rel)
    )
    closed_form = (
        SymExpr(rel, Fraction(factorial(-j), factorial(k - 2 + j)))
        * SymExpr.sym(TWO_PI, k - 2 + 2 * j, rel)
    )
    if not (via_definition == closed_form):
        raise SymError("gamma bookkeeping mismatch (internal)")
    return closed_form


# ---------------------------------------------------------------------------
# ratio context: one tower level, one weight
# ---------------------------------------------------------------------------

@dataclass
class RatioContext:
    """Concrete finite level (group, characters, conductors) plus weight data."""

    sg: SemidirectGroup
    k: int = 2
    trivial_nebentypus: bool = True

    def __post_init__(self):
        if self.k == 2 and not self.trivial_nebentypus:
            raise SymError("weight 2 runs use a trivial nebentypus here")
        self.rel = Relation(self.k, self.trivial_nebentypus)
        self.chars = char_table(self.sg.base)
        self.index = {chi.exponents: i for i, chi in enumerate(self.chars)}
        self.reps = classify_irreps(self.sg)
        self.registry: dict[str, tuple] = {}

    # -- char bookkeeping --------------------------------------------------

    def chi(self, idx: int) -> GroupChar:
        return self.chars[idx]

    def idx_of(self, chi: GroupChar) -> int:
        return self.index[chi.exponents]

    def conj_idx(self, idx: int) -> int:
        return self.idx_of(self.sg.conjugate_char(self.chars[idx]))

    def inv_idx(self, idx: int) -> int:
        return self.idx_of(self.chars[idx].inverse())

    def f_place(self, idx: int, place: str) -> int:
        label = "pbar" if place in ("pb", "pbar") else "p"
        return conductor_exponent(self.chars[idx], label)

    def rep_index(self, rho: ArtinRep) -> int:
        for i, r in enumerate(self.reps):
            if r.same_character(rho):
                return i
        raise SymError("representation is not in the classified list")

    # -- atom constructors (conjugation-normalized) ---------------------------

    def _norm_place_char(self, place: str, idx: int) -> tuple[str, int]:
        ci = self.conj_idx(idx)
        if ci == idx:
            return "p", idx
        if ci < idx:
            return ("pb" if place == "p" else "p"), ci
        return place, idx

    def eps_atom(self, place: str, idx: int) -> SymExpr:
        place, idx = self._norm_place_char(place, idx)
        name = f"@e[{place}](c{idx})"
        self.registry[name] = ("eps-terminal", place, idx)
        return SymExpr.sym(name, 1, self.rel)

    def fr_symbol(self, place: str, idx: int) -> str | None:
        """Frobenius-value symbol; None means the concrete value 1 (trivial chi)."""
        if self.chars[idx].is_trivial():
            return None
        place, idx = self._norm_place_char(place, idx)
        name = f"@fr[{place}](c{idx})"
        self.registry[name] = ("fr-terminal", place, idx)
        return name

    def euler_factor(self, place: str, idx: int, arg: dict, psi_side: str = "") -> SymExpr:
        """P_place(psi-part * chi_idx, arg) as a polynomial factor (1 if ramified).

        psi_side in {"", "psibar", "psi"}: the unramified weight character whose
        Frobenius value enters through u, w, p, eps_f.
        """
        if self.f_place(idx, place) > 0:
            return SymExpr(self.rel, 1)
        frob: dict = dict(arg)
        if psi_side == "psi":
            # F_p(psi) = w, F_pbar(psi) = u
            frob[W if place == "p" else U] = frob.get(W if place == "p" else U, 0) + 1
        elif psi_side == "psibar":
            # F_p(psibar) = p^(k-1)/w, F_pbar(psibar) = p^(k-1)/u
            frob[P] = frob.get(P, 0) + (self.k - 1)
            t = W if place == "p" else U
            frob[t] = frob.get(t, 0) - 1
        fsym = self.fr_symbol(place, idx)
        if fsym is not None:
            frob[fsym] = frob.get(fsym, 0) + 1
        return SymExpr.poly({(): 1, tuple(sorted(frob.items())): -1}, self.rel)

    def L_atom(self, side: str, idx: int, s_tag: str, imprimitive: bool) -> SymExpr:
        tag = "Lpp" if imprimitive else "L"
        name = f"@{tag}[{side}*c{idx};s={s_tag}]"
        self.registry[name] = ("L-primitive" if not imprimitive else "L-terminal",
                               side, idx, s_tag)
        return SymExpr.sym(name, 1, self.rel)

    def rep_atom(self, kind: str, rep_idx: int, extra: str = "") -> SymExpr:
        name = f"@{kind}[r{rep_idx}{(';' + extra) if extra else ''}]"
        self.registry[name] = (kind, rep_idx, extra)
        return SymExpr.sym(name, 1, self.rel)


# ---------------------------------------------------------------------------
# measure-side templates (one evaluation character)
# ---------------------------------------------------------------------------

VARIANTS = ("elliptic-p", "elliptic-pbar", "weightk-1", "weightk-2")


def build_char_interpolation_rhs(ctx: RatioContext, eval_idx: int, variant: str,
                                 j: int = 0) -> SymExpr:
    """Formal right-hand side of the selected interpolation formula, as a
    function of the evaluation character (by stable index).

    elliptic-p / elliptic-pbar: the two weight-2 variants, differing in the
    place of the epsilon term and conductor exponent (evaluation at xi reads
    off L(psibar * xi^-1, 1)).  weightk-1 / weightk-2: the weight-k
    variants at twist j (the evaluation character is chi in the displayed
    formulas, with L at psibar*chi resp. psi*chi^-1).
    """
    if variant not in VARIANTS:
        raise SymError(f"unknown variant {variant!r}")
    rel = ctx.rel
    if variant.startswith("elliptic"):
        if ctx.k != 2 or j != 0:
            raise SymError("elliptic variants need k = 2, j = 0")
        xi = eval_idx
        xibar = ctx.inv_idx(xi)
        place = "p" if variant == "elliptic-p" else "pb"
        fexp = ctx.f_place(xi, "p" if place == "p" else "pbar")
        expr = ctx.L_atom("psibar", xibar, "1", imprimitive=False)
        expr = expr * SymExpr.sym(OM_INF, -1, rel)
        expr = expr * ctx.eps_atom(place, xi)
        expr = expr * ctx.euler_factor("p", xi, {U: -1})
        expr = expr * ctx.euler_factor("pb", xibar, {U: -1})
        expr = expr * SymExpr.sym(U, -fexp, rel)
        return expr
    if not (0 <= -j and 0 < ctx.k - 1 + j):
        raise SymError(f"(k={ctx.k}, j={j}) outside the admissible range")
    chi = eval_idx
    chibar = ctx.inv_idx(chi)
    k = ctx.k
    gamma_scalar = SymExpr(rel, Fraction(factorial(k - 2 + j)))
    common = (
        gamma_scalar
        * SymExpr.sym(I_UNIT, j, rel)
        * SymExpr.sym(TWO_PI, -j, rel)
        * SymExpr.sym(OM_INF, -(k - 1), rel)
        * ctx.euler_factor("p", chibar, {W: 1, P: j - 1})
        * ctx.euler_factor("pb", chi, {U: -1, P: -j})
    )
    f_p_bar = ctx.f_place(chibar, "p")
    f_pb_bar = ctx.f_place(chibar, "pbar")
    if variant == "weightk-1":
        return (
            common
            * ctx.L_atom("psibar", chi, f"{k - 1 + j}", imprimitive=False)
            * ctx.eps_atom("p", chibar)
            * SymExpr(rel, 1, {W: f_p_bar, P: -f_p_bar + j * f_p_bar})
        )
    return (
        common
        * ctx.L_atom("psi", chibar, f"{1 - j}", imprimitive=False)
        * ctx.eps_atom("pb", chi)
        * SymExpr(rel, 1, {U: -f_pb_bar, P: -j * f_p_bar})
        * gamma_ratio(k, j, rel)
    )


# ---------------------------------------------------------------------------
# representation-side targets
# ---------------------------------------------------------------------------

def build_rep_interpolation_rhs(ctx: RatioContext, rho: ArtinRep,
                                variant: str = "elliptic", j: int = 0) -> SymExpr:
    """Formal right-hand side of the interpolation formula at a representation.

    'elliptic': the weight-2 formula
      L_R(E, rho, 1) / (Om+^{d+} Om-^{d-}) e_p(rho-dual) P_p(rho-dual, u^-1)
      / P_p(rho, w^-1) u^{-f_p(rho-dual)}   (R = {p} for these curves).
    'weightk-1' / 'weightk-2': the two weight-k targets at twist j.
    The composite rho-level atoms expand under reduce_ratio's rewrite rules.
    """
    rel = ctx.rel
    inv = rep_invariants(rho)
    ridx = ctx.rep_index(rho)
    d = rho.dimension
    f_p_dual = _f_p_of_dual(ctx, rho)
    periods = SymExpr.sym(OM_PLUS, -inv.d_plus, rel) * SymExpr.sym(OM_MINUS, -inv.d_minus, rel)
    if variant == "elliptic":
        if ctx.k != 2 or j != 0:
            raise SymError("elliptic target needs k = 2, j = 0")
        return (
            ctx.rep_atom("LR", ridx)
            * periods
            * ctx.rep_atom("eP", ridx, "bar")
            * ctx.rep_atom("PP", ridx, "bar;u^-1")
            / ctx.rep_atom("PP", ridx, "w^-1")
            * SymExpr.sym(U, -f_p_dual, rel)
        )
    if not (0 <= -j and 0 < ctx.k - 1 + j):
        raise SymError(f"(k={ctx.k}, j={j}) outside the admissible range")
    k = ctx.k
    if variant == "weightk-1":
        return (
            SymExpr(rel, Fraction(factorial(k - 2 + j)) ** d)
            * SymExpr.sym(I_UNIT, d * j, rel)
            * ctx.rep_atom("LppSeries", ridx, f"psibar;{k - 1 + j}")
            * SymExpr.sym(TWO_PI, -d * (k - 2 + j), rel)
            * periods
            * ctx.rep_atom("eP", ridx, "bar")
            * ctx.rep_atom("PP", ridx, f"bar;w^1*p^{j - 1}")
            / ctx.rep_atom("PP", ridx, f"w^-1*p^{-j}")
            * SymExpr(rel, 1, {W: f_p_dual, P: (j - 1) * f_p_dual})
        )
    if variant == "weightk-2":
        return (
            SymExpr(rel, Fraction(factorial(-j)) ** d)
            * SymExpr.sym(I_UNIT, d * j, rel)
            * ctx.rep_atom("LppSeries", ridx, f"psi;{1 - j}")
            * SymExpr.sym(TWO_PI, d * j, rel)
            * periods
            * ctx.rep_atom("eP", ridx, "")
            * ctx.rep_atom("PP", ridx, f"u^-1*p^{-j}")
            / ctx.rep_atom("PP", ridx, f"bar;u^1*p^{j - 1}")
            * SymExpr(rel, 1, {U: -f_p_dual, P: -j * f_p_dual})
        )
    raise SymError(f"unknown target variant {variant!r}")


def _f_p_of_dual(ctx: RatioContext, rho: ArtinRep) -> int:
    dual = rho.contragredient()
    if rho.kind == "induced":
        return (conductor_exponent(dual.chi, "p") + conductor_exponent(dual.chi, "pbar"))
    return conductor_exponent(dual.chi, "pbar")


def expected_period_ratio(ctx: RatioContext, rho: ArtinRep) -> SymExpr:
    """The value the measure/target ratio must reduce to: the evaluation of
    the period-correction unit at the contragredient representation."""
    rel = ctx.rel
    k = ctx.k
    a = SymExpr.sym(TWO_PI, k - 2, rel) * SymExpr.sym(OM_PLUS, 1, rel) * \
        SymExpr.sym(OM_INF, -(k - 1), rel)
    b = SymExpr.sym(TWO_PI, k - 2, rel) * SymExpr.sym(OM_MINUS, 1, rel) * \
        SymExpr.sym(OM_INF, -(k - 1), rel)
    if rho.kind == "induced":
        return a * b
    return a if rho.sign == 1 else b


# ---------------------------------------------------------------------------
# rewrite rules and the reduction loop
# ---------------------------------------------------------------------------

def _arg_from_tag(tag: str) -> dict:
    """'u^-1*p^-2' -> {'u': -1, 'p': -2} ('' -> {})."""
    out: dict = {}
    if not tag:
        return out
    for part in tag.split("*"):
        sym, _, e = part.partition("^")
        out[sym] = out.get(sym, 0) + (int(e) if e else 1)
    return out


def _restriction_indices(ctx: RatioContext, rep_idx: int, bar: bool) -> list[int]:
    rho = ctx.reps[rep_idx]
    target = rho.contragredient() if bar else rho
    return [ctx.idx_of(c) for c in target.restriction()]


def _expand_atom(ctx: RatioContext, name: str) -> tuple[str, SymExpr] | None:
    """(rule name, replacement) for one composite atom, or None if terminal."""
    entry = ctx.registry.get(name)
    if entry is None:
        raise SymError(f"unregistered atom {name!r}")
    kind = entry[0]
    rel = ctx.rel
    if kind in ("eps-terminal", "fr-terminal", "L-terminal", "epsQ-terminal"):
        return None
    if kind == "LR":
        # L with the Euler factor at p removed = full L times that factor
        _, ridx, _ = entry
        repl = ctx.rep_atom("Lfull", ridx, "1") * ctx.rep_atom("PEuler", ridx, "1")
        return ("imprimitive-L-series", repl)
    if kind == "Lfull":
        _, ridx, s_tag = entry
        repl = SymExpr(rel, 1)
        for cidx in _restriction_indices(ctx, ridx, bar=False):
            repl = repl * ctx.L_atom("psibar", cidx, s_tag, imprimitive=False)
        return ("induction", repl)
    if kind == "LppSeries":
        _, ridx, extra = entry
        side, s_tag = extra.split(";")
        bar = side == "psi"  # the psi-side target is the dual motive at rho-dual
        repl = SymExpr(rel, 1)
        for cidx in _restriction_indices(ctx, ridx, bar=bar):
            repl = repl * ctx.L_atom(side, cidx, s_tag, imprimitive=True)
        return ("induction", repl)
    if kind == "PEuler":
        _, ridx, s_tag = entry
        s = int(s_tag)
        repl = SymExpr(rel, 1)
        for cidx in _restriction_indices(ctx, ridx, bar=False):
            for place in ("p", "pb"):
                repl = repl * ctx.euler_factor(place, cidx, {P: -s}, psi_side="psibar")
        return ("euler-factor-split", repl)
    if kind == "L-primitive":
        _, side, cidx, s_tag = entry
        s = int(s_tag)
        repl = ctx.L_atom(side, cidx, s_tag, imprimitive=True)
        for place in ("p", "pb"):
            repl = repl / ctx.euler_factor(place, cidx, {P: -s}, psi_side=side)
        return ("imprimitive-expand", repl)
    if kind == "eP":
        _, ridx, extra = entry
        bar = extra == "bar"
        rho = ctx.reps[ridx]
        chars = _restriction_indices(ctx, ridx, bar)
        if rho.kind == "induced":
            cidx = chars[0]
            repl = ctx.eps_atom("p", cidx) * ctx.eps_atom("pb", cidx)
        else:
            repl = ctx.eps_atom("pb", chars[0])
        return ("epsilon-split", repl)
    if kind == "PP":
        _, ridx, extra = entry
        if extra.startswith("bar;"):
            bar, arg_tag = True, extra[4:]
        else:
            bar, arg_tag = False, extra
        arg = _arg_from_tag(arg_tag)
        rho = ctx.reps[ridx]
        chars = _restriction_indices(ctx, ridx, bar)
        if rho.kind == "induced":
            cidx = chars[0]
            repl = ctx.euler_factor("p", cidx, arg) * ctx.euler_factor("pb", cidx, arg)
        else:
            repl = ctx.euler_factor("p", chars[0], arg)
        return ("euler-split", repl)
    raise SymError(f"no expansion rule for atom kind {kind!r}")


def reduce_ratio(ctx: RatioContext, numerator: SymExpr, denominator: SymExpr,
                 j: int = 0, want_trace: bool = False):
    """Reduce numerator/denominator by the rewrite rules to canonical form.

    Returns (expression, trace); the trace lists each rule application with
    the expression before and after.  A fully cancelled result is a monomial;
    anything else (leftover polynomial factors, unresolved atoms) is the
    caller's failure witness.
    """
    expr = numerator / denominator
    trace: list[dict] = []
    guard = 0
    while True:
        guard += 1
        if guard > 500:
            raise SymError("rewrite loop did not terminate")
        progress = False
        for name, e in expr.atoms():
            expansion = _expand_atom(ctx, name)
            if expansion is None:
                continue
            rule, repl = expansion
            before = expr.render() if want_trace else None
            expr = expr * SymExpr.sym(name, -e, ctx.rel) * repl ** e
            if want_trace:
                trace.append({
                    "rule": rule,
                    "atom": name,
                    "exponent": e,
                    "replacement": repl.render(),
                    "before": before,
                    "after": expr.render(),
                })
            progress = True
            break
        if not progress:
            break
    return expr, trace


# ---------------------------------------------------------------------------
# period-correction unit
# ---------------------------------------------------------------------------

def build_period_correction(ctx: RatioContext) -> Measure:
    """a (1+c)/2 + b (1-c)/2 with a, b the weight-k period-change units."""
    rel = ctx.rel
    ring = SymCoeffs(rel)
    k = ctx.k
    a = SymExpr.sym(TWO_PI, k - 2, rel) * SymExpr.sym(OM_PLUS, 1, rel) * \
        SymExpr.sym(OM_INF, -(k - 1), rel)
    b = SymExpr.sym(TWO_PI, k - 2, rel) * SymExpr.sym(OM_MINUS, 1, rel) * \
        SymExpr.sym(OM_INF, -(k - 1), rel)
    half = SymExpr(rel, Fraction(1, 2))
    e = (ctx.sg.base.identity(), 0)
    c = (ctx.sg.base.identity(), 1)
    return Measure(ctx.sg, ring, {e: (a + b) * half, c: (a - b) * half})


def period_correction_inverse(ctx: RatioContext) -> Measure:
    """The explicit inverse a^-1 (1+c)/2 + b^-1 (1-c)/2."""
    lom = build_period_correction(ctx)
    e = (ctx.sg.base.identity(), 0)
    c = (ctx.sg.base.identity(), 1)
    a_plus_b = lom.coeffs[e]
    a_minus_b = lom.coeffs.get(c, SymExpr(ctx.rel, 0))
    half = SymExpr(ctx.rel, Fraction(1, 2))
    a = a_plus_b + a_minus_b
    b = a_plus_b - a_minus_b
    return Measure(ctx.sg, lom.ring, {e: (a.inverse() + b.inverse()) * half,
                                      c: (a.inverse() - b.inverse()) * half})


# ---------------------------------------------------------------------------
# prime-to-p twist unit
# ---------------------------------------------------------------------------

@dataclass
class ThetaRecord:
    """Per-theta data: the opaque prime-to-p epsilon product (a declared
    unit), the norm of the conductor-different product, and the reciprocity
    element in the Gamma part (kappa value 1/norm under the inverse-Frobenius
    identification)."""

    theta_exponents: tuple
    norm: int
    sigma: tuple
    label: str

    def epsq_atom(self, ctx: RatioContext) -> str:
        name = f"@epsQ({self.label})"
        ctx.registry[name] = ("epsQ-terminal", self.label)
        return name

    def gamma_value(self, ctx: RatioContext, chi_gamma_idx_or_char) -> SymExpr:
        """chibar_Gamma(sigma) as an exact scalar."""
        chi = chi_gamma_idx_or_char
        return SymExpr(ctx.rel, chi.inverse().value(self.sigma))


@dataclass
class TwistUnitData:
    gamma_group: FinAbGroup
    delta_group: FinAbGroup
    records: list[ThetaRecord]

    def full_group(self) -> FinAbGroup:
        return FinAbGroup(self.delta_group.orders + self.gamma_group.orders)


def build_twist_unit(ctx: RatioContext, data: TwistUnitData) -> Measure:
    """Assemble the unit E from its theta components ((1/N) epsQ sigma^-1)."""
    ring = SymCoeffs(ctx.rel)
    thetas = char_table(data.delta_group)
    want = {t.exponents for t in thetas}
    have = {r.theta_exponents for r in data.records}
    if want != have:
        raise SymError("need exactly one theta record per Delta-character")
    components = {}
    for rec in data.records:
        if rec.norm <= 0:
            raise SymError("norms must be positive integers")
        coeff = (SymExpr(ctx.rel, Fraction(1, rec.norm))
                 * SymExpr.sym(rec.epsq_atom(ctx), 1, ctx.rel))
        components[rec.theta_exponents] = Measure(
            data.gamma_group, ring,
            {data.gamma_group.neg(rec.sigma): coeff})
    group = data.full_group()
    delta_idx = tuple(range(data.delta_group.rank))
    return assemble_from_components(components, group, delta_idx)


def twist_unit_evaluation(ctx: RatioContext, data: TwistUnitData, E: Measure,
                          theta_exponents: tuple, chi_gamma: GroupChar,
                          j: int) -> SymExpr:
    """E(chi kappa^j) through the measure machinery: project the theta
    component by the idempotent split, then sum chi_Gamma kappa^j over the
    support.  kappa(sigma_theta) = 1/norm (inverse-Frobenius identification),
    declared on the component supports."""
    delta_idx = tuple(range(data.delta_group.rank))
    comps = idempotent_split(E, delta_idx)
    comp = comps[theta_exponents]
    rec = next(r for r in data.records if r.theta_exponents == theta_exponents)
    kappa_on_sigma_inv = Fraction(rec.norm)  # kappa(sigma^-1) = norm
    total = SymExpr(ctx.rel, 0)
    for x, c in comp.coeffs.items():
        if x != data.gamma_group.neg(rec.sigma):
            raise SymError("component supported off the declared sigma element")
        total = total + c * SymExpr(ctx.rel, chi_gamma.value(x)) * \
            SymExpr(ctx.rel, kappa_on_sigma_inv ** j)
    return total


def twist_unit_expected(ctx: RatioContext, data: TwistUnitData,
                        theta_exponents: tuple, chi_gamma: GroupChar,
                        j: int) -> SymExpr:
    """The displayed evaluation: i^(1-k) times the psi-convention product,
    expanded as i^(1-k) i^(k-1) chibar_Gamma(sigma) N^(j-1) epsQ(theta)."""
    rec = next(r for r in data.records if r.theta_exponents == theta_exponents)
    rel = ctx.rel
    return (
        SymExpr.sym(I_UNIT, 1 - ctx.k, rel)
        * SymExpr.sym(I_UNIT, ctx.k - 1, rel)
        * rec.gamma_value(ctx, chi_gamma)
        * SymExpr(rel, Fraction(rec.norm) ** (j - 1))
        * SymExpr.sym(rec.epsq_atom(ctx), 1, rel)
    )


def check_twist_reproduces_variant(ctx: RatioContext, data: TwistUnitData,
                                   eval_idx: int, theta_exponents: tuple,
                                   chi_gamma: GroupChar, j: int) -> bool:
    """Twisting the direct weight-k formula by E yields the twisted variant.

    Uses the functional-equation rewrite: the direct formula times the E
    evaluation must reduce to the twisted formula once the L-series, epsilon
    and conductor terms are traded through the functional equation.
    """
    rel = ctx.rel
    k = ctx.k
    chibar = ctx.inv_idx(eval_idx)
    f_p_bar = ctx.f_place(chibar, "p")
    f_pb_bar = ctx.f_place(chibar, "pbar")
    rec = next(r for r in data.records if r.theta_exponents == theta_exponents)
    # functional equation, solved for the direct-side combination:
    # L(psibar chi, k-1+j) e_p(chibar) (w/p)^f p^(jf)
    #   = GammaRatio * A^-1 * L(psi chibar, 1-j) e_pb(chi) u^(-fbar) p^(-jf)
    # with A the prime-to-p adelic constant product, which theta-splits as
    # i^(k-1) chibar_Gamma(sigma) N^(j-1) epsQ(theta).
    a_split = (rec.gamma_value(ctx, chi_gamma)
               * SymExpr(rel, Fraction(rec.norm) ** (j - 1))
               * SymExpr.sym(rec.epsq_atom(ctx), 1, rel))
    fe_lhs = (ctx.L_atom("psibar", eval_idx, f"{k - 1 + j}", imprimitive=False)
              * ctx.eps_atom("p", chibar)
              * SymExpr(rel, 1, {W: f_p_bar, P: (j - 1) * f_p_bar}))
    fe_rhs = (gamma_ratio(k, j, rel)
              * a_split.inverse()
              * ctx.L_atom("psi", chibar, f"{1 - j}", imprimitive=False)
              * ctx.eps_atom("pb", eval_idx)
              * SymExpr(rel, 1, {U: -f_pb_bar, P: -j * f_p_bar}))
    direct = build_char_interpolation_rhs(ctx, eval_idx, "weightk-1", j)
    e_value = twist_unit_evaluation(ctx, data, build_twist_unit(ctx, data),
                                    theta_exponents, chi_gamma, j)
    twisted = build_char_interpolation_rhs(ctx, eval_idx, "weightk-2", j)
    # substitute the FE into the direct side: direct * E = twisted
    lhs = direct * e_value / fe_lhs * fe_rhs
    return lhs == twisted
