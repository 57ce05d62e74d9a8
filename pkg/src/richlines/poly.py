"""Exact polynomials: sparse trivariate ``TriPoly`` and dense univariate ``UniPoly``.

A ``TriPoly`` built as a product remembers its factors; the factor list is
what the partitioning and surface code treat as the components of the zero
set.  Univariate polynomials appear as restrictions of trivariate ones to
lines and carry Sturm-sequence root isolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exact import Line3, Q, q_str
from .linalg import rank

Exps = Tuple[int, int, int]

__all__ = [
    "TriPoly",
    "UniPoly",
    "X1",
    "X2",
    "X3",
    "monomials",
    "restrict_to_line",
    "line_in_zero_set",
    "line_in_zero_set_sampled",
    "gradient",
    "isolate_real_roots",
    "sturm_count",
    "sign_vector_at",
    "bezout_lines_check",
    "BezoutReport",
    "classify_irreducibility",
    "plane",
]


def monomials(degree: int) -> List[Exps]:
    """All exponent triples of total degree <= ``degree`` (graded, then lex)."""
    out = []
    for d in range(degree + 1):
        for e1 in range(d, -1, -1):
            for e2 in range(d - e1, -1, -1):
                out.append((e1, e2, d - e1 - e2))
    return out


class TriPoly:
    """Polynomial in x1, x2, x3 with rational coefficients.

    ``terms`` maps exponent triples to nonzero Fractions.  ``factors`` is an
    optional tuple of TriPolys whose product equals this polynomial.
    """

    __slots__ = ("terms", "factors", "_hash")

    def __init__(self, terms: Optional[Dict[Exps, object]] = None, factors: Optional[Sequence["TriPoly"]] = None):
        clean = {}
        for e, c in (terms or {}).items():
            c = Q(c)
            if c:
                clean[tuple(e)] = c
        self.terms: Dict[Exps, Fraction] = clean
        self.factors: Optional[Tuple[TriPoly, ...]] = tuple(factors) if factors else None
        self._hash = None

    # construction ---------------------------------------------------------
    @classmethod
    def const(cls, c) -> "TriPoly":
        return cls({(0, 0, 0): c})

    @classmethod
    def from_product(cls, factors: Sequence["TriPoly"]) -> "TriPoly":
        """Expanded product that keeps ``factors`` as its component list."""
        out = TriPoly.const(1)
        for f in factors:
            out = out * f
        return cls(out.terms, factors=list(factors))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, degree: int) -> "TriPoly":
        return cls(dict(zip(monomials(degree), coeffs)))

    # basic queries ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def components(self) -> Tuple["TriPoly", ...]:
        return self.factors if self.factors else (self,)

    def __eq__(self, other) -> bool:
        if isinstance(other, TriPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == TriPoly.const(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"TriPoly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
            c = self.terms[e]
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                parts.append(q_str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{q_str(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # arithmetic ------------------------------------------------------------
    def __add__(self, other) -> "TriPoly":
        other = _lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return TriPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "TriPoly":
        return TriPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "TriPoly":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "TriPoly":
        return _lift(other) - self

    def __mul__(self, other) -> "TriPoly":
        other = _lift(other)
        out: Dict[Exps, Fraction] = {}
        for e, c in self.terms.items():
            for f, d in other.terms.items():
                k = (e[0] + f[0], e[1] + f[1], e[2] + f[2])
                out[k] = out.get(k, 0) + c * d
        return TriPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TriPoly":
        out = TriPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def scale(self, c) -> "TriPoly":
        c = Q(c)
        return TriPoly({e: v * c for e, v in self.terms.items()})

    def normalized(self) -> "TriPoly":
        """Scalar multiple with leading coefficient 1 (graded lex order).

        Used as the identity of a zero set when deduplicating surfaces.
        """
        if not self.terms:
            return self
        lead = max(self.terms, key=lambda e: (sum(e), e))
        c = self.terms[lead]
        factors = None
        if self.factors:
            factors = [f.normalized() for f in self.factors]
        out = TriPoly({e: v / c for e, v in self.terms.items()}, factors=factors)
        return out

    def diff(self, i: int) -> "TriPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return TriPoly(out)

    def __call__(self, x: Sequence) -> Fraction:
        return self.eval(x)

    def eval(self, x: Sequence) -> Fraction:
        x = [Q(v) for v in x]
        deg = self.degree()
        if deg < 0:
            return Fraction(0)
        pw = [[Fraction(1)] for _ in range(3)]
        for i in range(3):
            for _ in range(deg):
                pw[i].append(pw[i][-1] * x[i])
        total = Fraction(0)
        for e, c in self.terms.items():
            total += c * pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]]
        return total

    def divmod(self, other: "TriPoly") -> Tuple["TriPoly", "TriPoly"]:
        """Multivariate division by a single divisor in graded lex order.

        With one divisor the remainder is zero exactly when ``other``
        divides ``self``.
        """
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        key = lambda e: (sum(e), e)  # noqa: E731
        lt = max(other.terms, key=key)
        lc = other.terms[lt]
        p = dict(self.terms)
        quo: Dict[Exps, Fraction] = {}
        rem: Dict[Exps, Fraction] = {}
        while p:
            e = max(p, key=key)
            c = p[e]
            if all(e[i] >= lt[i] for i in range(3)):
                m = (e[0] - lt[0], e[1] - lt[1], e[2] - lt[2])
                f = c / lc
                quo[m] = quo.get(m, 0) + f
                for g, d in other.terms.items():
                    k = (g[0] + m[0], g[1] + m[1], g[2] + m[2])
                    v = p.get(k, 0) - f * d
                    if v:
                        p[k] = v
                    else:
                        p.pop(k, None)
            else:
                rem[e] = c
                del p[e]
        return TriPoly(quo), TriPoly(rem)

    def divides(self, other: "TriPoly") -> bool:
        """True when ``self`` divides ``other``."""
        return other.divmod(self)[1].is_zero()

    # serialization ---------------------------------------------------------
    def terms_json(self) -> list:
        keys = sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e)))
        return [{"exps": list(e), "coef": q_str(self.terms[e])} for e in keys]

    def to_json(self):
        if self.factors:
            return {"terms": self.terms_json(), "factors": [f.terms_json() for f in self.factors]}
        return self.terms_json()

    @classmethod
    def from_json(cls, obj) -> "TriPoly":
        if isinstance(obj, dict):
            terms = _terms_from_json(obj["terms"])
            factors = [cls(_terms_from_json(f)) for f in obj.get("factors") or []]
            p = cls(terms, factors=factors or None)
            if factors and TriPoly.from_product(factors).terms != p.terms:
                raise ValueError("factors do not multiply to the stated terms")
            return p
        return cls(_terms_from_json(obj))


def _terms_from_json(items) -> Dict[Exps, Fraction]:
    out: Dict[Exps, Fraction] = {}
    for item in items:
        e = tuple(int(v) for v in item["exps"])
        if len(e) != 3 or min(e) < 0:
            raise ValueError(f"bad exponent triple {item['exps']!r}")
        out[e] = out.get(e, 0) + Q(item["coef"])
    return out


def _lift(v) -> TriPoly:
    if isinstance(v, TriPoly):
        return v
    return TriPoly.const(v)


X1 = TriPoly({(1, 0, 0): 1})
X2 = TriPoly({(0, 1, 0): 1})
X3 = TriPoly({(0, 0, 1): 1})


def plane(normal: Sequence, offset) -> TriPoly:
    """The affine polynomial ``normal . x + offset``."""
    n = [Q(c) for c in normal]
    return n[0] * X1 + n[1] * X2 + n[2] * X3 + Q(offset)


def gradient(Q_: TriPoly) -> Tuple[TriPoly, TriPoly, TriPoly]:
    return Q_.diff(0), Q_.diff(1), Q_.diff(2)


# ---------------------------------------------------------------------------
# univariate


class UniPoly:
    """Dense univariate polynomial over Q, coefficients lowest degree first."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Q(v) for v in coeffs]
        while c and not c[-1]:
            c.pop()
        self.c: List[Fraction] = c

    def is_zero(self) -> bool:
        return not self.c

    def degree(self) -> int:
        return len(self.c) - 1

    def lead(self) -> Fraction:
        return self.c[-1]

    def __eq__(self, other) -> bool:
        return isinstance(other, UniPoly) and self.c == other.c

    def __repr__(self) -> str:
        return f"UniPoly([{', '.join(q_str(v) for v in self.c)}])"

    def __call__(self, t) -> Fraction:
        acc = Fraction(0)
        for v in reversed(self.c):
            acc = acc * t + v
        return acc

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.c), len(other.c))
        a = self.c + [Fraction(0)] * (n - len(self.c))
        b = other.c + [Fraction(0)] * (n - len(other.c))
        return UniPoly([x + y for x, y in zip(a, b)])

    def __neg__(self) -> "UniPoly":
        return UniPoly([-v for v in self.c])

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        if not self.c or not other.c:
            return UniPoly()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    out[i + j] += a * b
        return UniPoly(out)

    def derivative(self) -> "UniPoly":
        return UniPoly([i * v for i, v in enumerate(self.c)][1:])

    def divmod(self, other: "UniPoly") -> Tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        r = list(self.c)
        dq = len(r) - len(other.c)
        if dq < 0:
            return UniPoly(), UniPoly(r)
        q = [Fraction(0)] * (dq + 1)
        lc = other.lead()
        for k in range(dq, -1, -1):
            f = r[k + len(other.c) - 1] / lc
            q[k] = f
            if f:
                for j, b in enumerate(other.c):
                    r[k + j] -= f * b
        return UniPoly(q), UniPoly(r[: len(other.c) - 1])

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return self.divmod(other)[1]

    def monic(self) -> "UniPoly":
        lc = self.lead()
        return UniPoly([v / lc for v in self.c])

    def gcd(self, other: "UniPoly") -> "UniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def squarefree(self) -> "UniPoly":
        """``f / gcd(f, f')``: same real roots, all simple."""
        if self.degree() <= 0:
            return self
        g = self.gcd(self.derivative())
        return self.divmod(g)[0]


def sturm_sequence(f: UniPoly) -> List[UniPoly]:
    seq = [f, f.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    return seq[:-1]


def _variations(seq: List[UniPoly], t) -> int:
    signs = [s(t) for s in seq]
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def _variations_inf(seq: List[UniPoly], positive: bool) -> int:
    signs = []
    for s in seq:
        lc = s.lead()
        if not positive and s.degree() % 2:
            lc = -lc
        signs.append(lc)
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def sturm_count(f: UniPoly, lo=None, hi=None) -> int:
    """Number of distinct real roots of ``f`` in ``(lo, hi]`` (None = infinite)."""
    if f.is_zero():
        raise ValueError("the zero polynomial has infinitely many roots")
    seq = sturm_sequence(f.squarefree())
    vlo = _variations_inf(seq, False) if lo is None else _variations(seq, Q(lo))
    vhi = _variations_inf(seq, True) if hi is None else _variations(seq, Q(hi))
    return vlo - vhi


def _root_bound(f: UniPoly) -> Fraction:
    lc = abs(f.lead())
    return 1 + max((abs(v) / lc for v in f.c[:-1]), default=Fraction(0))


def isolate_real_roots(u: UniPoly) -> List[Tuple[Fraction, Fraction]]:
    """Disjoint rational intervals ``[lo, hi]`` isolating every real root.

    Works on the square-free part, so a multiple root appears once.  An
    interval with ``lo == hi`` is an exact rational root; otherwise the root
    lies strictly inside and neither endpoint is a root.  The result is
    sorted with ``hi_i < lo_{i+1}``.
    """
    if u.is_zero():
        raise ValueError("cannot isolate the roots of the zero polynomial")
    f = u.squarefree()
    if f.degree() <= 0:
        return []
    seq = sturm_sequence(f)

    def count(a, b):
        return _variations(seq, a) - _variations(seq, b)

    B = _root_bound(f)
    out: List[Tuple[Fraction, Fraction]] = []
    stack = [(-B, B)]  # endpoints are never roots
    while stack:
        a, b = stack.pop()
        n = count(a, b)
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        m = (a + b) / 2
        if f(m):
            stack += [(m, b), (a, m)]
            continue
        out.append((m, m))
        delta = (b - a) / 4
        while f(m - delta) == 0 or f(m + delta) == 0 or count(m - delta, m + delta) != 1:
            delta /= 2
        stack += [(m + delta, b), (a, m - delta)]
    out.sort()
    i = 0
    while i < len(out) - 1:
        if out[i][1] >= out[i + 1][0]:
            out[i] = _halve(f, count, *out[i])
            out[i + 1] = _halve(f, count, *out[i + 1])
            continue
        i += 1
    return out


def _halve(f, count, a, b):
    if a == b:
        return a, b
    m = (a + b) / 2
    if not f(m):
        return m, m
    return (a, m) if count(a, m) == 1 else (m, b)


def restrict_to_line(Q_: TriPoly, l: Line3) -> UniPoly:
    """The univariate polynomial ``t -> Q(base + t * dir)``."""
    deg = Q_.degree()
    if deg < 0:
        return UniPoly()
    lin = [UniPoly([l.base[i], l.dir[i]]) for i in range(3)]
    pw = []
    for i in range(3):
        row = [UniPoly([1])]
        for _ in range(deg):
            row.append(row[-1] * lin[i])
        pw.append(row)
    acc = UniPoly()
    for e, c in Q_.terms.items():
        term = UniPoly([c]) * pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]]
        acc = acc + term
    return acc


def line_in_zero_set(Q_: TriPoly, l: Line3) -> bool:
    if Q_.is_zero():
        raise ValueError("every line lies in the zero set of the zero polynomial")
    if Q_.factors:
        return any(restrict_to_line(f, l).is_zero() for f in Q_.factors)
    return restrict_to_line(Q_, l).is_zero()


def line_in_zero_set_sampled(Q_: TriPoly, l: Line3) -> bool:
    """Second route: vanishing at deg(Q)+1 distinct parameters."""
    if Q_.is_zero():
        raise ValueError("every line lies in the zero set of the zero polynomial")
    return all(not Q_.eval(l.point_at(t)) for t in range(Q_.degree() + 1))


def sign_vector_at(factors: Sequence[TriPoly], x: Sequence) -> Tuple[int, ...]:
    if not factors:
        raise ValueError("need at least one factor")
    out = []
    for f in factors:
        v = f.eval(x)
        out.append((v > 0) - (v < 0))
    return tuple(out)


# ---------------------------------------------------------------------------
# Bezout for lines


@dataclass
class BezoutReport:
    count: int
    bound: int
    witnesses: List[int]

    @property
    def holds(self) -> bool:
        return self.count <= self.bound

    def to_json(self) -> dict:
        return {"count": self.count, "bound": self.bound, "witnesses": self.witnesses, "holds": self.holds}


def bezout_lines_check(P: TriPoly, Q_: TriPoly, lines: Sequence[Line3]) -> BezoutReport:
    """Count lines of ``lines`` inside Z(P) and Z(Q) and check the deg P * deg Q bound."""
    if P.is_zero() or Q_.is_zero():
        raise ValueError("both polynomials must be nonzero")
    pc = {f.normalized() for f in P.components() if f.degree() > 0}
    qc = {f.normalized() for f in Q_.components() if f.degree() > 0}
    if pc & qc or P.normalized() == Q_.normalized():
        raise ValueError("P and Q share a factor; the line bound does not apply")
    witnesses = [i for i, l in enumerate(lines) if line_in_zero_set(P, l) and line_in_zero_set(Q_, l)]
    rep = BezoutReport(len(witnesses), P.degree() * Q_.degree(), witnesses)
    if not rep.holds:
        raise AssertionError(f"{rep.count} common lines exceed deg P * deg Q = {rep.bound}")
    return rep


# ---------------------------------------------------------------------------
# irreducibility for low degree


def _quadric_matrix(q: TriPoly) -> List[List[Fraction]]:
    """Symmetric 4x4 matrix of the homogenized quadric (index 0 = constant)."""
    M = [[Fraction(0)] * 4 for _ in range(4)]
    for e, c in q.terms.items():
        idx = [i + 1 for i in range(3) for _ in range(e[i])]
        while len(idx) < 2:
            idx.insert(0, 0)
        i, j = idx
        if i == j:
            M[i][i] += c
        else:
            M[i][j] += c / 2
            M[j][i] += c / 2
    return M


def _charpoly(M: List[List[Fraction]]) -> List[Fraction]:
    """Coefficients of det(tI - M), highest degree first (Faddeev-LeVerrier)."""
    n = len(M)
    coeffs = [Fraction(1)]
    Mk = [[Fraction(0)] * n for _ in range(n)]
    c = Fraction(1)
    for k in range(1, n + 1):
        B = [[Mk[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
        Mk = B
        AM = [[sum(M[i][t] * B[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        c = -sum(AM[i][i] for i in range(n)) / k
        coeffs.append(c)
        Mk = AM
    return coeffs


def _signature(M) -> Tuple[int, int]:
    """(positive, negative) eigenvalue counts of a symmetric rational matrix.

    The characteristic polynomial has only real roots, so Descartes' rule
    of signs is exact for it.
    """
    cp = _charpoly(M)

    def variations(cs):
        s = [c for c in cs if c]
        return sum(1 for a, b in zip(s, s[1:]) if (a > 0) != (b > 0))

    n = len(cp) - 1
    pos = variations(cp)
    neg = variations([c * (-1) ** (n - i) for i, c in enumerate(cp)])
    return pos, neg


def classify_irreducibility(p: TriPoly) -> Tuple[str, List[TriPoly]]:
    """Label a polynomial ``verified-irreducible``, ``reducible`` or ``unverified``.

    Product-form polynomials with two or more nonconstant factors are
    reducible.  Degree 1 is irreducible.  Quadrics are classified through
    the rank and signature of their homogenized matrix (irreducibility over
    R).  Rational linear factors of a reducible quadric are returned when
    they exist.  Degree three and up is left unverified.
    """
    if p.factors and sum(1 for f in p.factors if f.degree() > 0) > 1:
        return "reducible", [f for f in p.factors if f.degree() > 0]
    d = p.degree()
    if d <= 0:
        raise ValueError("constant polynomials define no surface")
    if d == 1:
        return "verified-irreducible", []
    if d > 2:
        return "unverified", []
    M = _quadric_matrix(p)
    rk = rank(M)
    if rk >= 3:
        return "verified-irreducible", []
    if rk == 2:
        pos, neg = _signature(M)
        if pos == 0 or neg == 0:
            return "verified-irreducible", []
    return "reducible", _linear_factors(p)


def _linear_factors(p: TriPoly) -> List[TriPoly]:
    import sympy

    xs = sympy.symbols("x1 x2 x3")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * xs[0] ** e[0] * xs[1] ** e[1] * xs[2] ** e[2] for e, c in p.terms.items())
    _, facs = sympy.factor_list(expr)
    out = []
    for f, mult in facs:
        poly = sympy.Poly(f, *xs)
        if poly.total_degree() != 1:
            return []
        t = TriPoly({m: Fraction(int(sympy.numer(c)), int(sympy.denom(c))) for m, c in poly.terms()})
        out.extend([t] * mult)
    return out
