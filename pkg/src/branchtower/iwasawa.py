"""Group-ring arithmetic and characteristic elements of towers.

Elements of ℤ[ℤ^d] are sparse maps from exponent vectors to integers; the
variable γ_i is the i-th generator.  Substituting γ_i = 1 + T_i turns an
element with non-negative exponents into a polynomial in T_1..T_d, which is
how the Iwasawa algebra is represented here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, Mapping, Sequence

from .graph import degree
from .tower import TowerSpec, canonical_generator, ord_p


class DimensionMismatch(ValueError):
    pass


class NonTorsionError(ArithmeticError):
    """The characteristic element vanishes, so the module is not torsion."""


class DivisibilityError(ArithmeticError):
    pass


class _Sparse:
    __slots__ = ("d", "terms")

    def __init__(self, terms: Mapping | None = None, d: int = 1):
        self.d = d
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(a) for a in e)
            if len(e) != d:
                raise DimensionMismatch(f"exponent {e} has length {len(e)}, expected {d}")
            if c:
                clean[e] = clean.get(e, 0) + int(c)
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def _raw(cls, terms: dict, d: int):
        obj = cls.__new__(cls)
        obj.d = d
        obj.terms = terms
        return obj

    @classmethod
    def constant(cls, c: int, d: int = 1):
        return cls._raw({(0,) * d: int(c)} if c else {}, d)

    @classmethod
    def monomial(cls, exp: Sequence[int], c: int = 1):
        exp = tuple(int(a) for a in exp)
        return cls._raw({exp: int(c)} if c else {}, len(exp))

    @classmethod
    def var(cls, i: int, d: int):
        e = [0] * d
        e[i] = 1
        return cls.monomial(e)

    def _check(self, other):
        if not isinstance(other, type(self)):
            if isinstance(other, int):
                return type(self).constant(other, self.d)
            return NotImplemented
        if other.d != self.d:
            raise DimensionMismatch(f"rank {self.d} vs {other.d}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return self._raw(out, self.d)

    __radd__ = __add__

    def __neg__(self):
        return self._raw({e: -c for e, c in self.terms.items()}, self.d)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return self._raw(out, self.d)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = type(self).constant(1, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = type(self).constant(other, self.d)
        return isinstance(other, type(self)) and self.d == other.d and self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, self.d, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def scale(self, c: int):
        return self._raw({e: c * x for e, x in self.terms.items()} if c else {}, self.d)

    def exact_div_int(self, c: int):
        out = {}
        for e, x in self.terms.items():
            if x % c:
                raise DivisibilityError(f"{x} not divisible by {c}")
            out[e] = x // c
        return self._raw(out, self.d)

    def content(self) -> int:
        from math import gcd

        g = 0
        for x in self.terms.values():
            g = gcd(g, x)
        return g

    def sorted_terms(self) -> list[tuple[tuple, int]]:
        """Terms in graded lexicographic order (total degree, then exponent)."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]))

    def _var_names(self, letter):
        if self.d == 1:
            return [letter]
        return [f"{letter}{i + 1}" for i in range(self.d)]

    def _format(self, letter) -> str:
        if not self.terms:
            return "0"
        names = self._var_names(letter)
        parts = []
        for e, c in self.sorted_terms():
            mono = []
            for name, k in zip(names, e):
                if k == 1:
                    mono.append(name)
                elif k:
                    mono.append(f"{name}^{k}")
            m = "*".join(mono)
            if not m:
                s = str(abs(c))
            elif abs(c) == 1:
                s = m
            else:
                s = f"{abs(c)}*{m}"
            if not parts:
                parts.append(s if c > 0 else "-" + s)
            else:
                parts.append(("+ " if c > 0 else "- ") + s)
        return " ".join(parts)

    def to_json(self) -> list:
        return [[list(e), c] for e, c in self.sorted_terms()]


class LaurentElement(_Sparse):
    """Element of the group ring ℤ[ℤ^d] in the variables γ_i."""

    __slots__ = ()

    def __repr__(self):
        return f"LaurentElement({self._format('g')})"

    def __str__(self):
        return self._format("g")

    def exact_div(self, other: "LaurentElement") -> "LaurentElement":
        """Exact quotient in ℤ[ℤ^d]; raises if ``other`` does not divide."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero")
        if self.is_zero():
            return self
        # shift both so every variable has minimal exponent 0; the quotient is then a polynomial
        ka, kb = self.min_exponents(), other.min_exponents()
        a = {tuple(x - y for x, y in zip(e, ka)): c for e, c in self.terms.items()}
        b = {tuple(x - y for x, y in zip(e, kb)): c for e, c in other.terms.items()}
        q = _poly_exact_div(a, b, self.d)
        shift = tuple(x - y for x, y in zip(ka, kb))
        return LaurentElement._raw({tuple(e + s for e, s in zip(ex, shift)): c for ex, c in q.items()}, self.d)

    def min_exponents(self) -> tuple:
        if not self.terms:
            return (0,) * self.d
        return tuple(min(e[i] for e in self.terms) for i in range(self.d))

    def clear(self) -> tuple["LaurentElement", tuple]:
        """Multiply by the least monomial making all exponents non-negative."""
        k = tuple(max(0, -m) for m in self.min_exponents())
        if not any(k):
            return self, k
        return LaurentElement._raw({tuple(a + b for a, b in zip(e, k)): c for e, c in self.terms.items()}, self.d), k

    def evaluate_at_one(self) -> int:
        return sum(self.terms.values())


class IwasawaPoly(_Sparse):
    """Polynomial in T_1..T_d with integer coefficients."""

    __slots__ = ()

    def __repr__(self):
        return f"IwasawaPoly({self._format('T')})"

    def __str__(self):
        return self._format("T")

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def min_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=0)

    def divide_by_var(self, i: int) -> "IwasawaPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                raise DivisibilityError(f"not divisible by T{i + 1}")
            e2 = list(e)
            e2[i] -= 1
            out[tuple(e2)] = c
        return IwasawaPoly._raw(out, self.d)

    def divisible_by_var(self, i: int, power: int = 1) -> bool:
        return all(e[i] >= power for e in self.terms)

    def to_group_ring(self) -> LaurentElement:
        """Substitute T_i = γ_i − 1."""
        d = self.d
        out = LaurentElement.constant(0, d)
        for e, c in self.terms.items():
            term = LaurentElement.constant(c, d)
            for i, k in enumerate(e):
                if k:
                    term = term * (LaurentElement.var(i, d) - 1) ** k
            out = out + term
        return out


def _poly_exact_div(a: dict, b: dict, d: int) -> dict:
    """Exact division of polynomials with non-negative exponents (lex leading terms)."""
    rem = dict(a)
    lead_b = max(b)
    cb = b[lead_b]
    quot: dict = {}
    while rem:
        lead = max(rem)
        c = rem[lead]
        shift = tuple(x - y for x, y in zip(lead, lead_b))
        if any(s < 0 for s in shift) or c % cb:
            raise DivisibilityError("not an exact divisor")
        q = c // cb
        quot[shift] = quot.get(shift, 0) + q
        for e, x in b.items():
            t = tuple(u + v for u, v in zip(e, shift))
            s = rem.get(t, 0) - q * x
            if s:
                rem[t] = s
            else:
                rem.pop(t, None)
    return {e: c for e, c in quot.items() if c}


def laurent(terms: Mapping | None = None, d: int = 1) -> LaurentElement:
    return LaurentElement(terms, d)


def gamma_power(exp: Sequence[int]) -> LaurentElement:
    return LaurentElement.monomial(exp)


# ------------------------------------------------------------ determinants


def det_cofactor(m: Sequence[Sequence[_Sparse]]):
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("non-square matrix")
    if n == 0:
        raise ValueError("empty matrix")
    if n == 1:
        return m[0][0]
    total = None
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * det_cofactor(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return m[0][0] * 0
    return total


def det_bareiss(m: Sequence[Sequence[LaurentElement]]) -> LaurentElement:
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("non-square matrix")
    a = [list(r) for r in m]
    d = a[0][0].d
    sign = 1
    prev = LaurentElement.constant(1, d)
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return LaurentElement.constant(0, d)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num.exact_div(prev)
            a[i][k] = LaurentElement.constant(0, d)
        prev = a[k][k]
    out = a[n - 1][n - 1]
    return out if sign > 0 else -out


def det_laurent(m: Sequence[Sequence[LaurentElement]], cross_check: bool = True) -> LaurentElement:
    """Exact determinant; cofactor expansion for size ≤ 6, fraction-free elimination above."""
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("non-square matrix")
    if n <= 6:
        det = det_cofactor(m)
        if cross_check:
            other = det_bareiss(m)
            if other != det:
                raise ArithmeticError("cofactor and fraction-free determinants disagree")
        return det
    return det_bareiss(m)


# ---------------------------------------------------------------- matrices


def vertex_order(spec: TowerSpec) -> list:
    """Unramified vertices first, then ramified, each in input order."""
    verts = spec.base.vertices
    return [v for v in verts if not spec.is_ramified(v)] + [v for v in verts if spec.is_ramified(v)]


def matrix_D(spec: TowerSpec) -> list[list[LaurentElement]]:
    order = vertex_order(spec)
    d = spec.d
    s = len(order)
    out = [[LaurentElement.constant(0, d) for _ in range(s)] for _ in range(s)]
    for i, v in enumerate(order):
        if not spec.is_ramified(v):
            out[i][i] = LaurentElement.constant(degree(spec.base, v), d)
    return out


def ramified_diagonal(spec: TowerSpec, v) -> LaurentElement:
    """T̃_v = γ^{σ_v} − 1 for inertia of rank one, and 1 for higher rank."""
    d = spec.d
    if spec.inertia_rank(v) == 1:
        sigma = canonical_generator(spec.gens(v), spec.p)
        return gamma_power(sigma) - 1
    return LaurentElement.constant(1, d)


def matrix_B(spec: TowerSpec) -> list[list[LaurentElement]]:
    order = vertex_order(spec)
    pos = {v: i for i, v in enumerate(order)}
    d = spec.d
    s = len(order)
    out = [[LaurentElement.constant(0, d) for _ in range(s)] for _ in range(s)]
    for dart in spec.base.darts:
        if spec.is_ramified(dart.origin):
            continue
        i, j = pos[dart.terminus], pos[dart.origin]
        out[i][j] = out[i][j] + gamma_power(spec.voltage[dart.id])
    for v in order:
        if spec.is_ramified(v):
            i = pos[v]
            out[i][i] = -ramified_diagonal(spec, v)
    return out


def matrix_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


# ---------------------------------------------------------------- polys


def to_poly(x: LaurentElement) -> tuple[IwasawaPoly, tuple]:
    """Clear negative exponents, then substitute γ_i = 1 + T_i."""
    cleared, k = x.clear()
    d = x.d
    out: dict = {}
    for e, c in cleared.terms.items():
        # ∏ (1+T_i)^{e_i} = Σ ∏ C(e_i, j_i) T^j
        for js in itertools.product(*(range(a + 1) for a in e)):
            coef = c
            for a, j in zip(e, js):
                coef *= comb(a, j)
            s = out.get(js, 0) + coef
            if s:
                out[js] = s
            else:
                out.pop(js, None)
    return IwasawaPoly._raw(out, d), k


def mu_lambda(f: IwasawaPoly, p: int) -> tuple[int, int]:
    if f.is_zero():
        raise NonTorsionError("mu and lambda are undefined for the zero element")
    mu = min(ord_p(c, p) for c in f.terms.values())
    q = p ** mu
    lam = min(sum(e) for e, c in f.terms.items() if (c // q) % p)
    return mu, lam


@dataclass(frozen=True)
class CharElement:
    poly: IwasawaPoly
    clearing: tuple
    mu: int
    lam: int
    p: int

    @classmethod
    def from_poly(cls, poly: IwasawaPoly, p: int, clearing: tuple | None = None) -> "CharElement":
        mu, lam = mu_lambda(poly, p)
        return cls(poly, clearing if clearing is not None else (0,) * poly.d, mu, lam, p)

    @property
    def d(self) -> int:
        return self.poly.d

    def to_dict(self) -> dict:
        return {
            "poly": str(self.poly),
            "terms": self.poly.to_json(),
            "mu": self.mu,
            "lambda": self.lam,
            "clearing": list(self.clearing),
        }

    def __str__(self):
        return str(self.poly)


def char_from_determinant(det: LaurentElement, p: int) -> CharElement:
    if det.is_zero():
        raise NonTorsionError("det(D - B) vanishes; the Picard module is not torsion")
    poly, k = to_poly(det)
    return CharElement.from_poly(poly, p, k)


def char_element(spec: TowerSpec) -> CharElement:
    det = det_laurent(matrix_sub(matrix_D(spec), matrix_B(spec)))
    return char_from_determinant(det, spec.p)


def char_of_jacobian(c: CharElement, d: int | None = None) -> CharElement:
    d = c.d if d is None else d
    if d != c.d:
        raise DimensionMismatch(f"rank {d} does not match the element's rank {c.d}")
    if d >= 2:
        return c
    if not c.poly.divisible_by_var(0):
        raise DivisibilityError(f"characteristic element {c.poly} is not divisible by T")
    return CharElement.from_poly(c.poly.divide_by_var(0), c.p, c.clearing)


def _to_sympy(f: IwasawaPoly, gens):
    import sympy

    expr = sympy.Integer(0)
    for e, c in f.terms.items():
        term = sympy.Integer(c)
        for g, k in zip(gens, e):
            term *= g ** k
        expr += term
    return sympy.Poly(expr, *gens, domain="ZZ")


def chars_equal_up_to_unit(a: CharElement, b: CharElement, p: int | None = None) -> bool:
    """Whether a = u·b for a unit u of ℤ_p⟦T_1..T_d⟧.

    Both sides are polynomials.  Cancel the polynomial gcd (over ℤ) to get
    a = g·a', b = g·b' with a', b' coprime; a/b = a'/b' is a unit exactly when
    a' and b' have the same p-content and both become p-unit constants after
    dividing it out, i.e. μ(a') = μ(b') and λ(a') = λ(b') = 0.
    """
    import sympy

    p = a.p if p is None else p
    if a.poly.is_zero() or b.poly.is_zero():
        raise NonTorsionError("comparison of zero elements")
    if a.d != b.d:
        return False
    if mu_lambda(a.poly, p) != mu_lambda(b.poly, p):
        return False
    gens = sympy.symbols(f"T1:{a.d + 1}")
    pa, pb = _to_sympy(a.poly, gens), _to_sympy(b.poly, gens)
    g = sympy.gcd(pa, pb)
    qa, ra = sympy.div(pa, g)
    qb, rb = sympy.div(pb, g)
    if not ra.is_zero or not rb.is_zero:
        raise ArithmeticError("gcd does not divide")
    fa, fb = _from_sympy(qa, a.d), _from_sympy(qb, a.d)
    ma, la = mu_lambda(fa, p)
    mb, lb = mu_lambda(fb, p)
    return ma == mb and la == 0 and lb == 0


def _from_sympy(poly, d: int) -> IwasawaPoly:
    terms = {}
    for monom, coeff in poly.terms():
        c = int(coeff)
        if c != coeff:
            raise ArithmeticError("non-integral coefficient")
        terms[tuple(monom)] = c
    return IwasawaPoly(terms, d)


def T(i: int = 0, d: int = 1) -> IwasawaPoly:
    return IwasawaPoly.var(i, d)


def poly_from_terms(terms: Iterable, d: int = 1) -> IwasawaPoly:
    return IwasawaPoly({tuple(e): c for e, c in terms}, d)
