"""Exact coefficient arithmetic and the (quantum) torus.

``VCoeff`` is an element of Z[v, v^-1]. ``LaurentElement`` is a finitely
supported sum of torus monomials ``c(v) x^g`` with ``g`` in Z^I. Products
are twisted by a skew form: ``x^g * x^h = v^{lambda(g,h)} x^{g+h}``; passing
no form gives the commutative (classical) product.

Internally a Laurent element is a flat dict keyed by ``(exponent, v_degree)``
so that classical arithmetic never allocates per-term coefficient objects.
"""

import re
from collections import defaultdict

from .errors import DimensionError, InexactDivision


class VCoeff:
    """A Laurent polynomial in ``v`` with integer coefficients."""

    __slots__ = ("_t", "_hash")

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        elif isinstance(terms, int):
            terms = {0: terms}
        self._t = {int(k): int(c) for k, c in terms.items() if c}
        self._hash = None

    @classmethod
    def vpow(cls, k, c=1):
        return cls({k: c})

    @property
    def terms(self):
        return dict(self._t)

    def items(self):
        return sorted(self._t.items())

    def is_zero(self):
        return not self._t

    def is_classical(self):
        return all(k == 0 for k in self._t)

    def at_one(self):
        return sum(self._t.values())

    def bar(self):
        return VCoeff({-k: c for k, c in self._t.items()})

    def shift(self, k):
        return VCoeff({e + k: c for e, c in self._t.items()})

    def is_unit(self):
        return len(self._t) == 1 and next(iter(self._t.values())) in (1, -1)

    def min_degree(self):
        return min(self._t)

    def max_degree(self):
        return max(self._t)

    def __add__(self, other):
        other = _vc(other)
        out = dict(self._t)
        for k, c in other._t.items():
            out[k] = out.get(k, 0) + c
        return VCoeff(out)

    __radd__ = __add__

    def __neg__(self):
        return VCoeff({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        return self + (-_vc(other))

    def __rsub__(self, other):
        return _vc(other) - self

    def __mul__(self, other):
        other = _vc(other)
        out = defaultdict(int)
        for a, c in self._t.items():
            for b, d in other._t.items():
                out[a + b] += c * d
        return VCoeff(out)

    __rmul__ = __mul__

    def divexact(self, other):
        """Exact quotient in Z[v^{+-1}]; raises InexactDivision otherwise."""
        other = _vc(other)
        if other.is_zero():
            raise InexactDivision("division by the zero coefficient")
        if self.is_zero():
            return VCoeff()
        rem = dict(self._t)
        out = {}
        dtop = other.max_degree()
        dlead = other._t[dtop]
        dlow = other.min_degree()
        low = self.min_degree()
        while rem:
            top = max(rem)
            if top - dtop < low - dlow:
                raise InexactDivision(f"{self} is not divisible by {other}")
            c, r = divmod(rem[top], dlead)
            if r:
                raise InexactDivision(f"{self} is not divisible by {other}")
            k = top - dtop
            out[k] = c
            for e, d in other._t.items():
                v = rem.get(e + k, 0) - c * d
                if v:
                    rem[e + k] = v
                else:
                    rem.pop(e + k, None)
        return VCoeff(out)

    def __eq__(self, other):
        if isinstance(other, int):
            other = VCoeff(other)
        if not isinstance(other, VCoeff):
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(sorted(self._t.items())))
        return self._hash

    def __bool__(self):
        return bool(self._t)

    def __str__(self):
        return render_vcoeff(self)

    def __repr__(self):
        return f"VCoeff({render_vcoeff(self)})"


def _vc(x):
    if isinstance(x, VCoeff):
        return x
    if isinstance(x, int):
        return VCoeff(x)
    raise TypeError(f"not a coefficient: {x!r}")


def render_vcoeff(c):
    items = c.items()
    if not items:
        return "0"
    parts = []
    for k, a in items:
        if k == 0:
            parts.append(str(a))
            continue
        mono = "v" if k == 1 else f"v^{k}"
        if a == 1:
            parts.append(mono)
        elif a == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{a}*{mono}")
    if len(parts) == 1:
        return parts[0]
    return "(" + " + ".join(parts) + ")"


def pairing(lam, g, h):
    """``lambda(g, h) = g^T Lambda h``."""
    return sum(gi * sum(r * hj for r, hj in zip(row, h)) for gi, row in zip(g, lam) if gi)


def _add(e, f):
    return tuple(a + b for a, b in zip(e, f))


class LaurentElement:
    """An immutable element of the (quantum) torus Z[v^{+-1}][x^{+-f_i}]."""

    __slots__ = ("dim", "_t", "_hash")

    def __init__(self, dim, flat=None):
        self.dim = dim
        self._t = {k: c for k, c in (flat or {}).items() if c}
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def zero(cls, dim):
        return cls(dim)

    @classmethod
    def one(cls, dim):
        return cls(dim, {((0,) * dim, 0): 1})

    @classmethod
    def monomial(cls, exp, coeff=1):
        exp = tuple(int(e) for e in exp)
        return cls.from_terms(len(exp), {exp: coeff})

    @classmethod
    def from_terms(cls, dim, terms):
        """Build from ``{exponent: int | VCoeff}``."""
        flat = {}
        for exp, c in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != dim:
                raise DimensionError(f"exponent {exp} does not have length {dim}")
            c = _vc(c)
            for k, a in c._t.items():
                flat[(exp, k)] = flat.get((exp, k), 0) + a
        return cls(dim, flat)

    # inspection -------------------------------------------------------
    def terms(self):
        """``{exponent: VCoeff}`` in lexicographic exponent order."""
        grouped = defaultdict(dict)
        for (e, k), c in self._t.items():
            grouped[e][k] = c
        return {e: VCoeff(grouped[e]) for e in sorted(grouped)}

    def flat_items(self):
        return self._t.items()

    def support(self):
        return sorted({e for e, _ in self._t})

    def coefficient(self, exp):
        exp = tuple(exp)
        return VCoeff({k: c for (e, k), c in self._t.items() if e == exp})

    def is_zero(self):
        return not self._t

    def is_classical(self):
        return all(k == 0 for _, k in self._t)

    def is_monomial(self):
        return len({e for e, _ in self._t}) == 1

    def num_terms(self):
        return len({e for e, _ in self._t})

    def lead_lex(self):
        return max(e for e, _ in self._t)

    # arithmetic -------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, LaurentElement):
            raise TypeError(f"expected a LaurentElement, got {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionError(f"torus dimensions differ: {self.dim} vs {other.dim}")

    def __add__(self, other):
        self._check(other)
        out = dict(self._t)
        for k, c in other._t.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return LaurentElement(self.dim, out)

    def __neg__(self):
        return LaurentElement(self.dim, {k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, coeff):
        """Multiply by a central scalar ``int`` or ``VCoeff``."""
        coeff = _vc(coeff)
        out = defaultdict(int)
        for (e, k), c in self._t.items():
            for j, a in coeff._t.items():
                out[(e, k + j)] += a * c
        return LaurentElement(self.dim, out)

    def vshift(self, j):
        return LaurentElement(self.dim, {(e, k + j): c for (e, k), c in self._t.items()})

    def shift(self, g):
        """Commutative multiplication by the torus monomial ``x^g``."""
        g = tuple(g)
        return LaurentElement(self.dim, {(_add(e, g), k): c for (e, k), c in self._t.items()})

    def bar(self):
        return LaurentElement(self.dim, {(e, -k): c for (e, k), c in self._t.items()})

    def at_one(self):
        out = defaultdict(int)
        for (e, _), c in self._t.items():
            out[(e, 0)] += c
        return LaurentElement(self.dim, out)

    def map_exponents(self, fn):
        out = defaultdict(int)
        for (e, k), c in self._t.items():
            out[(fn(e), k)] += c
        return LaurentElement(self.dim, out)

    def filter_exponents(self, keep):
        return LaurentElement(self.dim, {(e, k): c for (e, k), c in self._t.items() if keep(e)})

    # comparison -------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, LaurentElement):
            return NotImplemented
        return self.dim == other.dim and self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._t.items())))
        return self._hash

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"LaurentElement({render(self)})"


def twisted_mul(a, b, lam=None):
    """The v-twisted product ``a * b``; commutative when ``lam`` is None."""
    a._check(b)
    out = defaultdict(int)
    if lam is None:
        for (e, k), c in a._t.items():
            for (f, j), d in b._t.items():
                out[(_add(e, f), k + j)] += c * d
    else:
        if len(lam) != a.dim:
            raise DimensionError(f"skew form of size {len(lam)} on a torus of dimension {a.dim}")
        lam_h = {}
        for (f, _) in b._t:
            if f not in lam_h:
                lam_h[f] = tuple(sum(r * x for r, x in zip(row, f)) for row in lam)
        for (e, k), c in a._t.items():
            for (f, j), d in b._t.items():
                tw = sum(x * y for x, y in zip(e, lam_h[f]))
                out[(_add(e, f), k + j + tw)] += c * d
    return LaurentElement(a.dim, out)


def power(a, n, lam=None):
    if n < 0:
        raise ValueError("negative powers need an invertible monomial; use inverse_monomial")
    result = LaurentElement.one(a.dim)
    base = a
    while n:
        if n & 1:
            result = twisted_mul(result, base, lam)
        n >>= 1
        if n:
            base = twisted_mul(base, base, lam)
    return result


def inverse_monomial(a):
    """Inverse of ``v^k x^g`` (with unit integer coefficient) in the twisted torus."""
    if len(a._t) != 1:
        raise InexactDivision(f"{a} is not an invertible monomial")
    ((e, k), c), = a._t.items()
    if c not in (1, -1):
        raise InexactDivision(f"{a} is not an invertible monomial")
    # x^g * x^{-g} = v^{lambda(g,-g)} = 1 because lambda is skew
    return LaurentElement(a.dim, {(tuple(-x for x in e), -k): c})


def _grouped(elem):
    out = {}
    for (e, k), c in elem._t.items():
        out.setdefault(e, {})[k] = c
    return out


def exact_div(a, b, lam=None):
    """Return ``q`` with ``q * b = a`` in the twisted torus.

    Leading-term elimination in lexicographic exponent order. The quotient's
    exponents are confined to the box ``[min(a) - min(b), max(a) - max(b)]``
    coordinate-wise (vertices of Newton polytopes cannot cancel in a domain),
    which bounds the loop for inexact inputs.
    """
    a._check(b)
    if b.is_zero():
        raise InexactDivision("division by zero")
    if a.is_zero():
        return LaurentElement.zero(a.dim)
    bg = _grouped(b)
    lb = max(bg)
    cb = VCoeff(bg[lb])
    a_exps = [e for e, _ in a._t]
    b_exps = list(bg)
    lo = [min(e[i] for e in a_exps) - min(e[i] for e in b_exps) for i in range(a.dim)]
    hi = [max(e[i] for e in a_exps) - max(e[i] for e in b_exps) for i in range(a.dim)]
    lam_lb = tuple(sum(r * x for r, x in zip(row, lb)) for row in lam) if lam is not None else None
    rem = _grouped(a)
    quot = defaultdict(int)
    b_flat = list(b._t.items())
    lam_cache = {}
    while rem:
        le = max(rem)
        e = tuple(x - y for x, y in zip(le, lb))
        if any(x < l or x > h for x, l, h in zip(e, lo, hi)):
            raise InexactDivision("remainder escapes the quotient's Newton box")
        tw = sum(x * y for x, y in zip(e, lam_lb)) if lam_lb is not None else 0
        cq = VCoeff(rem[le]).divexact(cb).shift(-tw)
        for k, c in cq._t.items():
            quot[(e, k)] += c
            for (f, j), d in b_flat:
                if lam is None:
                    t = 0
                else:
                    if f not in lam_cache:
                        lam_cache[f] = tuple(sum(r * x for r, x in zip(row, f)) for row in lam)
                    t = sum(x * y for x, y in zip(e, lam_cache[f]))
                key = _add(e, f)
                slot = rem.setdefault(key, {})
                deg = k + j + t
                val = slot.get(deg, 0) - c * d
                if val:
                    slot[deg] = val
                else:
                    slot.pop(deg, None)
                if not slot:
                    del rem[key]
    return LaurentElement(a.dim, quot)


# canonical text form -------------------------------------------------------

def render(elem):
    """Canonical text: lex-sorted terms ``c(v) * x^(g1,...,gn)`` joined by ``+``.

    A coefficient equal to 1 is omitted.
    """
    parts = []
    for e, c in elem.terms().items():
        mono = "x^(" + ",".join(str(x) for x in e) + ")"
        cs = render_vcoeff(c)
        parts.append(mono if cs == "1" else f"{cs} * {mono}")
    return " + ".join(parts) if parts else "0"


_TERM = re.compile(r"^(?:(?P<coef>.+?)\s*\*\s*)?x\^\((?P<exp>[-\d,\s]*)\)$")
_VTERM = re.compile(r"^(?P<c>-?\d+)?(?:\*?(?P<neg>-)?v(?:\^(?P<k>-?\d+))?)?$")


def _split_top(text):
    depth, start, out = 0, 0, []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and ch == "+":
            out.append(text[start:i])
            start = i + 1
        i += 1
    out.append(text[start:])
    out = [s.strip() for s in out]
    if len(out) > 1 and not all(out):
        raise ValueError(f"empty term in {text!r}")
    return out


def parse_vcoeff(text):
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    total = VCoeff()
    for part in _split_top(text):
        part = part.replace(" ", "")
        m = _VTERM.match(part)
        if not m or part in ("", "-"):
            raise ValueError(f"cannot parse coefficient term {part!r}")
        if "v" not in part:
            total = total + VCoeff(int(part))
            continue
        c = int(m.group("c")) if m.group("c") is not None else 1
        if m.group("neg"):
            c = -c
        k = int(m.group("k")) if m.group("k") is not None else 1
        total = total + VCoeff.vpow(k, c)
    return total


def parse(text, dim=None):
    """Inverse of :func:`render`."""
    text = text.strip()
    if text == "0":
        if dim is None:
            raise ValueError("dimension required to parse the zero element")
        return LaurentElement.zero(dim)
    terms = {}
    for pos, part in enumerate(_split_top(text)):
        m = _TERM.match(part)
        if not m:
            raise ValueError(f"term {pos + 1}: cannot parse {part!r}")
        try:
            exp = tuple(int(x) for x in m.group("exp").split(","))
            coef = parse_vcoeff(m.group("coef")) if m.group("coef") else VCoeff(1)
        except ValueError as exc:
            raise ValueError(f"term {pos + 1}: {exc}") from None
        if dim is None:
            dim = len(exp)
        if len(exp) != dim:
            raise ValueError(f"term {pos + 1}: exponent has {len(exp)} entries, expected {dim}")
        terms[exp] = terms.get(exp, VCoeff()) + coef
    return LaurentElement.from_terms(dim, terms)
