"""Exact sparse multivariate polynomial arithmetic over the rationals.

A polynomial is a dict mapping monomials to rational coefficients
(``fractions.Fraction``), so every computation in the engine is exact and
equality of canonical forms is plain dict equality.

Variables are interned globally and come in five kinds, ordered
x-block < z-block < w < mu < jet:

  ``x1..xn``   base coordinates
  ``z1..zn``   fiber coordinates (contravariant symmetric-tensor slots)
  ``w``        the extra fiber direction used by ambient tensors
  ``mu``       a formal weight parameter
  jet symbols  components of an undetermined function and its partial
               derivatives, e.g. ``f[0,2]`` for d^2 f / dx2^2

Jet symbols are ordinary ring variables for the formal operations; the
total derivative in a base direction additionally promotes ``f[a]`` to
``f[a+e_i]`` (see :func:`total_x_diff`).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, Optional, Sequence, Tuple, Union

Rat = Fraction
Scalar = Union[int, Fraction]

# A monomial is a tuple of (variable id, exponent) pairs sorted by id,
# exponents always positive.  The empty tuple is the constant monomial.
Monomial = Tuple[Tuple[int, int], ...]

_KIND_RANK = {"x": 0, "z": 1, "w": 2, "mu": 3, "t": 4, "jet": 5}

# interning tables: structured key <-> small integer id
_VAR_IDS: Dict[tuple, int] = {}
_VAR_KEYS: list = []


def var_id(key: tuple) -> int:
    vid = _VAR_IDS.get(key)
    if vid is None:
        vid = len(_VAR_KEYS)
        _VAR_IDS[key] = vid
        _VAR_KEYS.append(key)
    return vid


def var_key(vid: int) -> tuple:
    return _VAR_KEYS[vid]


def xvar(i: int) -> tuple:
    return ("x", i)


def zvar(i: int) -> tuple:
    return ("z", i)


WVAR = ("w",)
MUVAR = ("mu",)
TVAR = ("t",)


def jetvar(name: str, alpha: Tuple[int, ...]) -> tuple:
    return ("jet", name, alpha)


def _var_sort_key(vid: int):
    key = var_key(vid)
    return (_KIND_RANK[key[0]],) + key[1:]


def var_name(vid: int) -> str:
    key = var_key(vid)
    kind = key[0]
    if kind in ("x", "z"):
        return "%s%d" % (kind, key[1])
    if kind == "w":
        return "w"
    if kind == "mu":
        return "mu"
    return "%s[%s]" % (key[1], ",".join(str(a) for a in key[2]))


def _mul_monomials(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        v1, e1 = m1[i]
        v2, e2 = m2[j]
        if v1 == v2:
            out.append((v1, e1 + e2))
            i += 1
            j += 1
        elif v1 < v2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


class Poly:
    """Sparse polynomial over Fraction in canonical form (no zero terms)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Monomial, Fraction]] = None):
        self.terms: Dict[Monomial, Fraction] = terms if terms is not None else {}

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return Poly({})

    @staticmethod
    def const(c: Scalar) -> "Poly":
        c = Fraction(c)
        return Poly({(): c}) if c else Poly({})

    @staticmethod
    def variable(key: tuple, exp: int = 1) -> "Poly":
        return Poly({((var_id(key), exp),): Fraction(1)})

    # -- basic ring structure -----------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.const(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other) -> "Poly":
        other = _coerce(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            acc = out.get(m)
            if acc is None:
                out[m] = c
            else:
                acc = acc + c
                if acc:
                    out[m] = acc
                else:
                    del out[m]
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Poly":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return Poly({})
            return Poly({m: v * c for m, v in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        if not self.terms or not other.terms:
            return Poly({})
        # iterate over the smaller factor outside for fewer dict rebuilds
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: Dict[Monomial, Fraction] = {}
        get = out.get
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = _mul_monomials(m1, m2)
                c = c1 * c2
                acc = get(m)
                if acc is None:
                    out[m] = c
                else:
                    acc = acc + c
                    if acc:
                        out[m] = acc
                    else:
                        del out[m]
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                raise ZeroDivisionError("division of polynomial by zero scalar")
            return Poly({m: v / c for m, v in self.terms.items()})
        return NotImplemented

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative polynomial power")
        result = Poly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- calculus ------------------------------------------------------

    def diff(self, key: tuple) -> "Poly":
        """Formal partial derivative with respect to one ring variable."""
        vid = var_id(key)
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            for idx, (v, e) in enumerate(m):
                if v == vid:
                    if e == 1:
                        dm = m[:idx] + m[idx + 1:]
                    else:
                        dm = m[:idx] + ((v, e - 1),) + m[idx + 1:]
                    acc = out.get(dm)
                    nc = c * e
                    out[dm] = nc if acc is None else acc + nc
                    break
        return Poly({m: c for m, c in out.items() if c})

    def subs(self, key: tuple, value: Union["Poly", Scalar]) -> "Poly":
        """Substitute a compatible ring element for one variable, exactly."""
        vid = var_id(key)
        value = _coerce(value)
        untouched: Dict[Monomial, Fraction] = {}
        replaced = Poly({})
        powers: Dict[int, Poly] = {}
        for m, c in self.terms.items():
            hit = None
            for idx, (v, e) in enumerate(m):
                if v == vid:
                    hit = (idx, e)
                    break
            if hit is None:
                acc = untouched.get(m)
                untouched[m] = c if acc is None else acc + c
                continue
            idx, e = hit
            rest = m[:idx] + m[idx + 1:]
            pw = powers.get(e)
            if pw is None:
                pw = value ** e
                powers[e] = pw
            replaced = replaced + pw * Poly({rest: c})
        return Poly({m: c for m, c in untouched.items() if c}) + replaced

    def vars_present(self) -> Iterator[int]:
        seen = set()
        for m in self.terms:
            for v, _ in m:
                if v not in seen:
                    seen.add(v)
                    yield v

    # -- structure inspection -----------------------------------------

    def degree_of_kind(self, *kinds: str) -> int:
        """Max total degree over monomials counting only variables of the kinds."""
        best = 0
        for m in self.terms:
            d = 0
            for v, e in m:
                if var_key(v)[0] in kinds:
                    d += e
            if d > best:
                best = d
        return best

    def graded_parts(self, *kinds: str) -> Dict[int, "Poly"]:
        """Split by total degree in variables of the given kinds."""
        out: Dict[int, Dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            d = 0
            for v, e in m:
                if var_key(v)[0] in kinds:
                    d += e
            out.setdefault(d, {})[m] = c
        return {d: Poly(t) for d, t in out.items()}

    def coefficient_of(self, key: tuple, exp: int) -> "Poly":
        """Coefficient of key**exp (terms with exactly that power, var removed)."""
        vid = var_id(key)
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            e_here = 0
            idx_here = -1
            for idx, (v, e) in enumerate(m):
                if v == vid:
                    e_here = e
                    idx_here = idx
                    break
            if e_here != exp:
                continue
            dm = m if idx_here < 0 else m[:idx_here] + m[idx_here + 1:]
            out[dm] = c
        return Poly(out)

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def as_fraction(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        raise ValueError("polynomial is not a constant: %s" % self)

    # -- printing ------------------------------------------------------

    def sorted_terms(self):
        """Terms in canonical order: graded, then lex on x < z < w < mu < jet."""

        def mono_key(m: Monomial):
            total = sum(e for _, e in m)
            vec = sorted(((_var_sort_key(v), -e) for v, e in m))
            return (-total, vec)

        return sorted(self.terms.items(), key=lambda it: mono_key(it[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = []
            for v, e in sorted(m, key=lambda p: _var_sort_key(p[0])):
                nm = var_name(v)
                factors.append(nm if e == 1 else "%s^%d" % (nm, e))
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append("%s*%s" % (c, body))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    __repr__ = __str__


def _coerce(v) -> Poly:
    if isinstance(v, Poly):
        return v
    return Poly.const(v)


ZERO = Poly.zero()
ONE = Poly.const(1)
MU = Poly.variable(MUVAR)
T = Poly.variable(TVAR)


def poly_x(i: int) -> Poly:
    return Poly.variable(xvar(i))


def poly_z(i: int) -> Poly:
    return Poly.variable(zvar(i))


POLY_W = Poly.variable(WVAR)


def total_x_diff(p: Poly, i: int) -> Poly:
    """Total derivative in the i-th base direction.

    Acts as the formal partial on explicit x-dependence and promotes every
    jet symbol f[alpha] to f[alpha + e_i].
    """
    out = p.diff(xvar(i))
    for vid in list(p.vars_present()):
        key = var_key(vid)
        if key[0] != "jet":
            continue
        alpha = list(key[2])
        alpha[i - 1] += 1
        promoted = Poly.variable(jetvar(key[1], tuple(alpha)))
        out = out + p.diff(key) * promoted
    return out


# -- scalar helpers ----------------------------------------------------

Weight = Union[Fraction, Poly]


def as_weight(v: Union[Scalar, Poly]) -> Weight:
    return v if isinstance(v, Poly) else Fraction(v)


def weight_poly(v: Weight) -> Poly:
    return v if isinstance(v, Poly) else Poly.const(v)


def weight_add(a: Weight, b: Weight) -> Weight:
    if isinstance(a, Poly) or isinstance(b, Poly):
        return weight_poly(a) + weight_poly(b)
    return a + b


def falling_factorial(a: Union[Scalar, Poly], r: int):
    """a_(r) = a (a-1) ... (a-r+1); exact, in the ring of a."""
    if r < 0:
        raise ValueError("falling factorial needs r >= 0")
    if isinstance(a, Poly):
        out = Poly.const(1)
        for j in range(r):
            out = out * (a - Poly.const(j))
        return out
    a = Fraction(a)
    out = Fraction(1)
    for j in range(r):
        out *= a - j
    return out


def binomial(a: Union[Scalar, Poly], r: int):
    """binom(a, r) = a_(r) / r! for arbitrary ring element a."""
    ff = falling_factorial(a, r)
    fact = 1
    for j in range(2, r + 1):
        fact *= j
    if isinstance(ff, Poly):
        return ff / fact
    return ff / fact


def multinomial(parts: Sequence[int]) -> int:
    total = 0
    out = 1
    for p in parts:
        for j in range(1, p + 1):
            total += 1
            out = out * total // j
    return out


# -- parsing -----------------------------------------------------------


class ParseError(ValueError):
    pass


def parse_poly(text: str, n: int) -> Poly:
    """Parse the textual polynomial syntax used by the CLI and JSON files.

    Grammar: rationals ``a`` or ``a/b``, variables ``x1..xn z1..zn w mu``,
    operators ``+ - * ^`` and parentheses.  Whitespace is ignored.
    """
    tokens = _tokenize(text)
    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else None

    def advance():
        tok = tokens[pos[0]]
        pos[0] += 1
        return tok

    def parse_expr() -> Poly:
        node = parse_term()
        while peek() in ("+", "-"):
            op = advance()
            rhs = parse_term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def parse_term() -> Poly:
        node = parse_factor()
        while peek() == "*":
            advance()
            node = node * parse_factor()
        return node

    def parse_factor() -> Poly:
        node = parse_base()
        if peek() == "^":
            advance()
            tok = peek()
            if tok is None or not _is_int(tok):
                raise ParseError("expected integer exponent")
            advance()
            node = node ** int(tok)
        return node

    def parse_base() -> Poly:
        tok = peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        if tok == "(":
            advance()
            node = parse_expr()
            if peek() != ")":
                raise ParseError("missing closing parenthesis")
            advance()
            return node
        if tok == "-":
            advance()
            return -parse_factor()
        advance()
        if _is_int(tok):
            if peek() == "/":
                advance()
                den = peek()
                if den is None or not _is_int(den):
                    raise ParseError("expected integer denominator")
                advance()
                return Poly.const(Fraction(int(tok), int(den)))
            return Poly.const(int(tok))
        if tok == "w":
            return Poly.variable(WVAR)
        if tok == "mu":
            return MU
        if tok[0] in ("x", "z") and tok[1:].isdigit():
            idx = int(tok[1:])
            if not 1 <= idx <= n:
                raise ParseError("variable %s out of range for n=%d" % (tok, n))
            return Poly.variable((tok[0], idx))
        raise ParseError("unknown token %r" % tok)

    result = parse_expr()
    if pos[0] != len(tokens):
        raise ParseError("trailing input near %r" % tokens[pos[0]])
    return result


def _is_int(tok: str) -> bool:
    return tok.isdigit()


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "+-*/^()":
            tokens.append(ch)
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(text[i:j])
            i = j
        elif ch.isalpha():
            j = i
            while j < len(text) and (text[j].isalnum()):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise ParseError("bad character %r" % ch)
    return tokens
