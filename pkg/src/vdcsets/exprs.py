"""A small, closed expression grammar for real constants and functions.

Expressions are parsed with :mod:`ast` and only a fixed set of node types is
accepted: numeric literals, one free variable, the constants ``pi``, ``e`` and
``phi``, the operators ``+ - * / **`` (``^`` is accepted as a synonym for
``**``) and the functions ``exp``, ``log``, ``sqrt``.  Nothing is ever passed
to :func:`eval`.

Decimal literals are read exactly (``1.2`` is ``6/5``), so an expression such
as ``exp(log(x)^1.2)`` means the same function at every working precision.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import DomainError

_FUNCTIONS = {
    "exp": mpmath.exp,
    "log": mpmath.log,
    "sqrt": mpmath.sqrt,
}
_CONSTANTS = ("pi", "e", "phi")
_VARIABLES = ("x", "n", "z", "p")


class NotRational(Exception):
    pass


def _parse(source: str) -> ast.expr:
    text = source.strip().replace("^", "**")
    if not text:
        raise DomainError("empty expression")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise DomainError(f"cannot parse expression {source!r}: {exc.msg}") from None
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.Load, ast.operator, ast.unaryop)):
            continue
        if isinstance(node, ast.BinOp):
            if not isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)):
                raise DomainError(f"operator not allowed in {source!r}")
        elif isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, (ast.UAdd, ast.USub)):
                raise DomainError(f"operator not allowed in {source!r}")
        elif isinstance(node, ast.Call):
            if (not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS
                    or len(node.args) != 1 or node.keywords):
                raise DomainError(f"only exp/log/sqrt of one argument allowed in {source!r}")
        elif isinstance(node, ast.Name):
            if node.id not in _CONSTANTS and node.id not in _VARIABLES and node.id not in _FUNCTIONS:
                raise DomainError(f"unknown name {node.id!r} in {source!r}")
        elif isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise DomainError(f"literal {node.value!r} not allowed in {source!r}")
        else:
            raise DomainError(f"syntax {type(node).__name__} not allowed in {source!r}")
    return tree.body


def _literal(node: ast.Constant, source: str) -> Fraction:
    # exact decimal reading of float literals
    seg = ast.get_source_segment(source, node)
    if seg is not None:
        try:
            return Fraction(seg)
        except ValueError:
            pass
    return Fraction(node.value)


class Expr:
    """A parsed expression in at most one free variable."""

    def __init__(self, source):
        if isinstance(source, Expr):
            source = source.source
        if isinstance(source, Fraction):
            source = str(source)
        elif isinstance(source, (int, float)) and not isinstance(source, bool):
            source = repr(source)
        self.source = str(source)
        self._text = self.source.strip().replace("^", "**")
        self._tree = _parse(self.source)
        self.variables = sorted({n.id for n in ast.walk(self._tree)
                                 if isinstance(n, ast.Name) and n.id in _VARIABLES})
        if len(self.variables) > 1:
            raise DomainError(f"expression {self.source!r} uses more than one variable")

    def __repr__(self):
        return f"Expr({self.source!r})"

    def __eq__(self, other):
        return isinstance(other, Expr) and other.source == self.source

    def __hash__(self):
        return hash(self.source)

    @property
    def is_constant(self) -> bool:
        return not self.variables

    def exact(self, value=None) -> Fraction:
        """Evaluate exactly over the rationals; raise NotRational if impossible."""
        return self._exact(self._tree, value)

    def is_rational(self) -> bool:
        if not self.is_constant:
            return False
        try:
            self.exact()
        except (NotRational, ZeroDivisionError):
            return False
        return True

    def _exact(self, node, value):
        if isinstance(node, ast.Constant):
            return _literal(node, self._text)
        if isinstance(node, ast.Name):
            if node.id in _VARIABLES:
                if value is None:
                    raise NotRational(node.id)
                return Fraction(value)
            raise NotRational(node.id)
        if isinstance(node, ast.UnaryOp):
            v = self._exact(node.operand, value)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a = self._exact(node.left, value)
            b = self._exact(node.right, value)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
            if b.denominator != 1:
                raise NotRational("fractional power")
            return a ** int(b)
        raise NotRational(ast.dump(node))

    def mp(self, value=None, prec: int = 128):
        """Evaluate with mpmath at ``prec`` bits; ``value`` may be complex."""
        with mpmath.workprec(prec):
            return self._mp(self._tree, value)

    def _mp(self, node, value):
        if isinstance(node, ast.Constant):
            f = _literal(node, self._text)
            return mpmath.mpf(f.numerator) / f.denominator
        if isinstance(node, ast.Name):
            if node.id in _VARIABLES:
                if value is None:
                    raise DomainError(f"expression {self.source!r} needs a value for {node.id}")
                if isinstance(value, Fraction):
                    return mpmath.mpf(value.numerator) / value.denominator
                return mpmath.mpmathify(value)
            if node.id == "pi":
                return +mpmath.pi
            if node.id == "e":
                return mpmath.e + 0
            return (1 + mpmath.sqrt(5)) / 2
        if isinstance(node, ast.UnaryOp):
            v = self._mp(node.operand, value)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Call):
            return _FUNCTIONS[node.func.id](self._mp(node.args[0], value))
        a = self._mp(node.left, value)
        b = self._mp(node.right, value)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            return a / b
        return mpmath.power(a, b)


@lru_cache(maxsize=4096)
def constant(source: str) -> Expr:
    expr = Expr(source)
    if not expr.is_constant:
        raise DomainError(f"{source!r} is not a constant expression")
    return expr


def as_fraction(value):
    """Return ``value`` as a Fraction if it is an exactly rational constant, else None."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    expr = constant(str(value) if not isinstance(value, float) else repr(value))
    try:
        return expr.exact()
    except (NotRational, ZeroDivisionError):
        return None


def fixed_point(value, bits: int) -> tuple[int, int]:
    """Return ``(V, E)`` with ``|value - V / 2**bits| <= E / 2**bits``.

    Rational constants are converted with ``E = 0`` when dyadic at this scale.
    """
    frac = as_fraction(value)
    if frac is not None:
        num = frac.numerator << bits
        v, r = divmod(num, frac.denominator)
        return v, (0 if r == 0 else 1)
    expr = constant(str(value))
    approx = expr.mp(prec=64)
    mag = max(0, int(mpmath.mag(approx))) if approx else 0
    prec = bits + mag + 64
    x = expr.mp(prec=prec)
    with mpmath.workprec(prec):
        v = int(mpmath.floor(mpmath.ldexp(x, bits)))
    return v, 1


def canonical(value) -> str:
    """Canonical string form for a coefficient (rationals reduced, reals verbatim)."""
    frac = as_fraction(value)
    if frac is not None:
        return str(frac)
    return constant(str(value)).source.strip()


# --- polynomial parsing -----------------------------------------------------

def _cmul(a, b):
    fa, fb = as_fraction(a), as_fraction(b)
    if fa is not None and fb is not None:
        return fa * fb
    if fa == 0 or fb == 0:
        return Fraction(0)
    if fa == 1:
        return b
    if fb == 1:
        return a
    return f"({canonical(a)})*({canonical(b)})"


def _cadd(a, b):
    fa, fb = as_fraction(a), as_fraction(b)
    if fa is not None and fb is not None:
        return fa + fb
    if fa == 0:
        return b
    if fb == 0:
        return a
    return f"({canonical(a)})+({canonical(b)})"


def poly_add(p, q):
    out = [Fraction(0)] * max(len(p), len(q))
    for i, c in enumerate(p):
        out[i] = _cadd(out[i], c)
    for i, c in enumerate(q):
        out[i] = _cadd(out[i], c)
    return out


def poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = _cadd(out[i + j], _cmul(a, b))
    return out


def poly_scale(p, c):
    return [_cmul(a, c) for a in p]


def trim(p):
    p = list(p)
    while len(p) > 1 and as_fraction(p[-1]) == 0:
        p.pop()
    return p


def parse_polynomial(source: str) -> list:
    """Parse a polynomial in one variable into ascending coefficients.

    Coefficients are Fractions when rational and canonical constant strings
    otherwise (``"sqrt(2)*n^2"`` gives ``[0, 0, 'sqrt(2)']``).
    """
    tree = _parse(source)

    def walk(node):
        if isinstance(node, ast.Constant):
            return [_literal(node, source.strip().replace("^", "**"))]
        if isinstance(node, ast.Name):
            if node.id in _VARIABLES:
                return [Fraction(0), Fraction(1)]
            return [node.id]
        if isinstance(node, ast.Call):
            inner = trim(walk(node.args[0]))
            if len(inner) > 1:
                raise DomainError(f"{source!r} is not a polynomial")
            return [f"{node.func.id}({canonical(inner[0])})"]
        if isinstance(node, ast.UnaryOp):
            v = walk(node.operand)
            return poly_scale(v, -1) if isinstance(node.op, ast.USub) else v
        a, b = walk(node.left), walk(node.right)
        if isinstance(node.op, ast.Add):
            return poly_add(a, b)
        if isinstance(node.op, ast.Sub):
            return poly_add(a, poly_scale(b, -1))
        if isinstance(node.op, ast.Mult):
            return poly_mul(a, b)
        b = trim(b)
        if len(b) > 1:
            raise DomainError(f"{source!r} is not a polynomial")
        if isinstance(node.op, ast.Div):
            fb = as_fraction(b[0])
            inv = 1 / fb if fb is not None else f"1/({canonical(b[0])})"
            return poly_scale(a, inv)
        e = as_fraction(b[0])
        if e is None or e.denominator != 1 or e < 0:
            if len(trim(a)) == 1:
                return [f"({canonical(a[0])})**({canonical(b[0])})"]
            raise DomainError(f"{source!r}: exponent must be a nonnegative integer")
        out = [Fraction(1)]
        for _ in range(int(e)):
            out = poly_mul(out, a)
        return out

    coeffs = trim(walk(tree))
    return [as_fraction(c) if as_fraction(c) is not None else canonical(c) for c in coeffs]
