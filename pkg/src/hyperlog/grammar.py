"""Text expression language shared by the CLI and the HTTP service.

Grammar (EBNF)::

    iterm     := "I(" point ";" pointlist? ";" point ")"
    pointlist := point ("," point)*
    point     := term (("+" | "-") term)*
    term      := unary (("*" | "/") unary)*
    unary     := ("+" | "-") unary | atom
    atom      := IDENT | RATIONAL | "inf"
               | "cr(" point "," point "," point "," point ")"
               | "(" point ")"
    RATIONAL  := INT ("/" INT)?          -- folded into "/" at parse time
    IDENT     := [A-Za-z_][A-Za-z0-9_]*

``inf`` is the point at infinity; it is a valid point and a valid
cross-ratio argument, but arithmetic on it is rejected (projective limits
are expressed through ``cr`` rather than a general limit engine).  The
identifiers ``I``, ``cr`` and ``inf`` are reserved.

Error contract: malformed syntax and structurally meaningless input raise
:class:`~hyperlog.errors.ExprParseError`; semantically degenerate but
well-formed input (division by an identically zero expression, 0/0
cross-ratios) raises :class:`~hyperlog.errors.DegenerateArgument` from the
underlying field arithmetic.

Beyond the exact language, :func:`parse_complex` reads floating-point
complex scalars (``i``/``j`` as the imaginary unit) for the numeric
commands, :func:`parse_numeric_iterm` reads an integral term whose points
are such scalars (ready for path integration), and :func:`parse_witness`
reads either a scalar or an ``a,b,c`` rational triple describing a
quadratic-field element.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ExprParseError
from .projective import PPoint, cross_ratio
from .symbols import ITerm

__all__ = [
    "parse_point",
    "parse_iterm",
    "parse_assignments",
    "parse_complex",
    "parse_numeric_iterm",
    "parse_witness",
]

_KEYWORDS = frozenset({"I", "cr", "inf"})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<imag>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?[ij]\b)
  | (?P<float>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[-+*/();,=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "int" | "float" | "ident" | one punctuation character | "end"
    text: str
    pos: int


def _tokenize(text: str, *, allow_float: bool) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprParseError(
                f"unexpected character {text[pos]!r} at position {pos}"
            )
        pos = m.end()
        if m.lastgroup == "ws":
            continue
        if m.lastgroup == "imag":
            if not allow_float:
                raise ExprParseError(
                    f"imaginary literal {m.group()!r} at position {m.start()}: "
                    "not part of the exact expression language"
                )
            tokens.append(_Token("imag", m.group(), m.start()))
        elif m.lastgroup == "float":
            if not allow_float:
                raise ExprParseError(
                    f"decimal literal {m.group()!r} at position {m.start()}: "
                    "the exact expression language admits only integers and "
                    "fractions p/q"
                )
            tokens.append(_Token("float", m.group(), m.start()))
        elif m.lastgroup == "int":
            tokens.append(_Token("int", m.group(), m.start()))
        elif m.lastgroup == "ident":
            tokens.append(_Token("ident", m.group(), m.start()))
        else:
            tokens.append(_Token(m.group(), m.group(), m.start()))
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent core; subclasses fix the scalar domain."""

    allow_float = False

    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text, allow_float=self.allow_float)
        self.index = 0

    # --- token plumbing -------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ExprParseError(
                f"expected {what} at position {tok.pos}, "
                f"found {tok.text!r}" if tok.kind != "end"
                else f"expected {what} at position {tok.pos}, found end of input"
            )
        return self.advance()

    def fail_at(self, tok: _Token, message: str) -> ExprParseError:
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        return ExprParseError(f"{message} at position {tok.pos}, found {found}")

    def require_end(self) -> None:
        tok = self.peek()
        if tok.kind != "end":
            raise self.fail_at(tok, "trailing input")

    # --- expression grammar ---------------------------------------------

    def point(self):
        value = self.term()
        while self.peek().kind in "+-":
            op = self.advance().kind
            rhs = self.term()
            value = self.add(value, rhs) if op == "+" else self.sub(value, rhs)
        return value

    def term(self):
        value = self.unary()
        while self.peek().kind in "*/":
            op = self.advance().kind
            rhs = self.unary()
            value = self.mul(value, rhs) if op == "*" else self.div(value, rhs)
        return value

    def unary(self):
        tok = self.peek()
        if tok.kind == "-":
            self.advance()
            return self.neg(self.unary())
        if tok.kind == "+":
            self.advance()
            return self.unary()
        return self.atom()

    def atom(self):
        tok = self.advance()
        if tok.kind == "(":
            value = self.point()
            self.expect(")", "')'")
            return value
        if tok.kind == "int":
            return self.const_int(int(tok.text))
        if tok.kind == "float":
            return self.const_float(float(tok.text))
        if tok.kind == "imag":
            return self.const_imag(float(tok.text[:-1]))
        if tok.kind == "ident":
            if tok.text == "inf":
                return self.infinity(tok)
            if tok.text == "cr":
                self.expect("(", "'(' after cr")
                args = [self.point()]
                for _ in range(3):
                    self.expect(",", "',' between cross-ratio arguments")
                    args.append(self.point())
                self.expect(")", "')' closing cr")
                return self.cr(args, tok)
            if tok.text in _KEYWORDS:
                raise self.fail_at(tok, f"reserved word {tok.text!r} cannot be a point")
            return self.variable(tok)
        raise self.fail_at(tok, "expected a point expression")

    # --- domain hooks (overridden per scalar domain) ---------------------

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def div(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def const_int(self, n: int):
        raise NotImplementedError

    def const_float(self, x: float):
        raise NotImplementedError

    def const_imag(self, x: float):
        raise NotImplementedError

    def infinity(self, tok: _Token):
        raise NotImplementedError

    def cr(self, args, tok: _Token):
        raise NotImplementedError

    def variable(self, tok: _Token):
        raise NotImplementedError


class _PointParser(_Parser):
    """Exact domain: values are PPoints over Q(A, B, ...)."""

    def _finite(self, p: PPoint, what: str):
        if p.is_inf:
            raise ExprParseError(
                f"arithmetic on 'inf' is not defined ({what}); "
                "express projective limits through cr(...)"
            )
        return p.expr

    def add(self, a: PPoint, b: PPoint) -> PPoint:
        return PPoint(self._finite(a, "addition") + self._finite(b, "addition"))

    def sub(self, a: PPoint, b: PPoint) -> PPoint:
        return PPoint(self._finite(a, "subtraction") - self._finite(b, "subtraction"))

    def mul(self, a: PPoint, b: PPoint) -> PPoint:
        return PPoint(self._finite(a, "multiplication") * self._finite(b, "multiplication"))

    def div(self, a: PPoint, b: PPoint) -> PPoint:
        return PPoint(self._finite(a, "division") / self._finite(b, "division"))

    def neg(self, a: PPoint) -> PPoint:
        return PPoint(-self._finite(a, "negation"))

    def const_int(self, n: int) -> PPoint:
        return PPoint.const(Fraction(n))

    def infinity(self, tok: _Token) -> PPoint:
        return PPoint.infinity()

    def cr(self, args: list[PPoint], tok: _Token) -> PPoint:
        return cross_ratio(*args)

    def variable(self, tok: _Token) -> PPoint:
        return PPoint.var(tok.text)

    # --- iterated-integral head ------------------------------------------

    def iterm(self) -> ITerm:
        head = self.expect("ident", "'I'")
        if head.text != "I":
            raise self.fail_at(head, "expected an I(...) term")
        self.expect("(", "'(' after I")
        a0 = self.point()
        self.expect(";", "';' after the basepoint")
        letters: list[PPoint] = []
        if self.peek().kind != ";":
            letters.append(self.point())
            while self.peek().kind == ",":
                self.advance()
                letters.append(self.point())
        self.expect(";", "';' before the endpoint")
        a_end = self.point()
        self.expect(")", "')' closing I")
        return ITerm.make(a0, tuple(letters), a_end)


class _ComplexParser(_Parser):
    """Numeric domain: values are complex floats; i/j is the imaginary unit."""

    allow_float = True

    def add(self, a: complex, b: complex) -> complex:
        return a + b

    def sub(self, a: complex, b: complex) -> complex:
        return a - b

    def mul(self, a: complex, b: complex) -> complex:
        return a * b

    def div(self, a: complex, b: complex) -> complex:
        if b == 0:
            raise ExprParseError("division by zero in numeric expression")
        return a / b

    def neg(self, a: complex) -> complex:
        return -a

    def const_int(self, n: int) -> complex:
        return complex(n)

    def const_float(self, x: float) -> complex:
        return complex(x)

    def const_imag(self, x: float) -> complex:
        return complex(0.0, x)

    def infinity(self, tok: _Token) -> complex:
        raise self.fail_at(tok, "'inf' is not a numeric value")

    def cr(self, args: list[complex], tok: _Token) -> complex:
        a, b, c, d = args
        den = (a - d) * (b - c)
        if den == 0:
            raise ExprParseError("numerically degenerate cross-ratio")
        return (a - c) * (b - d) / den

    def variable(self, tok: _Token) -> complex:
        if tok.text in ("i", "j"):
            return 1j
        raise self.fail_at(
            tok, f"unknown symbol {tok.text!r}; numeric expressions admit i/j only"
        )


def parse_point(text: str) -> PPoint:
    """Parse ``text`` as a single point of P^1 over Q(A, B, ...)."""
    parser = _PointParser(text)
    value = parser.point()
    parser.require_end()
    return value


def parse_iterm(text: str) -> ITerm:
    """Parse ``text`` as a single ``I(a0; a1, ..., an; a_end)`` term."""
    parser = _PointParser(text)
    term = parser.iterm()
    parser.require_end()
    return term


def parse_assignments(text: str) -> dict[str, Fraction]:
    """Parse ``"A=0, B=1/2, ..."`` into a variable -> rational mapping.

    Each right-hand side must parse as a constant rational point; symbolic
    or infinite values are rejected.
    """
    parser = _PointParser(text)
    assignment: dict[str, Fraction] = {}
    if parser.peek().kind == "end":
        raise ExprParseError("empty assignment list")
    while True:
        name_tok = parser.expect("ident", "a variable name")
        if name_tok.text in _KEYWORDS:
            raise parser.fail_at(name_tok, f"reserved word {name_tok.text!r} cannot be assigned")
        parser.expect("=", "'=' after the variable name")
        value = parser.point()
        if value.is_inf:
            raise ExprParseError(
                f"assignment {name_tok.text} = inf: specializations must be finite rationals"
            )
        if not value.expr.is_constant():
            raise ExprParseError(
                f"assignment to {name_tok.text!r} must be a constant rational"
            )
        if name_tok.text in assignment:
            raise ExprParseError(f"variable {name_tok.text!r} assigned twice")
        assignment[name_tok.text] = value.expr.constant_value()
        if parser.peek().kind == ",":
            parser.advance()
            continue
        parser.require_end()
        return assignment


def parse_complex(text: str) -> complex:
    """Parse a complex scalar such as ``1/2``, ``0.3+0.4i`` or ``(1+i)/2``."""
    parser = _ComplexParser(text)
    value = parser.point()
    parser.require_end()
    return value


def parse_witness(text: str) -> complex | tuple[Fraction, Fraction, Fraction]:
    """Parse a field-element witness for the quadratic-field zeta check.

    Either a complex scalar (``i``, ``1+2i``, ...) or a comma-separated
    rational triple ``a,b,c`` naming the root (a + b*sqrt(D)) / c; the
    triple form is kept exact.
    """
    pieces = _split_top_level_commas(text)
    if len(pieces) == 1:
        return parse_complex(text)
    if len(pieces) != 3:
        raise ExprParseError(
            f"a quadratic witness is a,b,c (three components, got {len(pieces)})"
        )
    rationals = []
    for piece in pieces:
        value = parse_point(piece)
        if value.is_inf or not value.expr.is_constant():
            raise ExprParseError(
                f"witness triple component {piece.strip()!r} must be a constant rational"
            )
        rationals.append(value.expr.constant_value())
    return rationals[0], rationals[1], rationals[2]


def parse_numeric_iterm(text: str) -> ITerm:
    """Parse an integral term whose points are numeric complex scalars.

    Same surface shape as :func:`parse_iterm`, but every point is read in
    the floating domain (decimals and the imaginary unit allowed, symbols
    and ``inf`` rejected), yielding a term ready for numeric path
    integration.
    """
    stripped = text.strip()
    if not stripped.startswith("I"):
        raise ExprParseError("a numeric integral term starts with 'I('")
    body = stripped[1:].lstrip()
    if not body.startswith("(") or not body.endswith(")"):
        raise ExprParseError("a numeric integral term has the shape I(a0; letters; a_end)")
    sections = _split_top_level(body[1:-1], ";")
    if len(sections) != 3:
        raise ExprParseError(
            f"an integral term has three ';'-separated sections (got {len(sections)})"
        )
    a0 = parse_complex(sections[0])
    a_end = parse_complex(sections[2])
    letters: list[complex] = []
    if sections[1].strip():
        letters = [parse_complex(piece) for piece in _split_top_level(sections[1], ",")]
    return ITerm.make(a0, letters, a_end)


def _split_top_level_commas(text: str) -> list[str]:
    return _split_top_level(text, ",")


def _split_top_level(text: str, sep: str) -> list[str]:
    pieces: list[str] = []
    depth = 0
    start = 0
    for index, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ExprParseError(f"unbalanced ')' at position {index}")
        elif ch == sep and depth == 0:
            pieces.append(text[start:index])
            start = index + 1
    if depth != 0:
        raise ExprParseError("unbalanced '(' in expression")
    pieces.append(text[start:])
    return pieces
