"""Arithmetic expressions for user-supplied energies and equations of state.

Grammar (``^`` binds tighter than unary minus and is right-associative)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?
    atom  := number | identifier | identifier '(' args ')' | '(' expr ')'

Compiled expressions evaluate over floats and hyper-duals alike.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from . import hyperdual as hd

FUNCTIONS = {"exp": 1, "ln": 1, "sqrt": 1, "pow": 2}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...]


Expr = Union[Num, Var, Neg, BinOp, Call]


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        self.offset = offset
        self.expected = expected
        detail = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class ResolutionError(ValueError):
    """An identifier is neither a declared variable nor a constant."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown identifier {name!r}")


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)

_OPERAND = frozenset({"number", "identifier", "(", "-"})


@dataclass
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(src: str) -> list[_Token]:
    tokens, pos = [], 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", pos, _OPERAND)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind if kind != "op" else m.group(), m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, kind: str, expected: frozenset[str]) -> _Token:
        if self.tok.kind != kind:
            self.fail(expected)
        return self.advance()

    def fail(self, expected: frozenset[str]):
        t = self.tok
        what = "end of input" if t.kind == "end" else f"token {t.text!r}"
        raise ParseError(f"unexpected {what}", t.offset, expected)

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail(frozenset({"+", "-", "*", "/", "^", "end of input"}))
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.advance().kind
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind in ("*", "/"):
            op = self.advance().kind
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.tok.kind == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Num(float(t.text))
        if t.kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")", frozenset({")", "+", "-", "*", "/", "^"}))
            return node
        if t.kind == "ident":
            self.advance()
            if self.tok.kind != "(":
                return Var(t.text)
            if t.text not in FUNCTIONS:
                raise ParseError(f"unknown function {t.text!r}", t.offset,
                                 frozenset(FUNCTIONS))
            self.advance()
            args = [self.expr()]
            while self.tok.kind == ",":
                self.advance()
                args.append(self.expr())
            self.expect(")", frozenset({")", ","}))
            if len(args) != FUNCTIONS[t.text]:
                raise ParseError(f"{t.text} takes {FUNCTIONS[t.text]} argument(s), "
                                 f"got {len(args)}", t.offset)
            return Call(t.text, tuple(args))
        self.fail(_OPERAND)


def parse_expr(src: str) -> Expr:
    return _Parser(src).parse()


def to_source(node: Expr) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    return f"{node.func}({', '.join(to_source(a) for a in node.args)})"


def identifiers(node: Expr) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Neg):
        return identifiers(node.operand)
    if isinstance(node, BinOp):
        return identifiers(node.left) | identifiers(node.right)
    if isinstance(node, Call):
        return set().union(*(identifiers(a) for a in node.args))
    return set()


def _binary(op: str, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if not isinstance(b, hd.HyperDual) and b == 0:
            raise hd.DomainError("division by zero")
        return a / b
    return hd.power(a, b)


def _call(func: str, args):
    if func == "exp":
        return hd.exp(args[0])
    if func == "ln":
        return hd.log(args[0])
    if func == "sqrt":
        return hd.sqrt(args[0])
    return hd.power(args[0], args[1])


_Compiled = Union[float, Callable]


def _compile(node: Expr, index: dict[str, int], constants: dict[str, float]) -> _Compiled:
    """A float for constant subtrees, otherwise a closure over the point."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.name in index:
            k = index[node.name]
            return lambda q: q[k]
        if node.name in constants:
            return float(constants[node.name])
        raise ResolutionError(node.name)
    if isinstance(node, Neg):
        inner = _compile(node.operand, index, constants)
        if not callable(inner):
            return -inner
        return lambda q: -inner(q)
    if isinstance(node, BinOp):
        a = _compile(node.left, index, constants)
        b = _compile(node.right, index, constants)
        op = node.op
        if not callable(a) and not callable(b):
            return float(hd.real(_binary(op, a, b)))
        if not callable(b):
            return lambda q: _binary(op, a(q), b)
        if not callable(a):
            return lambda q: _binary(op, a, b(q))
        return lambda q: _binary(op, a(q), b(q))
    args = [_compile(a, index, constants) for a in node.args]
    func = node.func
    if not any(callable(a) for a in args):
        return float(hd.real(_call(func, args)))
    return lambda q: _call(func, [a(q) if callable(a) else a for a in args])


def compile_expr(node: Expr | str, variables: Sequence[str],
                 constants: dict[str, float] | None = None) -> Callable:
    """Scalar field ``q -> value`` with ``q`` ordered like ``variables``.

    Constants are substituted and constant subtrees folded before any
    evaluation, so derivatives only see the variables.
    """
    if isinstance(node, str):
        node = parse_expr(node)
    index = {name: k for k, name in enumerate(variables)}
    code = _compile(node, index, dict(constants or {}))
    if callable(code):
        return code
    return lambda q: code


def evaluate(src: str, values: dict[str, float]):
    return compile_expr(src, list(values), {})(list(values.values()))
