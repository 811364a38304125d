"""
Scalar functions of named coordinates.

Expressions are written in a small infix language and evaluated either to
a float or to a `Jet2` carrying exact first and second derivatives. The
grammar, in EBNF::

    expr    = term { ( "+" | "-" ) term } ;
    term    = unary { ( "*" | "/" ) unary } ;
    unary   = ( "-" | "+" ) unary | power ;
    power   = primary [ "^" unary ] ;
    primary = number | name | name "(" expr ")" | "(" expr ")" ;
    number  = digits [ "." { digit } ] [ exponent ] | "." digits [ exponent ] ;
    exponent = ( "e" | "E" ) [ "+" | "-" ] digits ;
    name    = ( letter | "_" ) { letter | digit | "_" } ;

`^` is right-associative and binds tighter than unary minus, so `-x^2`
is `-(x^2)` and `x^2^3` is `x^(2^3)`. A power whose exponent contains no
variables is folded into a `Power` node with a real exponent.
"""

import math
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ExprSyntaxError, UnknownVariableError, ExprDomainError, NonDifferentiableError
from .jet2 import Jet2

_NAME_RE = re.compile(r'[A-Za-z_][A-Za-z0-9_]*\Z')

@dataclass(frozen=True)
class Chart:
    coords: tuple
    name: str = field(default='', compare=False)

    def __post_init__(self):
        coords = tuple(self.coords)
        object.__setattr__(self, 'coords', coords)
        for c in coords:
            if not _NAME_RE.match(c):
                raise ValueError('invalid coordinate name {!r}'.format(c))
        if len(set(coords)) != len(coords):
            raise ValueError('duplicate coordinate names in {}'.format(coords))

    @property
    def dim(self):
        return len(self.coords)

    @cached_property
    def index(self):
        return { name: i for i, name in enumerate(self.coords) }

    def point(self, *coords):
        return Point(self, coords)

class Point:
    __slots__ = ('chart', 'coords', '_hash')

    def __init__(self, chart, coords):
        coords = tuple(float(c) for c in coords)
        if len(coords) != chart.dim:
            raise ValueError('point has {} coordinates, chart {} has {}'.format(len(coords), chart.coords, chart.dim))
        self.chart = chart
        self.coords = coords
        self._hash = hash((chart.coords, coords))

    def __eq__(self, other):
        return isinstance(other, Point) and self.chart == other.chart and self.coords == other.coords

    def __hash__(self):
        return self._hash

    def __getitem__(self, name):
        return self.coords[self.chart.index[name]]

    def __repr__(self):
        return 'Point({})'.format(', '.join('{}={!r}'.format(k, v) for k, v in zip(self.chart.coords, self.coords)))

    def as_array(self):
        return np.array(self.coords)

    def moved(self, direction, step):
        return Point(self.chart, self.as_array() + step * np.asarray(direction, dtype=float))

    def items(self):
        return tuple(zip(self.chart.coords, self.coords))

class _Env:
    __slots__ = ('values', 'index', 'names')

    def __init__(self, point):
        self.values = point.coords
        self.index = point.chart.index
        self.names = point.chart.coords

class Expr:
    """Base of the immutable expression tree."""

    def free_variables(self):
        return frozenset(self._variables())

    def node_count(self):
        return sum(1 for _ in self._walk())

    def _walk(self):
        yield self

    def _variables(self):
        for node in self._walk():
            if isinstance(node, Var):
                yield node.name

    def __add__(self, other):
        return BinOp('+', self, as_expr(other))

    def __radd__(self, other):
        return BinOp('+', as_expr(other), self)

    def __sub__(self, other):
        return BinOp('-', self, as_expr(other))

    def __rsub__(self, other):
        return BinOp('-', as_expr(other), self)

    def __mul__(self, other):
        return BinOp('*', self, as_expr(other))

    def __rmul__(self, other):
        return BinOp('*', as_expr(other), self)

    def __truediv__(self, other):
        return BinOp('/', self, as_expr(other))

    def __rtruediv__(self, other):
        return BinOp('/', as_expr(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, exponent):
        if isinstance(exponent, (int, float)):
            return Power(self, float(exponent))
        return BinOp('^', self, exponent)

def as_expr(value):
    if isinstance(value, Expr):
        return value
    return Const(float(value))

@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: float

    def __str__(self):
        return repr(self.value)

    def _eval(self, lane, env):
        return lane.constant(self.value)

@dataclass(frozen=True)
class Var(Expr):
    name: str

    def __str__(self):
        return self.name

    def _eval(self, lane, env):
        idx = env.index.get(self.name)
        if idx is None:
            raise UnknownVariableError(self.name, env.names)
        return lane.variable(env.values[idx], idx)

@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def __str__(self):
        return '(-{})'.format(self.arg)

    def _walk(self):
        yield self
        yield from self.arg._walk()

    def _eval(self, lane, env):
        return -self.arg._eval(lane, env)

@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr

    def __str__(self):
        return '{}({})'.format(self.func, self.arg)

    def _walk(self):
        yield self
        yield from self.arg._walk()

    def _eval(self, lane, env):
        return lane.call(PRIMITIVES[self.func], self.arg._eval(lane, env), self)

@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def __str__(self):
        return '({} {} {})'.format(self.left, self.op, self.right)

    def _walk(self):
        yield self
        yield from self.left._walk()
        yield from self.right._walk()

    def _eval(self, lane, env):
        a = self.left._eval(lane, env)
        b = self.right._eval(lane, env)
        op = self.op
        if op == '+':
            return a + b
        if op == '-':
            return a - b
        if op == '*':
            return a * b
        if op == '/':
            if lane.value_of(b) == 0.0:
                raise ExprDomainError('division by zero', self)
            return a / b
        if lane.value_of(a) <= 0.0:
            raise ExprDomainError('variable power of a nonpositive base', self)
        return lane.call(PRIMITIVES['exp'], b * lane.call(PRIMITIVES['log'], a, self), self)

@dataclass(frozen=True)
class Power(Expr):
    base: Expr
    exponent: float

    def __str__(self):
        return '({} ^ {!r})'.format(self.base, self.exponent)

    def _walk(self):
        yield self
        yield from self.base._walk()

    def _eval(self, lane, env):
        return lane.power(self.base._eval(lane, env), self.exponent, self)

class _Primitive:
    def __init__(self, name, value, derivs, domain=None):
        self.name = name
        self._value = value
        self._derivs = derivs
        self._domain = domain

    def value(self, x, node):
        if self._domain is not None and not self._domain(x):
            raise ExprDomainError('{} outside its domain at {!r}'.format(self.name, x), node)
        try:
            return float(self._value(x))
        except OverflowError:
            raise ExprDomainError('{} overflows at {!r}'.format(self.name, x), node) from None

    def derivs(self, x, v, node):
        return self._derivs(x, v, node)

def _sqrt_derivs(x, v, node):
    if v == 0.0:
        raise NonDifferentiableError('sqrt is not differentiable at 0', node)
    return 0.5 / v, -0.25 / (v * x)

def _cbrt_derivs(x, v, node):
    if v == 0.0:
        raise NonDifferentiableError('cbrt is not differentiable at 0', node)
    return 1.0 / (3.0 * v * v), -2.0 / (9.0 * v ** 5)

def _tan_derivs(x, v, node):
    d1 = 1.0 + v * v
    return d1, 2.0 * v * d1

PRIMITIVES = { p.name: p for p in [
    _Primitive('sin', math.sin, lambda x, v, node: (math.cos(x), -v)),
    _Primitive('cos', math.cos, lambda x, v, node: (-math.sin(x), -v)),
    _Primitive('tan', math.tan, _tan_derivs),
    _Primitive('exp', math.exp, lambda x, v, node: (v, v)),
    _Primitive('log', math.log, lambda x, v, node: (1.0 / x, -1.0 / (x * x)), domain=lambda x: x > 0.0),
    _Primitive('sqrt', math.sqrt, _sqrt_derivs, domain=lambda x: x >= 0.0),
    _Primitive('cbrt', np.cbrt, _cbrt_derivs),
    _Primitive('sinh', math.sinh, lambda x, v, node: (math.cosh(x), v)),
    _Primitive('cosh', math.cosh, lambda x, v, node: (math.sinh(x), v)),
    ]}

def _pow_value(a, q, node):
    try:
        if q.is_integer():
            if q < 0 and a == 0.0:
                raise ExprDomainError('zero raised to a negative power', node)
            return float(a ** int(q))
        if a <= 0.0:
            raise ExprDomainError('non-integer power of a nonpositive base', node)
        return a ** q
    except OverflowError:
        raise ExprDomainError('power overflows', node) from None

def _pow_derivs(a, q):
    if q == 0.0:
        return 0.0, 0.0
    if q == 1.0:
        return 1.0, 0.0
    if q.is_integer():
        k = int(q)
        return k * a ** (k - 1), k * (k - 1) * a ** (k - 2)
    return q * a ** (q - 1.0), q * (q - 1.0) * a ** (q - 2.0)

class _FloatLane:
    @staticmethod
    def value_of(x):
        return x

    @staticmethod
    def constant(value):
        return value

    @staticmethod
    def variable(value, index):
        return value

    @staticmethod
    def call(prim, a, node):
        return prim.value(a, node)

    @staticmethod
    def power(a, q, node):
        return _pow_value(a, q, node)

class _JetLane:
    def __init__(self, n):
        self._n = n

    @staticmethod
    def value_of(x):
        return x.value

    def constant(self, value):
        return Jet2.constant(value, self._n)

    def variable(self, value, index):
        return Jet2.variable(value, index, self._n)

    @staticmethod
    def call(prim, a, node):
        v = prim.value(a.value, node)
        d1, d2 = prim.derivs(a.value, v, node)
        return a.chain(v, d1, d2)

    @staticmethod
    def power(a, q, node):
        v = _pow_value(a.value, q, node)
        d1, d2 = _pow_derivs(a.value, q)
        return a.chain(v, d1, d2)

_FLOAT_LANE = _FloatLane()

def eval(e, p):
    """Evaluate `e` at the point `p` to a float."""
    return e._eval(_FLOAT_LANE, _Env(p))

def eval_jet2(e, p):
    """
    Evaluate `e` at `p` together with its exact gradient and Hessian
    with respect to the coordinates of `p`'s chart.

    The value channel goes through the same scalar operations as `eval`
    and is bit-identical to it.
    """
    j = e._eval(_JetLane(p.chart.dim), _Env(p))
    return j.symmetrized()

def fd_oracle(e, p, direction, order, step):
    """Central finite-difference estimate of a directional derivative, for tests."""
    if step <= 0:
        raise ValueError('step must be positive')
    plus = eval(e, p.moved(direction, step))
    minus = eval(e, p.moved(direction, -step))
    if order == 1:
        return (plus - minus) / (2.0 * step)
    if order == 2:
        return (plus - 2.0 * eval(e, p) + minus) / (step * step)
    raise ValueError('order must be 1 or 2')

_TOKEN_RE = re.compile(r'''
    (?P<ws>\s+)
  | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
''', re.VERBOSE)

class _Token:
    __slots__ = ('kind', 'text', 'pos')

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos

class _Parser:
    def __init__(self, source, coords):
        self._source = source
        self._coords = None if coords is None else frozenset(coords)
        self._coord_list = () if coords is None else tuple(coords)
        self._tokens = self._tokenize()
        self._i = 0

    def _error(self, message, pos):
        offset = len(self._source[:pos].encode('utf-8'))
        return ExprSyntaxError(message, self._source, offset)

    def _tokenize(self):
        src = self._source
        tokens = []
        pos = 0
        while pos < len(src):
            m = _TOKEN_RE.match(src, pos)
            if m is None:
                raise self._error('unexpected character {!r}'.format(src[pos]), pos)
            if m.lastgroup != 'ws':
                tokens.append(_Token(m.lastgroup, m.group(), pos))
            pos = m.end()
        tokens.append(_Token('end', '', len(src)))
        return tokens

    def _peek(self):
        return self._tokens[self._i]

    def _next(self):
        tok = self._tokens[self._i]
        self._i += 1
        return tok

    def _at_op(self, ops):
        tok = self._peek()
        return tok.kind == 'op' and tok.text in ops

    def _expect(self, text):
        tok = self._next()
        if tok.kind != 'op' or tok.text != text:
            raise self._error('expected {!r}'.format(text), tok.pos)

    def parse(self):
        e = self._expr()
        tok = self._peek()
        if tok.kind != 'end':
            raise self._error('unexpected {!r}'.format(tok.text), tok.pos)
        return e

    def _expr(self):
        e = self._term()
        while self._at_op('+-'):
            op = self._next().text
            e = BinOp(op, e, self._term())
        return e

    def _term(self):
        e = self._unary()
        while self._at_op('*/'):
            op = self._next().text
            e = BinOp(op, e, self._unary())
        return e

    def _unary(self):
        if self._at_op('-'):
            self._next()
            return Neg(self._unary())
        if self._at_op('+'):
            self._next()
            return self._unary()
        return self._power()

    def _power(self):
        base = self._primary()
        if not self._at_op('^'):
            return base
        self._next()
        exponent = self._unary()
        if exponent.free_variables():
            return BinOp('^', base, exponent)
        return Power(base, eval(exponent, Point(Chart(()), ())))

    def _primary(self):
        tok = self._next()
        if tok.kind == 'num':
            value = float(tok.text)
            if not math.isfinite(value):
                raise self._error('number out of range', tok.pos)
            return Const(value)
        if tok.kind == 'name':
            if self._at_op('('):
                if tok.text not in PRIMITIVES:
                    raise self._error('unknown function {!r}'.format(tok.text), tok.pos)
                self._next()
                arg = self._expr()
                self._expect(')')
                return Call(tok.text, arg)
            if self._coords is not None and tok.text not in self._coords:
                raise UnknownVariableError(tok.text, self._coord_list)
            return Var(tok.text)
        if tok.kind == 'op' and tok.text == '(':
            e = self._expr()
            self._expect(')')
            return e
        if tok.kind == 'end':
            raise self._error('unexpected end of input', tok.pos)
        raise self._error('unexpected {!r}'.format(tok.text), tok.pos)

def parse(source, coords=None):
    """
    Parse `source` into an expression tree.

    Every variable must be one of `coords`; pass None to accept any name.
    Raises ExprSyntaxError (with a byte offset) or UnknownVariableError.
    """
    return _Parser(source, coords).parse()

ZERO = Const(0.0)
ONE = Const(1.0)
