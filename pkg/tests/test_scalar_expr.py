import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from warp_tools import Chart, parse, eval, eval_jet2, fd_oracle
from warp_tools.errors import ExprDomainError, ExprSyntaxError, NonDifferentiableError, UnknownVariableError
from warp_tools.scalar_expr import Power

XY = Chart(('x', 'y'))

def at(x, y):
    return XY.point(x, y)

def test_precedence():
    assert eval(parse('1 + 2*3'), at(0, 0)) == 7.0
    assert eval(parse('-x^2'), at(3, 0)) == -9.0
    assert eval(parse('2^3^2'), at(0, 0)) == 512.0
    assert eval(parse('(1 + 2)*3'), at(0, 0)) == 9.0
    assert eval(parse('x/y/2'), at(8, 2)) == 2.0
    assert eval(parse('+x - -y'), at(1, 2)) == 3.0

def test_constant_exponent_is_folded():
    e = parse('(x + 1)^(1/3)', XY.coords)
    assert isinstance(e, Power)
    assert e.exponent == pytest.approx(1.0 / 3.0)
    assert eval(e, at(7, 0)) == pytest.approx(2.0)

def test_functions():
    p = at(0.5, 2.0)
    assert eval(parse('sin(x)^2 + cos(x)^2'), p) == pytest.approx(1.0)
    assert eval(parse('log(exp(y))'), p) == pytest.approx(2.0)
    assert eval(parse('sqrt(y)*sqrt(y)'), p) == pytest.approx(2.0)
    assert eval(parse('cbrt(-8)'), p) == pytest.approx(-2.0)
    assert eval(parse('cosh(x)^2 - sinh(x)^2'), p) == pytest.approx(1.0)
    assert eval(parse('tan(x)'), p) == pytest.approx(math.tan(0.5))

def test_numbers():
    p = at(0, 0)
    assert eval(parse('1.5e2'), p) == 150.0
    assert eval(parse('.25'), p) == 0.25
    assert eval(parse('2.'), p) == 2.0

def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as exc:
        parse('x + * y')
    assert exc.value.offset == 4

    with pytest.raises(ExprSyntaxError) as exc:
        parse('sin(x')
    assert exc.value.offset == 5

    with pytest.raises(ExprSyntaxError):
        parse('x $ y')
    with pytest.raises(ExprSyntaxError):
        parse('foo(x)')
    with pytest.raises(ExprSyntaxError):
        parse('')

def test_unknown_variable():
    with pytest.raises(UnknownVariableError) as exc:
        parse('x + z', XY.coords)
    assert exc.value.name == 'z'
    assert parse('x + z').free_variables() == frozenset({ 'x', 'z' })

def test_domain_errors():
    with pytest.raises(ExprDomainError):
        eval(parse('log(x)'), at(0, 0))
    with pytest.raises(ExprDomainError):
        eval(parse('1/x'), at(0, 0))
    with pytest.raises(ExprDomainError):
        eval(parse('x^(1/3)'), at(-1, 0))
    with pytest.raises(ExprDomainError):
        eval(parse('x^y'), at(-1, 2))
    with pytest.raises(NonDifferentiableError):
        eval_jet2(parse('sqrt(x)'), at(0, 0))

def test_integer_powers_of_negative_base():
    assert eval(parse('x^3'), at(-2, 0)) == -8.0
    assert eval(parse('x^(-2)'), at(-2, 0)) == 0.25

def test_variable_exponent():
    j = eval_jet2(parse('x^y'), at(2.0, 3.0))
    assert j.value == pytest.approx(8.0)
    assert_allclose(j.grad, [12.0, 8.0 * math.log(2.0)])

def test_jet_of_polynomial():
    j = eval_jet2(parse('x^2*y + 3*y'), at(1.0, 2.0))
    assert j.value == 8.0
    assert_allclose(j.grad, [4.0, 4.0])
    assert_allclose(j.hess, [[4.0, 2.0], [2.0, 0.0]])
    assert_array_equal(j.hess, j.hess.T)

SOURCES = [
    'sin(x)*exp(y)',
    'x^3/(1 + y^2)',
    '(2*x + 5)^(1/3)*cos(y)',
    'sqrt(1 + x^2 + y^2)',
    'log(2 + sin(x*y))',
    'exp(x*y)/(2 + cos(x))',
    ]

coords = st.floats(min_value=-1.5, max_value=1.5, allow_nan=False, allow_infinity=False)

@settings(max_examples=50, deadline=None)
@given(st.sampled_from(SOURCES), coords, st.floats(min_value=0.5, max_value=1.5))
def test_value_channel_is_bit_identical(source, x, y):
    e = parse(source)
    p = at(x, y)
    assert eval_jet2(e, p).value == eval(e, p)

@settings(max_examples=50, deadline=None)
@given(st.sampled_from(SOURCES), coords, st.floats(min_value=0.5, max_value=1.5), st.sampled_from([(1.0, 0.0), (0.0, 1.0), (0.6, 0.8)]))
def test_derivatives_match_finite_differences(source, x, y, direction):
    e = parse(source)
    p = at(x, y)
    j = eval_jet2(e, p)
    u = np.array(direction)
    scale = 1.0 + abs(j.value)
    assert j.along(u) == pytest.approx(fd_oracle(e, p, u, 1, 1e-5), abs=1e-6 * scale)
    assert j.along2(u, u) == pytest.approx(fd_oracle(e, p, u, 2, 1e-4), abs=1e-4 * scale)

def test_fd_oracle_arguments():
    with pytest.raises(ValueError):
        fd_oracle(parse('x'), at(0, 0), (1.0, 0.0), 1, 0.0)
    with pytest.raises(ValueError):
        fd_oracle(parse('x'), at(0, 0), (1.0, 0.0), 3, 0.1)

def test_chart_validation():
    with pytest.raises(ValueError):
        Chart(('x', 'x'))
    with pytest.raises(ValueError):
        Chart(('1x',))
    with pytest.raises(ValueError):
        XY.point(1.0)
    assert Chart(('x', 'y'), 'named') == XY

def _combine(children):
    pair = st.tuples(children, children)
    return st.one_of(
        pair.map(lambda t: '({} + {})'.format(*t)),
        pair.map(lambda t: '({} - {})'.format(*t)),
        pair.map(lambda t: '{} * {}'.format(*t)),
        pair.map(lambda t: '{} / (2 + {}^2)'.format(*t)),
        children.map('sin({})'.format),
        children.map('cos({})'.format),
        children.map('exp(sin({}))'.format),
        children.map('-{}'.format),
        )

expressions = st.recursive(st.sampled_from(['x', 'y', '0.5', '2', '3.25']), _combine, max_leaves=8)

@settings(max_examples=100, deadline=None)
@given(expressions, coords, coords)
def test_random_expressions(source, x, y):
    e = parse(source, XY.coords)
    p = at(x, y)
    j = eval_jet2(e, p)
    assert j.value == eval(e, p)
    assert_array_equal(j.hess, j.hess.T)
    scale = 1.0 + abs(j.value) + float(np.max(np.abs(j.hess)))
    for u in (np.array([1.0, 0.0]), np.array([0.0, 1.0])):
        assert j.along(u) == pytest.approx(fd_oracle(e, p, u, 1, 1e-5), abs=1e-5 * scale)
