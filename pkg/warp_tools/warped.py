"""
Warped products M1 x_f M2 with metric g1 + eps f^2 g2.

The product is an ordinary `Manifold`, so every intrinsic quantity comes
from `geometry`. The closed forms here are assembled only from the factor
manifolds and the jets of f, and every comparison is returned as a
`Residual`.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import NonpositiveWarpingError, SignatureUnsupportedError, SplitFieldError, UnknownVariableError
from .geometry import (Manifold, VectorFieldSpec, covariant_derivative_at, covariant_jacobian_at,
    lie_metric_at, lie2_metric_at, lie2_connection_terms)
from .killing import DEFAULT_TOLERANCE, sample_points, sampled_check
from .scalar_expr import Chart, Point, Const, parse, eval_jet2, ZERO

logger = logging.getLogger(__name__)

class WarpedProduct:
    def __init__(self, base, fiber, warping, fiber_sign=1, name=''):
        if fiber_sign not in (1, -1):
            raise ValueError('fiber_sign must be +1 or -1, got {!r}'.format(fiber_sign))
        shared = set(base.chart.coords) & set(fiber.chart.coords)
        if shared:
            raise ValueError('base and fiber share coordinates: {}'.format(', '.join(sorted(shared))))
        if isinstance(warping, str):
            warping = parse(warping, base.chart.coords)
        for v in warping.free_variables():
            if v not in base.chart.index:
                raise UnknownVariableError(v, base.chart.coords)

        self.base = base
        self.fiber = fiber
        self.warping = warping
        self.fiber_sign = fiber_sign
        self.name = name

    def __repr__(self):
        return 'WarpedProduct({!r}, base={}, fiber={}, f={}, sign={:+d})'.format(
            self.name, self.base.chart.coords, self.fiber.chart.coords, self.warping, self.fiber_sign)

    @property
    def split_index(self):
        return self.base.dim

    @cached_property
    def product(self):
        m, n = self.base.dim, self.fiber.dim
        chart = Chart(self.base.chart.coords + self.fiber.chart.coords, self.name)
        factor = Const(float(self.fiber_sign)) * self.warping ** 2

        fiber_block = {}
        for i in range(n):
            for j in range(i, n):
                fiber_block[i, j] = fiber_block[j, i] = factor * self.fiber.metric[i][j]

        rows = []
        for i in range(m + n):
            row = []
            for j in range(m + n):
                if i < m and j < m:
                    row.append(self.base.metric[i][j])
                elif i >= m and j >= m:
                    row.append(fiber_block[i - m, j - m])
                else:
                    row.append(ZERO)
            rows.append(row)

        domain = self.base.domain + self.fiber.domain + (self.warping,)
        return Manifold(chart, rows, domain, self.name)

    def split_point(self, p):
        m = self.base.dim
        return Point(self.base.chart, p.coords[:m]), Point(self.fiber.chart, p.coords[m:])

    def join_point(self, p1, p2):
        return Point(self.product.chart, p1.coords + p2.coords)

    def warping_jet(self, p1):
        f = eval_jet2(self.warping, p1)
        if not f.value > 0.0:
            raise NonpositiveWarpingError(f.value, p1)
        return f

    def split_field(self, base, fiber, name=''):
        """Build a SplitField from component strings or expressions of each factor."""
        try:
            base = VectorFieldSpec(self.base.chart, [_expr(c, self.base.chart) for c in base])
            fiber = VectorFieldSpec(self.fiber.chart, [_expr(c, self.fiber.chart) for c in fiber])
        except UnknownVariableError as e:
            raise SplitFieldError('component of {} depends on {!r}, which is not a coordinate of its factor'.format(name or 'split field', e.name)) from e
        return SplitField(self, base, fiber, name)

    def coordinate_field(self, i):
        m = self.base.dim
        if i < m:
            return SplitField(self, VectorFieldSpec.coordinate(self.base.chart, i), VectorFieldSpec.zero(self.fiber.chart), 'd' + self.base.chart.coords[i])
        return SplitField(self, VectorFieldSpec.zero(self.base.chart), VectorFieldSpec.coordinate(self.fiber.chart, i - m), 'd' + self.fiber.chart.coords[i - m])

    @cached_property
    def coordinate_fields(self):
        return tuple(self.coordinate_field(i) for i in range(self.base.dim + self.fiber.dim))

def _expr(c, chart):
    if isinstance(c, str):
        return parse(c, chart.coords)
    return c

class SplitField:
    """
    A vector field (zeta1, zeta2) on a warped product; zeta1 depends on base
    coordinates only and zeta2 on fiber coordinates only.
    """

    def __init__(self, product, base, fiber, name=''):
        if base.chart != product.base.chart:
            raise SplitFieldError('base part of {} is not on the base chart {}'.format(name or 'split field', product.base.chart.coords))
        if fiber.chart != product.fiber.chart:
            raise SplitFieldError('fiber part of {} is not on the fiber chart {}'.format(name or 'split field', product.fiber.chart.coords))
        self.product = product
        self.base = base
        self.fiber = fiber
        self.name = name

    def __repr__(self):
        return 'SplitField({!r}, base={!r}, fiber={!r})'.format(self.name, self.base, self.fiber)

    @cached_property
    def lift(self):
        return VectorFieldSpec(self.product.product.chart, self.base.components + self.fiber.components, self.name)

@dataclass(frozen=True)
class Residual:
    lhs: float
    rhs: float
    residual: float
    scale: float
    terms: dict = field(default_factory=dict, compare=False)

    @classmethod
    def of(cls, lhs, rhs, terms=None, scale=0.0):
        terms = dict(terms or {})
        lhs = float(lhs)
        rhs = float(rhs)
        scale = max([abs(lhs), abs(rhs), float(scale)] + [abs(v) for v in terms.values()])
        return cls(lhs, rhs, abs(lhs - rhs), scale, terms)

class WarpingAlong(NamedTuple):
    """
    The warping function f and its derivatives along the base part zeta1 of
    a field, at a base point. `grad_f_zeta_f` is the gradient of the product
    f zeta1(f), so zeta1(f zeta1(f)) = grad_f_zeta_f . zeta1.
    """
    f: float
    grad: np.ndarray
    zeta: np.ndarray
    zeta_f: float
    zeta_zeta_f: float
    grad_f_zeta_f: np.ndarray

    @property
    def zeta_f_zeta_f(self):
        return float(self.grad_f_zeta_f @ self.zeta)

def warping_along(W, zeta_base, p1):
    f = W.warping_jet(p1)
    z = zeta_base.jets_at(p1)
    zeta_f = float(f.grad @ z.value)
    grad_zeta_f = z.d.T @ f.grad + f.hess @ z.value
    zeta_zeta_f = float(grad_zeta_f @ z.value)
    return WarpingAlong(f.value, f.grad, z.value, zeta_f, zeta_zeta_f, f.grad * zeta_f + f.value * grad_zeta_f)

def build_product(W, points=()):
    """
    The product manifold of `W`. Every base point in `points` is checked for
    f > 0 first.
    """
    for p1 in points:
        W.warping_jet(p1)
    return W.product

def connection_closed_form(W, X, Y, p):
    """D_X Y on the product, assembled from the factor connections and the jets of f."""
    p1, p2 = W.split_point(p)
    f = W.warping_jet(p1)
    base_geo = W.base.at(p1)
    fiber_geo = W.fiber.at(p2)

    x1 = X.base.values_at(p1)
    y1 = Y.base.values_at(p1)
    x2 = X.fiber.values_at(p2)
    y2 = Y.fiber.values_at(p2)

    fiber_inner = W.fiber_sign * fiber_geo.inner(x2, y2)
    base_part = covariant_derivative_at(W.base, X.base, Y.base, p1) - f.value * fiber_inner * (base_geo.inverse @ f.grad)
    fiber_part = ((f.grad @ x1) / f.value) * y2 + ((f.grad @ y1) / f.value) * x2 + covariant_derivative_at(W.fiber, X.fiber, Y.fiber, p2)
    return np.concatenate([base_part, fiber_part])

def dxz_inner_closed_form(W, zeta, X, p):
    M = W.product
    lhs = M.at(p).inner(covariant_derivative_at(M, X.lift, zeta.lift, p), X.lift.values_at(p))

    p1, p2 = W.split_point(p)
    w = warping_along(W, zeta.base, p1)
    eps = W.fiber_sign
    x1 = X.base.values_at(p1)
    x2 = X.fiber.values_at(p2)
    fiber_geo = W.fiber.at(p2)

    terms = {
        'base': W.base.at(p1).inner(covariant_derivative_at(W.base, X.base, zeta.base, p1), x1),
        'fiber': eps * w.f ** 2 * fiber_geo.inner(covariant_derivative_at(W.fiber, X.fiber, zeta.fiber, p2), x2),
        'warping': eps * w.f * w.zeta_f * fiber_geo.inner(x2, x2),
        }
    return Residual.of(lhs, sum(terms.values()), terms)

class BlockForm(NamedTuple):
    """A closed-form symmetric (0,2) tensor on coordinate fields, with its named term blocks."""
    values: np.ndarray
    terms: dict

    def scale(self):
        return max([0.0] + [float(np.max(np.abs(t))) for t in self.terms.values()])

def _embed(W, base_block=None, fiber_block=None):
    m, n = W.base.dim, W.fiber.dim
    out = np.zeros((m + n, m + n))
    if base_block is not None:
        out[:m, :m] = base_block
    if fiber_block is not None:
        out[m:, m:] = fiber_block
    return out

def lie_closed_form_matrix(W, zeta, p):
    p1, p2 = W.split_point(p)
    w = warping_along(W, zeta.base, p1)
    eps = W.fiber_sign
    g2 = W.fiber.at(p2).g

    terms = {
        'base': _embed(W, base_block=lie_metric_at(W.base, zeta.base, p1).values),
        'fiber': _embed(W, fiber_block=eps * w.f ** 2 * lie_metric_at(W.fiber, zeta.fiber, p2).values),
        'warping': _embed(W, fiber_block=2.0 * eps * w.f * w.zeta_f * g2),
        }
    return BlockForm(sum(terms.values()), terms)

LIE2_VARIANTS = ('appendix', 'printed')

def lie2_closed_form_matrix(W, zeta, p, variant='appendix'):
    """
    Closed form of L_zeta L_zeta g on coordinate fields:

        (L1 L1 g1)(X1, Y1) + f^2 (L2 L2 g2)(X2, Y2) + 4 f zeta1(f) (L2 g2)(X2, Y2)
            + 2 f zeta1(zeta1(f)) g2(X2, Y2) + 2 zeta1(f)^2 g2(X2, Y2)

    with g2 scaled by the fiber sign. The 'printed' variant replaces the
    2 f zeta1(zeta1(f)) term by a second copy of 2 zeta1(f)^2.
    """
    if variant not in LIE2_VARIANTS:
        raise ValueError('unknown variant {!r}'.format(variant))

    p1, p2 = W.split_point(p)
    w = warping_along(W, zeta.base, p1)
    eps = W.fiber_sign
    g2 = W.fiber.at(p2).g

    second = w.f * w.zeta_zeta_f if variant == 'appendix' else w.zeta_f ** 2
    terms = {
        'base': _embed(W, base_block=lie2_metric_at(W.base, zeta.base, p1).values),
        'fiber': _embed(W, fiber_block=eps * w.f ** 2 * lie2_metric_at(W.fiber, zeta.fiber, p2).values),
        'mixed': _embed(W, fiber_block=4.0 * eps * w.f * w.zeta_f * lie_metric_at(W.fiber, zeta.fiber, p2).values),
        'warping_second': _embed(W, fiber_block=2.0 * eps * second * g2),
        'warping_square': _embed(W, fiber_block=2.0 * eps * w.zeta_f ** 2 * g2),
        }
    return BlockForm(sum(terms.values()), terms)

def _contract_form(form, X, Y, p):
    x = X.lift.values_at(p)
    y = Y.lift.values_at(p)
    return { k: float(x @ t @ y) for k, t in form.terms.items() }

def lie_closed_form(W, zeta, X, Y, p):
    lhs = lie_metric_at(W.product, zeta.lift, p).contract(X.lift.values_at(p), Y.lift.values_at(p))
    terms = _contract_form(lie_closed_form_matrix(W, zeta, p), X, Y, p)
    return Residual.of(lhs, sum(terms.values()), terms)

def lie2_closed_form(W, zeta, X, Y, p, variant='appendix'):
    """
    Intrinsic (L_zeta L_zeta g)(X, Y) on the product against the closed form.

    The residual terms also carry the three groups of the connection form on
    the product, under 'second_derivatives', 'bracket_terms' and
    'first_derivatives'; they are diagnostics and do not enter the sum.
    """
    M = W.product
    x = X.lift.values_at(p)
    y = Y.lift.values_at(p)
    lhs = lie2_metric_at(M, zeta.lift, p).contract(x, y)
    terms = _contract_form(lie2_closed_form_matrix(W, zeta, p, variant), X, Y, p)
    rhs = sum(terms.values())

    groups = lie2_connection_terms(M, zeta.lift, X.lift, Y.lift, p)
    res = Residual.of(lhs, rhs, terms)
    res.terms.update(second_derivatives=groups.second_derivatives, bracket_terms=groups.bracket_terms, first_derivatives=groups.first_derivatives)
    return res

TRACE_VARIANTS = ('complete', 'printed')

def _trace_square(M, zeta, p):
    geo = M.at(p)
    dz = covariant_jacobian_at(M, zeta, p)
    return float(np.einsum('ij,ki,kl,lj->', geo.inverse, dz, geo.g, dz))

def trace_closed_form(W, zeta, p, variant='complete'):
    """
    Tr g(D zeta, D zeta) on a Riemannian warped product against

        Tr g1(D1 zeta1, D1 zeta1) + Tr g2(D2 zeta2, D2 zeta2) + 2 |zeta2|^2 |grad f|^2
            + (n / f^2) zeta1(f)^2 + 2 (zeta1(f) / f) div2(zeta2)

    where n is the fiber dimension. The 'printed' variant drops the last term.
    """
    if W.fiber_sign != 1:
        raise SignatureUnsupportedError('trace formula needs a Riemannian fiber (fiber_sign=+1)')
    if variant not in TRACE_VARIANTS:
        raise ValueError('unknown variant {!r}'.format(variant))

    lhs = _trace_square(W.product, zeta.lift, p)

    p1, p2 = W.split_point(p)
    w = warping_along(W, zeta.base, p1)
    base_geo = W.base.at(p1)
    fiber_geo = W.fiber.at(p2)
    z2 = zeta.fiber.values_at(p2)
    div2 = float(np.trace(covariant_jacobian_at(W.fiber, zeta.fiber, p2)))

    terms = {
        'base': _trace_square(W.base, zeta.base, p1),
        'fiber': _trace_square(W.fiber, zeta.fiber, p2),
        'gradient': 2.0 * fiber_geo.inner(z2, z2) * float(w.grad @ base_geo.inverse @ w.grad),
        'warping': W.fiber.dim * w.zeta_f ** 2 / w.f ** 2,
        }
    if variant == 'complete':
        terms['divergence'] = 2.0 * w.zeta_f / w.f * div2
    return Residual.of(lhs, sum(terms.values()), terms)

def connection_residual(W, X, Y, p):
    """Intrinsic D_X Y on the product against `connection_closed_form`, as (residual, scale)."""
    intrinsic = covariant_derivative_at(W.product, X.lift, Y.lift, p)
    closed = connection_closed_form(W, X, Y, p)
    scale = max(float(np.max(np.abs(intrinsic), initial=0.0)), float(np.max(np.abs(closed), initial=0.0)))
    return float(np.max(np.abs(intrinsic - closed), initial=0.0)), scale

def lie_matrix_residual(W, zeta, p):
    intrinsic = lie_metric_at(W.product, zeta.lift, p)
    form = lie_closed_form_matrix(W, zeta, p)
    return float(np.max(np.abs(intrinsic.values - form.values))), max(intrinsic.scale, intrinsic.max_abs(), form.scale())

def lie2_matrix_residual(W, zeta, p, variant='appendix'):
    intrinsic = lie2_metric_at(W.product, zeta.lift, p)
    form = lie2_closed_form_matrix(W, zeta, p, variant)
    return float(np.max(np.abs(intrinsic.values - form.values))), max(intrinsic.scale, intrinsic.max_abs(), form.scale())

def residual_check(name, W, spec, fn, tol=DEFAULT_TOLERANCE):
    """
    Sample the product of `W` and reduce `fn(p)` over the points. `fn`
    returns a Residual or a (residual, scale) pair.
    """
    def reduce(p):
        r = fn(p)
        if isinstance(r, Residual):
            return r.residual, r.scale
        return r
    return sampled_check(name, sample_points(W.product, spec), reduce, tol, spec.seed)
