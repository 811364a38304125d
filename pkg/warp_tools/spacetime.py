"""
Standard static spacetimes I_f x M with metric -f^2 dt^2 + g.

A static spacetime is a warped product whose base is the spatial manifold
M and whose fiber is the time interval (I, dt^2) with fiber sign -1. The
product chart therefore lists the spatial coordinates first and t last;
`StaticSpacetime.display_order` puts t first for reports.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import SplitFieldError, UnknownVariableError
from .geometry import Manifold, VectorFieldSpec, lie2_metric_at
from .killing import (DEFAULT_TOLERANCE, combined, gated, killing_defect, ode_2killing_residual,
    sample_points, sampled_check, two_killing_defect, warping_invariant)
from .scalar_expr import Chart, Point, parse, eval_jet2, ONE
from .warped import WarpedProduct, SplitField, build_product, warping_along

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class TimeInterval:
    low: float
    high: float
    coord: str = 't'

    def __post_init__(self):
        if not self.low < self.high:
            raise ValueError('time interval must have low < high, got ({}, {})'.format(self.low, self.high))

    @cached_property
    def manifold(self):
        return Manifold(Chart((self.coord,), 'I'), [[ONE]], name='I')

class StaticSpacetime:
    def __init__(self, spatial, warping, interval, name=''):
        if interval.coord in spatial.chart.coords:
            raise ValueError('time coordinate {!r} is also a spatial coordinate'.format(interval.coord))
        self.spatial = spatial
        self.interval = interval
        self.warped = WarpedProduct(spatial, interval.manifold, warping, fiber_sign=-1, name=name or spatial.name)
        self.name = name

    def __repr__(self):
        return 'StaticSpacetime({!r}, spatial={}, f={}, I=({}, {}))'.format(
            self.name, self.spatial.chart.coords, self.warped.warping, self.interval.low, self.interval.high)

    @property
    def warping(self):
        return self.warped.warping

    @property
    def product(self):
        return self.warped.product

    @property
    def time(self):
        return self.interval.manifold

    @property
    def time_index(self):
        return self.spatial.dim

    @property
    def display_order(self):
        return (self.interval.coord,) + self.spatial.chart.coords

    def sample_spec(self, spec):
        """`spec` with the time range set to the interval unless it already has one."""
        if self.interval.coord in spec.ranges:
            return spec
        return spec.with_box({ self.interval.coord: (self.interval.low, self.interval.high) })

class StaticField:
    """u(t) d_t + zeta on a static spacetime."""

    def __init__(self, spacetime, u, zeta, name=''):
        if isinstance(u, str):
            try:
                u = parse(u, spacetime.time.chart.coords)
            except UnknownVariableError as e:
                raise SplitFieldError('u may depend only on {!r}, not on {!r}'.format(spacetime.interval.coord, e.name)) from e
        self.spacetime = spacetime
        self.u = u
        self.zeta = zeta
        self.name = name
        self.split = SplitField(spacetime.warped, zeta, VectorFieldSpec(spacetime.time.chart, [u], 'u d' + spacetime.interval.coord), name)

    @classmethod
    def from_strings(cls, spacetime, u, zeta, name=''):
        try:
            zeta = VectorFieldSpec.from_strings(spacetime.spatial.chart, zeta, 'zeta')
        except UnknownVariableError as e:
            raise SplitFieldError('spatial part of {} depends on {!r}'.format(name or 'static field', e.name)) from e
        return cls(spacetime, u, zeta, name)

    @property
    def lift(self):
        return self.split.lift

    @property
    def time_part(self):
        return self.split.fiber

def build_static(M, f, I, spec=None, name=''):
    """
    The static spacetime I_f x M. With a sample spec, f is checked to be
    positive at the sampled points of M first.
    """
    S = StaticSpacetime(M, f, I, name)
    points = sample_points(M, spec.restrict(M.chart)) if spec is not None else ()
    build_product(S.warped, points)
    return S

def _spatial_spec(S, spec):
    return spec.restrict(S.spatial.chart)

def _time_spec(S, spec):
    return S.sample_spec(spec).restrict(S.time.chart)

def _u_jet(S, F, p):
    return eval_jet2(F.u, Point(S.time.chart, (p[S.interval.coord],)))

def time_constant(S, F, spec, tol=DEFAULT_TOLERANCE):
    def fn(p):
        u = eval_jet2(F.u, p)
        return abs(float(u.grad[0])), abs(u.value)
    return sampled_check('u constant', sample_points(S.time, _time_spec(S, spec)), fn, tol, spec.seed)

def warping_flux_constant(S, F, spec, tol=DEFAULT_TOLERANCE):
    """f zeta(f) is constant on M."""
    def fn(p1):
        w = warping_along(S.warped, F.zeta, p1)
        return float(np.max(np.abs(w.grad_f_zeta_f), initial=0.0)), abs(w.f * w.zeta_f)
    return sampled_check('f zeta(f) constant', sample_points(S.spatial, _spatial_spec(S, spec)), fn, tol, spec.seed)

def check_static_2killing(S, F, spec, condition, tol=DEFAULT_TOLERANCE):
    """
    Sufficient conditions for u d_t + zeta to be 2-Killing on a static
    spacetime, with zeta Killing on M:

    1. u constant and f zeta(f) constant;
    2. u = (r t + s)^(1/3), checked as 2 u u'' + 4 u'^2 = 0, and zeta(f) = 0.
    """
    spec = S.sample_spec(spec)
    hypotheses = [killing_defect(S.spatial, F.zeta, _spatial_spec(S, spec), tol)]
    if condition == 1:
        hypotheses += [time_constant(S, F, spec, tol), warping_flux_constant(S, F, spec, tol)]
    elif condition == 2:
        hypotheses += [ode_2killing_residual(F.u, _time_spec(S, spec), S.interval.coord, tol), warping_invariant(S.warped, F.zeta, spec, tol)]
    else:
        raise ValueError('static 2-killing condition must be 1 or 2, got {!r}'.format(condition))
    return gated('static-2killing-{}'.format(condition), hypotheses, two_killing_defect(S.product, F.lift, spec, tol))

def _time_component(S, F, p):
    k = S.time_index
    return lie2_metric_at(S.product, F.lift, p).values[k, k]

def e5_residual(S, F, spec, tol=DEFAULT_TOLERANCE):
    """
    The (d_t, d_t) component of L L g on the spacetime against

        eps [f^2 (2 u u'' + 4 u'^2) + 8 u' f zeta(f) + 2 f zeta(zeta(f)) + 2 zeta(f)^2]

    given zeta Killing on M. The details record how far zeta(f zeta(f))
    is from f zeta(zeta(f)) + zeta(f)^2.
    """
    spec = S.sample_spec(spec)
    eps = S.warped.fiber_sign
    gap = [0.0]

    def fn(p):
        p1, _ = S.warped.split_point(p)
        w = warping_along(S.warped, F.zeta, p1)
        u = _u_jet(S, F, p)
        du, ddu = float(u.grad[0]), float(u.hess[0, 0])
        terms = [
            w.f ** 2 * (2.0 * u.value * ddu + 4.0 * du ** 2),
            8.0 * du * w.f * w.zeta_f,
            2.0 * w.f * w.zeta_zeta_f,
            2.0 * w.zeta_f ** 2,
            ]
        lhs = _time_component(S, F, p)
        gap[0] = max(gap[0], abs(w.zeta_f_zeta_f - w.f * w.zeta_zeta_f - w.zeta_f ** 2))
        return abs(lhs - eps * sum(terms)), max([abs(lhs)] + [abs(t) for t in terms])

    result = sampled_check('e5({})'.format(F.name or 'zeta'), sample_points(S.product, spec), fn, tol, spec.seed)
    result.details['product_rule_gap'] = gap[0]
    gate = killing_defect(S.spatial, F.zeta, _spatial_spec(S, spec), tol)
    return gated(result.name, [gate], result)

def e6_residual(S, F, spec, tol=DEFAULT_TOLERANCE):
    """
    The (d_t, d_t) component of L L g against 2 eps [4 f zeta(f) u' + zeta(f zeta(f))]
    when zeta is Killing on M and 2 u u'' + 4 u'^2 = 0.
    """
    spec = S.sample_spec(spec)
    eps = S.warped.fiber_sign

    def fn(p):
        p1, _ = S.warped.split_point(p)
        w = warping_along(S.warped, F.zeta, p1)
        du = float(_u_jet(S, F, p).grad[0])
        a = 4.0 * w.f * w.zeta_f * du
        b = w.zeta_f_zeta_f
        lhs = _time_component(S, F, p)
        return abs(lhs - 2.0 * eps * (a + b)), max(abs(lhs), 2.0 * abs(a), 2.0 * abs(b))

    result = sampled_check('e6({})'.format(F.name or 'zeta'), sample_points(S.product, spec), fn, tol, spec.seed)
    hypotheses = [
        killing_defect(S.spatial, F.zeta, _spatial_spec(S, spec), tol),
        ode_2killing_residual(F.u, _time_spec(S, spec), S.interval.coord, tol),
        ]
    return gated(result.name, hypotheses, result)

def converse_decompose(S, F, spec, tol=DEFAULT_TOLERANCE):
    """
    If u d_t + zeta is 2-Killing on the spacetime then zeta is 2-Killing on
    M, and u d_t is 2-Killing on (I, dt^2) when zeta(f) = 0.
    """
    spec = S.sample_spec(spec)
    gate = two_killing_defect(S.product, F.lift, spec, tol)
    parts = [two_killing_defect(S.spatial, F.zeta, _spatial_spec(S, spec), tol)]
    invariant = warping_invariant(S.warped, F.zeta, spec, tol)
    if invariant.passed:
        parts.append(two_killing_defect(S.time, F.time_part, _time_spec(S, spec), tol))
    result = combined('converse', parts, tol)
    result.details['time_asserted'] = invariant.passed
    return gated('converse', [gate], result)

class AppendixB(NamedTuple):
    """L L g of u(t) d_t + v(x) d_x on f(x)^2 dt^2 + dx^2, in (t, x) order."""
    components: np.ndarray
    intrinsic: np.ndarray
    residual: float
    scale: float

def static_line(f, t='t', x='x'):
    """The warped product R_x x_f R_t with metric f^2 dt^2 + dx^2."""
    base = Manifold.euclidean((x,), 'line')
    fiber = Manifold.euclidean((t,), 'time')
    return WarpedProduct(base, fiber, f if not isinstance(f, str) else parse(f, (x,)), 1, 'static-line')

def _appendix_field(W, u, v, t, x):
    if isinstance(u, str):
        u = parse(u, (t,))
    if isinstance(v, str):
        v = parse(v, (x,))
    return SplitField(W, VectorFieldSpec(W.base.chart, [v], 'v d' + x), VectorFieldSpec(W.fiber.chart, [u], 'u d' + t))

def appendix_b_components(f, u, v, p, t='t', x='x'):
    """
    Explicit components of L L g for u(t) d_t + v(x) d_x on f(x)^2 dt^2 + dx^2
    at the (t, x) point `p`:

        (d_t, d_t)  2 f^2 (u u'' + 2 u'^2) + 2 (v^2 f f'' + v v' f f') + 8 u' v f f' + 2 v^2 f'^2
        (d_x, d_x)  2 (v v'' + 2 v'^2)

    and zero off the diagonal, together with the intrinsic values.
    """
    W = static_line(f, t, x)
    zeta = _appendix_field(W, u, v, t, x)
    px = Point(W.base.chart, (p[x],))
    pt = Point(W.fiber.chart, (p[t],))

    fj = W.warping_jet(px)
    uj = eval_jet2(zeta.fiber.components[0], pt)
    vj = eval_jet2(zeta.base.components[0], px)
    fv, df, ddf = fj.value, float(fj.grad[0]), float(fj.hess[0, 0])
    uv, du, ddu = uj.value, float(uj.grad[0]), float(uj.hess[0, 0])
    vv, dv, ddv = vj.value, float(vj.grad[0]), float(vj.hess[0, 0])

    tt_terms = [
        2.0 * fv ** 2 * (uv * ddu + 2.0 * du ** 2),
        2.0 * (vv ** 2 * fv * ddf + vv * dv * fv * df),
        8.0 * du * vv * fv * df,
        2.0 * vv ** 2 * df ** 2,
        ]
    xx_terms = [2.0 * vv * ddv, 4.0 * dv ** 2]
    components = np.array([[sum(tt_terms), 0.0], [0.0, sum(xx_terms)]])

    # product chart is (x, t)
    intrinsic = lie2_metric_at(W.product, zeta.lift, W.join_point(px, pt)).values[::-1, ::-1]
    scale = max([abs(a) for a in tt_terms + xx_terms] + [float(np.max(np.abs(intrinsic)))])
    return AppendixB(components, intrinsic, float(np.max(np.abs(components - intrinsic))), scale)

def appendix_b_check(f, u, v, spec, tol=DEFAULT_TOLERANCE, t='t', x='x'):
    chart = Chart((t, x), 'static-line')

    def fn(p):
        r = appendix_b_components(f, u, v, p, t, x)
        return r.residual, r.scale
    return sampled_check('appendix-b', spec.points(chart), fn, tol, spec.seed)
