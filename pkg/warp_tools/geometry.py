"""
Pointwise pseudo-Riemannian geometry on a single chart.

Curvature convention::

    R(X, Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z

`riemann_at` returns the covariant array R[a, b, c, d] = g(R(d_c, d_d) d_b, d_a),
so that R[a, b, a, b] = g(R(d_a, d_b) d_b, d_a) is the sectional-curvature
numerator and Ric[b, d] = g^{ac} R[c, b, a, d]. Contracting the array in the
order (zeta, X, zeta, X) gives the curvature term of the 2-Killing
identity R(zeta, X, zeta, X) = g(D_X zeta, D_X zeta) + g(D_X D_zeta zeta, X).
"""

import functools
import logging
import operator
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import SingularMetricError, DegeneratePlaneError, UnknownVariableError
from .scalar_expr import Chart, Point, Expr, Const, parse, eval, eval_jet2, ZERO, ONE

logger = logging.getLogger(__name__)

SINGULAR_THRESHOLD = 1e-12
DEGENERATE_THRESHOLD = 1e-12

def _check_variables(exprs, chart):
    allowed = chart.index
    for e in exprs:
        for name in e.free_variables():
            if name not in allowed:
                raise UnknownVariableError(name, chart.coords)

class Manifold:
    """
    A chart with a metric matrix of expressions and domain predicates, each
    of which must be positive at every sampled point.

    Entries (i, j) and (j, i) of the metric always hold the same tree.
    """

    def __init__(self, chart, metric, domain=None, name=''):
        n = chart.dim
        rows = [list(row) for row in metric]
        if len(rows) != n or any(len(row) != n for row in rows):
            raise ValueError('metric of {} must be {}x{}'.format(name or chart.coords, n, n))

        for i in range(n):
            for j in range(i + 1, n):
                upper, lower = rows[i][j], rows[j][i]
                if upper is not lower and upper != lower:
                    raise ValueError('metric entries ({0},{1}) and ({1},{0}) differ'.format(i, j))
                rows[j][i] = upper

        if domain is None:
            domain = ()
        elif isinstance(domain, Expr):
            domain = (domain,)
        domain = tuple(domain)
        _check_variables([e for row in rows for e in row], chart)
        _check_variables(domain, chart)

        self.chart = chart
        self.metric = tuple(tuple(row) for row in rows)
        self.domain = domain
        self.name = name

    def __repr__(self):
        return 'Manifold({!r}, coords={})'.format(self.name, self.chart.coords)

    @classmethod
    def from_strings(cls, coords, metric=None, diag=None, domain=None, name=''):
        chart = Chart(tuple(coords), name)
        if (metric is None) == (diag is None):
            raise ValueError('give exactly one of metric or diag')
        if diag is not None:
            n = chart.dim
            if len(diag) != n:
                raise ValueError('diag must have {} entries'.format(n))
            entries = [parse(s, chart.coords) for s in diag]
            metric = [[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)]
        else:
            parsed = {}
            def entry(i, j):
                key = (min(i, j), max(i, j))
                e = parse(metric[i][j], chart.coords)
                if key in parsed:
                    if parsed[key] != e:
                        raise ValueError('metric entries {} and {} differ'.format((i, j), (j, i)))
                    return parsed[key]
                parsed[key] = e
                return e
            metric = [[entry(i, j) for j in range(len(metric[i]))] for i in range(len(metric))]
        return cls(chart, metric, None if domain is None else parse(domain, chart.coords), name)

    @classmethod
    def euclidean(cls, coords, name=''):
        chart = Chart(tuple(coords), name)
        n = chart.dim
        return cls(chart, [[ONE if i == j else ZERO for j in range(n)] for i in range(n)], name=name)

    @property
    def dim(self):
        return self.chart.dim

    def point(self, *coords):
        return Point(self.chart, coords)

    def in_domain(self, p):
        return all(eval(d, p) > 0.0 for d in self.domain)

    def at(self, p):
        return _geometry(self, p)

    def signature_at(self, p):
        w = np.linalg.eigvalsh(self.at(p).g)
        return int(np.sum(w < 0)), int(np.sum(w > 0))

class FieldJet(NamedTuple):
    value: np.ndarray
    d: np.ndarray
    dd: np.ndarray = None

class VectorFieldSpec:
    """Component expressions of a vector field in the coordinate basis of `chart`."""

    def __init__(self, chart, components, name=''):
        components = tuple(components)
        if len(components) != chart.dim:
            raise ValueError('vector field {} has {} components, chart {} needs {}'.format(name, len(components), chart.coords, chart.dim))
        _check_variables(components, chart)
        self.chart = chart
        self.components = components
        self.name = name

    def __repr__(self):
        return 'VectorFieldSpec({})'.format(', '.join(str(c) for c in self.components))

    @classmethod
    def from_strings(cls, chart, components, name=''):
        return cls(chart, [parse(s, chart.coords) for s in components], name)

    @classmethod
    def coordinate(cls, chart, i):
        return cls(chart, [ONE if k == i else ZERO for k in range(chart.dim)], 'd' + chart.coords[i])

    @classmethod
    def constant(cls, chart, values):
        return cls(chart, [Const(float(v)) for v in values])

    @classmethod
    def zero(cls, chart):
        return cls(chart, [ZERO] * chart.dim, '0')

    def values_at(self, p):
        if p.chart != self.chart:
            raise ValueError('point chart {} does not match field chart {}'.format(p.chart.coords, self.chart.coords))
        return np.array([eval(c, p) for c in self.components])

    def jets_at(self, p):
        return _field_jets(self, p)

@dataclass(frozen=True, eq=False)
class SymTensorAt:
    values: np.ndarray
    scale: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, 'values', 0.5 * (v + v.T))

    def contract(self, u, v):
        return float(u @ self.values @ v)

    def max_abs(self):
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

class Lie2Terms(NamedTuple):
    """Groups of the connection form of L_zeta L_zeta g evaluated on (X, Y)."""
    second_derivatives: float
    bracket_terms: float
    first_derivatives: float
    scale: float

    @property
    def total(self):
        return (self.second_derivatives - self.bracket_terms) + self.first_derivatives

def _frozen(a):
    a.flags.writeable = False
    return a

class PointGeometry:
    """Metric jets at a point and the quantities derived from them, computed lazily."""

    def __init__(self, manifold, point):
        if point.chart != manifold.chart:
            raise ValueError('point chart {} does not match manifold chart {}'.format(point.chart.coords, manifold.chart.coords))

        n = manifold.dim
        g = np.empty((n, n))
        dg = np.empty((n, n, n))
        ddg = np.empty((n, n, n, n))
        jets = {}
        for i in range(n):
            for j in range(i, n):
                e = manifold.metric[i][j]
                jet = jets.get(id(e))
                if jet is None:
                    jet = jets[id(e)] = eval_jet2(e, point)
                g[i, j] = g[j, i] = jet.value
                dg[:, i, j] = dg[:, j, i] = jet.grad
                ddg[:, :, i, j] = ddg[:, :, j, i] = jet.hess

        self.manifold = manifold
        self.point = point
        self.g = _frozen(g)
        self.dg = _frozen(dg)
        self.ddg = _frozen(ddg)

    @cached_property
    def inverse(self):
        g = self.g
        n = g.shape[0]
        det = np.linalg.det(g) if n else 1.0
        bound = SINGULAR_THRESHOLD * float(np.max(np.abs(g))) ** n if n else 0.0
        if not abs(det) >= bound or det == 0.0:
            raise SingularMetricError('metric of {} is singular at {} (det={!r})'.format(self.manifold.name or self.manifold.chart.coords, self.point, det))
        return _frozen(np.linalg.inv(g))

    @cached_property
    def _first_kind(self):
        # [i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
        dg = self.dg
        return dg + np.einsum('jil->ijl', dg) - np.einsum('lij->ijl', dg)

    @cached_property
    def christoffel(self):
        return _frozen(0.5 * np.einsum('kl,ijl->kij', self.inverse, self._first_kind))

    @cached_property
    def christoffel_derivative(self):
        """[a, k, i, j] = d_a Gamma^k_ij"""
        ginv = self.inverse
        ddg = self.ddg
        dginv = -np.einsum('km,amn,nl->akl', ginv, self.dg, ginv)
        dfirst = ddg + np.einsum('ajil->aijl', ddg) - np.einsum('alij->aijl', ddg)
        return _frozen(0.5 * (np.einsum('akl,ijl->akij', dginv, self._first_kind) + np.einsum('kl,aijl->akij', ginv, dfirst)))

    @cached_property
    def riemann(self):
        gamma = self.christoffel
        dgamma = self.christoffel_derivative
        up = (np.einsum('cadb->abcd', dgamma) - np.einsum('dacb->abcd', dgamma)
            + np.einsum('ace,edb->abcd', gamma, gamma) - np.einsum('ade,ecb->abcd', gamma, gamma))
        return _frozen(np.einsum('ae,ebcd->abcd', self.g, up))

    @cached_property
    def ricci(self):
        ric = np.einsum('ik,ijkl->jl', self.inverse, self.riemann)
        return _frozen(0.5 * (ric + ric.T))

    def inner(self, u, v):
        return float(u @ self.g @ v)

    def connect(self, x, y):
        """Gamma(x, y)^k = Gamma^k_ij x^i y^j"""
        return np.einsum('kij,i,j->k', self.christoffel, x, y)

    def along(self, v, w):
        """D_v W at the point for a field jet W."""
        return w.d @ v + self.connect(v, w.value)

    def covariant_jet(self, x, y):
        """D_X Y as a field jet with first derivatives, from jets of X and Y."""
        gamma = self.christoffel
        value = y.d @ x.value + self.connect(x.value, y.value)
        d = (np.einsum('ia,ki->ka', x.d, y.d)
            + np.einsum('i,kia->ka', x.value, y.dd)
            + np.einsum('akij,i,j->ka', self.christoffel_derivative, x.value, y.value)
            + np.einsum('kij,ia,j->ka', gamma, x.d, y.value)
            + np.einsum('kij,i,ja->ka', gamma, x.value, y.d))
        return FieldJet(value, d)

@functools.lru_cache(maxsize=256)
def _geometry(manifold, point):
    return PointGeometry(manifold, point)

@functools.lru_cache(maxsize=1024)
def _field_jets(field, point):
    if point.chart != field.chart:
        raise ValueError('point chart {} does not match field chart {}'.format(point.chart.coords, field.chart.coords))
    jets = [eval_jet2(c, point) for c in field.components]
    n = point.chart.dim
    if not jets:
        return FieldJet(np.zeros(0), np.zeros((0, n)), np.zeros((0, n, n)))
    value = _frozen(np.array([j.value for j in jets]))
    d = _frozen(np.array([j.grad for j in jets]))
    dd = _frozen(np.array([j.hess for j in jets]))
    return FieldJet(value, d, dd)

def metric_at(M, p):
    """Return (g_ij, g^ij) at `p`."""
    geo = M.at(p)
    return geo.g, geo.inverse

def christoffel_at(M, p):
    """Gamma[k, i, j] = Gamma^k_ij at `p`."""
    return M.at(p).christoffel

def covariant_derivative_at(M, X, Y, p):
    geo = M.at(p)
    x = X.jets_at(p).value
    return geo.along(x, Y.jets_at(p))

def lie_bracket_at(X, Y, p):
    x = X.jets_at(p)
    y = Y.jets_at(p)
    return y.d @ x.value - x.d @ y.value

def covariant_jacobian_at(M, zeta, p):
    """Dz[k, i] = (D_{d_i} zeta)^k"""
    geo = M.at(p)
    z = zeta.jets_at(p)
    return z.d + np.einsum('kij,j->ki', geo.christoffel, z.value)

def _lie_sym2(z, dz, t, dt):
    # (L_z T)_ij = z^k d_k T_ij + T_kj d_i z^k + T_ik d_j z^k, for symmetric T
    transport = np.einsum('k,kij->ij', z, dt)
    stretch = dz.T @ t
    values = transport + (stretch + stretch.T)
    scale = max(float(np.max(np.abs(transport), initial=0.0)), float(np.max(np.abs(stretch), initial=0.0)))
    return values, stretch, scale

def lie_metric_at(M, zeta, p):
    """(L_zeta g)_ij at `p` by the coordinate formula; no inverse metric needed."""
    geo = M.at(p)
    z = zeta.jets_at(p)
    values, _, scale = _lie_sym2(z.value, z.d, geo.g, geo.dg)
    return SymTensorAt(values, scale)

def lie_metric_via_connection_at(M, zeta, p):
    """g(D_i zeta, d_j) + g(d_i, D_j zeta), the connection form of L_zeta g."""
    geo = M.at(p)
    a = covariant_jacobian_at(M, zeta, p).T @ geo.g
    return SymTensorAt(a + a.T, float(np.max(np.abs(a), initial=0.0)))

def lie2_metric_at(M, zeta, p):
    """
    (L_zeta L_zeta g)_ij at `p`: the Lie derivative of the (0,2) field
    h = L_zeta g, whose first derivatives come from the second jets of the
    metric and of zeta.
    """
    geo = M.at(p)
    z = zeta.jets_at(p)
    g, dg, ddg = geo.g, geo.dg, geo.ddg

    h, _, inner_scale = _lie_sym2(z.value, z.d, g, dg)
    dtransport = np.einsum('kl,kij->lij', z.d, dg) + np.einsum('k,lkij->lij', z.value, ddg)
    dstretch = np.einsum('kil,kj->lij', z.dd, g) + np.einsum('ki,lkj->lij', z.d, dg)
    dh = dtransport + (dstretch + np.einsum('lji->lij', dstretch))

    values, _, outer_scale = _lie_sym2(z.value, z.d, h, dh)
    return SymTensorAt(values, max(inner_scale, outer_scale))

def lie2_connection_terms(M, zeta, X, Y, p):
    geo = M.at(p)
    g = geo.g
    z = zeta.jets_at(p)
    xj = X.jets_at(p)
    yj = Y.jets_at(p)
    x, y = xj.value, yj.value

    w_x = geo.covariant_jet(xj, z)
    w_y = geo.covariant_jet(yj, z)
    dd_x = geo.along(z.value, w_x)
    dd_y = geo.along(z.value, w_y)
    br_x = geo.along(xj.d @ z.value - z.d @ x, z)
    br_y = geo.along(yj.d @ z.value - z.d @ y, z)

    second = dd_x @ g @ y + dd_y @ g @ x
    bracket = br_x @ g @ y + br_y @ g @ x
    first = w_x.value @ g @ w_y.value + w_y.value @ g @ w_x.value

    scale = max(abs(dd_x @ g @ y), abs(dd_y @ g @ x), abs(br_x @ g @ y), abs(br_y @ g @ x), abs(first))
    return Lie2Terms(float(second), float(bracket), float(first), float(scale))

def lie2_via_connection_at(M, zeta, X, Y, p):
    """
    g(D_z D_X z - D_[z,X] z, Y) + g(X, D_z D_Y z - D_[z,Y] z) + 2 g(D_X z, D_Y z)

    The sum is formed symmetrically, so exchanging X and Y gives the same bits.
    """
    return lie2_connection_terms(M, zeta, X, Y, p).total

def riemann_at(M, p):
    return M.at(p).riemann

def ricci_at(M, p):
    return M.at(p).ricci

def sectional_at(M, p, u, v):
    geo = M.at(p)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    uu = geo.inner(u, u)
    vv = geo.inner(v, v)
    uv = geo.inner(u, v)
    area = uu * vv - uv * uv
    if not abs(area) > DEGENERATE_THRESHOLD * max(abs(uu * vv), uv * uv):
        raise DegeneratePlaneError('plane spanned by {} and {} is degenerate at {}'.format(u.tolist(), v.tolist(), p))
    return float(np.einsum('abcd,a,b,c,d->', geo.riemann, u, v, u, v)) / area

def gradient_at(M, h, p):
    return M.at(p).inverse @ eval_jet2(h, p).grad

def inner_expr(M, X, Y):
    """The scalar field g(X, Y) as an expression tree."""
    n = M.dim
    terms = [M.metric[i][j] * X.components[i] * Y.components[j] for i in range(n) for j in range(n)]
    return functools.reduce(operator.add, terms, ZERO)

def torsion_at(M, X, Y, p):
    """D_X Y - D_Y X - [X, Y] at `p`, with the magnitude of the largest term."""
    a = covariant_derivative_at(M, X, Y, p)
    b = covariant_derivative_at(M, Y, X, p)
    c = lie_bracket_at(X, Y, p)
    scale = max(float(np.max(np.abs(t), initial=0.0)) for t in (a, b, c))
    return a - b - c, scale

def metric_compatibility_at(M, X, Y, Z, p):
    """Z(g(X, Y)) - g(D_Z X, Y) - g(X, D_Z Y) at `p`, with its scale."""
    geo = M.at(p)
    z = Z.values_at(p)
    lhs = eval_jet2(inner_expr(M, X, Y), p).along(z)
    a = geo.inner(covariant_derivative_at(M, Z, X, p), Y.values_at(p))
    b = geo.inner(X.values_at(p), covariant_derivative_at(M, Z, Y, p))
    return lhs - a - b, max(abs(lhs), abs(a), abs(b))
