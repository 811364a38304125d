"""
Sampled defect predicates and implication checks.

Every check evaluates a residual at seeded sample points and reduces it to
a `CheckResult`. Checks that state an implication evaluate their
hypotheses first; when one of them fails at sampled resolution the result
is `hypotheses-not-met`, never `fail`.
"""

import dataclasses
import enum
import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePlaneError, SamplingDomainError
from .geometry import (VectorFieldSpec, covariant_jacobian_at, lie_metric_at, lie_metric_via_connection_at, lie2_metric_at,
    lie2_connection_terms, metric_compatibility_at, sectional_at, torsion_at)
from .scalar_expr import Chart, Point, parse, eval_jet2

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class Tolerance:
    atol: float = 1e-10
    rtol: float = 1e-8

    def bound(self, scale):
        return self.atol + self.rtol * scale

    def allows(self, residual, scale):
        return residual <= self.bound(scale)

DEFAULT_TOLERANCE = Tolerance()

@dataclass(frozen=True)
class SampleSpec:
    """
    `count` points drawn uniformly from `box`, a sequence of
    (coordinate, low, high) triples. Point i comes from its own generator
    seeded with (seed, i), so a point does not depend on how many others
    were drawn before it.
    """

    count: int = 100
    seed: int = 0
    box: tuple = ()

    def __post_init__(self):
        if self.count < 1:
            raise ValueError('sample count must be at least 1, got {}'.format(self.count))
        box = self.box.items() if isinstance(self.box, Mapping) else self.box
        triples = []
        for entry in box:
            if len(entry) == 2:
                coord, (low, high) = entry
            else:
                coord, low, high = entry
            low, high = float(low), float(high)
            if not low <= high:
                raise ValueError('empty sampling range for {}: [{}, {}]'.format(coord, low, high))
            triples.append((str(coord), low, high))
        object.__setattr__(self, 'box', tuple(triples))

    @property
    def ranges(self):
        return { c: (low, high) for c, low, high in self.box }

    def with_box(self, overrides):
        ranges = self.ranges
        ranges.update(overrides)
        return dataclasses.replace(self, box=ranges)

    def restrict(self, chart):
        ranges = self.ranges
        return dataclasses.replace(self, box=[(c, ranges[c]) for c in chart.coords if c in ranges])

    def points(self, chart):
        ranges = self.ranges
        missing = [c for c in chart.coords if c not in ranges]
        if missing:
            raise SamplingDomainError('no sampling range for {}'.format(', '.join(missing)))
        low = np.array([ranges[c][0] for c in chart.coords])
        high = np.array([ranges[c][1] for c in chart.coords])
        out = []
        for i in range(self.count):
            rng = np.random.default_rng([self.seed, i])
            out.append(Point(chart, low + (high - low) * rng.random(chart.dim)))
        return out

def sample_points(M, spec):
    points = spec.points(M.chart)
    for p in points:
        if not M.in_domain(p):
            raise SamplingDomainError('sample {} lies outside the domain of {}'.format(p, M.name or M.chart.coords))
    logger.debug('drew %d samples on %s with seed %d', len(points), M.name or M.chart.coords, spec.seed)
    return points

class CheckStatus(str, enum.Enum):
    PASS = 'pass'
    FAIL = 'fail'
    HYPOTHESES_NOT_MET = 'hypotheses-not-met'
    INFORMATIONAL = 'informational'
    ERROR = 'error'

@dataclass(frozen=True)
class CheckResult:
    name: str
    status: CheckStatus
    max_residual: float
    scale: float
    tol: Tolerance = DEFAULT_TOLERANCE
    witness: Point = None
    samples: int = 0
    seed: int = 0
    message: str = ''
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status is CheckStatus.PASS

    @property
    def ok(self):
        """Whether the result counts towards a passing run."""
        return self.status in (CheckStatus.PASS, CheckStatus.HYPOTHESES_NOT_MET, CheckStatus.INFORMATIONAL)

    def with_status(self, status, message=''):
        return dataclasses.replace(self, status=status, message=message)

    def to_dict(self, order=None):
        witness = None
        if self.witness is not None:
            items = dict(self.witness.items())
            # `order` may name coordinates of a larger chart than the witness lies on
            coords = [c for c in (order or ()) if c in items]
            coords += [c for c in self.witness.chart.coords if c not in coords]
            witness = { c: items[c] for c in coords }
        return {
            'name': self.name,
            'status': self.status.value,
            'max_residual': self.max_residual,
            'scale': self.scale,
            'atol': self.tol.atol,
            'rtol': self.tol.rtol,
            'samples': self.samples,
            'seed': self.seed,
            'witness': witness,
            'message': self.message,
            'details': self.details,
            }

class _Accumulator:
    def __init__(self):
        self.residual = 0.0
        self.scale = 0.0
        self.witness = None

    def add(self, p, residual, scale):
        residual = float(residual)
        if not np.isfinite(residual):
            residual = float('inf')
        if self.witness is None or residual > self.residual:
            self.residual = residual
            self.witness = p
        self.scale = max(self.scale, float(scale))

def sampled_check(name, points, fn, tol=DEFAULT_TOLERANCE, seed=0):
    """Reduce `fn(p) -> (residual, scale)` over `points` to a CheckResult."""
    acc = _Accumulator()
    for p in points:
        residual, scale = fn(p)
        acc.add(p, residual, scale)
    status = CheckStatus.PASS if tol.allows(acc.residual, acc.scale) else CheckStatus.FAIL
    logger.debug('%s: %s, max residual %.3g at %s (scale %.3g)', name, status.value, acc.residual, acc.witness, acc.scale)
    return CheckResult(name, status, acc.residual, acc.scale, tol, acc.witness, len(points), seed)

def gated(name, hypotheses, conclusion):
    """
    The implication hypotheses => conclusion. The conclusion's residual is
    reported either way.
    """
    failed = [h.name for h in hypotheses if not h.passed]
    details = dict(conclusion.details)
    details['hypotheses'] = { h.name: h.status.value for h in hypotheses }
    result = dataclasses.replace(conclusion, name=name, details=details)
    if failed:
        logger.debug('%s: failed hypotheses %s', name, ', '.join(failed))
        return result.with_status(CheckStatus.HYPOTHESES_NOT_MET, 'hypotheses not met: {}'.format(', '.join(failed)))
    return result

def combined(name, parts, tol=DEFAULT_TOLERANCE):
    """All of `parts` at once; the worst residual is reported."""
    worst = max(parts, key=lambda r: (not r.passed, r.max_residual))
    status = CheckStatus.PASS if all(r.passed for r in parts) else CheckStatus.FAIL
    return CheckResult(name, status, worst.max_residual, worst.scale, tol, worst.witness, sum(r.samples for r in parts), worst.seed,
        details={ 'parts': { r.name: r.status.value for r in parts } })

# Pointwise defects

def _zero(vf):
    def fn(p):
        return float(np.max(np.abs(vf.values_at(p)), initial=0.0)), 0.0
    return fn

def killing_defect(M, zeta, spec, tol=DEFAULT_TOLERANCE, method='coordinate'):
    if method == 'coordinate':
        lie = lie_metric_at
    elif method == 'connection':
        lie = lie_metric_via_connection_at
    else:
        raise ValueError('unknown method {!r}'.format(method))

    def fn(p):
        t = lie(M, zeta, p)
        return t.max_abs(), t.scale
    return sampled_check('killing({})'.format(zeta.name or 'zeta'), sample_points(M, spec), fn, tol, spec.seed)

def two_killing_defect(M, zeta, spec, tol=DEFAULT_TOLERANCE):
    def fn(p):
        t = lie2_metric_at(M, zeta, p)
        return t.max_abs(), t.scale
    return sampled_check('2-killing({})'.format(zeta.name or 'zeta'), sample_points(M, spec), fn, tol, spec.seed)

def parallel_defect(M, zeta, spec, tol=DEFAULT_TOLERANCE):
    def fn(p):
        dz = covariant_jacobian_at(M, zeta, p)
        z = zeta.jets_at(p)
        scale = max(float(np.max(np.abs(z.d), initial=0.0)), float(np.max(np.abs(dz - z.d), initial=0.0)))
        return float(np.linalg.norm(dz)), scale
    return sampled_check('parallel({})'.format(zeta.name or 'zeta'), sample_points(M, spec), fn, tol, spec.seed)

def _curvature_identity_at(M, zeta, p):
    """
    Per coordinate field X: R(zeta, X, zeta, X) - g(D_X zeta, D_X zeta) - g(D_X D_zeta zeta, X).
    Returns the worst residual and its scale.
    """
    geo = M.at(p)
    z = zeta.jets_at(p)
    dz = covariant_jacobian_at(M, zeta, p)
    accel = geo.covariant_jet(z, z)
    curv = np.einsum('aibi,a,b->i', geo.riemann, z.value, z.value)

    residual = scale = 0.0
    for i in range(M.dim):
        e = np.zeros(M.dim)
        e[i] = 1.0
        r = float(curv[i])
        a = geo.inner(dz[:, i], dz[:, i])
        b = geo.inner(geo.along(e, accel), e)
        residual = max(residual, abs(r - a - b))
        scale = max(scale, abs(r), abs(a), abs(b))
    return residual, scale

def curvature_identity_defect(M, zeta, spec, tol=DEFAULT_TOLERANCE):
    """
    The curvature identity satisfied by 2-Killing fields. When zeta is not
    2-Killing at sampled resolution the residual is still computed and the
    result is labelled informational.
    """
    result = sampled_check('curvature-identity({})'.format(zeta.name or 'zeta'), sample_points(M, spec),
        lambda p: _curvature_identity_at(M, zeta, p), tol, spec.seed)
    gate = two_killing_defect(M, zeta, spec, tol)
    if not gate.passed:
        return result.with_status(CheckStatus.INFORMATIONAL, '{} is not 2-Killing (defect {:.6g})'.format(zeta.name or 'zeta', gate.max_residual))
    return result

def torsion_defect(M, X, Y, spec, tol=DEFAULT_TOLERANCE):
    def fn(p):
        v, scale = torsion_at(M, X, Y, p)
        return float(np.max(np.abs(v), initial=0.0)), scale
    return sampled_check('torsion({}, {})'.format(X.name, Y.name), sample_points(M, spec), fn, tol, spec.seed)

def metric_compatibility_defect(M, X, Y, Z, spec, tol=DEFAULT_TOLERANCE):
    def fn(p):
        r, scale = metric_compatibility_at(M, X, Y, Z, p)
        return abs(r), scale
    return sampled_check('metric-compatibility({}, {}, {})'.format(X.name, Y.name, Z.name), sample_points(M, spec), fn, tol, spec.seed)

# Hypotheses on warped products

def _factor_spec(W, spec, which):
    return spec.restrict(W.base.chart if which == 'base' else W.fiber.chart)

def vanishes(M, zeta, spec, tol=DEFAULT_TOLERANCE, label=None):
    return sampled_check(label or '{}=0'.format(zeta.name or 'zeta'), sample_points(M, spec), _zero(zeta), tol, spec.seed)

def warping_constant(W, spec, tol=DEFAULT_TOLERANCE):
    def fn(p1):
        f = W.warping_jet(p1)
        return float(np.max(np.abs(f.grad), initial=0.0)), abs(f.value)
    return sampled_check('f constant', sample_points(W.base, _factor_spec(W, spec, 'base')), fn, tol, spec.seed)

def warping_invariant(W, zeta_base, spec, tol=DEFAULT_TOLERANCE):
    """zeta1(f) = 0 at the sampled base points."""
    def fn(p1):
        f = W.warping_jet(p1)
        z = zeta_base.values_at(p1)
        return abs(float(f.grad @ z)), float(np.max(np.abs(f.grad), initial=0.0) * np.max(np.abs(z), initial=0.0))
    return sampled_check('{}(f)=0'.format(zeta_base.name or 'zeta1'), sample_points(W.base, _factor_spec(W, spec, 'base')), fn, tol, spec.seed)

def ricci_nonpositive(M, zeta, spec, tol=DEFAULT_TOLERANCE, label=None):
    def fn(p):
        z = zeta.values_at(p)
        ric = M.at(p).ricci
        value = float(z @ ric @ z)
        return max(value, 0.0), float(np.max(np.abs(ric), initial=0.0)) * float(z @ z)
    return sampled_check(label or 'Ric({0},{0})<=0'.format(zeta.name or 'zeta'), sample_points(M, spec), fn, tol, spec.seed)

def check_parallel_theorem(W, zeta, spec, variant, tol=DEFAULT_TOLERANCE):
    """
    Parallelism of a 2-Killing field with nonpositive Ricci curvature on a
    warped product.

    1. zeta = zeta1 + zeta2, each zeta_i 2-Killing with Ric_i(zeta_i, zeta_i) <= 0, f constant;
    2. zeta = zeta1, 2-Killing with Ric_1(zeta1, zeta1) <= 0 and zeta1(f) = 0;
    3. zeta = zeta2, 2-Killing with Ric_2(zeta2, zeta2) <= 0 and f constant.

    The conclusion is that the lift of zeta is parallel on the product.
    """
    base_spec = _factor_spec(W, spec, 'base')
    fiber_spec = _factor_spec(W, spec, 'fiber')
    base_hyps = lambda: [
        two_killing_defect(W.base, zeta.base, base_spec, tol),
        ricci_nonpositive(W.base, zeta.base, base_spec, tol, 'Ric1(zeta1,zeta1)<=0'),
        ]
    fiber_hyps = lambda: [
        two_killing_defect(W.fiber, zeta.fiber, fiber_spec, tol),
        ricci_nonpositive(W.fiber, zeta.fiber, fiber_spec, tol, 'Ric2(zeta2,zeta2)<=0'),
        ]

    if variant == 1:
        hypotheses = base_hyps() + fiber_hyps() + [warping_constant(W, spec, tol)]
    elif variant == 2:
        hypotheses = base_hyps() + [vanishes(W.fiber, zeta.fiber, fiber_spec, tol, 'zeta2=0'), warping_invariant(W, zeta.base, spec, tol)]
    elif variant == 3:
        hypotheses = fiber_hyps() + [vanishes(W.base, zeta.base, base_spec, tol, 'zeta1=0'), warping_constant(W, spec, tol)]
    else:
        raise ValueError('parallel theorem variant must be 1, 2 or 3, got {!r}'.format(variant))

    conclusion = parallel_defect(W.product, zeta.lift, spec, tol)
    return gated('parallel-theorem-{}'.format(variant), hypotheses, conclusion)

def sectional_sign_check(M, zeta, spec, tol=DEFAULT_TOLERANCE):
    """
    For a 2-Killing zeta, K(zeta, X) >= 0 wherever D_zeta zeta = 0.

    Only samples where D_zeta zeta vanishes and zeta does not are tested,
    against every coordinate direction spanning a nondegenerate plane. The
    identity R(zeta, X, zeta, X) = |D_X zeta|^2 + g(D_X D_zeta zeta, X) behind
    the sign claim is evaluated on all samples and kept in the details.
    """
    points = sample_points(M, spec)
    gate = two_killing_defect(M, zeta, spec, tol)

    qualifying = []
    for p in points:
        geo = M.at(p)
        z = zeta.jets_at(p)
        accel = geo.along(z.value, z)
        transport = z.d @ z.value
        scale = max(float(np.max(np.abs(transport), initial=0.0)), float(np.max(np.abs(accel - transport), initial=0.0)))
        if np.any(z.value != 0.0) and tol.allows(float(np.max(np.abs(accel), initial=0.0)), scale):
            qualifying.append(p)

    def sign(p):
        z = zeta.values_at(p)
        worst = (0.0, 0.0)
        for i in range(M.dim):
            e = np.zeros(M.dim)
            e[i] = 1.0
            try:
                k = sectional_at(M, p, z, e)
            except DegeneratePlaneError:
                continue
            worst = max(worst, (max(-k, 0.0), abs(k)))
        return worst

    identity = sampled_check('proof-identity', points, lambda p: _curvature_identity_at(M, zeta, p), tol, spec.seed)
    details = {
        'qualifying_samples': len(qualifying),
        'proof_identity': { 'status': identity.status.value, 'max_residual': identity.max_residual, 'scale': identity.scale },
        }
    name = 'sectional-sign({})'.format(zeta.name or 'zeta')

    if not qualifying:
        result = CheckResult(name, CheckStatus.PASS, 0.0, 0.0, tol, None, 0, spec.seed, details=details)
        hypotheses = [gate, CheckResult('D_zeta zeta=0 somewhere', CheckStatus.FAIL, 0.0, 0.0, tol, None, len(points), spec.seed)]
        return gated(name, hypotheses, result)

    result = sampled_check(name, qualifying, sign, tol, spec.seed)
    return gated(name, [gate], dataclasses.replace(result, details=details))

def ode_2killing_residual(u, spec, coord='t', tol=DEFAULT_TOLERANCE):
    """2 u u'' + 4 u'^2 for a function u of one variable, at samples of its interval."""
    chart = Chart((coord,), coord)
    if isinstance(u, str):
        u = parse(u, chart.coords)

    def fn(p):
        j = eval_jet2(u, p)
        a = 2.0 * j.value * j.hess[0, 0]
        b = 4.0 * j.grad[0] ** 2
        return abs(a + b), max(abs(a), abs(b))
    return sampled_check('ode-2killing({})'.format(u), spec.points(chart), fn, tol, spec.seed)

# Lift and restriction statements

def check_killing_lift(W, zeta, spec, condition, tol=DEFAULT_TOLERANCE):
    """
    Killing fields of the factors that lift to Killing fields of the product.

    1. zeta = (zeta1, 0) with zeta1 Killing on the base;
    2. zeta = (0, zeta2) with zeta2 Killing on the fiber;
    3. zeta1 and zeta2 Killing with zeta1(f) = 0.
    """
    base_spec = _factor_spec(W, spec, 'base')
    fiber_spec = _factor_spec(W, spec, 'fiber')
    if condition == 1:
        hypotheses = [killing_defect(W.base, zeta.base, base_spec, tol), vanishes(W.fiber, zeta.fiber, fiber_spec, tol, 'zeta2=0')]
    elif condition == 2:
        hypotheses = [killing_defect(W.fiber, zeta.fiber, fiber_spec, tol), vanishes(W.base, zeta.base, base_spec, tol, 'zeta1=0')]
    elif condition == 3:
        hypotheses = [killing_defect(W.base, zeta.base, base_spec, tol), killing_defect(W.fiber, zeta.fiber, fiber_spec, tol),
            warping_invariant(W, zeta.base, spec, tol)]
    else:
        raise ValueError('killing lift condition must be 1, 2 or 3, got {!r}'.format(condition))
    return gated('killing-lift-{}'.format(condition), hypotheses, killing_defect(W.product, zeta.lift, spec, tol))

def check_killing_restriction(W, zeta, spec, tol=DEFAULT_TOLERANCE):
    """
    A Killing field of the product restricts to a Killing field zeta1 of the
    base, and to a Killing field zeta2 of the fiber when zeta1(f) = 0.
    """
    gate = killing_defect(W.product, zeta.lift, spec, tol)
    parts = [killing_defect(W.base, zeta.base, _factor_spec(W, spec, 'base'), tol)]
    invariant = warping_invariant(W, zeta.base, spec, tol)
    if invariant.passed:
        parts.append(killing_defect(W.fiber, zeta.fiber, _factor_spec(W, spec, 'fiber'), tol))
    result = combined('killing-restriction', parts, tol)
    result.details['fiber_asserted'] = invariant.passed
    return gated('killing-restriction', [gate], result)

def check_two_killing_lift(W, zeta, spec, condition, tol=DEFAULT_TOLERANCE):
    """
    2-Killing fields of the factors that lift to 2-Killing fields.

    1. zeta1 and zeta2 2-Killing with zeta1(f) = 0;
    2. zeta = (0, zeta2) with zeta2 2-Killing.
    """
    base_spec = _factor_spec(W, spec, 'base')
    fiber_spec = _factor_spec(W, spec, 'fiber')
    if condition == 1:
        hypotheses = [two_killing_defect(W.base, zeta.base, base_spec, tol), two_killing_defect(W.fiber, zeta.fiber, fiber_spec, tol),
            warping_invariant(W, zeta.base, spec, tol)]
    elif condition == 2:
        hypotheses = [two_killing_defect(W.fiber, zeta.fiber, fiber_spec, tol), vanishes(W.base, zeta.base, base_spec, tol, 'zeta1=0')]
    else:
        raise ValueError('2-killing lift condition must be 1 or 2, got {!r}'.format(condition))
    return gated('2-killing-lift-{}'.format(condition), hypotheses, two_killing_defect(W.product, zeta.lift, spec, tol))

# Connection axioms and consistency of the Lie derivative formulas

def connection_axioms(M, fields, spec, tol=DEFAULT_TOLERANCE):
    """Torsion over all pairs and metric compatibility over all triples of `fields`."""
    points = sample_points(M, spec)

    def fn(p):
        residual = scale = 0.0
        for X in fields:
            for Y in fields:
                v, s = torsion_at(M, X, Y, p)
                residual = max(residual, float(np.max(np.abs(v), initial=0.0)))
                scale = max(scale, s)
                for Z in fields:
                    r, s = metric_compatibility_at(M, X, Y, Z, p)
                    residual = max(residual, abs(r))
                    scale = max(scale, s)
        return residual, scale
    return sampled_check('connection-axioms({})'.format(M.name or ','.join(M.chart.coords)), points, fn, tol, spec.seed)

def lie2_connection_defect(M, zeta, spec, tol=DEFAULT_TOLERANCE):
    """The coordinate formula for L L g against its connection form, on all pairs of coordinate fields."""
    n = M.dim
    coordinate = [VectorFieldSpec.coordinate(M.chart, i) for i in range(n)]

    def fn(p):
        t = lie2_metric_at(M, zeta, p)
        residual = 0.0
        scale = t.scale
        for i in range(n):
            for j in range(i, n):
                terms = lie2_connection_terms(M, zeta, coordinate[i], coordinate[j], p)
                residual = max(residual, abs(t.values[i, j] - terms.total))
                scale = max(scale, terms.scale)
        return residual, scale
    return sampled_check('lie2-connection({})'.format(zeta.name or 'zeta'), sample_points(M, spec), fn, tol, spec.seed)

def signature_check(M, spec, negative=1, tol=DEFAULT_TOLERANCE):
    """The metric has exactly `negative` negative eigenvalues at every sample."""
    def fn(p):
        neg, _ = M.signature_at(p)
        return float(abs(neg - negative)), 0.0
    return sampled_check('signature({})'.format(M.name or ','.join(M.chart.coords)), sample_points(M, spec), fn, tol, spec.seed)
