"""
Scenario files: loading, validation and running.

A scenario is a TOML document. It defines manifolds, warped products,
static spacetimes and vector fields by name, then lists checks that refer
to them. Loading binds every check to its objects, so a scenario that
loads without a `ScenarioError` only fails at run time through the checks
themselves.
"""

import json
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import catalog
from .errors import ScenarioError, WarpToolsError
from .geometry import Manifold, VectorFieldSpec
from .killing import (DEFAULT_TOLERANCE, CheckResult, CheckStatus, SampleSpec, Tolerance, check_killing_lift,
    check_killing_restriction, check_parallel_theorem, check_two_killing_lift, connection_axioms, curvature_identity_defect,
    killing_defect, lie2_connection_defect, metric_compatibility_defect, ode_2killing_residual, parallel_defect,
    sectional_sign_check, signature_check, torsion_defect, two_killing_defect)
from .scalar_expr import parse
from .schema import Field, Section, integer, number, table, text
from .spacetime import (StaticField, StaticSpacetime, TimeInterval, appendix_b_check, check_static_2killing, converse_decompose,
    e5_residual, e6_residual)
from .utils import format_number, json_safe, merge_boxes
from .warped import (LIE2_VARIANTS, TRACE_VARIANTS, WarpedProduct, connection_residual, dxz_inner_closed_form, lie_closed_form,
    lie_matrix_residual, lie2_closed_form, lie2_matrix_residual, residual_check, trace_closed_form)

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 100
DEFAULT_SEED = 0

class ManifoldSection(Section):
    coords: text[...]
    metric: text[...][...].optional()
    diag: text[...].optional()
    domain: text.optional()
    box: table.optional()

class WarpedSection(Section):
    base: text
    fiber: text
    warping: text
    sign: integer.optional(1)
    box: table.optional()

class StaticSection(Section):
    spatial: text
    warping: text
    interval: number[2]
    time: text.optional('t')
    box: table.optional()

class FieldSection(Section):
    on: text
    components: text[...]

class SplitSection(Section):
    on: text
    base: text[...]
    fiber: text[...]

class StaticFieldSection(Section):
    on: text
    u: text
    zeta: text[...]

class CheckSection(Section):
    kind: text
    target: text.optional()
    name: text.optional()
    field: text.optional()
    x: text.optional()
    y: text.optional()
    samples: integer.optional()
    seed: integer.optional()
    atol: number.optional()
    rtol: number.optional()
    box: table.optional()
    variant: Field((str, int)).optional()
    condition: integer.optional()
    expect: text.optional()
    u: text.optional()
    v: text.optional()
    f: text.optional()
    coord: text.optional('t')
    interval: number[2].optional()

class ReportSection(Section):
    title: text.optional('')

_EXPECTATIONS = tuple(s.value for s in CheckStatus if s is not CheckStatus.ERROR)

_box_range = number[2]

def _parse_box(box, location):
    if box is None:
        return {}
    return { str(c): tuple(_box_range.convert(r, '{} {}'.format(location, c))) for c, r in box.items() }

@dataclass(frozen=True)
class Overrides:
    """Command-line values; each one replaces the scenario's when set."""
    seed: int = None
    samples: int = None
    atol: float = None
    rtol: float = None

class BoundCheck(NamedTuple):
    name: str
    kind: str
    target: str
    section: CheckSection
    box: dict
    order: tuple
    run: object

class Scenario:
    def __init__(self, origin):
        self.origin = origin
        self.title = ''
        self.manifolds = {}
        self.boxes = {}
        self.warped = {}
        self.statics = {}
        self.fields = {}
        self.splits = {}
        self.static_fields = {}
        self.checks = []

    def __repr__(self):
        return 'Scenario({!r}, {} checks)'.format(self.origin, len(self.checks))

    def _where(self, *parts):
        return '{}: {}'.format(self.origin, ' '.join(parts))

    def manifold(self, name, location):
        m = self.manifolds.get(name)
        if m is not None:
            return m
        entry = catalog.MANIFOLDS.get(name)
        if entry is None:
            raise ScenarioError('unknown manifold {!r}'.format(name), location)
        m = self.manifolds[name] = entry.build()
        self.boxes[name] = dict(entry.box)
        return m

    def target(self, name, location):
        """The manifold a check samples, with its box and report coordinate order."""
        if name in self.statics:
            S = self.statics[name]
            return S.product, self.boxes[name], S.display_order
        if name in self.warped:
            return self.warped[name].product, self.boxes[name], None
        M = self.manifold(name, location)
        return M, self.boxes[name], None

    def warped_target(self, name, location):
        if name in self.warped:
            return self.warped[name], self.boxes[name], None
        if name in self.statics:
            S = self.statics[name]
            return S.warped, self.boxes[name], S.display_order
        raise ScenarioError('{!r} is not a warped product or static spacetime'.format(name), location)

    def static_target(self, name, location):
        if name not in self.statics:
            raise ScenarioError('{!r} is not a static spacetime'.format(name), location)
        return self.statics[name], self.boxes[name], self.statics[name].display_order

    def field_on(self, name, M, location):
        """A vector field on M: a [field] on M, the lift of a split or static field, or d<coord>."""
        if name in self.fields:
            X = self.fields[name]
            if X.chart != M.chart:
                raise ScenarioError('field {!r} is not defined on {}'.format(name, M.name or M.chart.coords), location)
            return X
        for split in list(self.splits.values()) + [F.split for F in self.static_fields.values()]:
            if split.name == name:
                if split.product.product is not M:
                    raise ScenarioError('field {!r} is not defined on {}'.format(name, M.name or M.chart.coords), location)
                return split.lift
        if name.startswith('d') and name[1:] in M.chart.index:
            return VectorFieldSpec.coordinate(M.chart, M.chart.index[name[1:]])
        raise ScenarioError('unknown field {!r}'.format(name), location)

    def split_on(self, name, W, location):
        if name in self.splits:
            split = self.splits[name]
        elif name in self.static_fields:
            split = self.static_fields[name].split
        else:
            coords = W.product.chart.coords
            if name.startswith('d') and name[1:] in coords:
                return W.coordinate_field(coords.index(name[1:]))
            raise ScenarioError('unknown split field {!r}'.format(name), location)
        if split.product is not W:
            raise ScenarioError('field {!r} is not defined on this product'.format(name), location)
        return split

    def static_field_on(self, name, S, location):
        F = self.static_fields.get(name)
        if F is None:
            raise ScenarioError('unknown static field {!r}'.format(name), location)
        if F.spacetime is not S:
            raise ScenarioError('static field {!r} is not defined on this spacetime'.format(name), location)
        return F

def _wrap(fn, location):
    """Run a constructor; library errors become scenario errors at `location`."""
    try:
        return fn()
    except ScenarioError:
        raise
    except (WarpToolsError, ValueError) as e:
        raise ScenarioError(str(e), location) from e

def load_scenario(path):
    with open(path, 'rb') as fin:
        data = fin.read()
    return loads_scenario(data.decode('utf-8'), str(path))

def loads_scenario(source, origin='<scenario>'):
    try:
        doc = tomllib.loads(source)
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError(str(e), origin) from e

    known = { 'manifold', 'warped', 'static', 'field', 'split', 'staticfield', 'check', 'report' }
    for key in doc:
        if key not in known:
            raise ScenarioError('unknown table [{}]'.format(key), origin)

    sc = Scenario(origin)
    where = sc._where

    for name, t in _tables(doc, 'manifold', origin):
        loc = where('[manifold.{}]'.format(name))
        s = ManifoldSection.from_table(t, loc)
        if (s.metric is None) == (s.diag is None):
            raise ScenarioError('give exactly one of metric or diag', loc)
        sc.manifolds[name] = _wrap(lambda: Manifold.from_strings(s.coords, metric=s.metric, diag=s.diag, domain=s.domain, name=name), loc)
        sc.boxes[name] = _parse_box(s.box, loc)

    for name, t in _tables(doc, 'warped', origin):
        loc = where('[warped.{}]'.format(name))
        s = WarpedSection.from_table(t, loc)
        base = sc.manifold(s.base, loc + ' base')
        fiber = sc.manifold(s.fiber, loc + ' fiber')
        if s.sign not in (1, -1):
            raise ScenarioError('sign must be 1 or -1', loc + ' sign')
        sc.warped[name] = _wrap(lambda: WarpedProduct(base, fiber, s.warping, s.sign, name), loc + ' warping')
        sc.boxes[name] = merge_boxes(sc.boxes[s.base], sc.boxes[s.fiber], _parse_box(s.box, loc))

    for name, t in _tables(doc, 'static', origin):
        loc = where('[static.{}]'.format(name))
        s = StaticSection.from_table(t, loc)
        spatial = sc.manifold(s.spatial, loc + ' spatial')
        interval = _wrap(lambda: TimeInterval(s.interval[0], s.interval[1], s.time), loc + ' interval')
        sc.statics[name] = _wrap(lambda: StaticSpacetime(spatial, s.warping, interval, name), loc + ' warping')
        sc.boxes[name] = merge_boxes(sc.boxes[s.spatial], { s.time: (interval.low, interval.high) }, _parse_box(s.box, loc))

    for name, t in _tables(doc, 'field', origin):
        loc = where('[field.{}]'.format(name))
        s = FieldSection.from_table(t, loc)
        M = sc.manifold(s.on, loc + ' on')
        sc.fields[name] = _wrap(lambda: VectorFieldSpec.from_strings(M.chart, s.components, name), loc + ' components')

    for name, t in _tables(doc, 'split', origin):
        loc = where('[split.{}]'.format(name))
        s = SplitSection.from_table(t, loc)
        W, _, _ = sc.warped_target(s.on, loc + ' on')
        sc.splits[name] = _wrap(lambda: W.split_field(s.base, s.fiber, name), loc)

    for name, t in _tables(doc, 'staticfield', origin):
        loc = where('[staticfield.{}]'.format(name))
        s = StaticFieldSection.from_table(t, loc)
        S, _, _ = sc.static_target(s.on, loc + ' on')
        sc.static_fields[name] = _wrap(lambda: StaticField.from_strings(S, s.u, s.zeta, name), loc)

    report = doc.get('report', {})
    rs = ReportSection.from_table(report, where('[report]'))
    sc.title = rs.title

    checks = doc.get('check', [])
    if not isinstance(checks, list):
        raise ScenarioError('check must be an array of tables, written [[check]]', origin)
    for i, t in enumerate(checks):
        loc = where('[[check]] #{}'.format(i + 1))
        s = CheckSection.from_table(t, loc)
        sc.checks.append(bind_check(sc, s, loc))

    names = [c.name for c in sc.checks]
    for n in names:
        if names.count(n) > 1:
            raise ScenarioError('duplicate check name {!r}'.format(n), origin)
    return sc

def _tables(doc, key, origin):
    section = doc.get(key, {})
    if not isinstance(section, dict):
        raise ScenarioError('[{}] must be written as [{}.NAME] tables'.format(key, key), origin)
    return section.items()

# Check binding

_BINDERS = {}

def _binder(kind):
    def decorate(fn):
        _BINDERS[kind] = fn
        return fn
    return decorate

def check_kinds():
    return sorted(_BINDERS)

def _require(s, key, loc):
    value = getattr(s, key)
    if value is None:
        raise ScenarioError('missing key {!r}'.format(key), loc)
    return value

def _choice(value, choices, default, loc):
    if value is None:
        return default
    if value not in choices:
        raise ScenarioError('expected one of {}, got {!r}'.format(', '.join(str(c) for c in choices), value), loc)
    return value

def bind_check(sc, s, loc):
    binder = _BINDERS.get(s.kind)
    if binder is None:
        raise ScenarioError('unknown check kind {!r}, expected one of {}'.format(s.kind, ', '.join(check_kinds())), loc + ' kind')
    if s.expect is not None:
        _choice(s.expect, _EXPECTATIONS, None, loc + ' expect')

    box, order, run = binder(sc, s, loc)
    box = merge_boxes(box, _parse_box(s.box, loc + ' box'))
    name = s.name or '{}:{}'.format(s.kind, s.target or s.u or s.f or '')
    return BoundCheck(name, s.kind, s.target or '', s, box, order, run)

def _field_check(fn):
    def bind(sc, s, loc):
        M, box, order = sc.target(_require(s, 'target', loc), loc + ' target')
        Z = sc.field_on(_require(s, 'field', loc), M, loc + ' field')
        return box, order, lambda spec, tol: fn(M, Z, spec, tol)
    return bind

_binder('2-killing')(_field_check(two_killing_defect))
_binder('parallel')(_field_check(parallel_defect))
_binder('curvature-identity')(_field_check(curvature_identity_defect))
_binder('sectional-sign')(_field_check(sectional_sign_check))
_binder('lie2-connection')(_field_check(lie2_connection_defect))

@_binder('killing')
def _bind_killing(sc, s, loc):
    method = _choice(s.variant, ('coordinate', 'connection'), 'coordinate', loc + ' variant')
    box, order, run = _field_check(lambda M, Z, spec, tol: killing_defect(M, Z, spec, tol, method))(sc, s, loc)
    return box, order, run

@_binder('torsion')
def _bind_torsion(sc, s, loc):
    M, box, order = sc.target(_require(s, 'target', loc), loc + ' target')
    X = sc.field_on(_require(s, 'x', loc), M, loc + ' x')
    Y = sc.field_on(_require(s, 'y', loc), M, loc + ' y')
    return box, order, lambda spec, tol: torsion_defect(M, X, Y, spec, tol)

@_binder('metric-compatibility')
def _bind_metric_compatibility(sc, s, loc):
    M, box, order = sc.target(_require(s, 'target', loc), loc + ' target')
    X = sc.field_on(_require(s, 'x', loc), M, loc + ' x')
    Y = sc.field_on(_require(s, 'y', loc), M, loc + ' y')
    Z = sc.field_on(_require(s, 'field', loc), M, loc + ' field')
    return box, order, lambda spec, tol: metric_compatibility_defect(M, X, Y, Z, spec, tol)

@_binder('connection-axioms')
def _bind_connection_axioms(sc, s, loc):
    M, box, order = sc.target(_require(s, 'target', loc), loc + ' target')
    fields = [VectorFieldSpec.coordinate(M.chart, i) for i in range(M.dim)]
    for key in ('field', 'x', 'y'):
        if getattr(s, key) is not None:
            fields.append(sc.field_on(getattr(s, key), M, '{} {}'.format(loc, key)))
    return box, order, lambda spec, tol: connection_axioms(M, fields, spec, tol)

@_binder('signature')
def _bind_signature(sc, s, loc):
    M, box, order = sc.target(_require(s, 'target', loc), loc + ' target')
    negative = _choice(s.variant, range(M.dim + 1), 1, loc + ' variant')
    return box, order, lambda spec, tol: signature_check(M, spec, negative, tol)

@_binder('ode-2killing')
def _bind_ode(sc, s, loc):
    u = _require(s, 'u', loc)
    box = {}
    if s.interval is not None:
        box[s.coord] = tuple(s.interval)
    expr = _wrap(lambda: parse(u, (s.coord,)), loc + ' u')
    return box, None, lambda spec, tol: ode_2killing_residual(expr, spec, s.coord, tol)

def _warped_bind(s, sc, loc):
    return sc.warped_target(_require(s, 'target', loc), loc + ' target')

@_binder('connection-closed-form')
def _bind_connection_closed_form(sc, s, loc):
    W, box, order = _warped_bind(s, sc, loc)
    X = sc.split_on(_require(s, 'x', loc), W, loc + ' x')
    Y = sc.split_on(_require(s, 'y', loc), W, loc + ' y')
    return box, order, lambda spec, tol: residual_check('connection({}, {})'.format(X.name, Y.name), W, spec,
        lambda p: connection_residual(W, X, Y, p), tol)

@_binder('dxz-inner')
def _bind_dxz_inner(sc, s, loc):
    W, box, order = _warped_bind(s, sc, loc)
    Z = sc.split_on(_require(s, 'field', loc), W, loc + ' field')
    X = sc.split_on(_require(s, 'x', loc), W, loc + ' x')
    return box, order, lambda spec, tol: residual_check('dxz-inner({}, {})'.format(Z.name, X.name), W, spec,
        lambda p: dxz_inner_closed_form(W, Z, X, p), tol)

@_binder('lie-closed-form')
def _bind_lie_closed_form(sc, s, loc):
    W, box, order = _warped_bind(s, sc, loc)
    Z = sc.split_on(_require(s, 'field', loc), W, loc + ' field')
    if s.x is None and s.y is None:
        fn = lambda p: lie_matrix_residual(W, Z, p)
    else:
        X = sc.split_on(_require(s, 'x', loc), W, loc + ' x')
        Y = sc.split_on(_require(s, 'y', loc), W, loc + ' y')
        fn = lambda p: lie_closed_form(W, Z, X, Y, p)
    return box, order, lambda spec, tol: residual_check('lie-closed-form({})'.format(Z.name), W, spec, fn, tol)

@_binder('lie2-closed-form')
def _bind_lie2_closed_form(sc, s, loc):
    W, box, order = _warped_bind(s, sc, loc)
    Z = sc.split_on(_require(s, 'field', loc), W, loc + ' field')
    variant = _choice(s.variant, LIE2_VARIANTS, 'appendix', loc + ' variant')
    if s.x is None and s.y is None:
        fn = lambda p: lie2_matrix_residual(W, Z, p, variant)
    else:
        X = sc.split_on(_require(s, 'x', loc), W, loc + ' x')
        Y = sc.split_on(_require(s, 'y', loc), W, loc + ' y')
        fn = lambda p: lie2_closed_form(W, Z, X, Y, p, variant)
    return box, order, lambda spec, tol: residual_check('lie2-closed-form({}, {})'.format(Z.name, variant), W, spec, fn, tol)

@_binder('trace-closed-form')
def _bind_trace_closed_form(sc, s, loc):
    W, box, order = _warped_bind(s, sc, loc)
    Z = sc.split_on(_require(s, 'field', loc), W, loc + ' field')
    variant = _choice(s.variant, TRACE_VARIANTS, 'complete', loc + ' variant')
    if W.fiber_sign != 1:
        raise ScenarioError('trace formula needs a Riemannian fiber (sign = 1)', loc + ' target')
    return box, order, lambda spec, tol: residual_check('trace-closed-form({}, {})'.format(Z.name, variant), W, spec,
        lambda p: trace_closed_form(W, Z, p, variant), tol)

def _gated_warped(fn, key, choices):
    def bind(sc, s, loc):
        W, box, order = _warped_bind(s, sc, loc)
        Z = sc.split_on(_require(s, 'field', loc), W, loc + ' field')
        if key is None:
            return box, order, lambda spec, tol: fn(W, Z, spec, tol)
        which = _choice(_require(s, key, loc), choices, None, '{} {}'.format(loc, key))
        return box, order, lambda spec, tol: fn(W, Z, spec, which, tol)
    return bind

_binder('parallel-theorem')(_gated_warped(check_parallel_theorem, 'variant', (1, 2, 3)))
_binder('killing-lift')(_gated_warped(check_killing_lift, 'condition', (1, 2, 3)))
_binder('2-killing-lift')(_gated_warped(check_two_killing_lift, 'condition', (1, 2)))
_binder('killing-restriction')(_gated_warped(check_killing_restriction, None, None))

def _static_check(fn, conditions=None):
    def bind(sc, s, loc):
        S, box, order = sc.static_target(_require(s, 'target', loc), loc + ' target')
        F = sc.static_field_on(_require(s, 'field', loc), S, loc + ' field')
        if conditions is None:
            return box, order, lambda spec, tol: fn(S, F, spec, tol)
        condition = _choice(_require(s, 'condition', loc), conditions, None, loc + ' condition')
        return box, order, lambda spec, tol: fn(S, F, spec, condition, tol)
    return bind

_binder('static-2killing')(_static_check(check_static_2killing, (1, 2)))
_binder('e5')(_static_check(e5_residual))
_binder('e6')(_static_check(e6_residual))
_binder('converse')(_static_check(converse_decompose))

@_binder('appendix-b')
def _bind_appendix_b(sc, s, loc):
    f = _wrap(lambda: parse(_require(s, 'f', loc), ('x',)), loc + ' f')
    u = _wrap(lambda: parse(_require(s, 'u', loc), ('t',)), loc + ' u')
    v = _wrap(lambda: parse(_require(s, 'v', loc), ('x',)), loc + ' v')
    box = { 't': (-1.0, 1.0), 'x': (-1.0, 1.0) }
    return box, ('t', 'x'), lambda spec, tol: appendix_b_check(f, u, v, spec, tol)

# Running

@dataclass(frozen=True)
class Record:
    check: BoundCheck
    result: CheckResult

    @property
    def expected(self):
        return self.check.section.expect

    @property
    def ok(self):
        if self.expected is not None:
            return self.result.status.value == self.expected
        return self.result.ok

    def to_dict(self):
        d = self.result.to_dict(self.check.order)
        d['name'] = self.check.name
        d['kind'] = self.check.kind
        d['target'] = self.check.target
        d['expected'] = self.expected
        d['ok'] = self.ok
        return d

@dataclass
class Report:
    title: str
    origin: str
    records: list
    seed: int
    versions: dict
    wall_time: float = None

    @property
    def passed(self):
        return all(r.ok for r in self.records)

    def counts(self):
        out = {}
        for r in self.records:
            out[r.result.status.value] = out.get(r.result.status.value, 0) + 1
        return out

    def metadata(self):
        meta = { 'title': self.title, 'scenario': self.origin, 'seed': self.seed, 'versions': self.versions,
            'checks': len(self.records), 'passed': self.passed, 'counts': self.counts() }
        if self.wall_time is not None:
            meta['wall_time'] = self.wall_time
        return meta

    def to_json_lines(self):
        lines = [_dumps(r.to_dict()) for r in self.records]
        lines.append(_dumps({ 'summary': self.metadata() }))
        return '\n'.join(lines) + '\n'

    def to_text(self, color=False):
        lines = []
        head = self.title or self.origin
        lines.append('{}  (seed {}, warp_tools {}, numpy {})'.format(head, self.seed, self.versions['warp_tools'], self.versions['numpy']))
        for r in self.records:
            d = r.to_dict()
            status = d['status'].upper()
            mark = _paint(status, _STATUS_COLORS[r.result.status] if r.ok else 'red', color)
            lines.append('{:<20} {}  [{} on {}]'.format(mark, d['name'], d['kind'], d['target'] or '-'))
            lines.append('    max_residual={} scale={} atol={} rtol={} samples={} seed={} ok={}'.format(
                format_number(d['max_residual']), format_number(d['scale']), format_number(d['atol']), format_number(d['rtol']), d['samples'], d['seed'],
                'true' if d['ok'] else 'false'))
            if d['witness']:
                lines.append('    witness: {}'.format(', '.join('{}={}'.format(k, format_number(v)) for k, v in d['witness'].items())))
            if d['expected'] is not None:
                lines.append('    expected: {}{}'.format(d['expected'], '' if r.ok else ' (mismatch)'))
            if d['message']:
                lines.append('    message: {}'.format(d['message']))
            for k, v in sorted(d['details'].items()):
                lines.append('    {}: {}'.format(k, _dumps(v)))
        counts = self.counts()
        summary = ', '.join('{} {}'.format(counts[k], k) for k in sorted(counts))
        lines.append('summary: {} ({})'.format('ok' if self.passed else 'FAILED', summary or 'no checks'))
        if self.wall_time is not None:
            lines.append('wall time: {:.3f} s'.format(self.wall_time))
        return '\n'.join(lines) + '\n'

def _dumps(obj):
    return json.dumps(json_safe(obj), sort_keys=True, allow_nan=False)

_STATUS_COLORS = {
    CheckStatus.PASS: 'green',
    CheckStatus.FAIL: 'red',
    CheckStatus.HYPOTHESES_NOT_MET: 'yellow',
    CheckStatus.INFORMATIONAL: 'cyan',
    CheckStatus.ERROR: 'red',
    }

_ANSI = { 'red': '31', 'green': '32', 'yellow': '33', 'cyan': '36' }

def _paint(s, color_name, enabled):
    if not enabled:
        return s
    return '\x1b[{}m{}\x1b[0m'.format(_ANSI[color_name], s)

def _versions():
    from . import __version__
    return { 'warp_tools': __version__, 'numpy': np.__version__ }

def check_spec(check, overrides):
    s = check.section
    samples = overrides.samples if overrides.samples is not None else (s.samples if s.samples is not None else DEFAULT_SAMPLES)
    seed = overrides.seed if overrides.seed is not None else (s.seed if s.seed is not None else DEFAULT_SEED)
    atol = overrides.atol if overrides.atol is not None else (s.atol if s.atol is not None else DEFAULT_TOLERANCE.atol)
    rtol = overrides.rtol if overrides.rtol is not None else (s.rtol if s.rtol is not None else DEFAULT_TOLERANCE.rtol)
    return SampleSpec(samples, seed, check.box), Tolerance(atol, rtol)

def run_check(check, overrides=Overrides()):
    spec, tol = check_spec(check, overrides)
    logger.info('running %s (%s on %s)', check.name, check.kind, check.target or '-')
    logger.debug('%s: %d samples, seed %d, atol %g, rtol %g', check.name, spec.count, spec.seed, tol.atol, tol.rtol)
    try:
        result = check.run(spec, tol)
    except WarpToolsError as e:
        logger.debug('%s raised', check.name, exc_info=True)
        result = CheckResult(check.name, CheckStatus.ERROR, math.nan, 0.0, tol, None, spec.count, spec.seed, str(e))

    record = Record(check, result)
    logger.info('%s: %s (max residual %s)', check.name, result.status.value, format_number(result.max_residual))
    if result.status is CheckStatus.HYPOTHESES_NOT_MET:
        logger.warning('%s: %s', check.name, result.message)
    if record.expected is not None and not record.ok:
        logger.warning('%s: expected %s, got %s', check.name, record.expected, result.status.value)
    return record

def run_scenario(sc, overrides=Overrides(), jobs=1, timing=False):
    """Run every check of `sc`. Records keep scenario order for any `jobs`."""
    start = time.perf_counter()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(lambda c: run_check(c, overrides), sc.checks))
    else:
        records = [run_check(c, overrides) for c in sc.checks]
    elapsed = time.perf_counter() - start if timing else None

    seed = overrides.seed if overrides.seed is not None else DEFAULT_SEED
    return Report(sc.title, sc.origin, records, seed, _versions(), elapsed)
