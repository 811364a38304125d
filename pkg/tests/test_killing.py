import math

import pytest

from warp_tools import (CheckResult, CheckStatus, Manifold, SampleSpec, Tolerance, VectorFieldSpec, WarpedProduct,
    check_killing_lift, check_killing_restriction, check_parallel_theorem, check_two_killing_lift, combined,
    connection_axioms, curvature_identity_defect, gated, killing_defect, lie2_connection_defect, metric_compatibility_defect,
    ode_2killing_residual, parallel_defect, sample_points, sampled_check, sectional_sign_check, signature_check, torsion_defect, two_killing_defect)
from warp_tools.errors import SamplingDomainError

def line_spec(count=20, seed=0, low=-2.0, high=2.0):
    return SampleSpec(count, seed, { 'x': (low, high) })

def test_tolerance():
    tol = Tolerance(1e-10, 1e-8)
    assert tol.bound(100.0) == pytest.approx(1e-10 + 1e-6)
    assert tol.allows(1e-7, 100.0)
    assert not tol.allows(1e-5, 100.0)

def test_samples_are_reproducible(plane, plane_box):
    a = SampleSpec(10, 42, plane_box).points(plane.chart)
    b = SampleSpec(10, 42, plane_box).points(plane.chart)
    assert a == b
    c = SampleSpec(3, 42, plane_box).points(plane.chart)
    assert c == a[:3]
    d = SampleSpec(10, 43, plane_box).points(plane.chart)
    assert d != a

def test_samples_stay_in_the_box(plane):
    spec = SampleSpec(50, 1, [('x', 0.0, 1.0), ('y', (5.0, 6.0))])
    for p in spec.points(plane.chart):
        assert 0.0 <= p['x'] < 1.0
        assert 5.0 <= p['y'] < 6.0

def test_sample_spec_validation(plane):
    with pytest.raises(ValueError):
        SampleSpec(0)
    with pytest.raises(ValueError):
        SampleSpec(5, 0, { 'x': (1.0, 0.0) })
    with pytest.raises(SamplingDomainError):
        SampleSpec(5, 0, { 'x': (0.0, 1.0) }).points(plane.chart)

def test_samples_outside_the_domain(sphere):
    spec = SampleSpec(5, 0, { 'theta': (-1.0, -0.5), 'phi': (0.0, 1.0) })
    with pytest.raises(SamplingDomainError):
        sample_points(sphere, spec)

def test_degenerate_box_is_a_point(sphere):
    spec = SampleSpec(4, 0, { 'theta': (1.0, 1.0), 'phi': (0.0, 1.0) })
    assert all(p['theta'] == 1.0 for p in sample_points(sphere, spec))

def test_sample_spec_box_helpers(plane_box):
    spec = SampleSpec(5, 0, plane_box)
    assert spec.with_box({ 'x': (0.0, 1.0) }).ranges == { 'x': (0.0, 1.0), 'y': (-2.0, 2.0) }
    assert spec.restrict(Manifold.from_strings(['y'], diag=['1']).chart).ranges == { 'y': (-2.0, 2.0) }

def test_dilation_on_the_line(line):
    zeta = VectorFieldSpec.from_strings(line.chart, ['x'], 'dilation')
    spec = line_spec()
    k = killing_defect(line, zeta, spec)
    assert k.status is CheckStatus.FAIL
    assert k.max_residual == pytest.approx(2.0)
    assert k.witness is not None
    kk = two_killing_defect(line, zeta, spec)
    assert kk.status is CheckStatus.FAIL
    assert kk.max_residual == pytest.approx(4.0)

def test_curvature_identity_is_informational_off_2killing(line):
    zeta = VectorFieldSpec.from_strings(line.chart, ['x'], 'dilation')
    r = curvature_identity_defect(line, zeta, line_spec())
    assert r.status is CheckStatus.INFORMATIONAL
    assert r.max_residual == pytest.approx(2.0)
    assert r.ok

def test_cube_roots_are_2killing(plane, cube_roots, plane_box):
    spec = SampleSpec(30, 5, plane_box)
    assert two_killing_defect(plane, cube_roots, spec).passed
    assert curvature_identity_defect(plane, cube_roots, spec).passed
    assert lie2_connection_defect(plane, cube_roots, spec).passed
    assert killing_defect(plane, cube_roots, spec).status is CheckStatus.FAIL
    assert parallel_defect(plane, cube_roots, spec).status is CheckStatus.FAIL

def test_killing_methods_agree(polar):
    zeta = VectorFieldSpec.from_strings(polar.chart, ['0', '1'])
    spec = SampleSpec(10, 0, { 'r': (0.5, 2.0), 'theta': (-1.0, 1.0) })
    assert killing_defect(polar, zeta, spec).passed
    assert killing_defect(polar, zeta, spec, method='connection').passed
    with pytest.raises(ValueError):
        killing_defect(polar, zeta, spec, method='other')

def test_sphere_rotation(sphere):
    dphi = VectorFieldSpec.coordinate(sphere.chart, 1)
    spec = SampleSpec(20, 0, { 'theta': (0.3, 2.8), 'phi': (-3.0, 3.0) })
    assert killing_defect(sphere, dphi, spec).passed
    assert two_killing_defect(sphere, dphi, spec).passed
    assert curvature_identity_defect(sphere, dphi, spec).passed

def test_curvature_identity_for_tilted_rotation(sphere):
    # rotation about an axis in the equatorial plane
    zeta = VectorFieldSpec.from_strings(sphere.chart, ['-sin(phi)', '-cos(theta)*cos(phi)/sin(theta)'], 'tilted')
    spec = SampleSpec(20, 3, { 'theta': (0.4, 2.7), 'phi': (-3.0, 3.0) })
    assert killing_defect(sphere, zeta, spec).passed
    r = curvature_identity_defect(sphere, zeta, spec)
    assert r.status is CheckStatus.PASS
    assert r.max_residual <= 1e-10 + 1e-8 * r.scale

def test_curvature_identity_for_hyperbolic_dilation():
    H = Manifold.from_strings(['x', 'y'], diag=['1/y^2', '1/y^2'], domain='y')
    zeta = VectorFieldSpec.from_strings(H.chart, ['x', 'y'], 'dilation')
    spec = SampleSpec(20, 1, { 'x': (-2.0, 2.0), 'y': (0.5, 3.0) })
    assert killing_defect(H, zeta, spec).passed
    assert curvature_identity_defect(H, zeta, spec).passed

def test_parallel_defect_is_the_frobenius_norm(plane):
    rotation = VectorFieldSpec.from_strings(plane.chart, ['-y', 'x'], 'rotation')
    r = parallel_defect(plane, rotation, SampleSpec(5, 0, { 'x': (-1.0, 1.0), 'y': (-1.0, 1.0) }))
    assert r.status is CheckStatus.FAIL
    assert r.max_residual == pytest.approx(math.sqrt(2.0))

def test_sectional_sign_on_the_equator(sphere):
    dphi = VectorFieldSpec.coordinate(sphere.chart, 1)
    equator = SampleSpec(10, 0, { 'theta': (math.pi / 2, math.pi / 2), 'phi': (-3.0, 3.0) })
    r = sectional_sign_check(sphere, dphi, equator)
    assert r.status is CheckStatus.PASS
    assert r.details['qualifying_samples'] == 10
    assert r.details['proof_identity']['status'] == 'pass'

def test_sectional_sign_needs_a_geodesic_direction(sphere):
    dphi = VectorFieldSpec.coordinate(sphere.chart, 1)
    off = SampleSpec(10, 0, { 'theta': (0.3, 1.2), 'phi': (-3.0, 3.0) })
    r = sectional_sign_check(sphere, dphi, off)
    assert r.status is CheckStatus.HYPOTHESES_NOT_MET
    assert r.details['qualifying_samples'] == 0

def test_ode_residual():
    spec = SampleSpec(20, 0, { 't': (0.0, 2.0) })
    linear = ode_2killing_residual('t', spec)
    assert linear.status is CheckStatus.FAIL
    assert linear.max_residual == pytest.approx(4.0)
    assert ode_2killing_residual('(2*t + 3)^(1/3)', spec).passed
    assert ode_2killing_residual('5', spec).passed
    assert ode_2killing_residual('(3*y + 1)^(1/3)', SampleSpec(5, 0, { 'y': (0.0, 1.0) }), coord='y').passed

def test_sampled_check_keeps_the_worst_point(line):
    points = line_spec(count=10).points(line.chart)
    r = sampled_check('abs', points, lambda p: (abs(p['x']), 0.0))
    assert r.max_residual == max(abs(p['x']) for p in points)
    assert r.witness['x'] in (p['x'] for p in points)
    assert r.samples == 10

def test_nan_residual_fails(line):
    points = line_spec(count=3).points(line.chart)
    r = sampled_check('nan', points, lambda p: (float('nan'), 1.0))
    assert r.status is CheckStatus.FAIL
    assert math.isinf(r.max_residual)

def test_gated():
    ok = CheckResult('h1', CheckStatus.PASS, 0.0, 0.0)
    bad = CheckResult('h2', CheckStatus.FAIL, 1.0, 0.0)
    conclusion = CheckResult('c', CheckStatus.FAIL, 3.0, 1.0)
    r = gated('claim', [ok, bad], conclusion)
    assert r.status is CheckStatus.HYPOTHESES_NOT_MET
    assert r.max_residual == 3.0
    assert r.details['hypotheses'] == { 'h1': 'pass', 'h2': 'fail' }
    assert 'h2' in r.message
    assert gated('claim', [ok], conclusion).status is CheckStatus.FAIL

def test_combined():
    a = CheckResult('a', CheckStatus.PASS, 0.5, 1.0, samples=3)
    b = CheckResult('b', CheckStatus.FAIL, 0.1, 1.0, samples=4)
    r = combined('both', [a, b])
    assert r.status is CheckStatus.FAIL
    assert r.max_residual == 0.1
    assert r.samples == 7

def test_result_to_dict(line):
    zeta = VectorFieldSpec.from_strings(line.chart, ['x'], 'dilation')
    d = killing_defect(line, zeta, line_spec()).to_dict()
    assert d['status'] == 'fail'
    assert set(d['witness']) == { 'x' }
    assert d['atol'] == 1e-10 and d['rtol'] == 1e-8

def test_connection_checks(sphere):
    spec = SampleSpec(10, 0, { 'theta': (0.3, 2.8), 'phi': (-3.0, 3.0) })
    X = VectorFieldSpec.from_strings(sphere.chart, ['cos(phi)', 'theta^2'], 'X')
    Y = VectorFieldSpec.coordinate(sphere.chart, 0)
    assert torsion_defect(sphere, X, Y, spec).passed
    assert metric_compatibility_defect(sphere, X, Y, VectorFieldSpec.coordinate(sphere.chart, 1), spec).passed
    assert connection_axioms(sphere, [X, Y, VectorFieldSpec.coordinate(sphere.chart, 1)], spec).passed
    assert signature_check(sphere, spec, negative=0).passed
    assert signature_check(sphere, spec).status is CheckStatus.FAIL

# Warped product statements

def _box(**extra):
    box = { 'x': (-2.0, 2.0), 'y': (-2.0, 2.0), 't': (-1.0, 1.0) }
    box.update(extra)
    return SampleSpec(20, 0, box)

def test_parallel_theorem(plane, time_axis):
    flat = WarpedProduct(plane, time_axis, '1')
    constant = flat.split_field(['1', '2'], ['3'])
    assert check_parallel_theorem(flat, constant, _box(), 1).passed
    assert check_parallel_theorem(flat, flat.split_field(['0', '0'], ['2']), _box(), 3).passed

    bumpy = WarpedProduct(plane, time_axis, '2 + x^2')
    r = check_parallel_theorem(bumpy, bumpy.split_field(['1', '2'], ['3']), _box(), 1)
    assert r.status is CheckStatus.HYPOTHESES_NOT_MET
    assert r.details['hypotheses']['f constant'] == 'fail'
    assert check_parallel_theorem(bumpy, bumpy.split_field(['0', '1'], ['0']), _box(), 2).passed

    with pytest.raises(ValueError):
        check_parallel_theorem(flat, constant, _box(), 4)

def test_parallel_theorem_fails_off_compact_factors(plane, time_axis):
    valley = WarpedProduct(plane, time_axis, '2 + y^2')
    zeta = valley.split_field(['(x + 3)^(1/3)', '0'], ['0'])
    r = check_parallel_theorem(valley, zeta, _box(), 2)
    assert all(v == 'pass' for v in r.details['hypotheses'].values())
    assert r.status is CheckStatus.FAIL

def test_killing_lift_needs_invariant_warping(line, time_axis):
    W = WarpedProduct(line, time_axis, 'exp(x)')
    r = check_killing_lift(W, W.split_field(['1'], ['0']), _box(), 1)
    assert all(v == 'pass' for v in r.details['hypotheses'].values())
    assert r.status is CheckStatus.FAIL

def test_killing_lifts(plane, sphere):
    W = WarpedProduct(plane, sphere, '1 + x^2 + y^2')
    spec = _box(theta=(0.3, 2.8), phi=(-3.0, 3.0))
    fiber_rotation = W.split_field(['0', '0'], ['0', '1'])
    double_rotation = W.split_field(['-y', 'x'], ['0', '1'])
    assert check_killing_lift(W, fiber_rotation, spec, 2).passed
    assert check_killing_lift(W, double_rotation, spec, 3).passed
    restriction = check_killing_restriction(W, double_rotation, spec)
    assert restriction.passed
    assert restriction.details['fiber_asserted']
    assert check_killing_restriction(W, W.split_field(['x', 'y'], ['0', '1']), spec).status is CheckStatus.HYPOTHESES_NOT_MET
    assert check_two_killing_lift(W, fiber_rotation, spec, 2).passed

def test_two_killing_lift(plane, sphere):
    W = WarpedProduct(plane, sphere, '2')
    zeta = W.split_field(['(x + 3)^(1/3)', '(2*y + 5)^(1/3)'], ['0', '1'])
    assert check_two_killing_lift(W, zeta, _box(theta=(0.3, 2.8), phi=(-3.0, 3.0)), 1).passed
