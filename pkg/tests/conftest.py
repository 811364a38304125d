import pytest

from warp_tools import Manifold, SampleSpec, VectorFieldSpec, WarpedProduct

@pytest.fixture
def line():
    return Manifold.from_strings(['x'], diag=['1'], name='line')

@pytest.fixture
def plane():
    return Manifold.from_strings(['x', 'y'], diag=['1', '1'], name='plane')

@pytest.fixture
def sphere():
    return Manifold.from_strings(['theta', 'phi'], diag=['1', 'sin(theta)^2'], domain='sin(theta)', name='sphere')

@pytest.fixture
def polar():
    return Manifold.from_strings(['r', 'theta'], diag=['1', 'r^2'], domain='r', name='polar')

@pytest.fixture
def time_axis():
    return Manifold.from_strings(['t'], diag=['1'], name='time')

@pytest.fixture
def plane_box():
    return { 'x': (-2.0, 2.0), 'y': (-2.0, 2.0) }

@pytest.fixture
def sphere_over_plane(plane, sphere):
    return WarpedProduct(plane, sphere, '2 + x^2 + sin(y)', name='poly')

@pytest.fixture
def warped_spec():
    box = { 'x': (-1.5, 1.5), 'y': (-1.5, 1.5), 'theta': (0.4, 2.7), 'phi': (-3.0, 3.0) }
    return SampleSpec(count=25, seed=7, box=box)

@pytest.fixture
def generic_split(sphere_over_plane):
    return sphere_over_plane.split_field(['x*y', '1 + x^2'], ['cos(phi)', 'sin(theta)'], 'zeta')

@pytest.fixture
def cube_roots(plane):
    return VectorFieldSpec.from_strings(plane.chart, ['(x + 3)^(1/3)', '(2*y + 5)^(1/3)'], 'cube_roots')
