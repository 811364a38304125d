"""
Bundled manifolds and example scenarios.

Scenario files may refer to a catalog manifold by name without defining it.
"""

from typing import NamedTuple

from .geometry import Manifold

class CatalogManifold(NamedTuple):
    name: str
    description: str
    coords: tuple
    metric: tuple = None
    diag: tuple = None
    domain: str = None
    box: dict = None

    def build(self):
        return Manifold.from_strings(self.coords, metric=self.metric, diag=self.diag, domain=self.domain, name=self.name)

MANIFOLDS = { m.name: m for m in [
    CatalogManifold('line', 'the Euclidean line', ('x',), diag=('1',),
        box={ 'x': (-2.0, 2.0) }),
    CatalogManifold('half-line', 'the Euclidean half-line x > 0', ('x',), diag=('1',), domain='x',
        box={ 'x': (0.25, 3.0) }),
    CatalogManifold('time', 'the time axis with dt^2', ('t',), diag=('1',),
        box={ 't': (-1.0, 1.0) }),
    CatalogManifold('plane', 'the Euclidean plane', ('x', 'y'), diag=('1', '1'),
        box={ 'x': (-2.0, 2.0), 'y': (-2.0, 2.0) }),
    CatalogManifold('polar-plane', 'the Euclidean plane in polar coordinates', ('r', 'theta'), diag=('1', 'r^2'), domain='r',
        box={ 'r': (0.5, 3.0), 'theta': (-3.0, 3.0) }),
    CatalogManifold('sphere', 'the unit sphere in polar coordinates', ('theta', 'phi'), diag=('1', 'sin(theta)^2'), domain='sin(theta)',
        box={ 'theta': (0.3, 2.8), 'phi': (-3.0, 3.0) }),
    CatalogManifold('hyperbolic-plane', 'the upper half-plane model of curvature -1', ('x', 'y'), diag=('1/y^2', '1/y^2'), domain='y',
        box={ 'x': (-2.0, 2.0), 'y': (0.5, 3.0) }),
    CatalogManifold('paraboloid', 'the graph of (u^2 + v^2)/2 with the induced metric', ('u', 'v'),
        metric=(('1 + u^2', 'u*v'), ('u*v', '1 + v^2')),
        box={ 'u': (-1.5, 1.5), 'v': (-1.5, 1.5) }),
    CatalogManifold('three-sphere', 'the unit 3-sphere in hyperspherical coordinates', ('chi', 'theta', 'phi'),
        diag=('1', 'sin(chi)^2', 'sin(chi)^2*sin(theta)^2'), domain='sin(chi)*sin(theta)',
        box={ 'chi': (0.3, 2.8), 'theta': (0.3, 2.8), 'phi': (-3.0, 3.0) }),
    CatalogManifold('minkowski-plane', '1+1 Minkowski space', ('t', 'x'), diag=('-1', '1'),
        box={ 't': (-2.0, 2.0), 'x': (-2.0, 2.0) }),
    ]}

class Example(NamedTuple):
    name: str
    description: str
    anchor: str
    filename: str

EXAMPLES = [
    Example('euclidean-plane-2killing', '2-Killing fields u(x) d_x + v(y) d_y on the plane', '§3 Example', 'euclidean_plane_2killing.scn'),
    Example('appendix-b-static-line', 'explicit L L g components on f^2 dt^2 + dx^2', 'Appendix B', 'appendix_b_static_line.scn'),
    Example('th1-random-warped', 'L L g on generic warped products against the closed form', 'Theorem TH1', 'th1_random_warped.scn'),
    Example('warped-lie2-random', 'second Lie derivative of the metric on warped products', 'warped L L g, printed variant rejected', 'warped_lie2_random.scn'),
    Example('warped-connection-random', 'connection, g(D_X zeta, X) and L g on warped products', 'warped connection and L g', 'warped_connection_random.scn'),
    Example('warped-trace-random', 'trace of g(D zeta, D zeta) on Riemannian warped products', 'warped trace formula', 'warped_trace_random.scn'),
    Example('static-cond1', 'constant u with f zeta(f) constant on a static spacetime', 'static 2-Killing, first condition', 'static_cond1.scn'),
    Example('static-cond2', 'u = (r t + s)^(1/3) with zeta(f) = 0 on a static spacetime', 'static 2-Killing, second condition', 'static_cond2.scn'),
    Example('static-perturbations', 'each static hypothesis broken in turn', 'static conditions are active', 'static_perturbations.scn'),
    Example('sphere-curvature', 'curvature identity and sectional sign on the sphere', 'curvature of 2-Killing fields', 'sphere_curvature.scn'),
    Example('connection-axioms', 'torsion-free and metric-compatible on the catalog', 'Levi-Civita axioms', 'connection_axioms.scn'),
    Example('parallel-theorem', 'parallel 2-Killing fields on warped products', 'parallelism under Ric <= 0', 'parallel_theorem.scn'),
    Example('killing-lifts', 'Killing fields of the factors and of the product', 'Killing lifts and restrictions', 'killing_lifts.scn'),
    Example('einstein-static-universe', 'rotations of the Einstein static universe', 'static 3-sphere', 'einstein_static_universe.scn'),
    ]

def find_example(name):
    for ex in EXAMPLES:
        if ex.name == name:
            return ex
    return None

def list_examples():
    labels = ['{} ({})'.format(ex.name, ex.anchor) for ex in EXAMPLES]
    width = max(len(label) for label in labels)
    return ['{:<{}}  {}'.format(label, width, ex.description) for label, ex in zip(labels, EXAMPLES)]
