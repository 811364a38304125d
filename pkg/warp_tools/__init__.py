from importlib.metadata import version as _version, PackageNotFoundError as _PackageNotFoundError

from .errors import *
from .scalar_expr import Chart, Point, Expr, parse, eval, eval_jet2, fd_oracle
from .jet2 import Jet2
from .geometry import *
from .warped import *
from .killing import *
from .spacetime import *
from .scenario import load_scenario, loads_scenario, run_scenario, Overrides, Report

try:
    __version__ = _version('warp_tools')
except _PackageNotFoundError:
    __version__ = '0+unknown'
