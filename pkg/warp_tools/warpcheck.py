import argparse
import logging
import os
import sys
from importlib import resources

from . import catalog
from .errors import WarpToolsError
from .scenario import Overrides, load_scenario, loads_scenario, run_scenario

logger = logging.getLogger(__name__)

def _configure_logging(verbosity):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s', force=True)

def _use_color():
    return 'NO_COLOR' not in os.environ and sys.stdout.isatty()

def _emit(report, args):
    if args.json:
        sys.stdout.write(report.to_json_lines())
    else:
        sys.stdout.write(report.to_text(color=_use_color()))
    return 0 if report.passed else 1

def main(argv=None):
    ap = argparse.ArgumentParser(prog='warpcheck', fromfile_prefix_chars='@',
        description="Checks Killing and 2-Killing identities on warped products and static spacetimes by seeded sampling.")
    ap.add_argument('--scenario', '-s', metavar='PATH', help="run the checks of a scenario file")
    ap.add_argument('--json', action='store_true', help="write the report as JSON lines instead of text")
    ap.add_argument('--jobs', '-j', type=int, default=1, metavar='N', help="run up to N checks at once; the report order does not change")
    ap.add_argument('--timing', action='store_true', help="include the wall time in the report")
    ap.add_argument('--verbose', '-v', action='count', default=0, help="log check progress to stderr; repeat for debug output")

    gp = ap.add_argument_group('overrides (replace the values given in the scenario)')
    gp.add_argument('--seed', type=int, metavar='N', help="seed of the sample points (default 0)")
    gp.add_argument('--samples', type=int, metavar='N', help="number of sample points per check (default 100)")
    gp.add_argument('--tol-abs', type=float, metavar='X', help="absolute tolerance (default 1e-10)")
    gp.add_argument('--tol-rel', type=float, metavar='X', help="relative tolerance, multiplied by the scale of each check (default 1e-8)")

    sub = ap.add_subparsers(dest='command', metavar='COMMAND')
    sub.add_parser('list-examples', help="list the bundled example scenarios")
    rp = sub.add_parser('run-example', help="run a bundled example scenario")
    rp.add_argument('name', help="the example name, as printed by list-examples")

    if argv is None:
        argv = sys.argv[1:]
    if not argv:
        ap.print_help()
        return 0

    args = ap.parse_args(argv)
    _configure_logging(args.verbose)

    if args.command == 'list-examples':
        for line in catalog.list_examples():
            print(line)
        return 0

    if args.samples is not None and args.samples < 1:
        print('error: --samples must be at least 1', file=sys.stderr)
        return 2
    if args.jobs < 1:
        print('error: --jobs must be at least 1', file=sys.stderr)
        return 2

    overrides = Overrides(seed=args.seed, samples=args.samples, atol=args.tol_abs, rtol=args.tol_rel)

    try:
        if args.command == 'run-example':
            example = catalog.find_example(args.name)
            if example is None:
                print('error: unknown example {!r}; try list-examples'.format(args.name), file=sys.stderr)
                return 2
            source = resources.files(__package__).joinpath('scenarios').joinpath(example.filename).read_text(encoding='utf-8')
            sc = loads_scenario(source, example.filename)
        elif args.scenario is not None:
            sc = load_scenario(args.scenario)
        else:
            print('error: give --scenario PATH, list-examples or run-example NAME', file=sys.stderr)
            return 2
    except (OSError, WarpToolsError) as e:
        print('error: {}'.format(e), file=sys.stderr)
        return 2

    report = run_scenario(sc, overrides, jobs=args.jobs, timing=args.timing)
    return _emit(report, args)

if __name__ == '__main__':
    sys.exit(main())
