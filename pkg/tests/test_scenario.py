import json
import math
from importlib import resources

import pytest

from warp_tools import catalog
from warp_tools.errors import ScenarioError
from warp_tools.killing import CheckStatus
from warp_tools.scenario import Overrides, check_kinds, check_spec, load_scenario, loads_scenario, run_scenario
from warp_tools.utils import json_safe

STATIC = '''
[report]
title = "static"

[static.bowl]
spatial = "plane"
warping = "1 + x^2 + y^2"
interval = [0.0, 2.0]

[staticfield.zeta_bar]
on = "bowl"
u = "(2*t + 3)^(1/3)"
zeta = ["-y", "x"]

[staticfield.linear]
on = "bowl"
u = "t"
zeta = ["0", "0"]

[[check]]
kind = "static-2killing"
target = "bowl"
field = "zeta_bar"
condition = 2
samples = 15

[[check]]
name = "linear time"
kind = "2-killing"
target = "bowl"
field = "linear"
samples = 15
'''

def test_load_and_run():
    sc = loads_scenario(STATIC, 'static.scn')
    assert sc.title == 'static'
    assert [c.name for c in sc.checks] == ['static-2killing:bowl', 'linear time']
    report = run_scenario(sc)
    statuses = [r.result.status for r in report.records]
    assert statuses == [CheckStatus.PASS, CheckStatus.FAIL]
    assert not report.passed
    assert report.counts() == { 'pass': 1, 'fail': 1 }

def test_load_from_file(tmp_path):
    path = tmp_path / 'static.scn'
    path.write_text(STATIC, encoding='utf-8')
    sc = load_scenario(path)
    assert len(sc.checks) == 2

    broken = tmp_path / 'broken.scn'
    broken.write_text('[[check]]\nkind = "no-such-kind"\n', encoding='utf-8')
    with pytest.raises(ScenarioError) as e:
        load_scenario(broken)
    assert str(broken) in str(e.value)

def test_witness_in_display_order():
    sc = loads_scenario(STATIC, 'static.scn')
    record = run_scenario(sc).records[1]
    assert list(record.to_dict()['witness']) == ['t', 'x', 'y']

def test_expect_turns_a_failure_into_success():
    source = STATIC.replace('name = "linear time"', 'name = "linear time"\nexpect = "fail"')
    report = run_scenario(loads_scenario(source))
    assert report.passed
    assert report.records[1].to_dict()['expected'] == 'fail'

def test_report_is_deterministic():
    sc = loads_scenario(STATIC, 'static.scn')
    a = run_scenario(sc).to_json_lines()
    b = run_scenario(sc, jobs=3).to_json_lines()
    assert a == b
    lines = [json.loads(line) for line in a.splitlines()]
    assert lines[-1]['summary']['checks'] == 2
    assert 'wall_time' not in lines[-1]['summary']
    assert 'wall_time' in run_scenario(sc, timing=True).metadata()

def test_text_report():
    text = run_scenario(loads_scenario(STATIC, 'static.scn')).to_text()
    assert text.startswith('static  (seed 0')
    assert 'PASS' in text and 'FAIL' in text
    assert text.rstrip().splitlines()[-1] == 'summary: FAILED (1 fail, 1 pass)'
    assert '\x1b[' not in text

def test_overrides():
    sc = loads_scenario(STATIC)
    spec, tol = check_spec(sc.checks[0], Overrides())
    assert spec.count == 15 and spec.seed == 0
    assert tol.atol == 1e-10 and tol.rtol == 1e-8
    spec, tol = check_spec(sc.checks[0], Overrides(seed=9, samples=4, atol=1e-6))
    assert spec.count == 4 and spec.seed == 9 and tol.atol == 1e-6
    report = run_scenario(sc, Overrides(samples=3, seed=9))
    assert report.seed == 9
    assert all(r.result.samples == 3 for r in report.records)

def test_error_result():
    source = '''
[warped.bad]
base = "plane"
fiber = "time"
warping = "x"

[split.zeta]
on = "bad"
base = ["1", "0"]
fiber = ["0"]

[[check]]
kind = "killing-lift"
target = "bad"
field = "zeta"
condition = 1
'''
    report = run_scenario(loads_scenario(source))
    result = report.records[0].result
    assert result.status is CheckStatus.ERROR
    assert 'domain' in result.message
    assert not report.passed
    record = strict_loads(report.to_json_lines().splitlines()[0])
    assert record['status'] == 'error'
    assert record['max_residual'] is None
    assert 'max_residual=nan' in report.to_text()

def test_catalog_manifold_and_inline_manifold():
    source = '''
[manifold.cone]
coords = ["r", "s"]
diag = ["1", "r^2"]
domain = "r"
box = { r = [0.5, 2.0], s = [-1.0, 1.0] }

[[check]]
kind = "killing"
target = "cone"
field = "ds"

[[check]]
kind = "curvature-identity"
target = "sphere"
field = "dphi"
samples = 5
'''
    report = run_scenario(loads_scenario(source))
    assert [r.result.status for r in report.records] == [CheckStatus.PASS, CheckStatus.PASS]

@pytest.mark.parametrize('source, message', [
    ('[unknown]\n', 'unknown table [unknown]'),
    ('x = = 1', ''),
    ('[[check]]\nkind = "nope"\ntarget = "plane"\n', "unknown check kind 'nope'"),
    ('[[check]]\nkind = "killing"\ntarget = "plane"\n', "missing key 'field'"),
    ('[[check]]\nkind = "killing"\ntarget = "plane"\nfield = "q"\n', "unknown field 'q'"),
    ('[[check]]\nkind = "killing"\ntarget = "nowhere"\nfield = "dx"\n', "unknown manifold 'nowhere'"),
    ('[[check]]\nkind = "killing"\ntarget = "plane"\nfield = "dx"\nbogus = 1\n', "unexpected key 'bogus'"),
    ('[[check]]\nkind = "killing"\ntarget = "plane"\nfield = "dx"\nexpect = "maybe"\n', 'expected one of'),
    ('[[check]]\nkind = "killing"\ntarget = "plane"\nfield = "dx"\n[[check]]\nkind = "killing"\ntarget = "plane"\nfield = "dx"\n',
        'duplicate check name'),
    ('[check]\nkind = "killing"\n', 'array of tables'),
    ('[field.f]\non = "plane"\ncomponents = ["x", "z"]\n', "unknown variable 'z'"),
    ('[field.f]\non = "plane"\ncomponents = ["x +", "1"]\n', 'unexpected end of input'),
    ('[manifold.m]\ncoords = ["x"]\n', 'exactly one of metric or diag'),
    ('[warped.w]\nbase = "plane"\nfiber = "time"\nwarping = "1"\nsign = 2\n', 'sign must be 1 or -1'),
    ('[warped.w]\nbase = "plane"\nfiber = "time"\nwarping = "t"\n', "unknown variable 't'"),
    ('[static.s]\nspatial = "plane"\nwarping = "1"\ninterval = [1.0, 0.0]\n', 'low < high'),
    ('[warped.w]\nbase = "plane"\nfiber = "time"\nwarping = "1"\nsign = -1\n[split.z]\non = "w"\nbase = ["1", "0"]\nfiber = ["0"]\n'
        '[[check]]\nkind = "trace-closed-form"\ntarget = "w"\nfield = "z"\n', 'Riemannian fiber'),
    ('[warped.w]\nbase = "plane"\nfiber = "time"\nwarping = "1"\n[split.z]\non = "w"\nbase = ["t", "0"]\nfiber = ["0"]\n',
        'not a coordinate of its factor'),
    ('[[check]]\nkind = "parallel-theorem"\ntarget = "plane"\nfield = "dx"\nvariant = 1\n', 'not a warped product'),
    ])
def test_load_errors(source, message):
    with pytest.raises(ScenarioError) as exc:
        loads_scenario(source, 'bad.scn')
    assert message in str(exc.value)
    assert str(exc.value).startswith('bad.scn')

def test_check_kinds():
    kinds = check_kinds()
    for kind in ('killing', '2-killing', 'appendix-b', 'static-2killing', 'lie2-closed-form', 'trace-closed-form', 'converse'):
        assert kind in kinds

def test_catalog_names_are_unique():
    names = [ex.name for ex in catalog.EXAMPLES]
    assert len(set(names)) == len(names)
    assert catalog.find_example('static-cond2').filename == 'static_cond2.scn'
    assert catalog.find_example('nope') is None
    for m in catalog.MANIFOLDS.values():
        assert set(m.box) == set(m.coords)
        m.build()

def strict_loads(line):
    def reject(token):
        raise ValueError('not strict JSON: {}'.format(token))
    return json.loads(line, parse_constant=reject)

@pytest.mark.parametrize('example', catalog.EXAMPLES, ids=lambda ex: ex.name)
def test_bundled_examples(example):
    source = resources.files('warp_tools').joinpath('scenarios').joinpath(example.filename).read_text(encoding='utf-8')
    sc = loads_scenario(source, example.filename)
    report = run_scenario(sc, Overrides(samples=20))
    failures = [(r.check.name, r.result.status.value, r.result.message) for r in report.records if not r.ok]
    assert failures == []
    assert 'summary: ok (' in report.to_text()
    records = [strict_loads(line) for line in report.to_json_lines().splitlines()]
    assert len(records) == len(report.records) + 1
    assert records[-1]['summary']['passed'] is True

def test_json_safe():
    assert json_safe({ 'a': [math.inf, 1.0], 'b': math.nan, 'c': 'x' }) == { 'a': [None, 1.0], 'b': None, 'c': 'x' }
