import pytest

from biasrank.gfcore import UsageError
from biasrank.harness.report import build_report, dumps, strip_timing
from biasrank.harness.suite import CRITERIA, DEFAULT_CONFIG, MUTATIONS, normalize_config, verify_suite


def test_registry_is_complete_and_ordered():
    assert list(CRITERIA) == list(range(1, 11))


def test_default_config_runs_everything():
    assert normalize_config(None) == DEFAULT_CONFIG


def test_empty_config_runs_nothing():
    reports, code = verify_suite({})
    assert reports == [] and code == 0
    assert build_report({}, reports)["checks"] == []


def test_criteria_by_name_or_number():
    assert normalize_config({"criteria": ["affine-counting", 6, "10"]})["criteria"] == [5, 6, 10]


@pytest.mark.parametrize(
    "config",
    [{"criteria": [11]}, {"mutations": ["nope"]}, {"bogus": 1}, {"seed": -1}, {"jobs": 0}, [1, 2]],
)
def test_bad_configs(config):
    with pytest.raises(UsageError):
        verify_suite(config)


def test_broken_schmidt_formula_is_caught():
    reports, code = verify_suite({"criteria": [3], "mutations": ["broken-schmidt-formula"]})
    assert code == 1
    wit = reports[0].witnesses[0]["witnesses"][0]
    assert wit["certificate"] != wit["search"]


@pytest.mark.parametrize("mutation,criterion", [("broken-gauss-exponent", 1), ("broken-rank-bound", 2)])
def test_other_mutations_are_caught(mutation, criterion):
    reports, code = verify_suite({"criteria": [criterion], "mutations": [mutation]})
    assert code == 1 and reports[0].witnesses
    assert mutation in MUTATIONS


def test_reports_are_deterministic_modulo_timing():
    cfg = {"criteria": [5, 6, 10]}
    a = dumps(strip_timing(build_report(cfg, verify_suite(cfg)[0])))
    b = dumps(strip_timing(build_report(cfg, verify_suite(cfg)[0])))
    assert a == b


def test_jobs_keep_declared_order():
    reports, code = verify_suite({"criteria": [10, 5], "jobs": 2})
    assert [r.params["criterion"] for r in reports] == [10, 5]
    assert code == 0
