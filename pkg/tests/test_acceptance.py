"""The ten acceptance criteria at full size, default seed 0."""

from fractions import Fraction

from biasrank.harness.suite import CRITERIA

SEED = 0


def run(number):
    return CRITERIA[number].run(SEED, frozenset())


def test_criterion_01_gauss_sum_law(acceptance_log):
    r = run(1)
    ok = r.passed and r.stats["violations"] == 0 and r.stats["polys"] == 5**6 + 2 * 10_000 and r.elapsed < 120
    acceptance_log(1, ok, f"{r.stats['polys']} quadratics, {r.stats['violations']} violations, {r.elapsed:.1f}s")
    assert ok, r.witnesses


def test_criterion_02_rank_at_most_twice_log_bias(acceptance_log):
    r = run(2)
    ok = r.passed and r.stats["failed"] == 0
    acceptance_log(2, ok, f"{r.stats['checked']} nonzero-bias quadratics, r <= m in all")
    assert ok, r.witnesses


def test_criterion_03_rank_formula_vs_search(acceptance_log):
    r = run(3)
    ok = r.passed and r.stats["disagreements"] == 0 and r.stats["polys"] == 3**6 + 5**6 and r.elapsed < 600
    acceptance_log(3, ok, f"{r.stats['polys']} quadratics at p=3,5, {r.stats['disagreements']} disagreements, {r.elapsed:.1f}s")
    assert ok, r.witnesses


def test_criterion_04_restriction(acceptance_log):
    r = run(4)
    ok = r.passed and r.stats["runs"] == 200 and r.stats["failed"] == 0
    acceptance_log(4, ok, f"200 cubics, {r.stats['resolved']} resolved, skip rate {r.stats['skip_rate']:.3f}, 0 violations")
    assert ok, r.witnesses


def test_criterion_05_affine_counting(acceptance_log):
    r = run(5)
    s = r.stats
    ok = (
        r.passed
        and s["regularity"] == 2
        and s["zero_set"] == 145
        and s["hyperplanes"] == 780
        and Fraction(s["max_deviation"]) <= Fraction(1, 5)
    )
    acceptance_log(5, ok, f"780 affine hyperplanes, max deviation {s['max_deviation']} <= 1/5")
    assert ok, r.witnesses


def test_criterion_06_admissible_density(acceptance_log):
    r = run(6)
    ok = r.passed and r.stats["runs"] == 20 and r.stats["failed"] == 0
    acceptance_log(6, ok, "20 configurations, density >= bound in all")
    assert ok, r.witnesses


def test_criterion_07_bogolyubov(acceptance_log):
    r = run(7)
    groups = [r.stats["F5^3"], r.stats["F3^4"]]
    ok = r.passed and all(
        g["seeds"] == 50 and g["success_rate"] >= 0.9 and g["verified"] == round(g["success_rate"] * 50) and g["max_b"] <= 3 and g["max_codim"] <= 3
        for g in groups
    )
    rates = ", ".join(f"{k} {v['success_rate']:.0%}" for k, v in r.stats.items())
    acceptance_log(7, ok, f"success {rates}; every returned subspace verified")
    assert ok, r.witnesses


def test_criterion_08_quartic_taylor(acceptance_log):
    r = run(8)
    ok = r.passed and r.stats["runs"] == 100 and r.stats["failed"] == 0
    acceptance_log(8, ok, "100 quartics, identity, symmetry and 4-linearity exact")
    assert ok, r.witnesses


def test_criterion_09_end_to_end(acceptance_log):
    r = run(9)
    ok = r.passed and r.stats["runs"] == 20 and r.stats["max_N_k1"] <= 2 and r.stats["max_N_k2"] <= 4 and r.stats["max_codim"] <= 4 and r.elapsed < 300
    acceptance_log(9, ok, f"20 quartics, max N {r.stats['max_N_k1']} (k=1) / {r.stats['max_N_k2']} (k=2), re-verified, {r.elapsed:.1f}s")
    assert ok, r.witnesses


def test_criterion_10_performance(acceptance_log):
    r = run(10)
    ok = r.passed and r.timing["bias_s"] < 1.0
    acceptance_log(10, ok, f"F_5^7 bias in {r.timing['bias_s']:.3f}s, {r.timing['point_evals_per_s']:.2e} point-evals/s")
    assert ok, r.witnesses
