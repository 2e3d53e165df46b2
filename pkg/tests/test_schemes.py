import math

import numpy as np
import pytest

from fcmac.probability import entropy, validate
from fcmac.schemes import (
    GaussianPairSource,
    GridQuantizer,
    MonteCarloError,
    af_distortion,
    binary_pair_correlation,
    binary_quadrant_pmf,
    centralized_bound,
    grid_distortion_closed_form,
    lipschitz_budget,
    monte_carlo_af,
    monte_carlo_grid_distortion,
    offdiagonal_cell_pmf,
    quantize_grid,
    run_scheme,
    sample_offdiagonal_uniform,
)

LOG2_3 = math.log2(3.0)


class TestClosedForms:
    def test_identical_sources_zero(self):
        assert centralized_bound(4.0, 1.0) == 0.0
        assert af_distortion(4.0, 1.0) == 0.0

    def test_zero_power_prior_variance(self):
        assert centralized_bound(0.0, 0.0, sigma2=1.0) == 2.0
        assert af_distortion(0.0, 0.25, sigma2=1.0) == pytest.approx(1.5)

    def test_reference_point(self):
        assert centralized_bound(5.0, 0.5, 1.0) == pytest.approx(1 / 11, abs=1e-15)
        assert af_distortion(5.0, 0.5, 1.0) == pytest.approx(1 / 6, abs=1e-15)

    def test_equal_at_zero_correlation(self):
        for p in np.linspace(0.0, 20.0, 9):
            assert af_distortion(p, 0.0) == pytest.approx(centralized_bound(p, 0.0),
                                                          abs=1e-15)

    def test_uncoded_never_beats_centralized(self):
        rng = np.random.default_rng(51)
        for _ in range(100):
            p = rng.uniform(0.01, 50.0)
            rho = rng.uniform(0.0, 1.0)
            s2 = rng.uniform(0.1, 4.0)
            assert af_distortion(p, rho, s2) >= centralized_bound(p, rho, s2) - 1e-15

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            centralized_bound(-1.0, 0.5)
        with pytest.raises(ValueError):
            af_distortion(1.0, 2.0)
        with pytest.raises(ValueError):
            GaussianPairSource(sigma2=0.0)


class TestGaussianPairSource:
    def test_sample_moments(self):
        src = GaussianPairSource(sigma2=2.0, rho=0.6)
        pts = src.sample(200_000, seed=9)
        cov = np.cov(pts.T)
        assert cov[0, 0] == pytest.approx(2.0, rel=0.05)
        assert cov[1, 1] == pytest.approx(2.0, rel=0.05)
        assert cov[0, 1] / 2.0 == pytest.approx(0.6, abs=0.02)

    def test_sample_deterministic_and_block_stable(self):
        src = GaussianPairSource()
        a = src.sample(70_000, seed=10)
        b = src.sample(70_000, seed=10)
        assert np.array_equal(a, b)
        # a shorter run is a prefix: streams are keyed per block
        c = src.sample(5_000, seed=10)
        assert np.array_equal(a[:5_000], c)


class TestMonteCarloAF:
    def test_matches_closed_form_within_interval(self):
        mc = monte_carlo_af(5.0, 0.5, samples=1_000_000, seed=7)
        assert abs(mc.value - 1 / 6) <= max(mc.halfwidth, 0.002)
        assert mc.samples == 1_000_000
        assert mc.seed == 7

    def test_identical_sources_exact_zero(self):
        mc = monte_carlo_af(5.0, 1.0, samples=20_000, seed=1)
        assert mc.value == 0.0
        assert mc.halfwidth == 0.0

    def test_zero_power_falls_back_to_prior(self):
        rho = 0.25
        mc = monte_carlo_af(0.0, rho, samples=200_000, seed=2)
        assert mc.value == pytest.approx(2 * (1 - rho), abs=5 * mc.halfwidth + 0.01)

    def test_seed_reproducibility_and_sensitivity(self):
        a = monte_carlo_af(5.0, 0.5, samples=20_000, seed=3)
        b = monte_carlo_af(5.0, 0.5, samples=20_000, seed=3)
        c = monte_carlo_af(5.0, 0.5, samples=20_000, seed=4)
        assert a.value == b.value
        assert a.value != c.value

    def test_halfwidth_shrinks_with_samples(self):
        small = monte_carlo_af(5.0, 0.5, samples=50_000, seed=5)
        large = monte_carlo_af(5.0, 0.5, samples=200_000, seed=5)
        # quadrupling samples roughly halves the half-width
        assert large.halfwidth == pytest.approx(small.halfwidth / 2, rel=0.2)

    def test_coverage_over_repetitions(self):
        hits = 0
        for seed in range(50):
            mc = monte_carlo_af(3.0, 0.5, samples=20_000, seed=seed)
            if abs(mc.value - af_distortion(3.0, 0.5)) <= mc.halfwidth:
                hits += 1
        assert hits >= 45  # 95% interval should cover in at least 90% of runs

    def test_sample_floor(self):
        with pytest.raises(MonteCarloError):
            monte_carlo_af(5.0, 0.5, samples=100)

    def test_variance_scaling(self):
        s2 = 2.5
        assert af_distortion(5.0, 0.5, s2) == pytest.approx(s2 * af_distortion(5.0, 0.5, 1.0))
        mc = monte_carlo_af(5.0, 0.5, sigma2=s2, samples=200_000, seed=6)
        assert abs(mc.value - af_distortion(5.0, 0.5, s2)) <= 4 * mc.halfwidth


class TestQuadrantPmf:
    def test_quoted_point(self):
        pair = binary_quadrant_pmf(0.75)
        assert validate(pair).ok
        assert entropy(pair, ("w1", "w2")) == pytest.approx(1.778, abs=5e-4)
        assert binary_pair_correlation(pair) == pytest.approx(0.540, abs=5e-3)

    def test_closed_form_cells(self):
        rho = 0.75
        same = 0.25 + math.asin(rho) / (2 * math.pi)
        diff = 0.25 - math.asin(rho) / (2 * math.pi)
        pair = binary_quadrant_pmf(rho)
        assert pair.mass[0, 0] == pytest.approx(same, abs=1e-15)
        assert pair.mass[0, 1] == pytest.approx(diff, abs=1e-15)

    def test_independent_at_zero(self):
        pair = binary_quadrant_pmf(0.0)
        assert np.allclose(pair.mass, 0.25)
        assert entropy(pair, ("w1", "w2")) == pytest.approx(2.0, abs=1e-12)

    def test_identical_signs_at_one(self):
        pair = binary_quadrant_pmf(1.0)
        assert pair.mass[0, 1] == pytest.approx(0.0, abs=1e-15)
        assert entropy(pair, ("w1", "w2")) == pytest.approx(1.0, abs=1e-12)

    def test_valid_and_entropy_monotone_in_magnitude(self):
        rhos = np.linspace(0.0, 1.0, 21)
        entropies = []
        for r in rhos:
            pair = binary_quadrant_pmf(float(r))
            assert validate(pair).ok
            entropies.append(entropy(pair, ("w1", "w2")))
        assert all(b <= a + 1e-12 for a, b in zip(entropies, entropies[1:]))
        for r in (-0.3, -0.9):
            mirrored = binary_quadrant_pmf(r)
            assert validate(mirrored).ok


class TestGridQuantizer:
    def test_centers(self):
        q = GridQuantizer(0.0, 1.0, 3)
        assert np.allclose(q.centers, [1 / 6, 1 / 2, 5 / 6])

    def test_idempotent_on_centers(self):
        q = GridQuantizer(0.0, 1.0, 3)
        assert list(q.index(q.centers)) == [0, 1, 2]

    def test_upper_boundary_clamped(self):
        q = GridQuantizer(0.0, 1.0, 3)
        assert q.index(np.array([1.0]))[0] == 2

    def test_quantize_pairs_empirical_pmf(self):
        pts = sample_offdiagonal_uniform(3, 100_000, seed=11)
        idx, pmf = quantize_grid(GridQuantizer(0.0, 1.0, 3), pts)
        assert idx.shape == (100_000, 2)
        assert validate(pmf).ok
        exact = offdiagonal_cell_pmf(3)
        tv = 0.5 * np.abs(pmf.mass - exact.mass).sum()
        assert tv < 0.01
        assert np.all(pmf.mass[np.eye(3, dtype=bool)] == 0.0)

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            quantize_grid(GridQuantizer(0.0, 1.0, 3), np.zeros((4, 3)))


class TestGridDistortion:
    def test_closed_form_value(self):
        assert grid_distortion_closed_form(3) == pytest.approx(1 / 9, abs=1e-15)

    def test_monte_carlo_agrees(self):
        mc = monte_carlo_grid_distortion(3, samples=200_000, seed=12)
        assert abs(mc.value - 1 / 9) <= 0.005

    def test_finer_grids_reduce_distortion(self):
        values = [grid_distortion_closed_form(c) for c in (2, 3, 6, 12)]
        assert all(b < a for a, b in zip(values, values[1:]))


class TestLipschitzBudget:
    def test_values(self):
        assert lipschitz_budget(1.0, 0.25) == 0.25
        assert lipschitz_budget(2.0, 1 / 3) == pytest.approx(1 / 6)
        assert lipschitz_budget(3.0, 0.0) == 0.0

    def test_domain(self):
        with pytest.raises(ValueError):
            lipschitz_budget(0.0, 1.0)
        with pytest.raises(ValueError):
            lipschitz_budget(1.0, -1.0)


class TestRunScheme:
    def test_section5_verdicts(self):
        by_id = {r.scheme_id: r for r in run_scheme("section5")}
        assert by_id["3"].verdict == "boundary"
        assert abs(by_id["3"].margin_bits) <= 1e-9
        assert by_id["2"].verdict == "violated"
        assert by_id["2"].margin_bits == pytest.approx(1.5 - LOG2_3, abs=1e-9)
        assert by_id["2"].margin_bits <= -0.084
        assert by_id["1"].verdict == "violated"

    def test_gauss_binary_verdicts(self):
        by_id = {r.scheme_id: r for r in run_scheme("gauss-binary")}
        assert by_id["2"].verdict == "violated"
        assert by_id["3"].verdict == "strict"
        assert by_id["3"].distortion_analytic == 0.0

    def test_uniform_grid_reports(self):
        by_id = {r.scheme_id: r for r in run_scheme("uniform-grid", samples=50_000)}
        assert by_id["1"].verdict == "violated"
        assert by_id["1"].source_entropy_bits == pytest.approx(math.log2(6), abs=1e-9)
        assert by_id["2"].verdict == "violated"
        assert by_id["3"].verdict == "boundary"
        assert by_id["3"].distortion_analytic == pytest.approx(1 / 9, abs=1e-15)
        assert by_id["3"].distortion_mc.samples == 50_000

    def test_gauss_diff_reports(self):
        by_id = {r.scheme_id: r for r in run_scheme("gauss-diff", samples=20_000)}
        assert by_id["centralized"].distortion_analytic == pytest.approx(1 / 11)
        assert by_id["AF"].distortion_analytic == pytest.approx(1 / 6)
        assert by_id["AF"].distortion_mc is not None

    def test_config_dict_form(self):
        reports = run_scheme({"experiment": "gauss-binary", "rho": 0.5})
        assert {r.scheme_id for r in reports} == {"2", "3"}

    def test_unknown_experiment(self):
        with pytest.raises(ValueError):
            run_scheme("nonesuch")
