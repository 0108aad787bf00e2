import math
import time

import numpy as np
import pytest

from stgneiting import catalog
from stgneiting.model import GneitingModel, GridSpec, MixtureMeasure, SpaceTimePointSet
from stgneiting.rng import RngStream, realization_seed
from stgneiting.spectral import (
    ConditionalTemporalLaw, SpectralEnsemble, build_spectral_ensemble, evaluate_spectral,
    sample_spatial_frequency, sample_temporal_frequency, shot_noise_table,
)
from stgneiting.variograms import Strategy, VariogramSpec

N = 100_000
TOL = 4 / math.sqrt(N)


def ecf(x, u):
    return float(np.mean(np.cos(u * x)))


class TestSpatialFrequency:
    def test_variance(self):
        w = sample_spatial_frequency(0.01, 2, RngStream(1), size=N)
        assert np.all(np.abs(w.var(axis=0) / 0.02 - 1) < 0.03)

    def test_independent_coordinates(self):
        w = sample_spatial_frequency(0.5, 3, RngStream(2), size=N)
        c = np.corrcoef(w.T)
        assert np.all(np.abs(c[np.triu_indices(3, 1)]) < 0.01)

    def test_repeatable(self):
        np.testing.assert_array_equal(sample_spatial_frequency(0.1, 2, RngStream(3, 5)),
                                      sample_spatial_frequency(0.1, 2, RngStream(3, 5)))

    def test_rejects_zero_r(self):
        with pytest.raises(ValueError, match="r > 0"):
            sample_spatial_frequency(0.0, 2, RngStream(0))


class TestTemporalFrequency:
    @pytest.mark.parametrize("spec", [VariogramSpec.linear(1.0), VariogramSpec.logarithmic(2.06),
                                      VariogramSpec.cauchy_class(1, 1, 0.5),
                                      VariogramSpec.table_entry("bounded_gaussian")], ids=str)
    def test_zero_lambda(self, spec):
        law = ConditionalTemporalLaw(spec.strategy, 0.0)
        assert sample_temporal_frequency(law, spec, RngStream(0)) == 0.0

    def test_linear_cf(self):
        spec = VariogramSpec.linear(1.0)
        x = sample_temporal_frequency(ConditionalTemporalLaw(Strategy.DIRECT_CAUCHY, 2.0), spec, RngStream(1), N)
        assert abs(ecf(x, 1.0) - math.exp(-2)) <= TOL

    def test_logarithmic_gamma_mixture(self):
        a, lam = 2.06, 1.3
        spec = VariogramSpec.logarithmic(a)
        x = sample_temporal_frequency(ConditionalTemporalLaw(Strategy.GAMMA_MIXTURE, lam), spec, RngStream(2), N)
        # the algorithm's own shape parameter is lam / ln(a^2)
        want = (a * a / (a * a + 1)) ** (lam / math.log(a * a))
        assert abs(ecf(x, 1.0) - want) <= TOL

    def test_cauchy_class_stable_mixture(self):
        spec = VariogramSpec.cauchy_class(1.0, 1.0, 0.5)
        x = sample_temporal_frequency(ConditionalTemporalLaw(Strategy.STABLE_MIXTURE, 1.0), spec, RngStream(3), N)
        assert abs(ecf(x, 3.0) - math.exp(-1)) <= 0.013

    @pytest.mark.parametrize("spec", [
        VariogramSpec.fractional_power(0.6, scale=1.5),
        VariogramSpec.cauchy_class(0.7, 1.6, 0.8),
        VariogramSpec.cauchy_class(2.0, 2.0, 0.3),
        VariogramSpec.table_entry("bounded_exponential", sill=2.0, scale=0.5),
        VariogramSpec.table_entry("bounded_gaussian", sill=0.5, scale=2.0),
    ], ids=str)
    @pytest.mark.parametrize("lam", [0.1, 1.0, 10.0])
    def test_exact_samplers_cf(self, spec, lam):
        x = sample_temporal_frequency(ConditionalTemporalLaw(spec.strategy, lam), spec, RngStream(4), N)
        for u in (0.1, 0.5, 1.0, 2.0, 5.0):
            assert abs(ecf(x, u) - math.exp(-lam * spec(u))) <= TOL

    @pytest.mark.parametrize("entry", ["power", "linear_exponential", "piecewise_linear", "log",
                                       "arctan", "cos_three_halves"])
    def test_generic_shot_noise_cf(self, entry):
        spec = VariogramSpec.table_entry(entry, alpha=1.2) if entry == "power" else VariogramSpec.table_entry(entry)
        n = 20_000
        x = sample_temporal_frequency(ConditionalTemporalLaw(Strategy.SHOT_NOISE, 1.0), spec, RngStream(5), n)
        for u in (0.25, 1.0, 3.0):
            assert abs(ecf(x, u) - math.exp(-spec(u))) <= 4 / math.sqrt(n)

    def test_shot_noise_table_truncation(self):
        tab = shot_noise_table(VariogramSpec.linear(1.0, strategy=Strategy.SHOT_NOISE), 0.01)
        assert tab.relative_residual <= 0.01 + 1e-9 or tab.rate >= 100 * 0.999
        assert tab.small_var >= 0

    def test_logarithmic_shot_noise_variance(self):
        # with lam = ln(a) the point process has unit intensity on t >= a
        a = 2.06
        spec = VariogramSpec.logarithmic(a, strategy=Strategy.SHOT_NOISE)
        lam_sn = 1.0
        x = sample_temporal_frequency(ConditionalTemporalLaw(Strategy.SHOT_NOISE, lam_sn * math.log(a)),
                                      spec, RngStream(6), N)
        n0 = math.ceil(-math.log(0.01) / math.log1p(2 / lam_sn))
        want = lam_sn / a ** 2 * (1 - (lam_sn / (lam_sn + 2)) ** n0)
        assert x.var() == pytest.approx(want, rel=0.05)

    def test_strategy_mismatch(self):
        with pytest.raises(ValueError, match="does not apply"):
            sample_temporal_frequency(ConditionalTemporalLaw(Strategy.GAMMA_MIXTURE, 1.0),
                                      VariogramSpec.linear(1.0), RngStream(0))

    def test_law_from_frequency(self):
        law = ConditionalTemporalLaw.from_frequency(Strategy.DIRECT_CAUCHY, [0.2, 0.4], 0.01)
        assert law.lam == pytest.approx(0.2 / 0.04)
        with pytest.raises(ValueError):
            ConditionalTemporalLaw(Strategy.DIRECT_CAUCHY, -1.0)


class TestEnsemble:
    def test_single_component(self):
        e = build_spectral_ensemble(catalog.fig1(), 1, 3)
        assert e.p == 1 and e.k == 2
        assert e.amp[0] > 0
        assert 0 <= e.phi[0] < 2 * math.pi

    def test_same_seed_same_ensemble(self):
        a = build_spectral_ensemble(catalog.fig3(), 200, 11)
        b = build_spectral_ensemble(catalog.fig3(), 200, 11)
        for f in ("omega", "tau", "phi", "amp"):
            np.testing.assert_array_equal(getattr(a, f), getattr(b, f))

    def test_components_independent_of_p(self):
        small = build_spectral_ensemble(catalog.fig2(), 10, 5)
        big = build_spectral_ensemble(catalog.fig2(), 30, 5)
        np.testing.assert_array_equal(small.omega, big.omega[:10])
        np.testing.assert_array_equal(small.tau, big.tau[:10])

    def test_atom_at_zero_rejected(self):
        with pytest.raises(ValueError, match="atom at zero"):
            build_spectral_ensemble(catalog.atom_at_zero(), 10, 0)

    def test_frequency_variance(self):
        e = build_spectral_ensemble(catalog.fig1(), 20_000, 8)
        assert np.all(np.abs(e.omega.var(axis=0) / 0.02 - 1) < 0.05)

    def test_box_muller_amplitude(self):
        e = build_spectral_ensemble(catalog.fig1(), 50_000, 9)
        assert np.mean(e.amp ** 2 / 2) == pytest.approx(1.0, abs=4 / math.sqrt(50_000))

    @pytest.mark.parametrize("name", ["fig1", "fig2", "fig3", "fig5"])
    def test_build_time_budget(self, name):
        model = catalog.get_model(name)
        build_spectral_ensemble(model, 50, 0)  # warm caches
        t = time.perf_counter()
        build_spectral_ensemble(model, 5000, 1)
        assert time.perf_counter() - t <= 1.0


class TestEvaluate:
    def test_synthetic_zero_component(self):
        e = SpectralEnsemble(np.zeros((1, 2)), np.zeros(1), np.array([math.pi / 2]), np.ones(1))
        pts = SpaceTimePointSet(np.random.default_rng(0).normal(size=(20, 2)), np.linspace(0, 3, 20))
        assert np.max(np.abs(evaluate_spectral(e, pts).values)) <= 1e-15

    def test_deterministic(self):
        e = build_spectral_ensemble(catalog.fig1(), 100, 2)
        pts = SpaceTimePointSet([[1.5, -2.0]], [0.7])
        assert evaluate_spectral(e, pts).values[0] == evaluate_spectral(e, pts).values[0]

    def test_dimension_mismatch(self):
        e = build_spectral_ensemble(catalog.fig1(), 5, 2)
        with pytest.raises(ValueError, match="dimension"):
            evaluate_spectral(e, SpaceTimePointSet(np.zeros((2, 3)), np.zeros(2)))

    def test_grid_matches_direct(self):
        e = build_spectral_ensemble(catalog.fig2(), 300, 4)
        grid = GridSpec((-3.0, 2.0), (0.5, 1.5), (7, 5), 0.1, 0.3, 4)
        pts = SpaceTimePointSet.from_grid(grid)
        direct = SpaceTimePointSet(pts.spatial, pts.times)
        np.testing.assert_allclose(evaluate_spectral(e, pts).values, evaluate_spectral(e, direct).values,
                                   rtol=0, atol=1e-12)

    def test_provenance(self):
        e = build_spectral_ensemble(catalog.fig1(), 5, 17)
        f = evaluate_spectral(e, SpaceTimePointSet([[0.0, 0.0]], [0.0]), {"extra": 1})
        assert f.provenance == {"method": "spectral", "p": 5, "seed": 17, "extra": 1}

    def test_marginal_moments(self):
        model = catalog.fig1()
        rng = np.random.default_rng(3)
        pts = SpaceTimePointSet(rng.uniform(0, 1000, (20_000, 2)), rng.uniform(0, 10, 20_000))
        variances = []
        for i in range(3):
            v = evaluate_spectral(build_spectral_ensemble(model, 5000, realization_seed(77, i)), pts).values
            variances.append(v.var())
        assert np.mean(variances) == pytest.approx(1.0, abs=0.05)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["fig1", "fig2", "fig3", "fig5"])
def test_covariance_between_two_points(name):
    model = catalog.get_model(name)
    pts = SpaceTimePointSet([[0.0, 0.0], [4.0, 3.0], [0.0, 0.0]], [0.0, 0.6, 1.2])
    vals = np.array([evaluate_spectral(build_spectral_ensemble(model, 5000, realization_seed(5, i)), pts).values
                     for i in range(50)])
    for a, b in [(0, 1), (0, 2)]:
        prod = vals[:, a] * vals[:, b]
        want = model.covariance(pts.spatial[b] - pts.spatial[a], pts.times[b] - pts.times[a])
        assert abs(prod.mean() - want) <= 3 * prod.std(ddof=1) / math.sqrt(50)
