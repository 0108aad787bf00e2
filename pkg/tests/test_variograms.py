import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from stgneiting.variograms import (
    PUBLISHED_TABLE_IDS, TABLE, Family, ParameterError, Strategy, VariogramSpec, classify_variogram,
    evaluate_variogram,
)

ALL_SPECS = [
    VariogramSpec.linear(1.0),
    VariogramSpec.linear(0.3),
    VariogramSpec.fractional_power(0.7),
    VariogramSpec.fractional_power(1.5, scale=2.0),
    VariogramSpec.logarithmic(2.06),
    VariogramSpec.cauchy_class(1.0, 1.0, 0.5),
    VariogramSpec.cauchy_class(0.5, 2.0, 0.3),
    VariogramSpec.cauchy_class(2.0, 1.2, 1.0),
    *[VariogramSpec.table_entry(i, alpha=1.3) if i == "power" else VariogramSpec.table_entry(i) for i in TABLE],
]


# densities of the form p(x) + q(x) cos(x): (p, q) for the tail integral
_OSCILLATING = {
    "piecewise_linear": (lambda x: 1 / (math.pi * x * x), lambda x: 1 / (math.pi * x * x)),
    "piecewise_cubic": (lambda x: 6 / (math.pi * x ** 4), lambda x: -6 / (math.pi * x ** 4)),
}
_CUT = 40.0


def _cos_tail(f, c):
    """int_CUT^inf f(x) cos(c x) dx."""
    if c == 0:
        return integrate.quad(f, _CUT, np.inf, epsabs=1e-13)[0]
    return integrate.quad(f, _CUT, np.inf, weight="cos", wvar=abs(c))[0]


def _quadrature_gamma(spec, u):
    """2 * int_0^inf (1 - cos ux) density(x) dx; the oscillatory tail goes through QAWF."""
    rho = lambda x: float(spec.spectral_density(x))
    head, _ = integrate.quad(lambda x: (1 - math.cos(u * x)) * rho(x), 0, 1, epsabs=1e-11, limit=400)
    mid, _ = integrate.quad(lambda x: (1 - math.cos(u * x)) * rho(x), 1, _CUT, epsabs=1e-11, limit=800)
    if spec.entry_id in _OSCILLATING:
        p, q = _OSCILLATING[spec.entry_id]
        # (1 - cos ux)(p + q cos x) = p - p cos ux + q cos x - q/2 cos((u+1)x) - q/2 cos((u-1)x)
        tail = (_cos_tail(p, 0) - _cos_tail(p, u) + _cos_tail(q, 1)
                - 0.5 * _cos_tail(q, u + 1) - 0.5 * _cos_tail(q, u - 1))
    else:
        tail = _cos_tail(rho, 0) - _cos_tail(rho, u)
    return 2 * (head + mid + tail)


class TestEvaluate:
    def test_linear(self):
        assert evaluate_variogram(VariogramSpec.linear(1.0), 2.0) == 2.0

    def test_logarithmic_zero(self):
        assert evaluate_variogram(VariogramSpec.logarithmic(2.06), 0.0) == 0.0

    def test_logarithmic_closed_form(self):
        a, u = 2.06, 1.7
        want = math.log(a * a + u * u) / math.log(a * a) - 1
        assert evaluate_variogram(VariogramSpec.logarithmic(a), u) == pytest.approx(want, rel=1e-14)

    def test_cauchy_class(self):
        assert evaluate_variogram(VariogramSpec.cauchy_class(1.0, 1.0, 0.5), 3.0) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.describe())
class TestVariogramInvariants:
    def test_zero_and_even(self, spec):
        u = np.linspace(-8, 8, 161)
        assert spec(0.0) == 0.0
        np.testing.assert_array_equal(spec(u), spec(-u))
        assert np.all(spec(u) >= 0)

    def test_density_nonnegative_symmetric(self, spec):
        x = np.concatenate([np.logspace(-4, 2, 200)])
        d = spec.spectral_density(x)
        if d is None:
            pytest.skip("no closed-form density")
        assert np.all(d >= 0)
        np.testing.assert_array_equal(d, spec.spectral_density(-x))

    def test_strategy_supported(self, spec):
        assert spec.strategy in spec.supported_strategies()


@pytest.mark.parametrize("entry", PUBLISHED_TABLE_IDS + ("bounded_exponential", "bounded_gaussian"))
@pytest.mark.parametrize("u", [0.3, 1.0, 2.5])
def test_table_density_reproduces_variogram(entry, u):
    spec = VariogramSpec.table_entry(entry, alpha=0.8) if entry == "power" else VariogramSpec.table_entry(entry)
    assert _quadrature_gamma(spec, u) == pytest.approx(float(spec(u)), rel=1e-5, abs=1e-7)


@pytest.mark.parametrize("spec", [VariogramSpec.linear(1.0), VariogramSpec.logarithmic(2.06),
                                  VariogramSpec.fractional_power(1.2, scale=0.5),
                                  VariogramSpec.cauchy_class(1.5, 0.9, 1.0)], ids=str)
def test_family_density_reproduces_variogram(spec):
    for u in (0.4, 1.0, 3.0):
        assert _quadrature_gamma(spec, u) == pytest.approx(float(spec(u)), rel=1e-5)


class TestClassify:
    def test_linear_unbounded(self):
        assert classify_variogram(VariogramSpec.linear(1.0)) == {"bounded": False, "temporal_atom": False}

    def test_logarithmic_unbounded(self):
        assert classify_variogram(VariogramSpec.logarithmic(2.06)) == {"bounded": False, "temporal_atom": False}

    def test_bounded_entry(self):
        spec = VariogramSpec.table_entry("bounded_gaussian", sill=1.5, scale=2.0)
        assert classify_variogram(spec) == {"bounded": True, "temporal_atom": True}
        assert spec.spectral_mass == 1.5
        # the variogram tends to the total spectral mass
        assert spec(1e3) == pytest.approx(1.5)

    @pytest.mark.parametrize("entry", PUBLISHED_TABLE_IDS)
    def test_published_entries_unbounded(self, entry):
        spec = VariogramSpec.table_entry(entry, alpha=1.0) if entry == "power" else VariogramSpec.table_entry(entry)
        assert not spec.bounded
        assert spec.spectral_mass == math.inf


class TestParameters:
    def test_alpha_out_of_range_names_field(self):
        with pytest.raises(ParameterError) as exc:
            VariogramSpec.cauchy_class(1.0, 2.5, 0.5)
        assert exc.value.errors == ["variogram.alpha=2.5 outside legal range (0, 2]"]

    def test_all_errors_collected(self):
        with pytest.raises(ParameterError) as exc:
            VariogramSpec.cauchy_class(-1.0, 2.5, 1.5)
        assert len(exc.value.errors) == 3

    def test_logarithmic_needs_a_above_one(self):
        with pytest.raises(ParameterError, match=r"variogram.a=1 outside legal range \(1, inf\)"):
            VariogramSpec.logarithmic(1.0)

    def test_unknown_table_entry(self):
        with pytest.raises(ParameterError, match="unknown table entry"):
            VariogramSpec.table_entry("nope")

    def test_unknown_parameter(self):
        with pytest.raises(ParameterError, match="unknown parameter"):
            VariogramSpec(Family.LINEAR, (("b", 1.0), ("c", 2.0)))

    def test_unsupported_strategy(self):
        with pytest.raises(ParameterError, match="not available"):
            VariogramSpec.linear(1.0, strategy=Strategy.GAMMA_MIXTURE)

    def test_default_strategies(self):
        assert VariogramSpec.linear(1.0).strategy is Strategy.DIRECT_CAUCHY
        assert VariogramSpec.logarithmic(2.0).strategy is Strategy.GAMMA_MIXTURE
        assert VariogramSpec.cauchy_class(1, 1, 0.5).strategy is Strategy.STABLE_MIXTURE
        assert VariogramSpec.table_entry("log").strategy is Strategy.SHOT_NOISE
        assert VariogramSpec.table_entry("bounded_exponential").strategy is Strategy.COMPOUND_POISSON


@settings(max_examples=50, deadline=None)
@given(a=st.floats(0.05, 5), alpha=st.floats(0.05, 2.0), beta=st.floats(0.05, 1.0),
       u=st.floats(0, 50))
def test_cauchy_class_hypothesis(a, alpha, beta, u):
    spec = VariogramSpec.cauchy_class(a, alpha, beta)
    g = spec(u)
    assert g == pytest.approx((1 + a * u ** alpha) ** beta - 1, rel=1e-9, abs=1e-12)
    assert spec(-u) == g


def test_spec_round_trip_dict():
    spec = VariogramSpec.table_entry("bounded_exponential", sill=2.0, scale=0.5)
    d = spec.to_dict()
    assert d == {"family": "table_entry", "id": "bounded_exponential", "sill": 2.0, "scale": 0.5,
                 "strategy": "compound_poisson"}
