#include <doctest.h>

#include <cmath>
#include <vector>

#include "ghisim/errors.hpp"
#include "ghisim/math_utils.hpp"
#include "ghisim/scenario.hpp"
#include "ghisim/synth.hpp"

using namespace ghisim;

TEST_SUITE_BEGIN("scenario");

namespace {

constexpr double kCeil = 800.0;

// Year-round flat daylight window, hours 8..16, ceiling 800, floor 0,
// uniform intensities.
ModelBundle flat_bundle(const CopulaSpec& intraday, Variant variant,
                        std::optional<CopulaSpec> noon = std::nullopt) {
  ModelBundle bundle;
  bundle.variant = variant;
  bundle.noon = noon;
  bundle.bounds.toa_grid.assign(365 * 24, 1000.0);
  FourierModel lam;
  lam.coeffs = {500.0};
  QuantileFit qf;
  qf.model.coeffs = {kCeil};
  FourierModel zero;
  zero.coeffs = {0.0};
  for (int h = 8; h <= 16; ++h) {
    bundle.bounds.lambda[h] = lam;
    bundle.bounds.upper_fits[h] = qf;
    bundle.marginals.lambda[h] = zero;
    bundle.marginals.coeffs[h] = BetaRegCoeffs{0.0, 0.0, std::log(2.0), 0.0};
    if (h < 16) bundle.intraday[h] = intraday;
  }
  bundle.bounds.excess_seasonality.period = 24.0;
  bundle.bounds.excess_seasonality.coeffs = {0.0};
  bundle.bounds.upper_gpd = GpdFit{0.5, -0.5, 100};
  return bundle;
}

}  // namespace

TEST_CASE("independent uniform bundle produces uniform bounded hours") {
  const auto bundle = flat_bundle(CopulaSpec::independence(), Variant::C1);
  const ScenarioSet set = simulate(bundle, 2000, 11);

  SUBCASE("containment and night zeros") {
    for (std::size_t k = 0; k < 50; ++k) {
      for (int d = 1; d <= 365; d += 31) {
        for (int h = 0; h < 24; ++h) {
          const double v = set.at(k, d, h);
          if (h >= 8 && h <= 16) {
            CHECK(v >= 0.0);
            CHECK(v <= kCeil);
          } else {
            CHECK(v == 0.0);
          }
        }
      }
    }
  }
  SUBCASE("marginal uniformity at a fixed cell") {
    std::vector<double> u(set.m);
    for (std::size_t k = 0; k < set.m; ++k) u[k] = set.at(k, 180, 12) / kCeil;
    const double d = math::ks_statistic_uniform(u);
    CHECK(math::ks_pvalue(d, u.size()) > 0.01);
  }
  SUBCASE("independence leaves neighbouring hours uncorrelated") {
    std::vector<double> a(set.m), b(set.m);
    for (std::size_t k = 0; k < set.m; ++k) {
      a[k] = set.at(k, 100, 12);
      b[k] = set.at(k, 100, 13);
    }
    CHECK(std::abs(math::pearson(a, b)) < 0.05);
  }
}

TEST_CASE("gumbel chain reproduces the pair dependence") {
  const auto bundle = flat_bundle(CopulaSpec::gumbel(2.0), Variant::C1);
  const ScenarioSet set = simulate(bundle, 5000, 13);
  std::vector<double> u(set.m), v(set.m);
  for (std::size_t k = 0; k < set.m; ++k) {
    u[k] = set.at(k, 200, 12) / kCeil;
    v[k] = set.at(k, 200, 13) / kCeil;
  }
  // Gumbel theta = 2 has Kendall tau = 1/2.
  CHECK(math::kendall_tau(u, v) == doctest::Approx(0.5).epsilon(0.05));
  // Hours further apart de-correlate but stay positively dependent.
  std::vector<double> w(set.m);
  for (std::size_t k = 0; k < set.m; ++k) w[k] = set.at(k, 200, 16) / kCeil;
  const double far = math::kendall_tau(u, w);
  CHECK(far > 0.02);
  CHECK(far < 0.5);
}

TEST_CASE("noon chain couples consecutive days") {
  const CopulaSpec noon = CopulaSpec::gumbel(2.0);
  const auto c2 =
      flat_bundle(CopulaSpec::independence(), Variant::C2, noon);
  const ScenarioSet set = simulate(c2, 200, 17);
  const double q = 0.95;
  std::size_t both = 0, total = 0;
  for (std::size_t k = 0; k < set.m; ++k) {
    for (int d = 1; d < 365; ++d) {
      const double ud = set.at(k, d, 12) / kCeil;
      const double un = set.at(k, d + 1, 12) / kCeil;
      if (ud > q && un > q) ++both;
      ++total;
    }
  }
  const double emp = static_cast<double>(both) / static_cast<double>(total);
  const double exact = 1.0 - 2.0 * q + copula_cdf(noon, q, q);
  CHECK(std::abs(emp - exact) < 0.02);

  // The C1 variant breaks the day-to-day link.
  const auto c1 = flat_bundle(CopulaSpec::independence(), Variant::C1);
  const ScenarioSet ind = simulate(c1, 200, 17);
  std::size_t both1 = 0;
  for (std::size_t k = 0; k < ind.m; ++k) {
    for (int d = 1; d < 365; ++d) {
      if (ind.at(k, d, 12) / kCeil > q && ind.at(k, d + 1, 12) / kCeil > q) {
        ++both1;
      }
    }
  }
  const double emp1 = static_cast<double>(both1) / static_cast<double>(total);
  CHECK(std::abs(emp1 - (1.0 - q) * (1.0 - q)) < 0.005);
}

TEST_CASE("simulation is deterministic and prefix stable") {
  const auto bundle =
      flat_bundle(CopulaSpec::gumbel(1.5), Variant::C2, CopulaSpec::gaussian(0.4));
  const ScenarioSet a = simulate(bundle, 20, 123);
  const ScenarioSet b = simulate(bundle, 20, 123);
  CHECK(a.values == b.values);

  const ScenarioSet c = simulate(bundle, 20, 124);
  CHECK(a.values != c.values);

  // Scenario k depends on (seed, k) only, so a shorter run is a prefix.
  const ScenarioSet head = simulate(bundle, 5, 123);
  for (std::size_t k = 0; k < 5; ++k) {
    for (int d = 1; d <= 365; ++d) {
      for (int h = 0; h < 24; ++h) {
        CHECK(head.at(k, d, h) == a.at(k, d, h));
      }
    }
  }
}

TEST_CASE("independent noon copula makes the variants coincide") {
  const auto c2 = flat_bundle(CopulaSpec::gumbel(1.8), Variant::C2,
                              CopulaSpec::independence());
  const auto c1 = flat_bundle(CopulaSpec::gumbel(1.8), Variant::C1);
  const ScenarioSet a = simulate(c2, 10, 55);
  const ScenarioSet b = simulate(c1, 10, 55);
  CHECK(a.values == b.values);
}

TEST_CASE("historical simulation draws from the learn sample") {
  SynthSpec spec;
  spec.years = 3;
  const HourlyPanel learn = synth_panel(spec);

  SUBCASE("support") {
    const ScenarioSet set = benchmark_hs(learn, 50, 7);
    for (std::size_t k = 0; k < set.m; ++k) {
      for (int d = 1; d <= 365; d += 17) {
        for (int h = 0; h < 24; h += 3) {
          const double v = set.at(k, d, h);
          bool found = false;
          for (int i = 0; i < learn.n_years(); ++i) {
            if (learn.ghi(i, d, h) == v) found = true;
          }
          CHECK(found);
        }
      }
    }
  }
  SUBCASE("single learn year reproduces itself") {
    const HourlyPanel one = learn.select_years({1});
    const ScenarioSet set = benchmark_hs(one, 3, 9);
    for (std::size_t k = 0; k < 3; ++k) {
      for (int d = 1; d <= 365; d += 11) {
        for (int h = 0; h < 24; ++h) {
          CHECK(set.at(k, d, h) == one.ghi(0, d, h));
        }
      }
    }
  }
  SUBCASE("year choice is close to uniform") {
    const ScenarioSet set = benchmark_hs(learn, 9999, 21);
    std::size_t counts[3] = {0, 0, 0};
    for (std::size_t k = 0; k < set.m; ++k) {
      const double v = set.at(k, 172, 12);
      for (int i = 0; i < 3; ++i) {
        if (learn.ghi(i, 172, 12) == v) {
          ++counts[static_cast<std::size_t>(i)];
          break;
        }
      }
    }
    const double expect = 9999.0 / 3.0;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double diff = static_cast<double>(counts[i]) - expect;
      chi2 += diff * diff / expect;
    }
    CHECK(chi2 < 13.8);  // chi-square 2 dof, p = 0.001
  }
}

TEST_CASE("deterministic allocation follows the ceiling profile") {
  const auto bundle = flat_bundle(CopulaSpec::independence(), Variant::C1);

  SUBCASE("flat ceiling splits a total equally") {
    std::vector<std::vector<double>> totals(2, std::vector<double>(365, 3600.0));
    const ScenarioSet set = benchmark_da(totals, bundle.bounds);
    for (int d = 1; d <= 365; d += 50) {
      for (int h = 8; h <= 16; ++h) {
        CHECK(set.at(0, d, h) == doctest::Approx(400.0).epsilon(1e-9));
      }
      CHECK(set.at(0, d, 3) == 0.0);
    }
    // The allocation conserves the daily total.
    double s = 0.0;
    for (int h = 0; h < 24; ++h) s += set.at(1, 100, h);
    CHECK(s == doctest::Approx(3600.0).epsilon(1e-9));
  }
  SUBCASE("totals above the envelope are rejected") {
    std::vector<std::vector<double>> totals(1,
                                            std::vector<double>(365, 7300.0));
    CHECK_THROWS_AS(benchmark_da(totals, bundle.bounds), TotalExceedsEnvelope);
  }
}

TEST_CASE("daily sums aggregate the hourly grid") {
  const auto bundle = flat_bundle(CopulaSpec::independence(), Variant::C1);
  const ScenarioSet set = simulate(bundle, 3, 77);
  const auto sums = daily_sums(set);
  REQUIRE(sums.size() == 3);
  REQUIRE(sums[0].size() == 365);
  double s = 0.0;
  for (int h = 0; h < 24; ++h) s += set.at(2, 123, h);
  CHECK(sums[2][122] == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("copula estimation recovers the synthetic chain") {
  SynthSpec spec;
  spec.years = 7;
  const HourlyPanel panel = synth_panel(spec);
  BoundsModel bounds = fit_upper_bound(panel);
  fit_lower_bound(panel, bounds);
  const IntensityGrid grid = intensity(panel, bounds);
  const MarginalModel marginals = fit_marginals(panel, bounds, grid);

  const auto chain = fit_intraday_copulas(panel, bounds, marginals, grid,
                                          CopulaFamily::Gumbel);
  REQUIRE(chain.count(12) == 1);
  // Midday pairs carry the full theta = 2 dependence.
  CHECK(chain.at(12).theta == doctest::Approx(2.0).epsilon(0.15));
  CHECK(chain.at(11).theta == doctest::Approx(2.0).epsilon(0.15));

  const CopulaSpec noon = fit_noon_copula(panel, bounds, marginals, grid,
                                          CopulaFamily::Gumbel);
  CHECK(noon.theta == doctest::Approx(spec.noon_theta).epsilon(0.15));
}

TEST_SUITE_END();
