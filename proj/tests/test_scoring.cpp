#include <doctest.h>

#include <cmath>
#include <vector>

#include "ghisim/errors.hpp"
#include "ghisim/math_utils.hpp"
#include "ghisim/scoring.hpp"
#include "ghisim/synth.hpp"

using namespace ghisim;

TEST_SUITE_BEGIN("scoring");

namespace {

std::vector<double> uniform_sample(std::size_t n, std::uint64_t seed) {
  math::CounterRng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.uniform();
  return x;
}

}  // namespace

TEST_CASE("quantile estimators") {
  const std::vector<double> x{4.0, 1.0, 3.0, 2.0};
  // Type-7: quantile(0.5) of {1,2,3,4} interpolates to 2.5.
  CHECK(empirical_quantile(x, 0.5) == doctest::Approx(2.5));
  CHECK(empirical_quantile(x, 0.0) == doctest::Approx(1.0));
  CHECK(empirical_quantile(x, 1.0) == doctest::Approx(4.0));
  CHECK(empirical_quantile(x, 1.0 / 3.0) == doctest::Approx(2.0));
  const std::vector<double> sorted{1.0, 2.0, 3.0, 4.0};
  for (double t : {0.1, 0.37, 0.9}) {
    CHECK(sorted_quantile(sorted, t) == doctest::Approx(empirical_quantile(x, t)));
  }
}

TEST_CASE("degenerate ensemble crps is the absolute error") {
  const auto grid = default_tau_grid();
  const std::vector<double> ens(50, 2.0);
  for (double y : {-1.0, 1.7, 2.0, 5.5}) {
    const double got = crps(ens, y, grid);
    CHECK(std::abs(got - std::abs(y - 2.0)) <=
          0.005 * std::max(1.0, std::abs(y - 2.0)));
  }
}

TEST_CASE("observation inside the ensemble scores low") {
  const auto grid = default_tau_grid();
  const auto ens = uniform_sample(10000, 3);
  CHECK(crps(ens, 0.5, grid) < crps(ens, 2.0, grid));
}

TEST_CASE("uniform forecast of its median scores one twelfth") {
  const auto grid = default_tau_grid();
  const auto ens = uniform_sample(100000, 5);
  CHECK(std::abs(crps(ens, 0.5, grid) - 1.0 / 12.0) < 0.002);
}

TEST_CASE("weight functions") {
  const auto grid = default_tau_grid();
  const auto ens = uniform_sample(5000, 7);
  for (double y : {0.1, 0.5, 0.9}) {
    const double base = crps(ens, y, grid);
    // Constant weight one is exactly the unweighted rule.
    CHECK(crps(ens, y, grid, CrpsWeight::None) == base);
    // Tail weights integrate over sub-intervals, so they are dominated.
    const double v2 = crps(ens, y, grid, CrpsWeight::V2);
    const double v3 = crps(ens, y, grid, CrpsWeight::V3);
    CHECK(v2 < base);
    CHECK(v3 < base);
    CHECK(v2 + v3 <= base + 1e-12);
    // Centre-penalizing weight against a direct grid sum.
    double oracle = 0.0;
    for (double t : grid) {
      const double q = empirical_quantile(ens, t);
      const double pb =
          y < q ? (1.0 - t) * (q - y) : t * (y - q);
      const double w = (2.0 * t - 1.0) * (2.0 * t - 1.0);
      oracle += w * pb;
    }
    oracle *= 2.0 / 1000.0;
    CHECK(crps(ens, y, grid, CrpsWeight::V1) ==
          doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("energy score identities") {
  SUBCASE("all members equal the observation") {
    EnsembleForecast f;
    f.dim = 3;
    f.members.assign(40, {1.0, 2.0, 3.0});
    const std::vector<double> x{1.0, 2.0, 3.0};
    CHECK(energy_score(f, x) == doctest::Approx(0.0));
  }
  SUBCASE("single member is the euclidean distance") {
    EnsembleForecast f;
    f.dim = 2;
    f.members = {{0.0, 0.0}};
    const std::vector<double> x{3.0, 4.0};
    CHECK(energy_score(f, x) == doctest::Approx(5.0));
  }
  SUBCASE("one dimensional energy score approaches crps") {
    const auto ens = uniform_sample(10000, 9);
    EnsembleForecast f;
    f.dim = 1;
    for (double v : ens) f.members.push_back({v});
    const double es = energy_score(f, std::vector<double>{0.3});
    const double c = crps(ens, 0.3, default_tau_grid());
    CHECK(std::abs(es - c) / c < 0.01);
  }
}

TEST_CASE("variogram score identities") {
  const std::vector<std::vector<double>> w(3, std::vector<double>(3, 1.0));
  SUBCASE("perfect single member") {
    EnsembleForecast f;
    f.dim = 3;
    f.members = {{1.0, 4.0, 9.0}};
    const std::vector<double> x{1.0, 4.0, 9.0};
    CHECK(variogram_score(f, x, w) == doctest::Approx(0.0));
  }
  SUBCASE("hand expanded two member case") {
    EnsembleForecast f;
    f.dim = 3;
    f.members = {{0.0, 1.0, 3.0}, {2.0, 1.0, 0.0}};
    const std::vector<double> x{1.0, 2.0, 4.0};
    double expect = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double obs = std::abs(x[static_cast<std::size_t>(i)] -
                                    x[static_cast<std::size_t>(j)]);
        double mean_v = 0.0;
        for (const auto& mem : f.members) {
          mean_v += std::abs(mem[static_cast<std::size_t>(i)] -
                             mem[static_cast<std::size_t>(j)]);
        }
        mean_v /= 2.0;
        expect += (obs - mean_v) * (obs - mean_v);
      }
    }
    CHECK(variogram_score(f, x, w) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("detects dependence errors with identical margins") {
    // Observation path strongly positively dependent; forecast A matches,
    // forecast B scrambles the dependence with the same margins.
    math::CounterRng rng(11);
    EnsembleForecast good, bad;
    good.dim = bad.dim = 2;
    for (int k = 0; k < 400; ++k) {
      const double z = rng.normal();
      good.members.push_back({z, z + 0.1 * rng.normal()});
      bad.members.push_back({z, rng.normal()});
    }
    const std::vector<std::vector<double>> w2(2, std::vector<double>(2, 1.0));
    double sg = 0.0, sb = 0.0;
    for (int t = 0; t < 200; ++t) {
      const double z = rng.normal();
      const std::vector<double> x{z, z + 0.1 * rng.normal()};
      sg += variogram_score(good, x, w2);
      sb += variogram_score(bad, x, w2);
    }
    CHECK(sg < sb);
  }
}

TEST_CASE("midday functional gates on the envelope fraction") {
  BoundsModel bounds;
  bounds.toa_grid.assign(365 * 24, 1000.0);
  FourierModel lam;
  lam.coeffs = {500.0};
  QuantileFit qf;
  qf.model.coeffs = {1000.0};
  for (int h = 8; h <= 16; ++h) {
    bounds.lambda[h] = lam;
    bounds.upper_fits[h] = qf;
  }
  bounds.excess_seasonality.period = 24.0;
  bounds.excess_seasonality.coeffs = {0.0};
  bounds.upper_gpd = GpdFit{0.5, -0.5, 100};

  std::vector<double> day(24, 0.0);
  for (int h = 10; h <= 15; ++h) day[static_cast<std::size_t>(h)] = 900.0;
  // All gate hours above 0.8 * 1000: kappa1 = 6 * 900 = 5400.
  CHECK(functional_kappa1(day, bounds, 180) == doctest::Approx(5400.0));
  // One hour exactly at the threshold fails the strict gate.
  day[12] = 800.0;
  CHECK(functional_kappa1(day, bounds, 180) == doctest::Approx(0.0));
  day[12] = 800.0000001;
  CHECK(functional_kappa1(day, bounds, 180) > 0.0);
}

TEST_CASE("weekly functional is a plain sum") {
  std::vector<double> week(7 * 24, 0.0);
  for (int i = 0; i < 7; ++i) week[static_cast<std::size_t>(i * 24 + 12)] = 800.0;
  CHECK(functional_kappa2(week) == doctest::Approx(5600.0));
}

TEST_CASE("diebold mariano behaviour") {
  SUBCASE("identical series degenerate to no rejection") {
    std::vector<double> l(200, 1.0);
    const DmResult r = dm_test(l, l);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
  }
  SUBCASE("antisymmetry") {
    math::CounterRng rng(15);
    std::vector<double> a(300), b(300);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = 1.0 + 0.3 * rng.normal();
      b[i] = 1.1 + 0.3 * rng.normal();
    }
    const DmResult r1 = dm_test(a, b);
    const DmResult r2 = dm_test(b, a);
    CHECK(r1.statistic == doctest::Approx(-r2.statistic).epsilon(1e-12));
    CHECK(r1.p_value == doctest::Approx(r2.p_value).epsilon(1e-12));
  }
  SUBCASE("power against a clear loss gap") {
    int rejections = 0;
    for (int rep = 0; rep < 20; ++rep) {
      math::CounterRng rng(600 + static_cast<std::uint64_t>(rep));
      std::vector<double> a(365), b(365);
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double noise = rng.normal();
        a[i] = 1.0 + 0.5 * noise + 0.2 * rng.normal();
        b[i] = 1.5 + 0.5 * noise + 0.2 * rng.normal();
      }
      if (dm_test(a, b).p_value < 0.05) ++rejections;
    }
    CHECK(rejections >= 19);
  }
  SUBCASE("short series are rejected") {
    std::vector<double> s(10, 1.0);
    CHECK_THROWS_AS(dm_test(s, s), TooFewObservations);
  }
}

TEST_CASE("crps positive homogeneity") {
  const auto grid = default_tau_grid();
  const auto ens = uniform_sample(2000, 19);
  std::vector<double> scaled(ens);
  for (double& v : scaled) v *= 7.0;
  CHECK(crps(scaled, 7.0 * 0.4, grid) ==
        doctest::Approx(7.0 * crps(ens, 0.4, grid)).epsilon(1e-9));
}

TEST_CASE("crps propriety smoke check") {
  // Forecasting the true distribution beats a biased one on average.
  const auto grid = default_tau_grid();
  const auto truth_ens = uniform_sample(4000, 23);
  std::vector<double> biased(truth_ens);
  for (double& v : biased) v = 0.5 + 0.5 * v;
  math::CounterRng rng(29);
  double st = 0.0, sb = 0.0;
  for (int i = 0; i < 3000; ++i) {
    const double y = rng.uniform();
    st += crps(truth_ens, y, grid);
    sb += crps(biased, y, grid);
  }
  CHECK(st < sb);
}

TEST_CASE("evaluation report structure and normalization") {
  SynthSpec spec;
  spec.years = 4;
  const HourlyPanel panel = synth_panel(spec);
  const HourlyPanel learn = panel.select_years({0, 1});
  const HourlyPanel test = panel.select_years({2, 3});
  BoundsModel bounds = fit_upper_bound(learn);

  const ScenarioSet hs = benchmark_hs(learn, 60, 3);
  const ScenarioSet hs2 = benchmark_hs(learn, 60, 4);
  const std::map<std::string, const ScenarioSet*> models{{"HS", &hs},
                                                         {"ALT", &hs2}};
  const ScoreReport report = evaluate(models, test, bounds);

  REQUIRE(report.rules ==
          std::vector<std::string>{"CRPS-H", "CRPS-W", "ES", "VS", "CRPS-U"});
  for (const auto& rule : report.rules) {
    // The reference model normalizes to one by construction.
    CHECK(report.normalized.at("HS").at(rule) == doctest::Approx(1.0));
    CHECK(report.raw.at("ALT").at(rule) > 0.0);
    const auto& best = report.best_model.at(rule);
    CHECK(report.dm_vs_best.at(best).at(rule) == 1.0);
    for (const auto& name : report.models) {
      CHECK(report.dm_vs_best.at(name).at(rule) >= 0.0);
      CHECK(report.dm_vs_best.at(name).at(rule) <= 1.0);
      CHECK(report.normalized.at(name).at(rule) ==
            doctest::Approx(report.raw.at(name).at(rule) /
                            report.raw.at("HS").at(rule)));
    }
  }
  // Two fair draws from the same learn sample should score similarly.
  CHECK(report.normalized.at("ALT").at("CRPS-H") ==
        doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("loss computation input guards") {
  SynthSpec spec;
  spec.years = 2;
  const HourlyPanel panel = synth_panel(spec);
  BoundsModel bounds = fit_upper_bound(panel);
  ScenarioSet broken;
  broken.m = 2;
  broken.values.assign(100, 0.0);
  CHECK_THROWS_AS(compute_losses(broken, panel, bounds), HorizonMismatch);

  const ScenarioSet ok = benchmark_hs(panel, 5, 1);
  std::map<std::string, RuleLosses> losses;
  losses["ALT"] = compute_losses(ok, panel, bounds);
  CHECK_THROWS_AS(summarize(losses), ConfigError);
}

TEST_SUITE_END();
