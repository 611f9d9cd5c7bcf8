#include <doctest.h>

#include <cmath>
#include <vector>

#include "ghisim/bounds.hpp"
#include "ghisim/errors.hpp"
#include "ghisim/marginals.hpp"
#include "ghisim/math_utils.hpp"
#include "ghisim/synth.hpp"

using namespace ghisim;

TEST_SUITE_BEGIN("marginals");

namespace {

std::vector<double> beta_sample(const BetaParams& p, std::size_t n,
                                std::uint64_t seed) {
  math::CounterRng rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = p.quantile(rng.uniform());
  return out;
}

// Flat daylight model: hours 10..14, ceiling 800, no floor.
BoundsModel flat_model() {
  BoundsModel model;
  model.toa_grid.assign(365 * 24, 1000.0);
  FourierModel lam;
  lam.coeffs = {500.0};
  QuantileFit qf;
  qf.model.coeffs = {800.0};
  for (int h = 10; h <= 14; ++h) {
    model.lambda[h] = lam;
    model.upper_fits[h] = qf;
  }
  model.excess_seasonality.period = 24.0;
  model.excess_seasonality.coeffs = {0.0};
  model.upper_gpd = GpdFit{0.5, -0.5, 100};
  return model;
}

}  // namespace

TEST_CASE("beta distribution primitives") {
  SUBCASE("uniform special case") {
    const BetaParams u{0.5, 2.0};  // alpha = beta = 1
    CHECK(u.cdf(0.37) == doctest::Approx(0.37).epsilon(1e-10));
    CHECK(u.quantile(0.8) == doctest::Approx(0.8).epsilon(1e-10));
    CHECK(std::exp(u.log_density(0.3)) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("cdf against midpoint quadrature") {
    const BetaParams p{0.3, 10.0};
    const double a = p.alpha(), b = p.beta();
    const std::size_t n = 200000;
    const double x = 0.4;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = x * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      s += std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0);
    }
    s *= x / static_cast<double>(n) *
         std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b));
    CHECK(p.cdf(x) == doctest::Approx(s).epsilon(1e-6));
  }
  SUBCASE("quantile round trip") {
    const BetaParams p{0.62, 4.5};
    for (double u = 0.01; u < 1.0; u += 0.044) {
      CHECK(std::abs(p.cdf(p.quantile(u)) - u) < 1e-8);
    }
  }
  SUBCASE("variance identity via monte carlo") {
    const BetaParams p{0.55, 6.0};
    const auto x = beta_sample(p, 200000, 5);
    CHECK(math::variance(x) == doctest::Approx(p.variance()).epsilon(0.05));
    CHECK(math::mean(x) == doctest::Approx(p.mu).epsilon(0.01));
  }
  SUBCASE("higher precision concentrates the distribution") {
    const BetaParams loose{0.4, 3.0};
    const BetaParams tight{0.4, 30.0};
    CHECK(tight.variance() < loose.variance());
  }
  SUBCASE("domain guards") {
    const BetaParams p{0.5, 2.0};
    CHECK_THROWS_AS(p.cdf(0.0), DomainError);
    CHECK_THROWS_AS(p.quantile(1.0), DomainError);
    CHECK_THROWS_AS(p.log_density(-0.1), DomainError);
  }
}

TEST_CASE("intensity transform and clipping") {
  const BoundsModel model = flat_model();
  HourlyPanel panel({50.0, 8.0, "t"}, 2001, 1);
  for (int d = 1; d <= 365; ++d) {
    for (int h = 0; h < 24; ++h) {
      const bool day = h >= 10 && h <= 14;
      panel.set(0, d, h, day ? 400.0 : 0.0, 1000.0);
    }
  }
  panel.set(0, 100, 12, 900.0, 1000.0);  // above the ceiling
  panel.set(0, 101, 12, 0.0, 1000.0);    // at the floor

  const IntensityGrid grid = intensity(panel, model);
  CHECK(grid.at(0, 50, 12) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(grid.is_valid(0, 50, 12));
  CHECK(!grid.is_valid(0, 50, 3));
  CHECK(grid.clipped_high == 1);
  CHECK(grid.clipped_low == 1);
  CHECK(grid.at(0, 100, 12) == doctest::Approx(1.0 - 1e-6));
  CHECK(grid.at(0, 101, 12) == doctest::Approx(1e-6));
}

TEST_CASE("beta regression recovers linked coefficients") {
  const BetaRegCoeffs truth{-0.5, 0.002, 1.0, 0.001};
  const std::size_t n = 2000;
  auto draw = [&](std::uint64_t seed) {
    math::CounterRng rng(seed);
    std::vector<double> lam(n), m(n);
    for (std::size_t i = 0; i < n; ++i) {
      lam[i] = 200.0 + 500.0 * rng.uniform();
      BetaParams p;
      p.mu = math::logistic(truth.zeta1 + truth.zeta2 * lam[i]);
      p.phi = std::exp(truth.theta1 + truth.theta2 * lam[i]);
      m[i] = p.quantile(rng.uniform());
    }
    return std::pair{m, lam};
  };

  // Standard errors from a one-off bootstrap of the first replication.
  auto [m0, lam0] = draw(1);
  std::vector<std::vector<double>> boot(4);
  math::CounterRng brng(999);
  for (int b = 0; b < 60; ++b) {
    std::vector<double> mb(n), lb(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = std::min<std::size_t>(
          static_cast<std::size_t>(brng.uniform() * n), n - 1);
      mb[i] = m0[j];
      lb[i] = lam0[j];
    }
    const BetaRegCoeffs c = fit_beta_regression(mb, lb);
    boot[0].push_back(c.zeta1);
    boot[1].push_back(c.zeta2);
    boot[2].push_back(c.theta1);
    boot[3].push_back(c.theta2);
  }
  double se[4];
  for (int k = 0; k < 4; ++k) se[k] = std::sqrt(math::variance(boot[k]));

  int inside = 0;
  for (int rep = 0; rep < 20; ++rep) {
    auto [m, lam] = draw(100 + static_cast<std::uint64_t>(rep));
    const BetaRegCoeffs c = fit_beta_regression(m, lam);
    const bool ok = std::abs(c.zeta1 - truth.zeta1) < 3.0 * se[0] &&
                    std::abs(c.zeta2 - truth.zeta2) < 3.0 * se[1] &&
                    std::abs(c.theta1 - truth.theta1) < 3.0 * se[2] &&
                    std::abs(c.theta2 - truth.theta2) < 3.0 * se[3];
    if (ok) ++inside;
  }
  CHECK(inside >= 17);
}

TEST_CASE("null covariate fits flat") {
  math::CounterRng rng(17);
  const std::size_t n = 3000;
  const BetaParams p{0.5, 5.0};
  std::vector<double> m(n), lam(n, 0.0);
  for (double& x : m) x = p.quantile(rng.uniform());
  const BetaRegCoeffs c = fit_beta_regression(m, lam);
  // logistic(zeta1) is the fitted mean at lambda = 0.
  CHECK(math::logistic(c.zeta1) == doctest::Approx(0.5).epsilon(0.04));
  CHECK(std::exp(c.theta1) == doctest::Approx(5.0).epsilon(0.15));
}

TEST_CASE("fitted coefficients are a local likelihood optimum") {
  math::CounterRng rng(23);
  const std::size_t n = 1500;
  std::vector<double> m(n), lam(n);
  const BetaParams p{0.6, 4.0};
  for (std::size_t i = 0; i < n; ++i) {
    lam[i] = rng.uniform();
    m[i] = p.quantile(rng.uniform());
  }
  const BetaRegCoeffs c = fit_beta_regression(m, lam);
  auto negll = [&](double z1, double z2, double t1, double t2) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      BetaParams q;
      q.mu = math::logistic(z1 + z2 * lam[i]);
      q.phi = std::exp(t1 + t2 * lam[i]);
      ll += q.log_density(m[i]);
    }
    return -ll;
  };
  const double base = negll(c.zeta1, c.zeta2, c.theta1, c.theta2);
  const double eps = 1e-3;
  for (int k = 0; k < 4; ++k) {
    for (double s : {-eps, eps}) {
      double par[4] = {c.zeta1, c.zeta2, c.theta1, c.theta2};
      par[k] += s;
      CHECK(negll(par[0], par[1], par[2], par[3]) > base - 1e-6);
    }
  }
}

TEST_CASE("regression input guards") {
  std::vector<double> small(50, 0.5), lam_small(50, 0.0);
  CHECK_THROWS_AS(fit_beta_regression(small, lam_small), TooFewObservations);

  math::CounterRng rng(29);
  std::vector<double> m(200), lam(200, 0.0);
  for (double& x : m) x = 0.2 + 0.6 * rng.uniform();
  for (int i = 0; i < 20; ++i) m[static_cast<std::size_t>(i)] = 1e-6;
  CHECK_THROWS_AS(fit_beta_regression(m, lam), BoundaryMass);
}

TEST_CASE("pit is the marginal cdf") {
  MarginalModel model;
  FourierModel zero;
  zero.coeffs = {0.0};
  model.lambda[12] = zero;
  model.coeffs[12] = BetaRegCoeffs{0.0, 0.0, std::log(2.0), 0.0};  // Beta(1,1)

  SUBCASE("uniform identity") {
    CHECK(pit(model, 0.42, 100, 12) == doctest::Approx(0.42).epsilon(1e-10));
  }
  SUBCASE("round trip") {
    model.coeffs[12] = BetaRegCoeffs{0.4, 0.0, std::log(7.0), 0.0};
    for (double u = 0.02; u < 1.0; u += 0.07) {
      CHECK(std::abs(pit(model, pit_inverse(model, u, 30, 12), 30, 12) - u) <
            1e-8);
    }
  }
  SUBCASE("pit of model samples is uniform") {
    model.coeffs[12] = BetaRegCoeffs{-0.3, 0.0, std::log(5.0), 0.0};
    const BetaParams p = model.params_at(200, 12);
    const auto x = beta_sample(p, 5000, 31);
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = pit(model, x[i], 200, 12);
    const double d = math::ks_statistic_uniform(u);
    CHECK(math::ks_pvalue(d, u.size()) > 0.01);
  }
  SUBCASE("boundary arguments rejected") {
    CHECK_THROWS_AS(pit(model, 0.0, 100, 12), DomainError);
    CHECK_THROWS_AS(pit_inverse(model, 1.0, 100, 12), DomainError);
    CHECK_THROWS_AS(pit(model, 0.5, 100, 3), DomainError);
  }
}

TEST_CASE("marginal fit on a synthetic panel") {
  SynthSpec spec;
  spec.years = 7;
  const HourlyPanel panel = synth_panel(spec);
  BoundsModel bounds = fit_upper_bound(panel);
  fit_lower_bound(panel, bounds);
  const IntensityGrid grid = intensity(panel, bounds);
  const MarginalModel model = fit_marginals(panel, bounds, grid);

  REQUIRE(model.coeffs.count(12) == 1);
  for (int d : {80, 172, 270}) {
    const BetaParams p = model.params_at(d, 12);
    CHECK(p.mu > 0.40);
    CHECK(p.mu < 0.70);
    CHECK(p.phi > 3.0);
    CHECK(p.phi < 12.0);
  }
  // Boundary mass must stay rare when the envelope fits well.
  CHECK(grid.clipped_low + grid.clipped_high <
        panel.size() / 100);
}

TEST_SUITE_END();
