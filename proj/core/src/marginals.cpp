#include "ghisim/marginals.hpp"

#include <algorithm>
#include <cmath>

#include "ghisim/errors.hpp"
#include "ghisim/math_utils.hpp"

namespace ghisim {

namespace {

constexpr double kClip = 1e-6;

}  // namespace

double BetaParams::log_density(double x) const {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("beta density argument");
  const double a = alpha();
  const double b = beta();
  return std::lgamma(phi) - std::lgamma(a) - std::lgamma(b) +
         (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x);
}

double BetaParams::cdf(double x) const {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("beta cdf argument");
  return math::reg_inc_beta(x, alpha(), beta());
}

double BetaParams::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("beta quantile level");
  return math::reg_inc_beta_inv(p, alpha(), beta());
}

IntensityGrid intensity(const HourlyPanel& panel, const BoundsModel& bounds) {
  IntensityGrid grid;
  grid.m.assign(panel.size(), 0.0);
  grid.valid.assign(panel.size(), 0);
  for (int i = 0; i < panel.n_years(); ++i) {
    for (int d = 1; d <= 365; ++d) {
      for (int h = 0; h < 24; ++h) {
        if (!bounds.is_daylight(d, h)) continue;
        const auto [gl, gp] = bounds_eval(bounds, d, h);
        if (!(gp > gl)) continue;
        double m = (panel.ghi(i, d, h) - gl) / (gp - gl);
        if (m <= kClip) {
          if (m < kClip) ++grid.clipped_low;
          m = kClip;
        } else if (m >= 1.0 - kClip) {
          if (m > 1.0 - kClip) ++grid.clipped_high;
          m = 1.0 - kClip;
        }
        const std::size_t k = HourlyPanel::index(i, d, h);
        grid.m[k] = m;
        grid.valid[k] = 1;
      }
    }
  }
  return grid;
}

BetaRegCoeffs fit_beta_regression(std::span<const double> intensities,
                                  std::span<const double> lambda_values,
                                  int max_iter) {
  const std::size_t n = intensities.size();
  if (n < 100) throw TooFewObservations("beta regression needs >= 100");
  std::size_t at_boundary = 0;
  for (double m : intensities) {
    if (m <= kClip || m >= 1.0 - kClip) ++at_boundary;
  }
  if (at_boundary * 20 >= n) {
    throw BoundaryMass(std::to_string(at_boundary) + " of " +
                       std::to_string(n) + " observations clipped");
  }

  // Moment-matched constant start.
  const double mbar = math::mean(intensities);
  const double mvar = std::max(math::variance(intensities), 1e-8);
  const double phi0 =
      std::max(mbar * (1.0 - mbar) / mvar - 1.0, 0.1);

  std::vector<double> lnm(n), ln1m(n);
  for (std::size_t i = 0; i < n; ++i) {
    lnm[i] = std::log(intensities[i]);
    ln1m[i] = std::log1p(-intensities[i]);
  }

  // Standardize the covariate for the optimizer; the returned coefficients
  // are mapped back to the raw scale below.
  const double lam_c = math::mean(lambda_values);
  double lam_s = std::sqrt(std::max(math::variance(lambda_values), 0.0));
  if (!(lam_s > 0.0)) lam_s = 1.0;
  std::vector<double> lam_std(n);
  for (std::size_t i = 0; i < n; ++i) {
    lam_std[i] = (lambda_values[i] - lam_c) / lam_s;
  }

  auto negll = [&](std::span<const double> par) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lam = lam_std[i];
      const double mu = math::logistic(par[0] + par[1] * lam);
      const double phi = std::exp(par[2] + par[3] * lam);
      if (!(phi > 0.0) || !std::isfinite(phi) || phi > 1e8) return 1e18;
      const double a = mu * phi;
      const double b = (1.0 - mu) * phi;
      ll += std::lgamma(phi) - std::lgamma(a) - std::lgamma(b) +
            (a - 1.0) * lnm[i] + (b - 1.0) * ln1m[i];
    }
    return std::isfinite(ll) ? -ll : 1e18;
  };
  auto grad = [&](std::span<const double> par) {
    std::vector<double> g(4, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double lam = lam_std[i];
      const double mu = math::logistic(par[0] + par[1] * lam);
      const double phi = std::exp(par[2] + par[3] * lam);
      const double a = mu * phi;
      const double b = (1.0 - mu) * phi;
      const double dmu =
          phi * (-math::digamma(a) + math::digamma(b) + lnm[i] - ln1m[i]);
      const double dphi = math::digamma(phi) - mu * math::digamma(a) -
                          (1.0 - mu) * math::digamma(b) + mu * lnm[i] +
                          (1.0 - mu) * ln1m[i];
      const double dmu_deta = mu * (1.0 - mu);
      g[0] -= dmu * dmu_deta;
      g[1] -= dmu * dmu_deta * lam;
      g[2] -= dphi * phi;
      g[3] -= dphi * phi * lam;
    }
    return g;
  };

  const double start[4] = {math::logit(std::clamp(mbar, 1e-3, 1.0 - 1e-3)),
                           0.0, std::log(phi0), 0.0};
  // The likelihood and its gradient grow with n, so the gradient tolerance
  // must scale with the sample size to stay attainable.
  const double gtol = 1e-6 * static_cast<double>(n);
  auto res = math::bfgs(negll, grad, start, max_iter, gtol);
  if (!std::isfinite(res.fval) || res.fval >= 1e17) {
    throw NonConvergence("beta regression likelihood");
  }
  // The linked fit must not fall below the constant moment-matched start.
  if (res.fval > negll(start) + 1e-6) {
    throw NonConvergence("beta regression did not improve on the start");
  }
  // Map back to the raw-covariate parametrization.
  const double z2 = res.x[1] / lam_s;
  const double t2 = res.x[3] / lam_s;
  return {res.x[0] - z2 * lam_c, z2, res.x[2] - t2 * lam_c, t2};
}

BetaParams MarginalModel::params_at(int d, int h) const {
  const auto itc = coeffs.find(h);
  const auto itl = lambda.find(h);
  if (itc == coeffs.end() || itl == lambda.end()) {
    throw DomainError("no marginal model for hour " + std::to_string(h));
  }
  const double lam = fourier_eval(itl->second, d);
  BetaParams p;
  p.mu = math::logistic(itc->second.zeta1 + itc->second.zeta2 * lam);
  p.phi = std::exp(itc->second.theta1 + itc->second.theta2 * lam);
  return p;
}

MarginalModel fit_marginals(const HourlyPanel& panel, const BoundsModel& bounds,
                            const IntensityGrid& grid) {
  MarginalModel model;
  model.lambda = bounds.lambda;
  for (const auto& [h, lam] : bounds.lambda) {
    std::vector<double> ms, lams;
    for (int i = 0; i < panel.n_years(); ++i) {
      for (int d = 1; d <= 365; ++d) {
        if (!grid.is_valid(i, d, h)) continue;
        ms.push_back(grid.at(i, d, h));
        lams.push_back(fourier_eval(lam, d));
      }
    }
    if (ms.size() < 100) continue;
    model.coeffs[h] = fit_beta_regression(ms, lams);
  }
  return model;
}

double pit(const MarginalModel& model, double m, int d, int h) {
  if (!(m > 0.0 && m < 1.0)) throw DomainError("pit argument at boundary");
  return model.params_at(d, h).cdf(m);
}

double pit_inverse(const MarginalModel& model, double u, int d, int h) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("pit_inverse level at boundary");
  return model.params_at(d, h).quantile(u);
}

}  // namespace ghisim
