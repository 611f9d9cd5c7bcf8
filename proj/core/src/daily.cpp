#include "ghisim/daily.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ghisim/errors.hpp"
#include "ghisim/math_utils.hpp"

namespace ghisim {

double SkewNormal::log_density(double x) const {
  const double z = (x - location) / scale;
  const double cdf = math::norm_cdf(shape * z);
  return std::log(2.0) - std::log(scale) +
         std::log(math::norm_pdf(z)) +
         std::log(std::max(cdf, 1e-300));
}

double DailyModel::link(double x, int d) const {
  if (regime == DailyRegime::M1) {
    if (!(x > 0.0)) throw LinkDomain("log link needs positive daily total");
    return std::log(x);
  }
  const double lo = lo_daily[static_cast<std::size_t>(d - 1)];
  const double hi = hi_daily[static_cast<std::size_t>(d - 1)];
  if (!(hi > lo)) throw LinkDomain("degenerate daily bounds");
  const double z = (x - lo) / (hi - lo);
  if (!(z > 0.0 && z < 1.0)) {
    throw LinkDomain("daily total outside (lo, hi) on day " +
                     std::to_string(d));
  }
  return math::logit(z);
}

double DailyModel::inverse_link(double y, int d) const {
  if (regime == DailyRegime::M1) return std::exp(y);
  const double lo = lo_daily[static_cast<std::size_t>(d - 1)];
  const double hi = hi_daily[static_cast<std::size_t>(d - 1)];
  return lo + math::logistic(y) * (hi - lo);
}

std::vector<double> panel_daily_totals(const HourlyPanel& panel) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(panel.n_years()) * 365);
  for (int i = 0; i < panel.n_years(); ++i) {
    for (int d = 1; d <= 365; ++d) {
      double s = 0.0;
      for (int h = 0; h < 24; ++h) s += panel.ghi(i, d, h);
      out.push_back(s);
    }
  }
  return out;
}

std::vector<double> daily_bound_series(const BoundsModel& bounds, bool upper) {
  std::vector<double> out(365, 0.0);
  for (int d = 1; d <= 365; ++d) {
    double s = 0.0;
    for (int h = 0; h < 24; ++h) {
      const auto [gl, gp] = bounds_eval(bounds, d, h);
      s += upper ? gp : gl;
    }
    out[static_cast<std::size_t>(d - 1)] = s;
  }
  return out;
}

std::vector<double> daily_toa_series(const BoundsModel& bounds) {
  std::vector<double> out(365, 0.0);
  for (int d = 1; d <= 365; ++d) {
    double s = 0.0;
    for (int h = 0; h < 24; ++h) s += bounds.toa_at(d, h);
    out[static_cast<std::size_t>(d - 1)] = s;
  }
  return out;
}

ArmaFit fit_arma11(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 30) throw TooFewObservations("ARMA fit needs >= 30 days");
  auto css = [&](std::span<const double> par) {
    const double phi = par[0];
    const double theta = par[1];
    if (std::abs(phi) >= 1.0 || std::abs(theta) >= 1.0) return 1e18;
    double prev_e = 0.0;
    double ss = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
      const double e = series[t] - phi * series[t - 1] - theta * prev_e;
      ss += e * e;
      prev_e = e;
    }
    return ss;
  };
  const double start[2] = {0.0, 0.0};
  auto res = math::nelder_mead(css, start, 0.1, 2000, 1e-12);
  const double phi = res.x[0];
  const double theta = res.x[1];
  if (std::abs(phi) >= 1.0 - 1e-9) {
    throw NonStationaryFit("AR coefficient at the unit circle");
  }
  if (std::abs(theta) >= 1.0 - 1e-9) {
    throw NonStationaryFit("MA coefficient at the unit circle");
  }
  ArmaFit fit;
  fit.phi1 = phi;
  fit.theta1 = theta;
  fit.innovations.reserve(n - 1);
  double prev_e = 0.0;
  for (std::size_t t = 1; t < n; ++t) {
    const double e = series[t] - phi * series[t - 1] - theta * prev_e;
    fit.innovations.push_back(e);
    prev_e = e;
  }
  return fit;
}

SkewNormal fit_skew_normal(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 30) throw TooFewObservations("skew-normal fit needs >= 30 values");
  const double m = math::mean(values);
  const double v = std::max(math::variance(values), 1e-12);
  const double sd = std::sqrt(v);
  double skew = 0.0;
  for (double x : values) {
    const double z = (x - m) / sd;
    skew += z * z * z;
  }
  skew /= static_cast<double>(n);

  // Method-of-moments start: invert the skewness-delta relation.
  const double g = std::min(std::abs(skew), 0.99);
  const double b = std::sqrt(2.0 / std::numbers::pi);
  const double t = std::pow(2.0 * g / (4.0 - std::numbers::pi), 1.0 / 3.0);
  double delta = t / (b * std::sqrt(1.0 + t * t));
  delta = std::clamp(delta, 0.0, 0.995) * (skew < 0.0 ? -1.0 : 1.0);
  double alpha0 = delta / std::sqrt(std::max(1.0 - delta * delta, 1e-6));
  alpha0 = std::clamp(alpha0, -20.0, 20.0);
  const double omega0 = sd / std::sqrt(std::max(1.0 - b * b * delta * delta,
                                                1e-3));
  const double xi0 = m - omega0 * b * delta;

  auto negll = [&](std::span<const double> par) {
    SkewNormal sn{par[0], std::exp(par[1]), par[2]};
    if (std::abs(sn.shape) > 20.0 || !(sn.scale > 0.0) ||
        !std::isfinite(sn.scale)) {
      return 1e18;
    }
    double ll = 0.0;
    for (double x : values) ll += sn.log_density(x);
    return std::isfinite(ll) ? -ll : 1e18;
  };
  const double start[3] = {xi0, std::log(omega0), alpha0};
  auto res = math::nelder_mead(negll, start, 0.1, 4000, 1e-10);
  if (!std::isfinite(res.fval) || res.fval >= 1e17) {
    throw NonConvergence("skew-normal likelihood");
  }
  return {res.x[0], std::exp(res.x[1]), std::clamp(res.x[2], -20.0, 20.0)};
}

double ljung_box_statistic(std::span<const double> values, int lags) {
  const std::size_t n = values.size();
  const double m = math::mean(values);
  double c0 = 0.0;
  for (double x : values) c0 += (x - m) * (x - m);
  double q = 0.0;
  for (int k = 1; k <= lags; ++k) {
    double ck = 0.0;
    for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) {
      ck += (values[t] - m) * (values[t - static_cast<std::size_t>(k)] - m);
    }
    const double rk = ck / c0;
    q += rk * rk / static_cast<double>(n - static_cast<std::size_t>(k));
  }
  return static_cast<double>(n) * (static_cast<double>(n) + 2.0) * q;
}

DailyModel fit_daily(const HourlyPanel& panel, DailyRegime regime,
                     const BoundsModel& bounds) {
  DailyModel model;
  model.regime = regime;
  switch (regime) {
    case DailyRegime::M1:
      model.lo_daily.assign(365, 0.0);
      model.hi_daily = daily_toa_series(bounds);
      break;
    case DailyRegime::M2:
      model.lo_daily.assign(365, 0.0);
      model.hi_daily = daily_toa_series(bounds);
      break;
    case DailyRegime::M3:
      model.lo_daily = daily_bound_series(bounds, false);
      model.hi_daily = daily_bound_series(bounds, true);
      break;
  }

  const auto totals = panel_daily_totals(panel);
  std::vector<double> d_values, y;
  d_values.reserve(totals.size());
  y.reserve(totals.size());
  for (std::size_t t = 0; t < totals.size(); ++t) {
    const int d = static_cast<int>(t % 365) + 1;
    d_values.push_back(static_cast<double>(t + 1));
    y.push_back(model.link(totals[t], d));
  }

  model.seasonal = fit_ols(d_values, y, {}, 2, 2, 365.25);
  std::vector<double> resid(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) {
    resid[t] = y[t] - fourier_eval(model.seasonal, d_values[t]);
  }
  auto arma = fit_arma11(resid);
  model.phi1 = arma.phi1;
  model.theta1 = arma.theta1;
  model.innovation = fit_skew_normal(arma.innovations);
  model.ljung_box_lags = 10;
  model.ljung_box = ljung_box_statistic(arma.innovations, 10);
  return model;
}

DailySim simulate_daily(const DailyModel& model, std::size_t years,
                        std::uint64_t seed) {
  DailySim sim;
  sim.ghi.assign(years, std::vector<double>(365, 0.0));
  const double delta =
      model.innovation.shape / std::sqrt(1.0 + model.innovation.shape *
                                                   model.innovation.shape);
  for (std::size_t yidx = 0; yidx < years; ++yidx) {
    math::CounterRng rng(seed, yidx + 1, 0);
    double prev_r = 0.0;
    double prev_e = 0.0;
    for (int d = 1; d <= 365; ++d) {
      const double z0 = rng.normal();
      const double z1 = rng.normal();
      const double e =
          model.innovation.location +
          model.innovation.scale *
              (delta * std::abs(z0) + std::sqrt(1.0 - delta * delta) * z1);
      const double r = model.phi1 * prev_r + e + model.theta1 * prev_e;
      prev_r = r;
      prev_e = e;
      const double t =
          static_cast<double>(yidx) * 365.0 + static_cast<double>(d);
      const double val =
          model.inverse_link(fourier_eval(model.seasonal, t) + r, d);
      sim.ghi[yidx][static_cast<std::size_t>(d - 1)] = val;
      if (!model.hi_daily.empty() &&
          val > model.hi_daily[static_cast<std::size_t>(d - 1)]) {
        ++sim.toa_exceedances;
      }
    }
  }
  return sim;
}

}  // namespace ghisim
