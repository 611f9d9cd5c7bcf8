#include "ghisim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ghisim/errors.hpp"
#include "ghisim/math_utils.hpp"

namespace ghisim {

double GpdFit::endpoint() const {
  if (xi >= 0.0) {
    throw PositiveShapeEndpointRequested("shape is " + std::to_string(xi));
  }
  return -sigma / xi;
}

double gpd_loglik(const GpdFit& fit, std::span<const double> excesses) {
  double ll = 0.0;
  for (double z : excesses) {
    const double arg = 1.0 + fit.xi * z / fit.sigma;
    if (arg <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += -std::log(fit.sigma) - (1.0 + 1.0 / fit.xi) * std::log(arg);
  }
  return ll;
}

GpdFit fit_gpd(std::span<const double> excesses, std::size_t min_count) {
  if (excesses.size() < min_count) {
    throw TooFewExceedances(std::to_string(excesses.size()) + " < " +
                            std::to_string(min_count));
  }
  for (double z : excesses) {
    if (!(z > 0.0)) throw DomainError("excesses must be strictly positive");
  }
  const double m = math::mean(excesses);
  const double v = math::variance(excesses);
  if (!(v > 1e-12 * m * m)) {
    throw NonConvergence("degenerate excess sample (zero spread)");
  }
  // Method-of-moments start.
  double xi0 = 0.5 * (1.0 - m * m / v);
  xi0 = std::clamp(xi0, -0.95, 0.45);
  double sigma0 = m * (1.0 - xi0);

  const double zmax = *std::max_element(excesses.begin(), excesses.end());
  auto negll = [&](std::span<const double> par) {
    const double sigma = std::exp(par[0]);
    const double xi = par[1];
    if (xi < -5.0 || xi > 5.0) return 1e18;
    // Support constraint: for negative shape all data must sit below the
    // endpoint sigma/(-xi).
    if (xi < 0.0 && zmax * (-xi) >= sigma) return 1e18;
    double ll = 0.0;
    for (double z : excesses) {
      if (std::abs(xi) < 1e-9) {
        ll += -par[0] - z / sigma;
      } else {
        const double arg = 1.0 + xi * z / sigma;
        if (arg <= 0.0) return 1e18;
        ll += -par[0] - (1.0 + 1.0 / xi) * std::log(arg);
      }
    }
    return -ll;
  };

  const double start[2] = {std::log(sigma0), xi0};
  auto res = math::nelder_mead(negll, start, 0.2, 4000, 1e-12);
  if (!res.converged) throw NonConvergence("GPD maximum likelihood");
  GpdFit fit;
  fit.sigma = std::exp(res.x[0]);
  fit.xi = res.x[1];
  fit.n_exceed = excesses.size();
  return fit;
}

std::vector<double> historical_extrema(const HourlyPanel& panel,
                                       ExtremaKind kind) {
  if (panel.n_years() < 2) throw IncompleteYears("need >= 2 whole years");
  std::vector<double> grid(365 * 24);
  for (int d = 1; d <= 365; ++d) {
    for (int h = 0; h < 24; ++h) {
      double v = panel.ghi(0, d, h);
      for (int i = 1; i < panel.n_years(); ++i) {
        const double g = panel.ghi(i, d, h);
        v = (kind == ExtremaKind::Max) ? std::max(v, g) : std::min(v, g);
      }
      grid[static_cast<std::size_t>(d - 1) * 24 + static_cast<std::size_t>(h)] = v;
    }
  }
  return grid;
}

std::vector<MeanExcessRow> mean_excess_curve(
    std::span<const double> values, std::span<const double> thresholds) {
  std::vector<MeanExcessRow> rows;
  rows.reserve(thresholds.size());
  for (double u : thresholds) {
    MeanExcessRow row;
    row.threshold = u;
    double sum = 0.0;
    for (double x : values) {
      if (x > u) {
        sum += x - u;
        ++row.count;
      }
    }
    if (row.count == 0) {
      row.empty = true;
    } else {
      row.mean_excess = sum / static_cast<double>(row.count);
    }
    rows.push_back(row);
  }
  return rows;
}

double BoundsModel::lambda_at(int d, int h) const {
  const auto it = lambda.find(h);
  if (it == lambda.end()) return 0.0;
  return fourier_eval(it->second, d);
}

bool BoundsModel::is_daylight(int d, int h) const {
  return lambda_at(d, h) > config.daylight_threshold;
}

int BoundsModel::first_daylight_hour(int d) const {
  for (int h = 0; h < 24; ++h) {
    if (is_daylight(d, h)) return h;
  }
  return -1;
}

int BoundsModel::last_daylight_hour(int d) const {
  for (int h = 23; h >= 0; --h) {
    if (is_daylight(d, h)) return h;
  }
  return -1;
}

namespace {

std::size_t grid_index(int d, int h) {
  return static_cast<std::size_t>(d - 1) * 24 + static_cast<std::size_t>(h);
}

}  // namespace

BoundsModel fit_upper_bound(const HourlyPanel& panel,
                            const BoundsConfig& config) {
  BoundsModel model;
  model.config = config;

  // Seasonal mean per hour and the provider TOA grid.
  std::vector<double> days(static_cast<std::size_t>(panel.n_years()) * 365);
  std::vector<double> resp(days.size());
  model.toa_grid.assign(365 * 24, 0.0);
  for (int h = 0; h < 24; ++h) {
    std::size_t k = 0;
    for (int i = 0; i < panel.n_years(); ++i) {
      for (int d = 1; d <= 365; ++d, ++k) {
        days[k] = d;
        resp[k] = panel.ghi(i, d, h);
      }
    }
    const FourierModel lam = fit_ols(days, resp, {}, 2, 2);
    double peak = 0.0;
    for (int d = 1; d <= 365; ++d) {
      peak = std::max(peak, fourier_eval(lam, d));
      double t = 0.0;
      for (int i = 0; i < panel.n_years(); ++i) t += panel.toa(i, d, h);
      model.toa_grid[grid_index(d, h)] = t / panel.n_years();
    }
    if (peak > config.daylight_threshold) model.lambda[h] = lam;
  }

  const std::vector<double> gmax = historical_extrema(panel, ExtremaKind::Max);

  // Quantile curve of the historical maxima per modeled hour, TOA exogenous.
  std::vector<double> exc_hours, exc_values;
  for (const auto& [h, lam] : model.lambda) {
    std::vector<double> dsel, ysel, xsel;
    for (int d = 1; d <= 365; ++d) {
      if (!model.is_daylight(d, h)) continue;
      dsel.push_back(d);
      ysel.push_back(gmax[grid_index(d, h)]);
      xsel.push_back(model.toa_grid[grid_index(d, h)]);
    }
    if (static_cast<int>(dsel.size()) < config.min_days_per_hour) continue;
    QuantileFit fit = fit_quantile(dsel, ysel, xsel, 2, 2, config.tau);
    for (std::size_t k = 0; k < dsel.size(); ++k) {
      const double u = fit.residuals[k];
      if (u > 0.0) {
        exc_hours.push_back(static_cast<double>(h));
        exc_values.push_back(u);
      }
    }
    model.upper_fits[h] = std::move(fit);
  }
  // Hours whose quantile curve could not be fitted fall back to night.
  for (auto it = model.lambda.begin(); it != model.lambda.end();) {
    if (!model.upper_fits.count(it->first)) {
      it = model.lambda.erase(it);
    } else {
      ++it;
    }
  }

  if (exc_values.size() < config.min_exceedances) {
    throw TooFewExceedances("upper-bound excesses: " +
                            std::to_string(exc_values.size()));
  }
  model.excess_seasonality = fit_ols(exc_hours, exc_values, {}, 2, 2, 24.0);
  bool positive = true;
  for (const double h : exc_hours) {
    if (!(fourier_eval(model.excess_seasonality, h) > 0.0)) {
      positive = false;
      break;
    }
  }
  if (!positive) {
    // With few exceedances per hour the harmonic fit can dip below zero at
    // edge hours; fall back to a flat profile, which is positive because
    // every excess is.
    double mean = 0.0;
    for (const double v : exc_values) mean += v;
    mean /= static_cast<double>(exc_values.size());
    model.excess_seasonality = FourierModel{};
    model.excess_seasonality.period = 24.0;
    model.excess_seasonality.coeffs = {mean};
  }
  std::vector<double> deseason(exc_values.size());
  for (std::size_t k = 0; k < exc_values.size(); ++k) {
    const double eh = fourier_eval(model.excess_seasonality, exc_hours[k]);
    if (!(eh > 0.0)) {
      throw NonConvergence("non-positive hourly excess seasonality");
    }
    deseason[k] = exc_values[k] / eh;
  }
  model.upper_gpd = fit_gpd(deseason, config.min_exceedances);
  if (model.upper_gpd.xi >= 0.0) {
    throw ShapeNotNegative("upper GPD shape " +
                           std::to_string(model.upper_gpd.xi));
  }
  return model;
}

double upper_bound_at(const BoundsModel& model, int d, int h) {
  const auto it = model.upper_fits.find(h);
  if (it == model.upper_fits.end() || !model.is_daylight(d, h)) return 0.0;
  const double quant =
      fourier_eval(it->second.model, d, model.toa_at(d, h));
  const double eh = fourier_eval(model.excess_seasonality, h);
  // Physical ceiling: irradiation can never exceed its extraterrestrial value.
  return std::min(quant + eh * model.upper_gpd.endpoint(), model.toa_at(d, h));
}

void fit_lower_bound(const HourlyPanel& panel, BoundsModel& model) {
  const std::vector<double> gmin = historical_extrema(panel, ExtremaKind::Min);

  std::vector<double> excesses;
  for (const auto& [h, lam] : model.lambda) {
    std::vector<double> dsel, csel;
    for (int d = 1; d <= 365; ++d) {
      const int h1 = model.first_daylight_hour(d);
      const int h2 = model.last_daylight_hour(d);
      if (h <= h1 || h >= h2) continue;  // sunrise/sunset hours are pinned at 0
      const double gp = upper_bound_at(model, d, h);
      const double gm = gmin[grid_index(d, h)];
      if (!(gm < gp)) throw LogitDomain("minimum above the upper bound");
      const double ratio = (gp - gm) / gp;
      if (!(ratio > 0.0 && ratio < 1.0)) {
        throw LogitDomain("cloud deviation ratio outside (0,1) at d=" +
                          std::to_string(d) + " h=" + std::to_string(h));
      }
      dsel.push_back(d);
      csel.push_back(math::logit(ratio));
    }
    if (static_cast<int>(dsel.size()) < model.config.min_days_per_hour) continue;
    QuantileFit fit = fit_quantile(dsel, csel, {}, 2, 2, model.config.tau);
    for (double r : fit.residuals) {
      if (r > 0.0) excesses.push_back(r);
    }
    model.lower_fits[h] = std::move(fit);
  }
  if (excesses.size() < model.config.min_exceedances) {
    throw TooFewExceedances("lower-bound excesses: " +
                            std::to_string(excesses.size()));
  }
  model.lower_gpd = fit_gpd(excesses, model.config.min_exceedances);
  if (model.lower_gpd.xi >= 0.0) {
    throw ShapeNotNegative("lower GPD shape " +
                           std::to_string(model.lower_gpd.xi));
  }
  model.lower_fitted = true;
}

std::pair<double, double> bounds_eval(const BoundsModel& model, int d, int h) {
  if (!model.is_daylight(d, h)) return {0.0, 0.0};
  const double gp = upper_bound_at(model, d, h);
  const int h1 = model.first_daylight_hour(d);
  const int h2 = model.last_daylight_hour(d);
  double gl = 0.0;
  if (model.lower_fitted && h > h1 && h < h2) {
    const auto it = model.lower_fits.find(h);
    if (it != model.lower_fits.end()) {
      const double c = fourier_eval(it->second.model, d);
      gl = gp * (1.0 - math::logistic(c + model.lower_gpd.endpoint()));
      gl = std::max(gl, 0.0);
    }
  }
  return {gl, gp};
}

}  // namespace ghisim
