#include "ghisim/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ghisim/errors.hpp"
#include "ghisim/math_utils.hpp"

namespace ghisim {

std::vector<double> default_tau_grid() {
  std::vector<double> grid;
  grid.reserve(999);
  for (int i = 1; i <= 999; ++i) grid.push_back(i / 1000.0);
  return grid;
}

double sorted_quantile(std::span<const double> sorted, double tau) {
  const std::size_t n = sorted.size();
  if (n == 0) throw DomainError("quantile of empty sample");
  if (n == 1) return sorted[0];
  const double pos = tau * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double empirical_quantile(std::span<const double> sample, double tau) {
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  return sorted_quantile(s, tau);
}

namespace {

double weight_value(CrpsWeight weight, double tau) {
  switch (weight) {
    case CrpsWeight::None: return 1.0;
    case CrpsWeight::V1: return (2.0 * tau - 1.0) * (2.0 * tau - 1.0);
    case CrpsWeight::V2: return tau <= 0.05 ? 1.0 : 0.0;
    case CrpsWeight::V3: return tau >= 0.95 ? 1.0 : 0.0;
  }
  return 1.0;
}

double crps_sorted(std::span<const double> sorted, double x,
                   std::span<const double> tau_grid, CrpsWeight weight) {
  double score = 0.0;
  const double step = 1.0 / static_cast<double>(tau_grid.size() + 1);
  for (double tau : tau_grid) {
    const double q = sorted_quantile(sorted, tau);
    const double ind = x < q ? 1.0 : 0.0;
    score += weight_value(weight, tau) * 2.0 * (ind - tau) * (q - x) * step;
  }
  return score;
}

}  // namespace

double crps(std::span<const double> ensemble, double x,
            std::span<const double> tau_grid, CrpsWeight weight) {
  std::vector<double> s(ensemble.begin(), ensemble.end());
  std::sort(s.begin(), s.end());
  return crps_sorted(s, x, tau_grid, weight);
}

double energy_score(const EnsembleForecast& forecast,
                    std::span<const double> x) {
  const std::size_t m = forecast.members.size();
  if (m == 0) throw DomainError("empty ensemble");
  const std::size_t n = x.size();
  auto dist = [n](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = a[i] - b[i];
      s += d * d;
    }
    return std::sqrt(s);
  };
  double first = 0.0;
  for (const auto& mem : forecast.members) {
    if (mem.size() != n) throw DimensionMismatch("energy score member");
    first += dist(mem, x);
  }
  first /= static_cast<double>(m);
  double second = 0.0;
  if (m > 1) {
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t j = k + 1; j < m; ++j) {
        second += dist(forecast.members[k], forecast.members[j]);
      }
    }
    second /= static_cast<double>(m) * static_cast<double>(m);
    // off-diagonal pairs counted once; the double sum counts them twice.
  }
  return first - second;
}

double variogram_score(const EnsembleForecast& forecast,
                       std::span<const double> x,
                       const std::vector<std::vector<double>>& weights) {
  const std::size_t n = x.size();
  const std::size_t m = forecast.members.size();
  if (m == 0) throw DomainError("empty ensemble");
  if (weights.size() != n) throw DimensionMismatch("variogram weights");
  for (const auto& mem : forecast.members) {
    if (mem.size() != n) throw DimensionMismatch("variogram member");
  }
  double score = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i].size() != n) throw DimensionMismatch("variogram weights");
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double ev = 0.0;
      for (const auto& mem : forecast.members) {
        ev += std::abs(mem[i] - mem[j]);
      }
      ev /= static_cast<double>(m);
      const double d = std::abs(x[i] - x[j]) - ev;
      score += weights[i][j] * d * d;
    }
  }
  return score;
}

double functional_kappa1(std::span<const double> day_ghi,
                         const BoundsModel& bounds, int d, int h_from,
                         int h_to, double fraction) {
  double sum = 0.0;
  for (int h = h_from; h <= h_to; ++h) {
    const double g = day_ghi[static_cast<std::size_t>(h)];
    const double gp = bounds_eval(bounds, d, h).second;
    if (!(g > fraction * gp)) return 0.0;
    sum += g;
  }
  return sum;
}

double functional_kappa2(std::span<const double> week_ghi) {
  double s = 0.0;
  for (double g : week_ghi) s += g;
  return s;
}

DmResult dm_test(std::span<const double> loss_a,
                 std::span<const double> loss_b) {
  if (loss_a.size() != loss_b.size()) {
    throw DimensionMismatch("loss series lengths differ");
  }
  const std::size_t n = loss_a.size();
  if (n < 30) throw TooFewObservations("DM test needs >= 30 losses");
  std::vector<double> d(n);
  double mean = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    d[t] = loss_a[t] - loss_b[t];
    mean += d[t];
  }
  mean /= static_cast<double>(n);
  const int lag = static_cast<int>(std::floor(std::cbrt(
      static_cast<double>(n))));
  double var = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    var += (d[t] - mean) * (d[t] - mean);
  }
  var /= static_cast<double>(n);
  for (int k = 1; k <= lag; ++k) {
    double gamma = 0.0;
    for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) {
      gamma += (d[t] - mean) * (d[t - static_cast<std::size_t>(k)] - mean);
    }
    gamma /= static_cast<double>(n);
    const double w = 1.0 - static_cast<double>(k) /
                               (static_cast<double>(lag) + 1.0);
    var += 2.0 * w * gamma;
  }
  if (!(var > 0.0)) return {0.0, 1.0};
  const double stat = mean / std::sqrt(var / static_cast<double>(n));
  const double p = 2.0 * (1.0 - math::norm_cdf(std::abs(stat)));
  return {stat, std::clamp(p, 0.0, 1.0)};
}

namespace {

// Members used for the quadratic term of the energy score; the linear
// terms always use the full ensemble.
constexpr std::size_t kEsPairCap = 1000;

const std::vector<double>& series_of(const RuleLosses& L,
                                     const std::string& rule) {
  if (rule == "CRPS-H") return L.crps_h;
  if (rule == "CRPS-W") return L.crps_w;
  if (rule == "ES") return L.es;
  if (rule == "VS") return L.vs;
  return L.crps_u;
}

}  // namespace

RuleLosses compute_losses(const ScenarioSet& set, const HourlyPanel& test_panel,
                          const BoundsModel& bounds,
                          const ScoringConfig& config) {
  if (set.m == 0 || set.values.size() != set.m * 365 * 24) {
    throw HorizonMismatch("scenario set does not cover 365x24 hours");
  }
  const auto tau_grid = default_tau_grid();
  const int n_years = test_panel.n_years();
  const int vh1 = config.vs_hour_from;
  const int vh2 = config.vs_hour_to;
  const std::size_t vdim = static_cast<std::size_t>(vh2 - vh1 + 1);
  const std::size_t m = set.m;

  // Pearson-correlation weights for the variogram score, estimated from
  // the realized midday block of the test panel.
  std::vector<std::vector<double>> hour_series(vdim);
  for (int i = 0; i < n_years; ++i) {
    for (int d = 1; d <= 365; ++d) {
      for (std::size_t j = 0; j < vdim; ++j) {
        hour_series[j].push_back(
            test_panel.ghi(i, d, vh1 + static_cast<int>(j)));
      }
    }
  }
  std::vector<std::vector<double>> w(vdim, std::vector<double>(vdim, 0.0));
  for (std::size_t i = 0; i < vdim; ++i) {
    for (std::size_t j = 0; j < vdim; ++j) {
      if (i != j) w[i][j] = math::pearson(hour_series[i], hour_series[j]);
    }
  }

  RuleLosses L;

  // CRPS-H over daylight hours, observation order fixed by (d, h, year).
  std::vector<double> col(m);
  for (int d = 1; d <= 365; ++d) {
    for (int h = 0; h < 24; ++h) {
      if (!bounds.is_daylight(d, h)) continue;
      for (std::size_t k = 0; k < m; ++k) col[k] = set.at(k, d, h);
      std::sort(col.begin(), col.end());
      for (int i = 0; i < n_years; ++i) {
        L.crps_h.push_back(crps_sorted(col, test_panel.ghi(i, d, h), tau_grid,
                                       CrpsWeight::None));
      }
    }
  }

  // Weekly sums (52 whole weeks) for CRPS-W.
  std::vector<std::vector<double>> weekly(m, std::vector<double>(52, 0.0));
  for (std::size_t k = 0; k < m; ++k) {
    for (int d = 1; d <= 364; ++d) {
      double s = 0.0;
      for (int h = 0; h < 24; ++h) s += set.at(k, d, h);
      weekly[k][static_cast<std::size_t>((d - 1) / 7)] += s;
    }
  }
  for (int wk = 0; wk < 52; ++wk) {
    for (std::size_t k = 0; k < m; ++k) {
      col[k] = weekly[k][static_cast<std::size_t>(wk)];
    }
    std::sort(col.begin(), col.end());
    for (int i = 0; i < n_years; ++i) {
      double realized = 0.0;
      for (int d = wk * 7 + 1; d <= wk * 7 + 7; ++d) {
        for (int h = 0; h < 24; ++h) realized += test_panel.ghi(i, d, h);
      }
      L.crps_w.push_back(
          crps_sorted(col, realized, tau_grid, CrpsWeight::None));
    }
  }

  // ES / VS on the midday window and CRPS-U on kappa1, per day. The
  // observation-free pieces (ES pair term, ensemble variogram) are
  // computed once per day and shared across test years.
  std::vector<double> day_ghi(24);
  std::vector<std::vector<double>> members(m, std::vector<double>(vdim));
  for (int d = 1; d <= 365; ++d) {
    std::vector<double> k1(m);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t j = 0; j < vdim; ++j) {
        members[k][j] = set.at(k, d, vh1 + static_cast<int>(j));
      }
      for (int h = 0; h < 24; ++h) {
        day_ghi[static_cast<std::size_t>(h)] = set.at(k, d, h);
      }
      k1[k] = functional_kappa1(day_ghi, bounds, d);
    }
    const std::size_t mc = std::min(m, kEsPairCap);
    double es_second = 0.0;
    for (std::size_t k = 0; k < mc; ++k) {
      for (std::size_t j = k + 1; j < mc; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < vdim; ++i) {
          const double dd = members[k][i] - members[j][i];
          s += dd * dd;
        }
        es_second += std::sqrt(s);
      }
    }
    es_second /= static_cast<double>(mc) * static_cast<double>(mc);
    std::vector<double> ev(vdim * vdim, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < vdim; ++i) {
        for (std::size_t j = i + 1; j < vdim; ++j) {
          ev[i * vdim + j] += std::abs(members[k][i] - members[k][j]);
        }
      }
    }
    for (double& e : ev) e /= static_cast<double>(m);
    std::sort(k1.begin(), k1.end());
    for (int i = 0; i < n_years; ++i) {
      std::vector<double> x(vdim);
      for (std::size_t j = 0; j < vdim; ++j) {
        x[j] = test_panel.ghi(i, d, vh1 + static_cast<int>(j));
      }
      double es_first = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < vdim; ++j) {
          const double dd = members[k][j] - x[j];
          s += dd * dd;
        }
        es_first += std::sqrt(s);
      }
      es_first /= static_cast<double>(m);
      L.es.push_back(es_first - es_second);
      double vs = 0.0;
      for (std::size_t a = 0; a < vdim; ++a) {
        for (std::size_t b = a + 1; b < vdim; ++b) {
          const double dd = std::abs(x[a] - x[b]) - ev[a * vdim + b];
          vs += 2.0 * w[a][b] * dd * dd;
        }
      }
      L.vs.push_back(vs);
      for (int h = 0; h < 24; ++h) {
        day_ghi[static_cast<std::size_t>(h)] = test_panel.ghi(i, d, h);
      }
      L.crps_u.push_back(crps_sorted(k1,
                                     functional_kappa1(day_ghi, bounds, d),
                                     tau_grid, CrpsWeight::None));
    }
  }
  return L;
}

ScoreReport summarize(const std::map<std::string, RuleLosses>& losses,
                      const std::string& hs_name) {
  if (!losses.count(hs_name)) {
    throw ConfigError("score normalization needs a '" + hs_name + "' model");
  }
  ScoreReport report;
  report.rules = {"CRPS-H", "CRPS-W", "ES", "VS", "CRPS-U"};
  for (const auto& [name, L] : losses) report.models.push_back(name);

  for (const auto& rule : report.rules) {
    double best_mean = std::numeric_limits<double>::infinity();
    std::string best;
    for (const auto& name : report.models) {
      const double m = math::mean(series_of(losses.at(name), rule));
      report.raw[name][rule] = m;
      if (m < best_mean) {
        best_mean = m;
        best = name;
      }
    }
    report.best_model[rule] = best;
    const double hs = report.raw[hs_name][rule];
    for (const auto& name : report.models) {
      report.normalized[name][rule] =
          hs != 0.0 ? report.raw[name][rule] / hs : 0.0;
      if (name == best) {
        report.dm_vs_best[name][rule] = 1.0;
      } else {
        report.dm_vs_best[name][rule] =
            dm_test(series_of(losses.at(name), rule),
                    series_of(losses.at(best), rule))
                .p_value;
      }
    }
  }
  return report;
}

ScoreReport evaluate(const std::map<std::string, const ScenarioSet*>& models,
                     const HourlyPanel& test_panel, const BoundsModel& bounds,
                     const ScoringConfig& config) {
  std::map<std::string, RuleLosses> losses;
  for (const auto& [name, set] : models) {
    losses[name] = compute_losses(*set, test_panel, bounds, config);
  }
  return summarize(losses, config.hs_name);
}

}  // namespace ghisim
