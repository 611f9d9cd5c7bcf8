#include "ghisim/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "ghisim/errors.hpp"
#include "ghisim/math_utils.hpp"

namespace ghisim {

namespace {

struct DayLayout {
  int h1 = -1;
  int h2 = -1;
  int anchor = -1;
};

struct SimGrid {
  std::vector<DayLayout> days;          // 365
  std::vector<double> lo, hi;           // 365*24 bounds
  std::vector<BetaParams> beta;         // 365*24
  std::vector<std::uint8_t> has_beta;   // 365*24
};

SimGrid precompute(const ModelBundle& bundle) {
  SimGrid g;
  g.days.resize(365);
  g.lo.assign(365 * 24, 0.0);
  g.hi.assign(365 * 24, 0.0);
  g.beta.assign(365 * 24, BetaParams{});
  g.has_beta.assign(365 * 24, 0);
  for (int d = 1; d <= 365; ++d) {
    DayLayout& day = g.days[static_cast<std::size_t>(d - 1)];
    day.h1 = bundle.bounds.first_daylight_hour(d);
    day.h2 = bundle.bounds.last_daylight_hour(d);
    if (day.h1 < 0) continue;
    day.anchor = std::clamp(bundle.anchor_hour, day.h1, day.h2);
    for (int h = day.h1; h <= day.h2; ++h) {
      if (!bundle.bounds.is_daylight(d, h)) continue;
      const std::size_t k = static_cast<std::size_t>(d - 1) * 24 +
                            static_cast<std::size_t>(h);
      const auto [gl, gp] = bounds_eval(bundle.bounds, d, h);
      g.lo[k] = gl;
      g.hi[k] = gp;
      if (bundle.marginals.coeffs.count(h)) {
        g.beta[k] = bundle.marginals.params_at(d, h);
        g.has_beta[k] = 1;
      }
    }
  }
  return g;
}

const CopulaSpec& pair_spec(const ModelBundle& bundle, int h) {
  static const CopulaSpec indep{};
  const auto it = bundle.intraday.find(h);
  return it == bundle.intraday.end() ? indep : it->second;
}

}  // namespace

ScenarioSet simulate(const ModelBundle& bundle, std::size_t m,
                     std::uint64_t seed) {
  if (m < 1) throw DomainError("scenario count must be >= 1");
  if (bundle.variant == Variant::C2 && !bundle.noon) {
    throw DomainError("C2 requires a noon-to-noon copula");
  }
  const SimGrid grid = precompute(bundle);

  ScenarioSet set;
  set.m = m;
  set.seed = seed;
  set.values.assign(m * 365 * 24, 0.0);

  std::vector<double> u(24, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double ustar_prev = 0.5;
    for (int d = 1; d <= 365; ++d) {
      math::CounterRng rng(seed, k + 1, static_cast<std::uint64_t>(d));
      const double vd = rng.uniform();
      double ustar;
      if (bundle.variant == Variant::C2 && d > 1) {
        ustar = h_inverse(*bundle.noon, ustar_prev, vd);
      } else {
        ustar = vd;
      }
      ustar_prev = ustar;

      const DayLayout& day = grid.days[static_cast<std::size_t>(d - 1)];
      if (day.h1 < 0) continue;
      u[static_cast<std::size_t>(day.anchor)] = ustar;
      for (int j = day.anchor - 1; j >= day.h1; --j) {
        u[static_cast<std::size_t>(j)] = h_inverse(
            pair_spec(bundle, j), u[static_cast<std::size_t>(j + 1)],
            rng.uniform());
      }
      for (int j = day.anchor + 1; j <= day.h2; ++j) {
        u[static_cast<std::size_t>(j)] = h_inverse(
            pair_spec(bundle, j - 1), u[static_cast<std::size_t>(j - 1)],
            rng.uniform());
      }
      for (int h = day.h1; h <= day.h2; ++h) {
        const std::size_t gk = static_cast<std::size_t>(d - 1) * 24 +
                               static_cast<std::size_t>(h);
        if (!(grid.hi[gk] > 0.0)) continue;
        const double uh = u[static_cast<std::size_t>(h)];
        const double mm = grid.has_beta[gk] ? grid.beta[gk].quantile(uh) : uh;
        set.values[ScenarioSet::index(k, d, h)] =
            grid.lo[gk] + mm * (grid.hi[gk] - grid.lo[gk]);
      }
    }
  }
  return set;
}

ScenarioSet benchmark_hs(const HourlyPanel& learn, std::size_t m,
                         std::uint64_t seed) {
  const int n = learn.n_years();
  ScenarioSet set;
  set.m = m;
  set.seed = seed;
  set.values.assign(m * 365 * 24, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (int d = 1; d <= 365; ++d) {
      math::CounterRng rng(seed, k + 1, static_cast<std::uint64_t>(d));
      for (int h = 0; h < 24; ++h) {
        const int i = std::min(static_cast<int>(rng.uniform() * n), n - 1);
        set.values[ScenarioSet::index(k, d, h)] = learn.ghi(i, d, h);
      }
    }
  }
  return set;
}

ScenarioSet benchmark_da(const std::vector<std::vector<double>>& daily_totals,
                         const BoundsModel& bounds) {
  ScenarioSet set;
  set.m = daily_totals.size();
  set.values.assign(set.m * 365 * 24, 0.0);

  std::vector<double> profile(365 * 24, 0.0);
  std::vector<double> profile_sum(365, 0.0);
  for (int d = 1; d <= 365; ++d) {
    for (int h = 0; h < 24; ++h) {
      const double gp = bounds_eval(bounds, d, h).second;
      profile[static_cast<std::size_t>(d - 1) * 24 + h] = gp;
      profile_sum[static_cast<std::size_t>(d - 1)] += gp;
    }
  }
  for (std::size_t k = 0; k < set.m; ++k) {
    if (daily_totals[k].size() != 365) {
      throw DimensionMismatch("daily totals must have 365 entries");
    }
    for (int d = 1; d <= 365; ++d) {
      const double total = daily_totals[k][static_cast<std::size_t>(d - 1)];
      const double psum = profile_sum[static_cast<std::size_t>(d - 1)];
      if (total <= 0.0) continue;
      if (total > psum * (1.0 + 1e-9)) {
        throw TotalExceedsEnvelope("day " + std::to_string(d));
      }
      for (int h = 0; h < 24; ++h) {
        const double gp = profile[static_cast<std::size_t>(d - 1) * 24 + h];
        if (gp > 0.0) {
          set.values[ScenarioSet::index(k, d, h)] = total * gp / psum;
        }
      }
    }
  }
  return set;
}

std::vector<std::vector<double>> daily_sums(const ScenarioSet& set) {
  std::vector<std::vector<double>> out(set.m, std::vector<double>(365, 0.0));
  for (std::size_t k = 0; k < set.m; ++k) {
    for (int d = 1; d <= 365; ++d) {
      double s = 0.0;
      for (int h = 0; h < 24; ++h) s += set.at(k, d, h);
      out[k][static_cast<std::size_t>(d - 1)] = s;
    }
  }
  return out;
}

namespace {

// Raw PIT values on the panel grid for copula estimation.
std::vector<double> pit_grid(const HourlyPanel& panel,
                             const MarginalModel& marginals,
                             const IntensityGrid& grid) {
  std::vector<double> u(panel.size(), -1.0);
  for (int i = 0; i < panel.n_years(); ++i) {
    for (int d = 1; d <= 365; ++d) {
      for (int h = 0; h < 24; ++h) {
        const std::size_t k = HourlyPanel::index(i, d, h);
        if (!grid.valid[k] || !marginals.coeffs.count(h)) continue;
        u[k] = pit(marginals, grid.m[k], d, h);
      }
    }
  }
  return u;
}

CopulaSpec fit_pair(std::vector<double>& u1, std::vector<double>& u2,
                    CopulaFamily family) {
  const auto r1 = math::scaled_ranks(u1);
  const auto r2 = math::scaled_ranks(u2);
  switch (family) {
    case CopulaFamily::Independence:
      return CopulaSpec::independence();
    case CopulaFamily::Gaussian:
    case CopulaFamily::Gumbel:
      return fit_mpl(r1, r2, family).spec;
    case CopulaFamily::BB1: {
      std::vector<double> q_grid;
      for (double q = 0.025; q <= 0.9751; q += 0.025) q_grid.push_back(q);
      const auto diag = empirical_dependence(r1, r2, q_grid, 0.05, 0);
      return fit_bb1_tail_inversion(diag);
    }
  }
  return CopulaSpec::independence();
}

}  // namespace

std::map<int, CopulaSpec> fit_intraday_copulas(const HourlyPanel& panel,
                                               const BoundsModel& bounds,
                                               const MarginalModel& marginals,
                                               const IntensityGrid& grid,
                                               CopulaFamily family) {
  (void)bounds;
  const auto u = pit_grid(panel, marginals, grid);
  std::map<int, CopulaSpec> out;
  for (const auto& [h, coeffs] : marginals.coeffs) {
    if (!marginals.coeffs.count(h + 1)) continue;
    std::vector<double> u1, u2;
    for (int i = 0; i < panel.n_years(); ++i) {
      for (int d = 1; d <= 365; ++d) {
        const double a = u[HourlyPanel::index(i, d, h)];
        const double b = u[HourlyPanel::index(i, d, h + 1)];
        if (a < 0.0 || b < 0.0) continue;
        u1.push_back(a);
        u2.push_back(b);
      }
    }
    if (u1.size() < 100) continue;
    out[h] = fit_pair(u1, u2, family);
  }
  return out;
}

CopulaSpec fit_noon_copula(const HourlyPanel& panel, const BoundsModel& bounds,
                           const MarginalModel& marginals,
                           const IntensityGrid& grid, CopulaFamily family,
                           int anchor_hour) {
  (void)bounds;
  const auto u = pit_grid(panel, marginals, grid);
  std::vector<double> u1, u2;
  for (int i = 0; i < panel.n_years(); ++i) {
    for (int d = 1; d < 365; ++d) {
      const double a = u[HourlyPanel::index(i, d, anchor_hour)];
      const double b = u[HourlyPanel::index(i, d + 1, anchor_hour)];
      if (a < 0.0 || b < 0.0) continue;
      u1.push_back(a);
      u2.push_back(b);
    }
  }
  if (u1.size() < 100) throw TooFewObservations("noon copula pairs");
  return fit_pair(u1, u2, family);
}

}  // namespace ghisim
