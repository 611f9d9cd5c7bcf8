#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ghisim/bounds.hpp"
#include "ghisim/calendar.hpp"
#include "ghisim/scenario.hpp"

namespace ghisim {

// m ensemble members, each an n-vector (n = 1 for univariate rules).
struct EnsembleForecast {
  std::size_t dim = 1;
  std::vector<std::vector<double>> members;
};

// tau = 0.001, 0.002, ..., 0.999.
std::vector<double> default_tau_grid();

// Type-7 empirical quantile of an unsorted sample (copied and sorted).
double empirical_quantile(std::span<const double> sample, double tau);
// Same on an already-sorted sample.
double sorted_quantile(std::span<const double> sorted, double tau);

enum class CrpsWeight { None, V1, V2, V3 };  // 1, (2t-1)^2, t<=.05, t>=.95

double crps(std::span<const double> ensemble, double x,
            std::span<const double> tau_grid, CrpsWeight weight =
                CrpsWeight::None);

double energy_score(const EnsembleForecast& forecast,
                    std::span<const double> x);

double variogram_score(const EnsembleForecast& forecast,
                       std::span<const double> x,
                       const std::vector<std::vector<double>>& weights);

// kappa1: midday sum gated by all hours exceeding 80% of the upper bound.
double functional_kappa1(std::span<const double> day_ghi,
                         const BoundsModel& bounds, int d, int h_from = 10,
                         int h_to = 15, double fraction = 0.8);
// kappa2: weekly total of a 7x24 block.
double functional_kappa2(std::span<const double> week_ghi);

struct DmResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Diebold-Mariano with Bartlett-kernel HAC variance, lag floor(n^(1/3)).
DmResult dm_test(std::span<const double> loss_a, std::span<const double> loss_b);

struct ScoringConfig {
  int vs_hour_from = 10;
  int vs_hour_to = 16;
  std::string hs_name = "HS";
};

struct ScoreReport {
  std::vector<std::string> models;
  std::vector<std::string> rules;
  // raw[model][rule], normalized[model][rule] = raw / raw(HS).
  std::map<std::string, std::map<std::string, double>> raw;
  std::map<std::string, std::map<std::string, double>> normalized;
  // p-value of the DM test of each model against the best model per rule.
  std::map<std::string, std::map<std::string, double>> dm_vs_best;
  std::map<std::string, std::string> best_model;  // per rule
};

// Per-observation loss series of one scenario set under every rule; the
// observation order is fixed by (test panel, bounds, config) so series
// from different models pair up for the DM test.
struct RuleLosses {
  std::vector<double> crps_h, crps_w, es, vs, crps_u;
};

RuleLosses compute_losses(const ScenarioSet& set, const HourlyPanel& test_panel,
                          const BoundsModel& bounds,
                          const ScoringConfig& config = {});

// Normalize by the HS row and attach DM p-values against the best model
// per rule.
ScoreReport summarize(const std::map<std::string, RuleLosses>& losses,
                      const std::string& hs_name = "HS");

// Full evaluation protocol: CRPS-H on daylight hours, CRPS-W on weekly
// sums, ES and VS on the midday window, CRPS-U on kappa1; HS-normalized.
ScoreReport evaluate(const std::map<std::string, const ScenarioSet*>& models,
                     const HourlyPanel& test_panel, const BoundsModel& bounds,
                     const ScoringConfig& config = {});

}  // namespace ghisim
