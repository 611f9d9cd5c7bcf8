#pragma once

#include <map>
#include <span>
#include <vector>

#include "ghisim/calendar.hpp"
#include "ghisim/seasonal.hpp"

namespace ghisim {

struct GpdFit {
  double sigma = 0.0;  // scale, > 0
  double xi = 0.0;     // shape
  std::size_t n_exceed = 0;

  // Right endpoint -sigma/xi, defined for negative shape only.
  double endpoint() const;
};

// Maximum-likelihood GPD fit on strictly positive excesses. The fit is
// started from method-of-moments values and the optimum never falls below
// the start's log-likelihood.
GpdFit fit_gpd(std::span<const double> excesses, std::size_t min_count = 30);

double gpd_loglik(const GpdFit& fit, std::span<const double> excesses);

enum class ExtremaKind { Max, Min };

// Per-(d,h) extremum over the panel's years; 365*24 grid indexed
// (d-1)*24 + h.
std::vector<double> historical_extrema(const HourlyPanel& panel,
                                       ExtremaKind kind);

struct MeanExcessRow {
  double threshold = 0.0;
  double mean_excess = 0.0;
  std::size_t count = 0;
  bool empty = false;
};

// Mean residual life table for threshold selection diagnostics.
std::vector<MeanExcessRow> mean_excess_curve(std::span<const double> values,
                                             std::span<const double> thresholds);

struct BoundsConfig {
  double tau = 0.75;
  double daylight_threshold = 1.0;  // Wh/m^2 on the fitted seasonal mean
  std::size_t min_exceedances = 30;
  int min_days_per_hour = 60;
};

// Fitted time-varying envelope g^-(d,h) <= G <= g^+(d,h).
struct BoundsModel {
  BoundsConfig config;
  std::map<int, FourierModel> lambda;       // seasonal mean per hour
  std::map<int, QuantileFit> upper_fits;    // max quantile curve, TOA exog
  FourierModel excess_seasonality;          // E_h over hours, period 24
  GpdFit upper_gpd;
  std::map<int, QuantileFit> lower_fits;    // logit-scale cloud deviations
  GpdFit lower_gpd;
  std::vector<double> toa_grid;             // mean TOA per (d,h), 365*24
  bool lower_fitted = false;

  double lambda_at(int d, int h) const;
  bool is_daylight(int d, int h) const;
  // First/last hour with expected irradiation above the daylight threshold.
  int first_daylight_hour(int d) const;
  int last_daylight_hour(int d) const;
  double toa_at(int d, int h) const {
    return toa_grid[static_cast<std::size_t>(d - 1) * 24 +
                    static_cast<std::size_t>(h)];
  }
};

// Upper-bound half of the pipeline: per-hour quantile regression of the
// historical maxima, hourly deseasonalization of the excesses, pooled GPD
// endpoint.
BoundsModel fit_upper_bound(const HourlyPanel& panel,
                            const BoundsConfig& config = {});

// Completes the model with the logit-linked lower bound.
void fit_lower_bound(const HourlyPanel& panel, BoundsModel& model);

double upper_bound_at(const BoundsModel& model, int d, int h);

// (g^-, g^+) at (d,h); (0,0) outside daylight, lower bound zero at the
// sunrise and sunset hours of the day.
std::pair<double, double> bounds_eval(const BoundsModel& model, int d, int h);

}  // namespace ghisim
