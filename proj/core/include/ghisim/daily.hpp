#pragma once

#include <cstdint>
#include <vector>

#include "ghisim/bounds.hpp"
#include "ghisim/calendar.hpp"
#include "ghisim/seasonal.hpp"

namespace ghisim {

enum class DailyRegime { M1, M2, M3 };

struct SkewNormal {
  double location = 0.0;
  double scale = 1.0;
  double shape = 0.0;  // capped to |shape| <= 20 when fitted

  double log_density(double x) const;
};

// Daily-total model: link(I_d) = seasonal Fourier curve + ARMA(1,1)
// residual with skew-normal innovations. The link is log for M1 and a
// scaled logit for M2 (ceiling = daily TOA sum) and M3 (estimated daily
// bound sums).
struct DailyModel {
  DailyRegime regime = DailyRegime::M1;
  FourierModel seasonal;         // p = q = 2 on the link scale
  double phi1 = 0.0;             // AR(1), |phi1| < 1
  double theta1 = 0.0;           // MA(1), |theta1| < 1
  SkewNormal innovation;
  std::vector<double> lo_daily;  // 365 lower bounds (0 for M1/M2)
  std::vector<double> hi_daily;  // 365 upper bounds (TOA sums for M1/M2)
  double ljung_box = 0.0;        // Q statistic of the fitted innovations
  int ljung_box_lags = 0;

  double link(double x, int d) const;
  double inverse_link(double y, int d) const;
};

// Daily GHI totals in chronological order (year-major), Wh/m^2.
std::vector<double> panel_daily_totals(const HourlyPanel& panel);

// 365-long daily sums of the hourly envelope / TOA grid.
std::vector<double> daily_bound_series(const BoundsModel& bounds, bool upper);
std::vector<double> daily_toa_series(const BoundsModel& bounds);

// Link-transform, Fourier OLS, ARMA(1,1) by conditional least squares,
// skew-normal innovations by maximum likelihood.
DailyModel fit_daily(const HourlyPanel& panel, DailyRegime regime,
                     const BoundsModel& bounds);

struct DailySim {
  std::vector<std::vector<double>> ghi;  // years x 365 daily totals
  std::size_t toa_exceedances = 0;       // values above the daily TOA sum
};

DailySim simulate_daily(const DailyModel& model, std::size_t years,
                        std::uint64_t seed);

// ARMA(1,1) fit on a zero-start conditional least squares criterion.
struct ArmaFit {
  double phi1 = 0.0;
  double theta1 = 0.0;
  std::vector<double> innovations;
};

ArmaFit fit_arma11(std::span<const double> series);

SkewNormal fit_skew_normal(std::span<const double> values);

double ljung_box_statistic(std::span<const double> values, int lags);

}  // namespace ghisim
