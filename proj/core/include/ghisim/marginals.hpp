#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include "ghisim/bounds.hpp"
#include "ghisim/calendar.hpp"

namespace ghisim {

struct BetaParams {
  double mu = 0.5;   // mean in (0,1)
  double phi = 2.0;  // precision > 0

  double alpha() const { return mu * phi; }
  double beta() const { return (1.0 - mu) * phi; }
  double variance() const { return mu * (1.0 - mu) / (1.0 + phi); }
  double log_density(double x) const;
  double cdf(double x) const;       // regularized incomplete beta
  double quantile(double p) const;
};

// Sun intensities M = (G - g^-)/(g^+ - g^-) on the panel grid, clipped to
// the open interval; invalid (night) cells are flagged.
struct IntensityGrid {
  std::vector<double> m;            // panel layout (i,d,h)
  std::vector<std::uint8_t> valid;  // daylight cells
  std::size_t clipped_low = 0;
  std::size_t clipped_high = 0;

  double at(int i, int d, int h) const { return m[HourlyPanel::index(i, d, h)]; }
  bool is_valid(int i, int d, int h) const {
    return valid[HourlyPanel::index(i, d, h)] != 0;
  }
};

IntensityGrid intensity(const HourlyPanel& panel, const BoundsModel& bounds);

// Beta-regression coefficients for one hour: logit-linked mean
// (zeta1, zeta2) and log-linked precision (theta1, theta2), covariate is
// the seasonal mean irradiation.
struct BetaRegCoeffs {
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
};

BetaRegCoeffs fit_beta_regression(std::span<const double> intensities,
                                  std::span<const double> lambda_values,
                                  int max_iter = 5000);

struct MarginalModel {
  std::map<int, BetaRegCoeffs> coeffs;  // per daylight hour
  std::map<int, FourierModel> lambda;   // seasonal mean models per hour

  BetaParams params_at(int d, int h) const;
};

// Fits every modeled daylight hour of the bounds model.
MarginalModel fit_marginals(const HourlyPanel& panel, const BoundsModel& bounds,
                            const IntensityGrid& grid);

double pit(const MarginalModel& model, double m, int d, int h);
double pit_inverse(const MarginalModel& model, double u, int d, int h);

}  // namespace ghisim
