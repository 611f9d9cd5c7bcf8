#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace ghisim {

// Truncated Fourier series on a fixed period with optional exogenous
// regressor. Coefficients are laid out as
// beta0, beta_1..p (cosine), beta_{p+1..p+q} (sine), [beta_exog].
struct FourierModel {
  double period = 365.25;
  int p = 0;
  int q = 0;
  bool has_exog = false;
  std::vector<double> coeffs;

  std::size_t n_coeffs() const {
    return 1 + static_cast<std::size_t>(p + q) + (has_exog ? 1 : 0);
  }
};

double fourier_eval(const FourierModel& model, double d,
                    std::optional<double> exog = std::nullopt);

struct QuantileFit {
  double tau = 0.5;
  FourierModel model;
  std::vector<double> residuals;  // response minus fitted curve
};

// Ordinary least squares on the Fourier design; exog may be empty.
FourierModel fit_ols(std::span<const double> d_values,
                     std::span<const double> responses,
                     std::span<const double> exog, int p, int q,
                     double period = 365.25);

// Exhaustive (p,q) search minimizing BIC = n ln(RSS/n) + k ln(n).
// Ties break toward fewer coefficients, then smaller p.
std::pair<int, int> select_order_bic(std::span<const double> d_values,
                                     std::span<const double> responses,
                                     std::span<const double> exog, int max_p,
                                     int max_q, double period = 365.25);

// Pinball-loss quantile regression, iteratively reweighted least squares
// with epsilon smoothing (1e-2 down to 1e-8) and a subgradient fallback.
QuantileFit fit_quantile(std::span<const double> d_values,
                         std::span<const double> responses,
                         std::span<const double> exog, int p, int q,
                         double tau, double period = 365.25,
                         int max_iter = 10000);

double pinball_loss(double tau, std::span<const double> residuals);

}  // namespace ghisim
