#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ghisim::math {

// ---------------------------------------------------------------------------
// Standard normal distribution
// ---------------------------------------------------------------------------

double norm_pdf(double x);
double norm_cdf(double x);
// Inverse standard normal CDF, rational approximation polished with one
// Newton step; absolute error below 1e-12 on (1e-300, 1 - 1e-16).
double norm_inv(double p);

// Bivariate standard normal copula CDF C(u,v;rho), evaluated by
// Gauss-Legendre quadrature of the conditional form.
double binormal_copula_cdf(double u, double v, double rho);

// ---------------------------------------------------------------------------
// Gamma / beta special functions
// ---------------------------------------------------------------------------

double digamma(double x);
// Regularized incomplete beta function I_x(a,b), continued-fraction
// expansion with the symmetry reduction; absolute error target 1e-10.
double reg_inc_beta(double x, double a, double b);
// Inverse of I_x(a,b) in x, Newton iteration safeguarded by bisection.
double reg_inc_beta_inv(double p, double a, double b);

double logit(double x);
double logistic(double x);

// ---------------------------------------------------------------------------
// Counter-based random streams
// ---------------------------------------------------------------------------

// Deterministic counter-based generator. A stream is identified by
// (seed, stream_hi, stream_lo); draws within a stream are a SplitMix64
// sequence seeded from a mix of the three identifiers, so any
// (scenario, day) stream can be regenerated independently.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream_hi = 0,
             std::uint64_t stream_lo = 0);

  std::uint64_t next_u64();
  // Uniform draw in the open interval (0,1).
  double uniform();
  double normal();  // standard normal via inversion

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Optimization
// ---------------------------------------------------------------------------

struct OptimResult {
  std::vector<double> x;
  double fval = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Derivative-free simplex minimization.
OptimResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                        std::span<const double> x0, double step = 0.1,
                        int max_iter = 2000, double ftol = 1e-10);

// BFGS with backtracking line search; grad may be empty, in which case
// central finite differences are used.
OptimResult bfgs(
    const std::function<double(std::span<const double>)>& f,
    const std::function<std::vector<double>(std::span<const double>)>& grad,
    std::span<const double> x0, int max_iter = 500, double gtol = 1e-8);

// Golden-section/parabolic 1-D minimization on [a, b].
double brent_minimize(const std::function<double(double)>& f, double a,
                      double b, double tol = 1e-10, int max_iter = 200);

// Root of monotone f on [a, b] with f(a), f(b) of opposite sign.
double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-12, int max_iter = 200);

// ---------------------------------------------------------------------------
// Small statistics helpers
// ---------------------------------------------------------------------------

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased
double pearson(std::span<const double> x, std::span<const double> y);
// Kendall's tau via merge-sort inversion counting, O(n log n).
double kendall_tau(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
// Ranks scaled to (0,1) as rank/(n+1); average ranks on ties.
std::vector<double> scaled_ranks(std::span<const double> x);
// One-sample Kolmogorov-Smirnov statistic against U(0,1).
double ks_statistic_uniform(std::vector<double> u);
// Asymptotic Kolmogorov p-value for statistic d at sample size n.
double ks_pvalue(double d, std::size_t n);

}  // namespace ghisim::math
