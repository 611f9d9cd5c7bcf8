#pragma once

#include <span>
#include <string>
#include <vector>

#include "ghisim/math_utils.hpp"

namespace ghisim {

enum class CopulaFamily { Independence, Gaussian, Gumbel, BB1 };

std::string family_name(CopulaFamily f);
CopulaFamily family_from_name(const std::string& name);

struct CopulaSpec {
  CopulaFamily family = CopulaFamily::Independence;
  double rho = 0.0;    // Gaussian
  double theta = 1.0;  // Gumbel >= 1, BB1 > 0
  double delta = 1.0;  // BB1 >= 1

  static CopulaSpec independence();
  static CopulaSpec gaussian(double rho);
  static CopulaSpec gumbel(double theta);
  static CopulaSpec bb1(double theta, double delta);

  double lambda_upper() const;
  double lambda_lower() const;
};

double copula_cdf(const CopulaSpec& spec, double u, double v);
// Log density; defined for Independence, Gaussian and Gumbel (the
// families fitted by pseudolikelihood).
double copula_log_density(const CopulaSpec& spec, double u, double v);

// Conditional distribution P(V <= v | U = u) = dC/du and its inverse in v.
double h_function(const CopulaSpec& spec, double u, double v);
double h_inverse(const CopulaSpec& spec, double u, double w);

// count pairs via U uniform, V = h_inverse(U, W).
std::vector<std::pair<double, double>> sample_pair(const CopulaSpec& spec,
                                                   std::size_t count,
                                                   math::CounterRng& rng);

struct MplFit {
  CopulaSpec spec;
  double loglik = 0.0;
  bool boundary = false;  // parameter within 1e-4 of its domain edge
};

// Maximum pseudolikelihood on scaled ranks; Gaussian and Gumbel only.
MplFit fit_mpl(std::span<const double> u, std::span<const double> v,
               CopulaFamily family);

// BB1 parameters from empirical tail dependence coefficients:
// delta = ln2 / ln(2 - lambdaU), theta = ln2 / (-delta ln lambdaL).
CopulaSpec fit_bb1_tail_inversion(double lambda_upper_hat,
                                  double lambda_lower_hat);

struct DependenceDiagnostics {
  std::vector<double> q_grid;
  std::vector<double> lambda_q;
  std::vector<double> band_lo;
  std::vector<double> band_hi;
  double lambda_lower_hat = 0.0;
  double lambda_upper_hat = 0.0;
};

// Empirical quantile dependence with bootstrap 90% bands; tail estimates
// average the corner dependence over q in [0.01, tail_q] and its mirror.
DependenceDiagnostics empirical_dependence(std::span<const double> u,
                                           std::span<const double> v,
                                           std::span<const double> q_grid,
                                           double tail_q = 0.05,
                                           std::size_t n_bootstrap = 500,
                                           std::uint64_t seed = 7);

CopulaSpec fit_bb1_tail_inversion(const DependenceDiagnostics& diag);

// Population Kendall tau / Spearman rho by Gauss-Legendre quadrature.
double theoretical_kendall_tau(const CopulaSpec& spec);
double theoretical_spearman(const CopulaSpec& spec);

}  // namespace ghisim
