#include "ghisim/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ghisim/errors.hpp"

namespace ghisim {

namespace {

void check_unit(double x, const char* what) {
  if (!(x > 0.0 && x < 1.0)) {
    throw DomainError(std::string(what) + " outside (0,1)");
  }
}

// 64-point Gauss-Legendre on [0,1].
struct Gl64 {
  double x[64];
  double w[64];
  Gl64() {
    // Nodes via Newton iteration on Legendre polynomials.
    for (int i = 0; i < 32; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (64 + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < 64; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = 64.0 * (z * p0 - p1) / (z * z - 1.0);
        const double z1 = z;
        z = z1 - p0 / pp;
        if (std::abs(z - z1) < 1e-15) break;
      }
      x[i] = 0.5 * (1.0 - z);
      x[63 - i] = 0.5 * (1.0 + z);
      w[i] = w[63 - i] = 1.0 / ((1.0 - z * z) * pp * pp);
    }
  }
};

const Gl64& gl64() {
  static const Gl64 g;
  return g;
}

}  // namespace

std::string family_name(CopulaFamily f) {
  switch (f) {
    case CopulaFamily::Independence: return "independence";
    case CopulaFamily::Gaussian: return "gaussian";
    case CopulaFamily::Gumbel: return "gumbel";
    case CopulaFamily::BB1: return "bb1";
  }
  return "unknown";
}

CopulaFamily family_from_name(const std::string& name) {
  if (name == "independence") return CopulaFamily::Independence;
  if (name == "gaussian") return CopulaFamily::Gaussian;
  if (name == "gumbel") return CopulaFamily::Gumbel;
  if (name == "bb1") return CopulaFamily::BB1;
  throw DomainError("unknown copula family '" + name + "'");
}

CopulaSpec CopulaSpec::independence() { return {}; }

CopulaSpec CopulaSpec::gaussian(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw DomainError("gaussian rho");
  CopulaSpec s;
  s.family = CopulaFamily::Gaussian;
  s.rho = rho;
  return s;
}

CopulaSpec CopulaSpec::gumbel(double theta) {
  if (!(theta >= 1.0)) throw DomainError("gumbel theta < 1");
  CopulaSpec s;
  s.family = CopulaFamily::Gumbel;
  s.theta = theta;
  return s;
}

CopulaSpec CopulaSpec::bb1(double theta, double delta) {
  if (!(theta > 0.0) || !(delta >= 1.0)) throw DomainError("bb1 parameters");
  CopulaSpec s;
  s.family = CopulaFamily::BB1;
  s.theta = theta;
  s.delta = delta;
  return s;
}

double CopulaSpec::lambda_upper() const {
  switch (family) {
    case CopulaFamily::Gumbel: return 2.0 - std::pow(2.0, 1.0 / theta);
    case CopulaFamily::BB1: return 2.0 - std::pow(2.0, 1.0 / delta);
    default: return 0.0;
  }
}

double CopulaSpec::lambda_lower() const {
  if (family == CopulaFamily::BB1) {
    return std::pow(2.0, -1.0 / (delta * theta));
  }
  return 0.0;
}

double copula_cdf(const CopulaSpec& spec, double u, double v) {
  check_unit(u, "u");
  check_unit(v, "v");
  switch (spec.family) {
    case CopulaFamily::Independence:
      return u * v;
    case CopulaFamily::Gaussian:
      return math::binormal_copula_cdf(u, v, spec.rho);
    case CopulaFamily::Gumbel: {
      const double x = std::pow(-std::log(u), spec.theta);
      const double y = std::pow(-std::log(v), spec.theta);
      return std::exp(-std::pow(x + y, 1.0 / spec.theta));
    }
    case CopulaFamily::BB1: {
      const double x = std::pow(std::pow(u, -spec.theta) - 1.0, spec.delta);
      const double y = std::pow(std::pow(v, -spec.theta) - 1.0, spec.delta);
      const double w = std::pow(x + y, 1.0 / spec.delta);
      return std::pow(1.0 + w, -1.0 / spec.theta);
    }
  }
  return 0.0;
}

double copula_log_density(const CopulaSpec& spec, double u, double v) {
  check_unit(u, "u");
  check_unit(v, "v");
  switch (spec.family) {
    case CopulaFamily::Independence:
      return 0.0;
    case CopulaFamily::Gaussian: {
      const double a = math::norm_inv(u);
      const double b = math::norm_inv(v);
      const double r = spec.rho;
      const double s2 = 1.0 - r * r;
      return -0.5 * std::log(s2) -
             (r * r * (a * a + b * b) - 2.0 * r * a * b) / (2.0 * s2);
    }
    case CopulaFamily::Gumbel: {
      const double t = spec.theta;
      const double lu = -std::log(u);
      const double lv = -std::log(v);
      const double x = std::pow(lu, t);
      const double y = std::pow(lv, t);
      const double s = x + y;
      const double s1t = std::pow(s, 1.0 / t);
      // c = C * (uv)^-1 (lu lv)^{t-1} s^{2/t-2} (1 + (t-1) s^{-1/t})
      return -s1t - std::log(u) - std::log(v) +
             (t - 1.0) * (std::log(lu) + std::log(lv)) +
             (2.0 / t - 2.0) * std::log(s) +
             std::log1p((t - 1.0) / s1t);
    }
    case CopulaFamily::BB1:
      throw DomainError("BB1 density not used for pseudolikelihood");
  }
  return 0.0;
}

double h_function(const CopulaSpec& spec, double u, double v) {
  check_unit(u, "u");
  check_unit(v, "v");
  switch (spec.family) {
    case CopulaFamily::Independence:
      return v;
    case CopulaFamily::Gaussian: {
      const double s = std::sqrt(1.0 - spec.rho * spec.rho);
      return math::norm_cdf(
          (math::norm_inv(v) - spec.rho * math::norm_inv(u)) / s);
    }
    case CopulaFamily::Gumbel: {
      const double t = spec.theta;
      const double lu = -std::log(u);
      const double x = std::pow(lu, t);
      const double y = std::pow(-std::log(v), t);
      const double s = x + y;
      const double c = std::exp(-std::pow(s, 1.0 / t));
      return c * std::pow(lu, t - 1.0) * std::pow(s, 1.0 / t - 1.0) / u;
    }
    case CopulaFamily::BB1: {
      const double t = spec.theta;
      const double d = spec.delta;
      const double xu = std::pow(u, -t) - 1.0;
      const double x = std::pow(xu, d);
      const double y = std::pow(std::pow(v, -t) - 1.0, d);
      const double s = x + y;
      const double w = std::pow(s, 1.0 / d);
      return std::pow(1.0 + w, -1.0 / t - 1.0) *
             std::pow(s, 1.0 / d - 1.0) * std::pow(xu, d - 1.0) *
             std::pow(u, -t - 1.0);
    }
  }
  return 0.0;
}

double h_inverse(const CopulaSpec& spec, double u, double w) {
  check_unit(u, "u");
  check_unit(w, "w");
  switch (spec.family) {
    case CopulaFamily::Independence:
      return w;
    case CopulaFamily::Gaussian: {
      const double s = std::sqrt(1.0 - spec.rho * spec.rho);
      const double z = math::norm_inv(w) * s + spec.rho * math::norm_inv(u);
      return math::norm_cdf(z);
    }
    case CopulaFamily::Gumbel:
    case CopulaFamily::BB1: {
      // h is monotone increasing in v; bracketing bisection with secant
      // acceleration.
      double lo = 1e-12, hi = 1.0 - 1e-12;
      double flo = h_function(spec, u, lo) - w;
      double fhi = h_function(spec, u, hi) - w;
      if (flo >= 0.0) return lo;
      if (fhi <= 0.0) return hi;
      double v = 0.5;
      for (int it = 0; it < 200; ++it) {
        // Secant proposal, safeguarded inside the bracket.
        double vs = lo - flo * (hi - lo) / (fhi - flo);
        const double mid = 0.5 * (lo + hi);
        if (!(vs > lo + 1e-16 && vs < hi - 1e-16)) vs = mid;
        v = (it % 2 == 0) ? vs : mid;  // alternate to guarantee shrinkage
        const double f = h_function(spec, u, v) - w;
        if (std::abs(f) < 1e-12 || hi - lo < 1e-15) return v;
        if (f < 0.0) {
          lo = v;
          flo = f;
        } else {
          hi = v;
          fhi = f;
        }
      }
      if (std::abs(h_function(spec, u, v) - w) > 1e-9) {
        throw ConvergenceFailure("h_inverse root finding");
      }
      return v;
    }
  }
  return w;
}

std::vector<std::pair<double, double>> sample_pair(const CopulaSpec& spec,
                                                   std::size_t count,
                                                   math::CounterRng& rng) {
  std::vector<std::pair<double, double>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.uniform();
    const double w = rng.uniform();
    out.emplace_back(u, h_inverse(spec, u, w));
  }
  return out;
}

MplFit fit_mpl(std::span<const double> u, std::span<const double> v,
               CopulaFamily family) {
  if (u.size() != v.size()) throw DimensionMismatch("rank vectors");
  if (u.size() < 100) throw TooFewObservations("fit_mpl needs >= 100 pairs");
  for (std::size_t i = 0; i < u.size(); ++i) {
    check_unit(u[i], "rank u");
    check_unit(v[i], "rank v");
  }

  auto negll = [&](const CopulaSpec& spec) {
    double ll = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      ll += copula_log_density(spec, u[i], v[i]);
    }
    return -ll;
  };

  MplFit fit;
  if (family == CopulaFamily::Gaussian) {
    auto obj = [&](double z) { return negll(CopulaSpec::gaussian(std::tanh(z))); };
    const double z = math::brent_minimize(obj, -8.0, 8.0, 1e-10);
    double rho = std::tanh(z);
    rho = std::clamp(rho, -1.0 + 1e-6, 1.0 - 1e-6);
    fit.spec = CopulaSpec::gaussian(rho);
    fit.boundary = std::abs(rho) > 1.0 - 1e-4;
  } else if (family == CopulaFamily::Gumbel) {
    auto obj = [&](double t) {
      return negll(CopulaSpec::gumbel(1.0 + std::exp(t)));
    };
    const double t = math::brent_minimize(obj, std::log(1e-6), std::log(29.0), 1e-10);
    const double theta = std::min(1.0 + std::exp(t), 30.0);
    fit.spec = CopulaSpec::gumbel(theta);
    fit.boundary = (theta - 1.0) < 1e-4 || theta > 30.0 - 1e-4;
  } else {
    throw DomainError("fit_mpl supports Gaussian and Gumbel only");
  }
  fit.loglik = -negll(fit.spec);

  // Optimum must not fall below the Kendall-tau-inversion start.
  const double tau = math::kendall_tau(u, v);
  CopulaSpec start;
  if (family == CopulaFamily::Gaussian) {
    start = CopulaSpec::gaussian(
        std::clamp(std::sin(0.5 * std::numbers::pi * tau), -1.0 + 1e-6, 1.0 - 1e-6));
  } else {
    start = CopulaSpec::gumbel(std::clamp(1.0 / std::max(1.0 - tau, 1e-6), 1.0, 30.0));
  }
  if (fit.loglik < -negll(start) - 1e-6) {
    throw NonConvergence("pseudolikelihood below tau-inversion start");
  }
  return fit;
}

CopulaSpec fit_bb1_tail_inversion(double lambda_upper_hat,
                                  double lambda_lower_hat) {
  if (!(lambda_upper_hat > 0.0 && lambda_upper_hat < 1.0) ||
      !(lambda_lower_hat > 0.0 && lambda_lower_hat < 1.0)) {
    throw TailOutOfRange("tail coefficients must lie in (0,1)");
  }
  const double delta = std::log(2.0) / std::log(2.0 - lambda_upper_hat);
  if (delta < 1.0) throw TailOutOfRange("implied delta < 1");
  const double theta = std::log(2.0) / (-delta * std::log(lambda_lower_hat));
  return CopulaSpec::bb1(theta, delta);
}

CopulaSpec fit_bb1_tail_inversion(const DependenceDiagnostics& diag) {
  return fit_bb1_tail_inversion(diag.lambda_upper_hat, diag.lambda_lower_hat);
}

namespace {

double quantile_dependence(std::span<const double> u, std::span<const double> v,
                           double q) {
  const double n = static_cast<double>(u.size());
  std::size_t count = 0;
  if (q <= 0.5) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] <= q && v[i] <= q) ++count;
    }
    return static_cast<double>(count) / (n * q);
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] > q && v[i] > q) ++count;
  }
  return static_cast<double>(count) / (n * (1.0 - q));
}

}  // namespace

DependenceDiagnostics empirical_dependence(std::span<const double> u,
                                           std::span<const double> v,
                                           std::span<const double> q_grid,
                                           double tail_q,
                                           std::size_t n_bootstrap,
                                           std::uint64_t seed) {
  if (u.size() != v.size()) throw DimensionMismatch("rank vectors");
  if (u.size() < 100) throw TooFewObservations("empirical_dependence");
  DependenceDiagnostics diag;
  diag.q_grid.assign(q_grid.begin(), q_grid.end());
  for (double q : q_grid) {
    diag.lambda_q.push_back(quantile_dependence(u, v, q));
  }

  // Averaged corner estimates over the tail windows.
  auto tail_estimates = [&](std::span<const double> uu,
                            std::span<const double> vv) {
    double lo = 0.0, hi = 0.0;
    int nlo = 0, nhi = 0;
    for (double q = 0.01; q <= tail_q + 1e-12; q += 0.005) {
      lo += quantile_dependence(uu, vv, q);
      ++nlo;
      hi += quantile_dependence(uu, vv, 1.0 - q);
      ++nhi;
    }
    return std::pair<double, double>{lo / nlo, hi / nhi};
  };
  const auto [llo, lup] = tail_estimates(u, v);
  diag.lambda_lower_hat = llo;
  diag.lambda_upper_hat = lup;

  // Bootstrap 90% band per q.
  const std::size_t n = u.size();
  std::vector<std::vector<double>> boot(q_grid.size());
  math::CounterRng rng(seed, 0x626f6f74ULL, 0);
  std::vector<double> bu(n), bv(n);
  for (std::size_t b = 0; b < n_bootstrap; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = static_cast<std::size_t>(rng.uniform() * n) % n;
      bu[i] = u[k];
      bv[i] = v[k];
    }
    for (std::size_t j = 0; j < q_grid.size(); ++j) {
      boot[j].push_back(quantile_dependence(bu, bv, q_grid[j]));
    }
  }
  for (std::size_t j = 0; j < q_grid.size(); ++j) {
    auto& bs = boot[j];
    std::sort(bs.begin(), bs.end());
    const std::size_t ilo = static_cast<std::size_t>(0.05 * (bs.size() - 1));
    const std::size_t ihi = static_cast<std::size_t>(0.95 * (bs.size() - 1));
    diag.band_lo.push_back(bs.empty() ? diag.lambda_q[j] : bs[ilo]);
    diag.band_hi.push_back(bs.empty() ? diag.lambda_q[j] : bs[ihi]);
  }
  return diag;
}

double theoretical_kendall_tau(const CopulaSpec& spec) {
  // tau = 1 - 4 int int dC/du(u,v) dC/dv(u,v) du dv; the families here are
  // exchangeable so dC/dv(u,v) = h(v,u).
  const auto& g = gl64();
  double acc = 0.0;
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      acc += g.w[i] * g.w[j] *
             h_function(spec, g.x[i], g.x[j]) *
             h_function(spec, g.x[j], g.x[i]);
    }
  }
  return 1.0 - 4.0 * acc;
}

double theoretical_spearman(const CopulaSpec& spec) {
  const auto& g = gl64();
  double acc = 0.0;
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      acc += g.w[i] * g.w[j] * copula_cdf(spec, g.x[i], g.x[j]);
    }
  }
  return 12.0 * acc - 3.0;
}

}  // namespace ghisim
