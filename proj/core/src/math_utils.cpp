#include "ghisim/math_utils.hpp"

#include <algorithm>
#include <numbers>
#include <cmath>
#include <limits>
#include <numeric>

#include "ghisim/errors.hpp"

namespace ghisim::math {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

// 20-point Gauss-Legendre nodes/weights on [-1,1].
constexpr int kGlN = 20;
constexpr double kGlX[kGlN] = {
    -0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
    -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
    -0.5108670019508271, -0.3737060887154195, -0.2277858511416451,
    -0.0765265211334973, 0.0765265211334973,  0.2277858511416451,
    0.3737060887154195,  0.5108670019508271,  0.6360536807265150,
    0.7463319064601508,  0.8391169718222188,  0.9122344282513259,
    0.9639719272779138,  0.9931285991850949};
constexpr double kGlW[kGlN] = {
    0.0176140071391521, 0.0406014298003869, 0.0626720483341091,
    0.0832767415767048, 0.1019301198172404, 0.1181945319615184,
    0.1316886384491766, 0.1420961093183820, 0.1491729864726037,
    0.1527533871307258, 0.1527533871307258, 0.1491729864726037,
    0.1420961093183820, 0.1316886384491766, 0.1181945319615184,
    0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
    0.0406014298003869, 0.0176140071391521};

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("norm_inv requires p in (0,1)");
  }
  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Newton polish step.
  double e = norm_cdf(x) - p;
  double u = e / norm_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double binormal_copula_cdf(double u, double v, double rho) {
  if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)) {
    throw DomainError("binormal_copula_cdf requires (u,v) in (0,1)^2");
  }
  if (std::abs(rho) < 1e-14) return u * v;
  if (rho > 1.0 - 1e-12) return std::min(u, v);
  if (rho < -1.0 + 1e-12) return std::max(u + v - 1.0, 0.0);
  // Tetrachoric expansion: C(u,v) = uv + (1/2pi) * int_0^{asin(rho)}
  // exp(-(h^2 + k^2 - 2 h k sin t) / (2 cos^2 t)) dt, a smooth integrand
  // for every rho in (-1,1) including the near-comonotone limit.
  const double h = norm_inv(u);
  const double k = norm_inv(v);
  const double upper = std::asin(rho);
  double total = 0.0;
  const int panels = 4;
  for (int pnl = 0; pnl < panels; ++pnl) {
    const double lo = upper * pnl / panels;
    const double hi2 = upper * (pnl + 1) / panels;
    const double half = 0.5 * (hi2 - lo);
    const double mid = 0.5 * (hi2 + lo);
    double acc = 0.0;
    for (int i = 0; i < kGlN; ++i) {
      const double t = mid + half * kGlX[i];
      const double c = std::cos(t);
      acc += kGlW[i] *
             std::exp(-(h * h + k * k - 2.0 * h * k * std::sin(t)) /
                      (2.0 * c * c));
    }
    total += acc * half;
  }
  const double cuv = u * v + total / (2.0 * std::numbers::pi);
  return std::clamp(cuv, std::max(u + v - 1.0, 0.0), std::min(u, v));
}

double digamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) {
    throw DomainError("digamma pole");
  }
  double result = 0.0;
  // Recurrence to push the argument above 10, then asymptotic series.
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 -
                    inv2 * (1.0 / 120.0 -
                            inv2 * (1.0 / 252.0 - inv2 / 240.0)));
  return result;
}

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double betacf(double x, double a, double b) {
  const double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-14) break;
  }
  return h;
}

}  // namespace

double reg_inc_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("reg_inc_beta shape parameters");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(x, a, b) / a;
  }
  return 1.0 - front * betacf(1.0 - x, b, a) / b;
}

double reg_inc_beta_inv(double p, double a, double b) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("reg_inc_beta_inv level");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  double x = a / (a + b);
  const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  for (int it = 0; it < 200; ++it) {
    const double f = reg_inc_beta(x, a, b) - p;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    if (std::abs(f) < 1e-14) break;
    double dens = 0.0;
    if (x > 0.0 && x < 1.0) {
      dens = std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) -
                      lbeta);
    }
    double xn = (dens > 1e-300) ? x - f / dens : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) < 1e-15) {
      x = xn;
      break;
    }
    x = xn;
  }
  return x;
}

double logit(double x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("logit argument");
  return std::log(x / (1.0 - x));
}

double logistic(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream_hi,
                       std::uint64_t stream_lo) {
  std::uint64_t s = seed;
  std::uint64_t mix = splitmix64(s);
  s ^= stream_hi + 0x9e3779b97f4a7c15ULL;
  mix ^= splitmix64(s);
  s ^= stream_lo + 0xbf58476d1ce4e5b9ULL;
  mix ^= splitmix64(s);
  state_ = mix;
}

std::uint64_t CounterRng::next_u64() { return splitmix64(state_); }

double CounterRng::uniform() {
  // 53-bit mantissa, offset by half an ulp so 0 and 1 are excluded.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() { return norm_inv(uniform()); }

// ---------------------------------------------------------------------------

OptimResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                        std::span<const double> x0, double step, int max_iter,
                        double ftol) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < n; ++i) {
    pts[i + 1][i] += (pts[i + 1][i] != 0.0) ? step * std::abs(pts[i + 1][i])
                                            : step;
  }
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  OptimResult res;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    std::vector<std::size_t> idx(n + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];
    if (std::abs(fv[worst] - fv[best]) <=
        ftol * (std::abs(fv[best]) + std::abs(fv[worst]) + 1e-30)) {
      res.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) {
        p[j] = centroid[j] + coef * (pts[worst][j] - centroid[j]);
      }
      return p;
    };
    std::vector<double> refl = blend(-1.0);
    double frefl = f(refl);
    if (frefl < fv[best]) {
      std::vector<double> exp_pt = blend(-2.0);
      double fexp = f(exp_pt);
      if (fexp < frefl) {
        pts[worst] = std::move(exp_pt);
        fv[worst] = fexp;
      } else {
        pts[worst] = std::move(refl);
        fv[worst] = frefl;
      }
    } else if (frefl < fv[second]) {
      pts[worst] = std::move(refl);
      fv[worst] = frefl;
    } else {
      std::vector<double> contr = blend(0.5);
      double fcontr = f(contr);
      if (fcontr < fv[worst]) {
        pts[worst] = std::move(contr);
        fv[worst] = fcontr;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < n; ++j) {
            pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
          }
          fv[i] = f(pts[i]);
        }
      }
    }
  }
  const std::size_t arg = static_cast<std::size_t>(
      std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = pts[arg];
  res.fval = fv[arg];
  res.iterations = iter;
  return res;
}

OptimResult bfgs(
    const std::function<double(std::span<const double>)>& f,
    const std::function<std::vector<double>(std::span<const double>)>& grad,
    std::span<const double> x0, int max_iter, double gtol) {
  const std::size_t n = x0.size();
  auto num_grad = [&](std::span<const double> x) {
    std::vector<double> g(n), xp(x.begin(), x.end());
    for (std::size_t i = 0; i < n; ++i) {
      const double h = 1e-6 * (std::abs(x[i]) + 1.0);
      xp[i] = x[i] + h;
      const double fp = f(xp);
      xp[i] = x[i] - h;
      const double fm = f(xp);
      xp[i] = x[i];
      g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
  };
  auto gradient = [&](std::span<const double> x) {
    return grad ? grad(x) : num_grad(x);
  };

  std::vector<double> x(x0.begin(), x0.end());
  double fx = f(x);
  std::vector<double> g = gradient(x);
  // Inverse Hessian approximation, row-major identity.
  std::vector<double> H(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;

  OptimResult res;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    double gnorm = 0.0;
    for (double gi : g) gnorm = std::max(gnorm, std::abs(gi));
    if (gnorm < gtol) {
      res.converged = true;
      break;
    }
    std::vector<double> p(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) p[i] -= H[i * n + j] * g[j];
    }
    double gp = 0.0;
    for (std::size_t i = 0; i < n; ++i) gp += g[i] * p[i];
    if (gp > 0.0) {  // reset on loss of descent direction
      std::fill(H.begin(), H.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
      for (std::size_t i = 0; i < n; ++i) p[i] = -g[i];
      gp = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
    }
    double alpha = 1.0;
    std::vector<double> xn(n);
    double fn = fx;
    bool ok = false;
    for (int ls = 0; ls < 50; ++ls) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + alpha * p[i];
      fn = f(xn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * alpha * gp) {
        ok = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!ok) break;
    std::vector<double> gn = gradient(xn);
    std::vector<double> s(n), y(n);
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
      sy += s[i] * y[i];
    }
    if (sy > 1e-12) {
      // BFGS inverse update.
      std::vector<double> Hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * y[j];
      }
      double yHy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yHy += y[i] * Hy[i];
      const double c1 = (sy + yHy) / (sy * sy);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          H[i * n + j] += c1 * s[i] * s[j] -
                          (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
        }
      }
    }
    x = xn;
    fx = fn;
    g = std::move(gn);
  }
  res.x = x;
  res.fval = fx;
  res.iterations = iter;
  return res;
}

double brent_minimize(const std::function<double(double)>& f, double a,
                      double b, double tol, int max_iter) {
  const double gold = 0.3819660112501051;
  double x = a + gold * (b - a);
  double w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const double m = 0.5 * (a + b);
    const double tol1 = tol * std::abs(x) + 1e-12;
    if (std::abs(x - m) <= 2.0 * tol1 - 0.5 * (b - a)) break;
    bool parabolic = false;
    if (std::abs(e) > tol1) {
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      if (std::abs(p) < std::abs(0.5 * q * e) && p > q * (a - x) &&
          p < q * (b - x)) {
        e = d;
        d = p / q;
        parabolic = true;
      }
    }
    if (!parabolic) {
      e = (x < m) ? b - x : a - x;
      d = gold * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d
                                           : x + (d > 0 ? tol1 : -tol1);
    const double fu = f(u);
    if (fu <= fx) {
      if (u < x) {
        b = x;
      } else {
        a = x;
      }
      v = w; fv = fw; w = x; fw = fx; x = u; fx = fu;
    } else {
      if (u < x) {
        a = u;
      } else {
        b = u;
      }
      if (fu <= fw || w == x) {
        v = w; fv = fw; w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return x;
}

double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double tol, int max_iter) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw ConvergenceFailure("bisect_root: no sign change");
  for (int it = 0; it < max_iter; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0 || 0.5 * (b - a) < tol) return m;
    if (fa * fm < 0.0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------

double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) /
         static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  const double m = mean(x);
  double acc = 0.0;
  for (double xi : x) acc += (xi - m) * (xi - m);
  return acc / static_cast<double>(x.size() - 1);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

// Counts inversions by merge sort; used for Kendall's tau.
std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& buf,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      count += mid - i;
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<long>(lo), buf.begin() + static_cast<long>(hi),
            v.begin() + static_cast<long>(lo));
  return count;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
  std::vector<double> buf(n);
  const std::uint64_t disc = merge_count(ys, buf, 0, n);
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return 1.0 - 2.0 * static_cast<double>(disc) / pairs;
}

std::vector<double> scaled_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      r[idx[k]] = avg / static_cast<double>(n + 1);
    }
    i = j + 1;
  }
  return r;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = scaled_ranks(x);
  const auto ry = scaled_ranks(y);
  return pearson(rx, ry);
}

double ks_statistic_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(u[i] - lo), std::abs(hi - u[i])));
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * std::pow(-1.0, k - 1) *
                        std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace ghisim::math
