#include "ghisim/seasonal.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "ghisim/errors.hpp"

namespace ghisim {

namespace {

Eigen::MatrixXd design_matrix(std::span<const double> d_values,
                              std::span<const double> exog, int p, int q,
                              double period) {
  const auto n = static_cast<Eigen::Index>(d_values.size());
  const bool has_exog = !exog.empty();
  const Eigen::Index k = 1 + p + q + (has_exog ? 1 : 0);
  Eigen::MatrixXd X(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = 2.0 * std::numbers::pi * d_values[static_cast<std::size_t>(i)] / period;
    X(i, 0) = 1.0;
    for (int j = 1; j <= p; ++j) X(i, j) = std::cos(w * j);
    for (int j = 1; j <= q; ++j) X(i, p + j) = std::sin(w * j);
    if (has_exog) X(i, k - 1) = exog[static_cast<std::size_t>(i)];
  }
  return X;
}

FourierModel make_model(const Eigen::VectorXd& beta, int p, int q,
                        bool has_exog, double period) {
  FourierModel m;
  m.period = period;
  m.p = p;
  m.q = q;
  m.has_exog = has_exog;
  m.coeffs.assign(beta.data(), beta.data() + beta.size());
  return m;
}

}  // namespace

double fourier_eval(const FourierModel& model, double d,
                    std::optional<double> exog) {
  const double w = 2.0 * std::numbers::pi * d / model.period;
  double v = model.coeffs[0];
  for (int j = 1; j <= model.p; ++j) {
    v += model.coeffs[static_cast<std::size_t>(j)] * std::cos(w * j);
  }
  for (int j = 1; j <= model.q; ++j) {
    v += model.coeffs[static_cast<std::size_t>(model.p + j)] * std::sin(w * j);
  }
  if (model.has_exog) {
    if (!exog) throw ExogenousMissing("model declares an exogenous term");
    v += model.coeffs.back() * *exog;
  }
  return v;
}

FourierModel fit_ols(std::span<const double> d_values,
                     std::span<const double> responses,
                     std::span<const double> exog, int p, int q,
                     double period) {
  const bool has_exog = !exog.empty();
  const std::size_t k = 1 + static_cast<std::size_t>(p + q) + (has_exog ? 1 : 0);
  if (responses.size() <= k) {
    throw TooFewObservations("n <= number of coefficients");
  }
  const Eigen::MatrixXd X = design_matrix(d_values, exog, p, q, period);
  Eigen::Map<const Eigen::VectorXd> y(responses.data(),
                                      static_cast<Eigen::Index>(responses.size()));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols()) throw RankDeficient("Fourier design matrix");
  const Eigen::VectorXd beta = qr.solve(y);
  return make_model(beta, p, q, has_exog, period);
}

std::pair<int, int> select_order_bic(std::span<const double> d_values,
                                     std::span<const double> responses,
                                     std::span<const double> exog, int max_p,
                                     int max_q, double period) {
  const double n = static_cast<double>(responses.size());
  double best_bic = 0.0;
  int best_p = -1, best_q = -1;
  std::size_t best_k = 0;
  for (int p = 0; p <= max_p; ++p) {
    for (int q = 0; q <= max_q; ++q) {
      const FourierModel m = fit_ols(d_values, responses, exog, p, q, period);
      double rss = 0.0;
      for (std::size_t i = 0; i < responses.size(); ++i) {
        const double fit =
            fourier_eval(m, d_values[i],
                         exog.empty() ? std::nullopt
                                      : std::optional<double>(exog[i]));
        rss += (responses[i] - fit) * (responses[i] - fit);
      }
      const std::size_t k = m.n_coeffs();
      const double bic =
          n * std::log(std::max(rss, 1e-300) / n) + static_cast<double>(k) * std::log(n);
      const bool better =
          best_p < 0 || bic < best_bic - 1e-12 ||
          (std::abs(bic - best_bic) <= 1e-12 &&
           (k < best_k || (k == best_k && p < best_p)));
      if (better) {
        best_bic = bic;
        best_p = p;
        best_q = q;
        best_k = k;
      }
    }
  }
  return {best_p, best_q};
}

double pinball_loss(double tau, std::span<const double> residuals) {
  double loss = 0.0;
  for (double u : residuals) {
    loss += u * (tau - (u < 0.0 ? 1.0 : 0.0));
  }
  return loss;
}

QuantileFit fit_quantile(std::span<const double> d_values,
                         std::span<const double> responses,
                         std::span<const double> exog, int p, int q,
                         double tau, double period, int max_iter) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau outside (0,1)");
  const bool has_exog = !exog.empty();
  const std::size_t kc = 1 + static_cast<std::size_t>(p + q) + (has_exog ? 1 : 0);
  if (responses.size() <= kc) {
    throw TooFewObservations("n <= number of coefficients");
  }
  // Normalize the response (and the exogenous column with it) so the
  // smoothing schedule below behaves identically at any data scale.
  double unit = 0.0;
  for (const double v : responses) unit = std::max(unit, std::abs(v));
  if (!(unit > 0.0)) unit = 1.0;
  std::vector<double> y_scaled(responses.begin(), responses.end());
  for (double& v : y_scaled) v /= unit;
  std::vector<double> exog_scaled(exog.begin(), exog.end());
  for (double& v : exog_scaled) v /= unit;

  const Eigen::MatrixXd X = design_matrix(d_values, exog_scaled, p, q, period);
  Eigen::Map<const Eigen::VectorXd> y(y_scaled.data(),
                                      static_cast<Eigen::Index>(y_scaled.size()));
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) throw DegenerateDesign("quantile design matrix");
  }
  const Eigen::Index n = X.rows();
  Eigen::VectorXd beta = X.householderQr().solve(y);  // OLS start

  auto loss_at = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd r = y - X * b;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      loss += r(i) * (tau - (r(i) < 0.0 ? 1.0 : 0.0));
    }
    return loss;
  };

  int iters = 0;
  bool converged = false;
  for (double eps = 1e-2; eps >= 1e-8 / 2; eps *= 0.1) {
    for (int it = 0; it < 200 && iters < max_iter; ++it, ++iters) {
      const Eigen::VectorXd r = y - X * beta;
      Eigen::VectorXd w(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double a = (r(i) >= 0.0) ? tau : 1.0 - tau;
        w(i) = a / std::sqrt(r(i) * r(i) + eps * eps);
      }
      const Eigen::MatrixXd Xw = w.asDiagonal() * X;
      const Eigen::VectorXd bn =
          (X.transpose() * Xw).ldlt().solve(X.transpose() * (w.asDiagonal() * y));
      const double step = (bn - beta).cwiseAbs().maxCoeff();
      beta = bn;
      if (step < eps * 1e-4 + 1e-12) {
        converged = true;
        break;
      }
    }
  }
  if (!converged && iters >= max_iter) {
    // Subgradient fallback with diminishing steps.
    double best = loss_at(beta);
    Eigen::VectorXd best_beta = beta;
    const double scale = y.cwiseAbs().maxCoeff() + 1.0;
    for (int it = 0; it < 5000; ++it) {
      const Eigen::VectorXd r = y - X * beta;
      Eigen::VectorXd g = Eigen::VectorXd::Zero(X.cols());
      for (Eigen::Index i = 0; i < n; ++i) {
        const double s = (r(i) >= 0.0) ? -tau : (1.0 - tau);
        g += s * X.row(i).transpose();
      }
      beta -= (scale * 1e-4 / (1.0 + it * 0.01)) * g / static_cast<double>(n);
      const double l = loss_at(beta);
      if (l < best) {
        best = l;
        best_beta = beta;
      }
    }
    beta = best_beta;
  }

  QuantileFit fit;
  fit.tau = tau;
  fit.model = make_model(beta, p, q, has_exog, period);
  // Undo the normalization: Fourier coefficients carry the response unit,
  // while the exogenous slope is unit-free because its column was scaled too.
  for (std::size_t j = 0; j + (has_exog ? 1u : 0u) < fit.model.coeffs.size();
       ++j) {
    fit.model.coeffs[j] *= unit;
  }
  const Eigen::VectorXd r = y - X * beta;
  fit.residuals.assign(r.data(), r.data() + r.size());
  for (double& v : fit.residuals) v *= unit;
  return fit;
}

}  // namespace ghisim
