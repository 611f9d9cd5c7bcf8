#include "ghisim/synth.hpp"

#include <cmath>

#include "ghisim/copulas.hpp"
#include "ghisim/marginals.hpp"
#include "ghisim/math_utils.hpp"

namespace ghisim {

std::pair<double, double> SynthTruth::bounds(int d, int h) const {
  const double toa = compute_toa(spec.site, d, h);
  if (toa <= spec.daylight_toa) return {0.0, 0.0};
  const double gp = spec.upper_frac * toa;
  const int h1 = first_daylight_hour(d);
  const int h2 = last_daylight_hour(d);
  const double gl = (h > h1 && h < h2) ? spec.lower_frac * gp : 0.0;
  return {gl, gp};
}

int SynthTruth::first_daylight_hour(int d) const {
  for (int h = 0; h < 24; ++h) {
    if (compute_toa(spec.site, d, h) > spec.daylight_toa) return h;
  }
  return -1;
}

int SynthTruth::last_daylight_hour(int d) const {
  for (int h = 23; h >= 0; --h) {
    if (compute_toa(spec.site, d, h) > spec.daylight_toa) return h;
  }
  return -1;
}

HourlyPanel synth_panel(const SynthSpec& spec) {
  const SynthTruth truth{spec};
  const CopulaSpec intraday = CopulaSpec::gumbel(spec.gumbel_theta);
  const CopulaSpec noon = CopulaSpec::gumbel(spec.noon_theta);
  const BetaParams beta{spec.beta_mu, spec.beta_phi};

  HourlyPanel panel(spec.site, spec.first_year, spec.years);
  std::vector<double> u(24, 0.0);
  for (int i = 0; i < spec.years; ++i) {
    double ustar_prev = 0.5;
    for (int d = 1; d <= 365; ++d) {
      math::CounterRng rng(spec.seed, static_cast<std::uint64_t>(i) + 1,
                           static_cast<std::uint64_t>(d));
      const double vd = rng.uniform();
      const double ustar =
          (i == 0 && d == 1) ? vd : h_inverse(noon, ustar_prev, vd);
      ustar_prev = ustar;

      const int h1 = truth.first_daylight_hour(d);
      const int h2 = truth.last_daylight_hour(d);
      if (h1 < 0) {
        for (int h = 0; h < 24; ++h) {
          panel.set(i, d, h, 0.0, compute_toa(spec.site, d, h));
        }
        continue;
      }
      const int anchor = std::clamp(spec.anchor_hour, h1, h2);
      u[static_cast<std::size_t>(anchor)] = ustar;
      for (int j = anchor - 1; j >= h1; --j) {
        u[static_cast<std::size_t>(j)] =
            h_inverse(intraday, u[static_cast<std::size_t>(j + 1)],
                      rng.uniform());
      }
      for (int j = anchor + 1; j <= h2; ++j) {
        u[static_cast<std::size_t>(j)] =
            h_inverse(intraday, u[static_cast<std::size_t>(j - 1)],
                      rng.uniform());
      }
      for (int h = 0; h < 24; ++h) {
        const double toa = compute_toa(spec.site, d, h);
        double g = 0.0;
        if (h >= h1 && h <= h2) {
          const auto [gl, gp] = truth.bounds(d, h);
          if (gp > gl) {
            const double m = beta.quantile(u[static_cast<std::size_t>(h)]);
            g = gl + m * (gp - gl);
          }
        }
        panel.set(i, d, h, g, toa);
      }
    }
  }
  return panel;
}

}  // namespace ghisim
