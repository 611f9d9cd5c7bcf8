#pragma once

#include <cstdint>
#include <map>

#include "ghisim/calendar.hpp"

namespace ghisim {

// Generator for synthetic hourly GHI panels with a fully known truth:
// envelope proportional to TOA, constant-per-hour beta intensities, a
// Gumbel chain across consecutive hours and a Gumbel noon-to-noon chain.
struct SynthSpec {
  Site site{0.0, 8.0, "synthville"};
  int first_year = 2001;
  int years = 9;
  double upper_frac = 0.9;       // g+ = upper_frac * TOA
  double lower_frac = 0.2;       // g- = lower_frac * g+ at interior hours
  double daylight_toa = 100.0;   // Wh/m^2; TOA above this counts as daylight
  double beta_mu = 0.55;
  double beta_phi = 6.0;
  double gumbel_theta = 2.0;     // intraday pairs
  double noon_theta = 1.7;       // noon-to-noon chain
  int anchor_hour = 12;
  std::uint64_t seed = 99;
};

struct SynthTruth {
  SynthSpec spec;

  // True envelope at (d,h); (0,0) outside the daylight window.
  std::pair<double, double> bounds(int d, int h) const;
  int first_daylight_hour(int d) const;
  int last_daylight_hour(int d) const;
};

HourlyPanel synth_panel(const SynthSpec& spec);

}  // namespace ghisim
