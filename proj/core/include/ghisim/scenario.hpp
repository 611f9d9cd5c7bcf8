#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ghisim/bounds.hpp"
#include "ghisim/calendar.hpp"
#include "ghisim/copulas.hpp"
#include "ghisim/marginals.hpp"

namespace ghisim {

enum class Variant { C1, C2 };

// Everything needed to simulate: envelope, marginals, the intraday copula
// chain C_h (keyed by the earlier hour of the pair) and the noon-to-noon
// copula C* for the C2 Markov tree.
struct ModelBundle {
  BoundsModel bounds;
  MarginalModel marginals;
  std::map<int, CopulaSpec> intraday;
  std::optional<CopulaSpec> noon;
  Variant variant = Variant::C1;
  int anchor_hour = 12;
};

struct ScenarioSet {
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::string bundle_id;
  std::vector<double> values;  // m * 365 * 24, Wh/m^2

  static std::size_t index(std::size_t k, int d, int h) {
    return (k * 365 + static_cast<std::size_t>(d - 1)) * 24 +
           static_cast<std::size_t>(h);
  }
  double at(std::size_t k, int d, int h) const { return values[index(k, d, h)]; }
};

// Year-long hourly scenarios via the Markov-tree recursion: daily driver
// at the anchor hour (chained through C* for C2, independent for C1),
// intraday propagation backward and forward through the C_h chain, then
// inversion through the beta PIT and the bound rescaling. Scenario k
// depends only on (seed, k); each (scenario, day) owns a counter stream.
ScenarioSet simulate(const ModelBundle& bundle, std::size_t m,
                     std::uint64_t seed);

// Historical simulation benchmark: each hour drawn uniformly from the
// learn years at the same (d,h), independent across (d,h).
ScenarioSet benchmark_hs(const HourlyPanel& learn, std::size_t m,
                         std::uint64_t seed);

// Deterministic allocation benchmark: a daily total spread over the hours
// proportionally to the upper-bound profile.
ScenarioSet benchmark_da(const std::vector<std::vector<double>>& daily_totals,
                         const BoundsModel& bounds);

std::vector<std::vector<double>> daily_sums(const ScenarioSet& set);

// Copula estimation on rank-transformed PIT values of the fitted
// marginals; one spec per consecutive-hour pair, one for noon-to-noon.
std::map<int, CopulaSpec> fit_intraday_copulas(const HourlyPanel& panel,
                                               const BoundsModel& bounds,
                                               const MarginalModel& marginals,
                                               const IntensityGrid& grid,
                                               CopulaFamily family);

CopulaSpec fit_noon_copula(const HourlyPanel& panel, const BoundsModel& bounds,
                           const MarginalModel& marginals,
                           const IntensityGrid& grid, CopulaFamily family,
                           int anchor_hour = 12);

}  // namespace ghisim
