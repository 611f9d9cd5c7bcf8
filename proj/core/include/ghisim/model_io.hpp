#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ghisim/bounds.hpp"
#include "ghisim/copulas.hpp"
#include "ghisim/daily.hpp"
#include "ghisim/marginals.hpp"
#include "ghisim/scenario.hpp"
#include "ghisim/scoring.hpp"
#include "ghisim/seasonal.hpp"

namespace ghisim {

inline constexpr int kArtifactVersion = 1;

// Versioned structured-text model artifacts. All writes are deterministic
// (fixed ordering, round-trip precision) so reruns are byte-identical.
void save_seasonal(const std::string& path, const FourierModel& model);
FourierModel load_seasonal(const std::string& path);

void save_bounds(const std::string& path, const BoundsModel& model);
BoundsModel load_bounds(const std::string& path);

void save_marginals(const std::string& path, const MarginalModel& model);
MarginalModel load_marginals(const std::string& path);

void save_daily(const std::string& path, const DailyModel& model);
DailyModel load_daily(const std::string& path);

void save_copulas(const std::string& path,
                  const std::map<int, CopulaSpec>& intraday,
                  const std::optional<CopulaSpec>& noon);
void load_copulas(const std::string& path, std::map<int, CopulaSpec>& intraday,
                  std::optional<CopulaSpec>& noon);

// Flat key-value run configuration with a schema_version key.
struct RunConfig {
  int schema_version = 1;
  std::string site_name = "site";
  double site_latitude = 0.0;
  double site_longitude = 0.0;
  std::string data_path;
  int learn_years = 7;  // first N panel years learn, remainder test
  CopulaFamily family = CopulaFamily::Gumbel;
  Variant variant = Variant::C2;
  std::size_t scenarios = 1000;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int vs_hour_from = 10;
  int vs_hour_to = 16;
  int anchor_hour = 12;
  double bounds_tau = 0.75;
  double daylight_threshold = 1.0;
};

RunConfig load_config(const std::string& path);
std::string config_text(const RunConfig& config);

// FNV-1a 64-bit content hash, hex-encoded.
std::string fnv1a_hex(const std::string& text);
std::string config_hash(const RunConfig& config);
std::string file_hash(const std::string& path);

// Scenario CSV `scenario,d,h,ghi_whm2` plus a metadata sidecar with
// seed, bundle hash and variant.
void write_scenarios_csv(const std::string& path, const ScenarioSet& set,
                         const std::string& variant_name);
ScenarioSet read_scenarios_csv(const std::string& path);
// Sidecar lives at path + ".meta"; returns key->value pairs.
std::map<std::string, std::string> read_sidecar(const std::string& path);

void write_score_csv(const std::string& path, const ScoreReport& report);
void write_score_table(std::ostream& os, const ScoreReport& report);

// Plot data: `d,h,g_lower,g_upper,toa`.
void write_envelope_csv(const std::string& path, const BoundsModel& bounds);
// Plot data: `q,lambda_hat,band_lo,band_hi`.
void write_dependence_csv(const std::string& path,
                          const DependenceDiagnostics& diag);
// Daily scenarios: `scenario,d,ghi_daily_whm2`.
void write_daily_csv(const std::string& path, const DailySim& sim);

}  // namespace ghisim
