#include "ghisim/model_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ghisim/errors.hpp"

namespace ghisim {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open '" + path + "'");
  return is;
}

void check_header(std::istream& is, const std::string& kind) {
  std::string tag, got_kind;
  int version = -1;
  is >> tag >> got_kind >> version;
  if (!is || tag != "ghisim" || got_kind != kind) {
    throw ArtifactVersionMismatch("'" + kind + "' artifact header");
  }
  if (version != kArtifactVersion) {
    throw ArtifactVersionMismatch(kind + " version " +
                                  std::to_string(version));
  }
}

void write_fourier(std::ostream& os, const FourierModel& m) {
  os << fmt(m.period) << ' ' << m.p << ' ' << m.q << ' '
     << (m.has_exog ? 1 : 0);
  for (double c : m.coeffs) os << ' ' << fmt(c);
}

FourierModel read_fourier(std::istream& is) {
  FourierModel m;
  int exog = 0;
  is >> m.period >> m.p >> m.q >> exog;
  m.has_exog = exog != 0;
  m.coeffs.resize(m.n_coeffs());
  for (double& c : m.coeffs) is >> c;
  if (!is) throw ArtifactVersionMismatch("truncated Fourier block");
  return m;
}

void write_gpd(std::ostream& os, const GpdFit& g) {
  os << fmt(g.sigma) << ' ' << fmt(g.xi) << ' ' << g.n_exceed;
}

GpdFit read_gpd(std::istream& is) {
  GpdFit g;
  is >> g.sigma >> g.xi >> g.n_exceed;
  return g;
}

}  // namespace

void save_seasonal(const std::string& path, const FourierModel& model) {
  auto os = open_out(path);
  os << "ghisim seasonal " << kArtifactVersion << '\n' << "fourier ";
  write_fourier(os, model);
  os << '\n';
}

FourierModel load_seasonal(const std::string& path) {
  auto is = open_in(path);
  check_header(is, "seasonal");
  std::string key;
  is >> key;
  if (key != "fourier") throw ArtifactVersionMismatch("seasonal body");
  return read_fourier(is);
}

void save_bounds(const std::string& path, const BoundsModel& model) {
  auto os = open_out(path);
  os << "ghisim bounds " << kArtifactVersion << '\n';
  os << "tau " << fmt(model.config.tau) << '\n';
  os << "daylight_threshold " << fmt(model.config.daylight_threshold) << '\n';
  os << "min_exceedances " << model.config.min_exceedances << '\n';
  os << "min_days_per_hour " << model.config.min_days_per_hour << '\n';
  os << "lower_fitted " << (model.lower_fitted ? 1 : 0) << '\n';
  os << "upper_gpd ";
  write_gpd(os, model.upper_gpd);
  os << '\n' << "lower_gpd ";
  write_gpd(os, model.lower_gpd);
  os << '\n' << "excess_seasonality ";
  write_fourier(os, model.excess_seasonality);
  os << '\n';
  for (const auto& [h, m] : model.lambda) {
    os << "lambda " << h << ' ';
    write_fourier(os, m);
    os << '\n';
  }
  for (const auto& [h, fit] : model.upper_fits) {
    os << "upper_fit " << h << ' ' << fmt(fit.tau) << ' ';
    write_fourier(os, fit.model);
    os << '\n';
  }
  for (const auto& [h, fit] : model.lower_fits) {
    os << "lower_fit " << h << ' ' << fmt(fit.tau) << ' ';
    write_fourier(os, fit.model);
    os << '\n';
  }
  os << "toa_grid";
  for (double t : model.toa_grid) os << ' ' << fmt(t);
  os << '\n';
}

BoundsModel load_bounds(const std::string& path) {
  auto is = open_in(path);
  check_header(is, "bounds");
  BoundsModel model;
  std::string key;
  while (is >> key) {
    if (key == "tau") {
      is >> model.config.tau;
    } else if (key == "daylight_threshold") {
      is >> model.config.daylight_threshold;
    } else if (key == "min_exceedances") {
      is >> model.config.min_exceedances;
    } else if (key == "min_days_per_hour") {
      is >> model.config.min_days_per_hour;
    } else if (key == "lower_fitted") {
      int v = 0;
      is >> v;
      model.lower_fitted = v != 0;
    } else if (key == "upper_gpd") {
      model.upper_gpd = read_gpd(is);
    } else if (key == "lower_gpd") {
      model.lower_gpd = read_gpd(is);
    } else if (key == "excess_seasonality") {
      model.excess_seasonality = read_fourier(is);
    } else if (key == "lambda") {
      int h = 0;
      is >> h;
      model.lambda[h] = read_fourier(is);
    } else if (key == "upper_fit" || key == "lower_fit") {
      int h = 0;
      QuantileFit fit;
      is >> h >> fit.tau;
      fit.model = read_fourier(is);
      (key == "upper_fit" ? model.upper_fits : model.lower_fits)[h] = fit;
    } else if (key == "toa_grid") {
      model.toa_grid.resize(365 * 24);
      for (double& t : model.toa_grid) is >> t;
    } else {
      throw ArtifactVersionMismatch("unknown bounds key '" + key + "'");
    }
  }
  return model;
}

void save_marginals(const std::string& path, const MarginalModel& model) {
  auto os = open_out(path);
  os << "ghisim marginals " << kArtifactVersion << '\n';
  for (const auto& [h, c] : model.coeffs) {
    os << "beta " << h << ' ' << fmt(c.zeta1) << ' ' << fmt(c.zeta2) << ' '
       << fmt(c.theta1) << ' ' << fmt(c.theta2) << '\n';
  }
  for (const auto& [h, m] : model.lambda) {
    os << "lambda " << h << ' ';
    write_fourier(os, m);
    os << '\n';
  }
}

MarginalModel load_marginals(const std::string& path) {
  auto is = open_in(path);
  check_header(is, "marginals");
  MarginalModel model;
  std::string key;
  while (is >> key) {
    if (key == "beta") {
      int h = 0;
      BetaRegCoeffs c;
      is >> h >> c.zeta1 >> c.zeta2 >> c.theta1 >> c.theta2;
      model.coeffs[h] = c;
    } else if (key == "lambda") {
      int h = 0;
      is >> h;
      model.lambda[h] = read_fourier(is);
    } else {
      throw ArtifactVersionMismatch("unknown marginals key '" + key + "'");
    }
  }
  return model;
}

void save_daily(const std::string& path, const DailyModel& model) {
  auto os = open_out(path);
  os << "ghisim daily " << kArtifactVersion << '\n';
  const char* regime = model.regime == DailyRegime::M1   ? "M1"
                       : model.regime == DailyRegime::M2 ? "M2"
                                                         : "M3";
  os << "regime " << regime << '\n';
  os << "seasonal ";
  write_fourier(os, model.seasonal);
  os << '\n';
  os << "arma " << fmt(model.phi1) << ' ' << fmt(model.theta1) << '\n';
  os << "innovation " << fmt(model.innovation.location) << ' '
     << fmt(model.innovation.scale) << ' ' << fmt(model.innovation.shape)
     << '\n';
  os << "ljung_box " << fmt(model.ljung_box) << ' ' << model.ljung_box_lags
     << '\n';
  os << "lo_daily";
  for (double x : model.lo_daily) os << ' ' << fmt(x);
  os << '\n' << "hi_daily";
  for (double x : model.hi_daily) os << ' ' << fmt(x);
  os << '\n';
}

DailyModel load_daily(const std::string& path) {
  auto is = open_in(path);
  check_header(is, "daily");
  DailyModel model;
  std::string key;
  while (is >> key) {
    if (key == "regime") {
      std::string r;
      is >> r;
      if (r == "M1") {
        model.regime = DailyRegime::M1;
      } else if (r == "M2") {
        model.regime = DailyRegime::M2;
      } else if (r == "M3") {
        model.regime = DailyRegime::M3;
      } else {
        throw ArtifactVersionMismatch("unknown daily regime '" + r + "'");
      }
    } else if (key == "seasonal") {
      model.seasonal = read_fourier(is);
    } else if (key == "arma") {
      is >> model.phi1 >> model.theta1;
    } else if (key == "innovation") {
      is >> model.innovation.location >> model.innovation.scale >>
          model.innovation.shape;
    } else if (key == "ljung_box") {
      is >> model.ljung_box >> model.ljung_box_lags;
    } else if (key == "lo_daily") {
      model.lo_daily.resize(365);
      for (double& x : model.lo_daily) is >> x;
    } else if (key == "hi_daily") {
      model.hi_daily.resize(365);
      for (double& x : model.hi_daily) is >> x;
    } else {
      throw ArtifactVersionMismatch("unknown daily key '" + key + "'");
    }
  }
  return model;
}

namespace {

void write_spec(std::ostream& os, const CopulaSpec& spec) {
  os << family_name(spec.family) << ' ' << fmt(spec.rho) << ' '
     << fmt(spec.theta) << ' ' << fmt(spec.delta);
}

CopulaSpec read_spec(std::istream& is) {
  CopulaSpec spec;
  std::string fam;
  is >> fam >> spec.rho >> spec.theta >> spec.delta;
  spec.family = family_from_name(fam);
  return spec;
}

}  // namespace

void save_copulas(const std::string& path,
                  const std::map<int, CopulaSpec>& intraday,
                  const std::optional<CopulaSpec>& noon) {
  auto os = open_out(path);
  os << "ghisim copulas " << kArtifactVersion << '\n';
  for (const auto& [h, spec] : intraday) {
    os << "hour " << h << ' ';
    write_spec(os, spec);
    os << '\n';
  }
  if (noon) {
    os << "noon ";
    write_spec(os, *noon);
    os << '\n';
  }
}

void load_copulas(const std::string& path, std::map<int, CopulaSpec>& intraday,
                  std::optional<CopulaSpec>& noon) {
  auto is = open_in(path);
  check_header(is, "copulas");
  intraday.clear();
  noon.reset();
  std::string key;
  while (is >> key) {
    if (key == "hour") {
      int h = 0;
      is >> h;
      intraday[h] = read_spec(is);
    } else if (key == "noon") {
      noon = read_spec(is);
    } else {
      throw ArtifactVersionMismatch("unknown copulas key '" + key + "'");
    }
  }
}

RunConfig load_config(const std::string& path) {
  auto is = open_in(path);
  RunConfig cfg;
  bool have_version = false;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto bad = [&](const std::string& what) {
      return ConfigError(path + ":" + std::to_string(lineno) + ": " + what);
    };
    std::string value;
    if (!(ls >> value)) throw bad("missing value for '" + key + "'");
    try {
      if (key == "schema_version") {
        cfg.schema_version = std::stoi(value);
        have_version = true;
      } else if (key == "site_name") {
        cfg.site_name = value;
      } else if (key == "site_latitude") {
        cfg.site_latitude = std::stod(value);
      } else if (key == "site_longitude") {
        cfg.site_longitude = std::stod(value);
      } else if (key == "data") {
        cfg.data_path = value;
      } else if (key == "learn_years") {
        cfg.learn_years = std::stoi(value);
      } else if (key == "copula_family") {
        cfg.family = family_from_name(value);
      } else if (key == "variant") {
        if (value == "C1") {
          cfg.variant = Variant::C1;
        } else if (value == "C2") {
          cfg.variant = Variant::C2;
        } else {
          throw bad("variant must be C1 or C2");
        }
      } else if (key == "scenarios") {
        cfg.scenarios = static_cast<std::size_t>(std::stoull(value));
      } else if (key == "seed") {
        cfg.seed = std::stoull(value);
      } else if (key == "out") {
        cfg.out_dir = value;
      } else if (key == "vs_hour_from") {
        cfg.vs_hour_from = std::stoi(value);
      } else if (key == "vs_hour_to") {
        cfg.vs_hour_to = std::stoi(value);
      } else if (key == "anchor_hour") {
        cfg.anchor_hour = std::stoi(value);
      } else if (key == "bounds_tau") {
        cfg.bounds_tau = std::stod(value);
      } else if (key == "daylight_threshold") {
        cfg.daylight_threshold = std::stod(value);
      } else {
        throw bad("unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw bad("invalid value '" + value + "' for '" + key + "'");
    }
  }
  if (!have_version) throw ConfigError(path + ": missing schema_version");
  if (cfg.schema_version != 1) {
    throw ConfigError("unsupported schema_version " +
                      std::to_string(cfg.schema_version));
  }
  if (cfg.scenarios < 1) throw ConfigError("scenarios must be >= 1");
  if (cfg.learn_years < 1) throw ConfigError("learn_years must be >= 1");
  if (cfg.vs_hour_from > cfg.vs_hour_to || cfg.vs_hour_from < 0 ||
      cfg.vs_hour_to > 23) {
    throw ConfigError("invalid variogram hour window");
  }
  return cfg;
}

std::string config_text(const RunConfig& cfg) {
  std::ostringstream os;
  os << "schema_version " << cfg.schema_version << '\n'
     << "site_name " << cfg.site_name << '\n'
     << "site_latitude " << fmt(cfg.site_latitude) << '\n'
     << "site_longitude " << fmt(cfg.site_longitude) << '\n'
     << "data " << cfg.data_path << '\n'
     << "learn_years " << cfg.learn_years << '\n'
     << "copula_family " << family_name(cfg.family) << '\n'
     << "variant " << (cfg.variant == Variant::C1 ? "C1" : "C2") << '\n'
     << "scenarios " << cfg.scenarios << '\n';
  if (cfg.seed) os << "seed " << *cfg.seed << '\n';
  os << "out " << cfg.out_dir << '\n'
     << "vs_hour_from " << cfg.vs_hour_from << '\n'
     << "vs_hour_to " << cfg.vs_hour_to << '\n'
     << "anchor_hour " << cfg.anchor_hour << '\n'
     << "bounds_tau " << fmt(cfg.bounds_tau) << '\n'
     << "daylight_threshold " << fmt(cfg.daylight_threshold) << '\n';
  return os.str();
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string config_hash(const RunConfig& config) {
  return fnv1a_hex(config_text(config));
}

std::string file_hash(const std::string& path) {
  auto is = open_in(path);
  std::ostringstream os;
  os << is.rdbuf();
  return fnv1a_hex(os.str());
}

void write_scenarios_csv(const std::string& path, const ScenarioSet& set,
                         const std::string& variant_name) {
  auto os = open_out(path);
  os << "scenario,d,h,ghi_whm2\n";
  for (std::size_t k = 0; k < set.m; ++k) {
    for (int d = 1; d <= 365; ++d) {
      for (int h = 0; h < 24; ++h) {
        os << k + 1 << ',' << d << ',' << h << ',' << fmt(set.at(k, d, h))
           << '\n';
      }
    }
  }
  auto meta = open_out(path + ".meta");
  meta << "seed " << set.seed << '\n'
       << "bundle " << set.bundle_id << '\n'
       << "variant " << variant_name << '\n'
       << "scenarios " << set.m << '\n';
}

ScenarioSet read_scenarios_csv(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line) || line != "scenario,d,h,ghi_whm2") {
    throw ConfigError(path + ": bad scenario header");
  }
  ScenarioSet set;
  std::vector<double> values;
  std::size_t max_k = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t k = 0;
    int d = 0, h = 0;
    double g = 0.0;
    const char* p = line.c_str();
    const char* end = p + line.size();
    auto eat = [&](auto& out) {
      auto [np, ec] = std::from_chars(p, end, out);
      if (ec != std::errc{}) throw ConfigError(path + ": bad scenario row");
      p = np;
      if (p < end && *p == ',') ++p;
    };
    eat(k);
    eat(d);
    eat(h);
    eat(g);
    if (k < 1 || d < 1 || d > 365 || h < 0 || h > 23) {
      throw ConfigError(path + ": scenario row out of range");
    }
    max_k = std::max(max_k, k);
    const std::size_t idx = ScenarioSet::index(k - 1, d, h);
    if (idx >= values.size()) values.resize(max_k * 365 * 24, 0.0);
    values[idx] = g;
  }
  set.m = max_k;
  set.values = std::move(values);
  set.values.resize(set.m * 365 * 24, 0.0);
  const auto meta = read_sidecar(path);
  if (auto it = meta.find("seed"); it != meta.end()) {
    set.seed = std::stoull(it->second);
  }
  if (auto it = meta.find("bundle"); it != meta.end()) {
    set.bundle_id = it->second;
  }
  return set;
}

std::map<std::string, std::string> read_sidecar(const std::string& path) {
  std::map<std::string, std::string> meta;
  std::ifstream is(path + ".meta");
  if (!is) return meta;
  std::string key, value;
  while (is >> key >> value) meta[key] = value;
  return meta;
}

void write_score_csv(const std::string& path, const ScoreReport& report) {
  auto os = open_out(path);
  os << "model,rule,score_normalized,dm_vs_best_p\n";
  for (const auto& model : report.models) {
    for (const auto& rule : report.rules) {
      os << model << ',' << rule << ','
         << fmt(report.normalized.at(model).at(rule)) << ','
         << fmt(report.dm_vs_best.at(model).at(rule)) << '\n';
    }
  }
}

void write_score_table(std::ostream& os, const ScoreReport& report) {
  os << std::left << std::setw(14) << "model";
  for (const auto& rule : report.rules) os << std::setw(10) << rule;
  os << '\n';
  for (const auto& model : report.models) {
    os << std::left << std::setw(14) << model;
    for (const auto& rule : report.rules) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(4)
           << report.normalized.at(model).at(rule);
      if (report.best_model.at(rule) == model) cell << '*';
      os << std::setw(10) << cell.str();
    }
    os << '\n';
  }
  os << "(* best per rule; normalization: HS = 1)\n";
}

void write_envelope_csv(const std::string& path, const BoundsModel& bounds) {
  auto os = open_out(path);
  os << "d,h,g_lower,g_upper,toa\n";
  for (int d = 1; d <= 365; ++d) {
    for (int h = 0; h < 24; ++h) {
      const auto [gl, gp] = bounds_eval(bounds, d, h);
      os << d << ',' << h << ',' << fmt(gl) << ',' << fmt(gp) << ','
         << fmt(bounds.toa_at(d, h)) << '\n';
    }
  }
}

void write_dependence_csv(const std::string& path,
                          const DependenceDiagnostics& diag) {
  auto os = open_out(path);
  os << "q,lambda_hat,band_lo,band_hi\n";
  for (std::size_t i = 0; i < diag.q_grid.size(); ++i) {
    os << fmt(diag.q_grid[i]) << ',' << fmt(diag.lambda_q[i]) << ','
       << fmt(diag.band_lo.empty() ? 0.0 : diag.band_lo[i]) << ','
       << fmt(diag.band_hi.empty() ? 0.0 : diag.band_hi[i]) << '\n';
  }
}

void write_daily_csv(const std::string& path, const DailySim& sim) {
  auto os = open_out(path);
  os << "scenario,d,ghi_daily_whm2\n";
  for (std::size_t k = 0; k < sim.ghi.size(); ++k) {
    for (int d = 1; d <= 365; ++d) {
      os << k + 1 << ',' << d << ','
         << fmt(sim.ghi[k][static_cast<std::size_t>(d - 1)]) << '\n';
    }
  }
}

}  // namespace ghisim
