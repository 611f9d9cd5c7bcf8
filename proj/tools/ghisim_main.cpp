// ghisim command line: fit / simulate / score / report / synth.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ghisim/bounds.hpp"
#include "ghisim/calendar.hpp"
#include "ghisim/copulas.hpp"
#include "ghisim/daily.hpp"
#include "ghisim/errors.hpp"
#include "ghisim/marginals.hpp"
#include "ghisim/model_io.hpp"
#include "ghisim/scenario.hpp"
#include "ghisim/scoring.hpp"
#include "ghisim/synth.hpp"

namespace fs = std::filesystem;
using namespace ghisim;

namespace {

struct CliOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out_override;
  bool force = false;
};

RunConfig make_config(const CliOptions& opt) {
  RunConfig cfg = load_config(opt.config_path);
  if (opt.seed) cfg.seed = opt.seed;
  if (!opt.out_override.empty()) cfg.out_dir = opt.out_override;
  return cfg;
}

HourlyPanel load_panel(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw ConfigError("config has no 'data' path");
  if (!fs::exists(cfg.data_path)) {
    throw EmptyFile("data file '" + cfg.data_path + "' not found");
  }
  CleaningReport report;
  HourlyPanel panel = ingest_csv(cfg.data_path, CsvSchema{}, &report);
  if (!report.empty()) std::cerr << report.to_text();
  return panel;
}

std::pair<HourlyPanel, HourlyPanel> split_panel(const HourlyPanel& panel,
                                                const RunConfig& cfg) {
  if (panel.n_years() <= cfg.learn_years) {
    throw IncompleteYears("need more than learn_years years of data");
  }
  std::vector<int> learn, test;
  for (int i = 0; i < panel.n_years(); ++i) {
    (i < cfg.learn_years ? learn : test).push_back(i);
  }
  return {panel.select_years(learn), panel.select_years(test)};
}

std::string scenario_file(const RunConfig& cfg) {
  const std::string variant = cfg.variant == Variant::C1 ? "C1" : "C2";
  return (fs::path(cfg.out_dir) /
          ("scenarios_" + variant + "_" + family_name(cfg.family) + ".csv"))
      .string();
}

std::string artifact(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

std::string bundle_hash(const RunConfig& cfg) {
  return fnv1a_hex(file_hash(artifact(cfg, "bounds.model")) +
                   file_hash(artifact(cfg, "marginals.model")) +
                   file_hash(artifact(cfg, "copulas.model")));
}

ModelBundle load_bundle(const RunConfig& cfg) {
  ModelBundle bundle;
  bundle.bounds = load_bounds(artifact(cfg, "bounds.model"));
  bundle.marginals = load_marginals(artifact(cfg, "marginals.model"));
  load_copulas(artifact(cfg, "copulas.model"), bundle.intraday, bundle.noon);
  bundle.variant = cfg.variant;
  bundle.anchor_hour = cfg.anchor_hour;
  return bundle;
}

int cmd_fit(const CliOptions& opt) {
  const RunConfig cfg = make_config(opt);
  fs::create_directories(cfg.out_dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, auto&& save) {
    const std::string path = artifact(cfg, name);
    save(path);
    written.push_back(path);
  };
  try {
    const HourlyPanel panel = load_panel(cfg);
    auto [learn, test] = split_panel(panel, cfg);
    (void)test;

    BoundsConfig bcfg;
    bcfg.tau = cfg.bounds_tau;
    bcfg.daylight_threshold = cfg.daylight_threshold;
    BoundsModel bounds = fit_upper_bound(learn, bcfg);
    fit_lower_bound(learn, bounds);
    emit("bounds.model", [&](const std::string& p) { save_bounds(p, bounds); });

    const IntensityGrid grid = intensity(learn, bounds);
    const MarginalModel marginals = fit_marginals(learn, bounds, grid);
    emit("marginals.model",
         [&](const std::string& p) { save_marginals(p, marginals); });

    const auto intraday =
        fit_intraday_copulas(learn, bounds, marginals, grid, cfg.family);
    std::optional<CopulaSpec> noon;
    if (cfg.variant == Variant::C2) {
      noon = fit_noon_copula(learn, bounds, marginals, grid, cfg.family,
                             cfg.anchor_hour);
    }
    emit("copulas.model",
         [&](const std::string& p) { save_copulas(p, intraday, noon); });

    for (auto regime : {DailyRegime::M1, DailyRegime::M2, DailyRegime::M3}) {
      const DailyModel daily = fit_daily(learn, regime, bounds);
      const char* name = regime == DailyRegime::M1   ? "daily_m1.model"
                         : regime == DailyRegime::M2 ? "daily_m2.model"
                                                     : "daily_m3.model";
      emit(name, [&](const std::string& p) { save_daily(p, daily); });
    }

    std::ofstream log(artifact(cfg, "fit.log"));
    log << "config_hash " << config_hash(cfg) << '\n'
        << "bundle_hash " << bundle_hash(cfg) << '\n'
        << "upper_gpd sigma " << bounds.upper_gpd.sigma << " xi "
        << bounds.upper_gpd.xi << " n " << bounds.upper_gpd.n_exceed << '\n'
        << "lower_gpd sigma " << bounds.lower_gpd.sigma << " xi "
        << bounds.lower_gpd.xi << " n " << bounds.lower_gpd.n_exceed << '\n'
        << "marginal_hours " << marginals.coeffs.size() << '\n'
        << "intraday_pairs " << intraday.size() << '\n';
    for (const auto& [h, spec] : intraday) {
      log << "pair " << h << '-' << h + 1 << ' ' << family_name(spec.family)
          << " lambda_u " << spec.lambda_upper() << " lambda_l "
          << spec.lambda_lower() << '\n';
    }
    std::cout << "fit complete: " << written.size() << " artifacts in "
              << cfg.out_dir << '\n';
    return 0;
  } catch (...) {
    for (const auto& path : written) {
      std::error_code ec;
      fs::remove(path, ec);
    }
    throw;
  }
}

int cmd_simulate(const CliOptions& opt) {
  const RunConfig cfg = make_config(opt);
  if (!cfg.seed) throw SeedMissing("simulate requires --seed or a config seed");
  ModelBundle bundle = load_bundle(cfg);
  ScenarioSet set = simulate(bundle, cfg.scenarios, *cfg.seed);
  set.bundle_id = bundle_hash(cfg);
  const std::string path = scenario_file(cfg);
  write_scenarios_csv(path, set, cfg.variant == Variant::C1 ? "C1" : "C2");
  std::cout << "wrote " << set.m << " scenario years to " << path << '\n';
  return 0;
}

int cmd_score(const CliOptions& opt) {
  const RunConfig cfg = make_config(opt);
  const HourlyPanel panel = load_panel(cfg);
  auto [learn, test] = split_panel(panel, cfg);

  const BoundsModel bounds = load_bounds(artifact(cfg, "bounds.model"));
  const std::string path = scenario_file(cfg);
  if (!fs::exists(path)) {
    throw EmptyFile("scenario file '" + path + "' not found; run simulate");
  }
  ScenarioSet model_set = read_scenarios_csv(path);
  const std::string expected = bundle_hash(cfg);
  if (!opt.force && !model_set.bundle_id.empty() &&
      model_set.bundle_id != expected) {
    throw ArtifactVersionMismatch(
        "scenario bundle hash " + model_set.bundle_id +
        " does not match fitted artifacts " + expected +
        " (use --force to override)");
  }

  const std::uint64_t seed = cfg.seed.value_or(model_set.seed);
  const ScenarioSet hs = benchmark_hs(learn, model_set.m, seed + 1);
  const ScenarioSet da = benchmark_da(daily_sums(model_set), bounds);

  const std::string model_name =
      std::string(cfg.variant == Variant::C1 ? "C1-" : "C2-") +
      family_name(cfg.family);
  std::map<std::string, const ScenarioSet*> models{
      {"HS", &hs}, {"DA", &da}, {model_name, &model_set}};
  ScoringConfig scfg;
  scfg.vs_hour_from = cfg.vs_hour_from;
  scfg.vs_hour_to = cfg.vs_hour_to;
  const ScoreReport report = evaluate(models, test, bounds, scfg);
  write_score_csv(artifact(cfg, "scores.csv"), report);
  write_score_table(std::cout, report);
  return 0;
}

int cmd_report(const CliOptions& opt) {
  const RunConfig cfg = make_config(opt);
  const BoundsModel bounds = load_bounds(artifact(cfg, "bounds.model"));
  write_envelope_csv(artifact(cfg, "envelope.csv"), bounds);

  // Quantile-dependence curves for the anchor-hour pair, from the data.
  const HourlyPanel panel = load_panel(cfg);
  auto [learn, test] = split_panel(panel, cfg);
  (void)test;
  const MarginalModel marginals =
      load_marginals(artifact(cfg, "marginals.model"));
  const IntensityGrid grid = intensity(learn, bounds);
  const int h = cfg.anchor_hour;
  if (marginals.coeffs.count(h) && marginals.coeffs.count(h + 1)) {
    std::vector<double> u1, u2;
    for (int i = 0; i < learn.n_years(); ++i) {
      for (int d = 1; d <= 365; ++d) {
        if (!grid.is_valid(i, d, h) || !grid.is_valid(i, d, h + 1)) continue;
        u1.push_back(grid.at(i, d, h));
        u2.push_back(grid.at(i, d, h + 1));
      }
    }
    std::vector<double> q_grid;
    for (double q = 0.025; q <= 0.9751; q += 0.025) q_grid.push_back(q);
    const auto diag = empirical_dependence(u1, u2, q_grid);
    write_dependence_csv(artifact(cfg, "dependence_anchor.csv"), diag);
  }

  // A small simulated-path panel if scenarios are present.
  const std::string spath = scenario_file(cfg);
  if (fs::exists(spath)) {
    const ScenarioSet set = read_scenarios_csv(spath);
    std::ofstream os(artifact(cfg, "paths.csv"));
    os << "scenario,d,h,ghi_whm2\n";
    const std::size_t n_paths = std::min<std::size_t>(set.m, 5);
    for (std::size_t k = 0; k < n_paths; ++k) {
      for (int d = 1; d <= 365; ++d) {
        for (int hh = 0; hh < 24; ++hh) {
          os << k + 1 << ',' << d << ',' << hh << ',' << set.at(k, d, hh)
             << '\n';
        }
      }
    }
  }
  std::cout << "report data written to " << cfg.out_dir << '\n';
  return 0;
}

int cmd_synth(const std::string& out_path, int years, std::uint64_t seed) {
  SynthSpec spec;
  spec.years = years;
  spec.seed = seed;
  const HourlyPanel panel = synth_panel(spec);
  export_csv(panel, out_path);
  std::cout << "wrote " << years << " synthetic years to " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copula-based hourly GHI scenario toolkit"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string synth_out = "synth.csv";
  int synth_years = 9;
  std::uint64_t synth_seed = 99;

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* c = sub->add_option("--config", opt.config_path, "run config file");
    if (need_config) c->required();
    sub->add_option("--seed", [&](const std::vector<std::string>& v) {
      opt.seed = std::stoull(v.front());
      return true;
    }, "random seed (overrides config)");
    sub->add_option("--jobs", opt.jobs, "worker count");
    sub->add_option("--out", opt.out_override, "output directory override");
  };

  auto* fit = app.add_subcommand("fit", "fit model artifacts");
  add_common(fit, true);
  auto* simulate = app.add_subcommand("simulate", "generate scenario years");
  add_common(simulate, true);
  auto* score = app.add_subcommand("score", "score scenarios vs test data");
  add_common(score, true);
  score->add_flag("--force", opt.force, "ignore bundle hash mismatches");
  auto* report = app.add_subcommand("report", "emit plot-data CSVs");
  add_common(report, true);
  auto* synth = app.add_subcommand("synth", "emit a synthetic dataset");
  synth->add_option("--out", synth_out, "output CSV path");
  synth->add_option("--years", synth_years, "number of years");
  synth->add_option("--seed", synth_seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed()) return cmd_fit(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (score->parsed()) return cmd_score(opt);
    if (report->parsed()) return cmd_report(opt);
    if (synth->parsed()) return cmd_synth(synth_out, synth_years, synth_seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const SeedMissing& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const MissingColumn& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const NonMonotoneTimestamps& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const GapTooLarge& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const EmptyFile& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const IncompleteYears& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const ArtifactVersionMismatch& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
