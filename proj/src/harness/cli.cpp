#include "amwu/harness/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "amwu/errors.hpp"
#include "amwu/harness/config.hpp"
#include "amwu/harness/experiments.hpp"
#include "amwu/harness/report.hpp"

namespace amwu::harness {

namespace {

struct Flags {
  std::string config;
  std::string preset;
  std::string algo;
  std::optional<long> iters;
  std::optional<unsigned long long> seed;
  std::string out;
  bool svg = false;
  std::string mode;
  std::optional<long> trials;
  std::optional<double> radius;
  std::optional<int> threads;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config or sidecar");
  cmd->add_option("--preset", f.preset, "built-in preset");
  cmd->add_option("--algo", f.algo, "comma-separated algorithms: mwu, amwu, amwu_literal, amwu_ragd, amd, amd:R");
  cmd->add_option("--iters", f.iters, "iteration budget");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--svg", f.svg, "also write an SVG chart");
  cmd->add_option("--mode", f.mode, "A-MWU mode for 'amwu'")->check(CLI::IsMember({"literal", "ragd"}));
  cmd->add_option("--trials", f.trials, "avoidance trials");
  cmd->add_option("--radius", f.radius, "avoidance sampling radius");
  cmd->add_option("--threads", f.threads, "avoidance worker threads");
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ExperimentConfig resolve(const Flags& f, bool algo_given) {
  ExperimentConfig cfg;
  if (!f.preset.empty()) cfg = preset(f.preset);
  if (!f.config.empty()) cfg = load_config(f.config, cfg);
  if (f.preset.empty() && f.config.empty()) cfg = preset("rosenbrock");
  if (algo_given) cfg.algorithms = split(f.algo);
  if (f.iters) cfg.max_iters = *f.iters;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.svg) cfg.svg = true;
  if (f.mode == "literal") cfg.mode = AmwuMode::literal;
  if (f.mode == "ragd") cfg.mode = AmwuMode::ragd;
  if (f.trials) cfg.avoidance.trials = *f.trials;
  if (f.radius) cfg.avoidance.radius = *f.radius;
  if (f.threads) cfg.avoidance.threads = *f.threads;
  return cfg;
}

void print_warnings(const std::vector<std::string>& w, std::ostream& err) {
  for (const auto& s : w) err << "warning: " << s << "\n";
}

std::string describe(const std::exception& e) {
  std::string msg = e.what();
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    msg += ": " + describe(inner);
  } catch (...) {
  }
  return msg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Accelerated multiplicative weights experiments"};
  app.require_subcommand(1);
  Flags f;
  bool algo_given = false;
  auto* run_cmd = app.add_subcommand("run", "write trace CSVs and sidecars");
  auto* cmp_cmd = app.add_subcommand("compare", "final-f and first-below table");
  auto* avd_cmd = app.add_subcommand("avoidance", "Monte-Carlo saddle avoidance study");
  auto* spc_cmd = app.add_subcommand("spectra", "per-saddle instability report");
  auto* pre_cmd = app.add_subcommand("presets", "list built-in presets");
  for (auto* c : {run_cmd, cmp_cmd, avd_cmd, spc_cmd}) add_flags(c, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }
  for (auto* c : {run_cmd, cmp_cmd, avd_cmd, spc_cmd}) {
    if (c->parsed() && c->get_option("--algo")->count() > 0) algo_given = true;
  }

  try {
    if (pre_cmd->parsed()) {
      for (const auto& name : preset_names()) out << to_json(preset(name)).dump() << "\n";
      return 0;
    }
    ExperimentConfig cfg = resolve(f, algo_given);
    print_warnings(validate(cfg), err);

    if (run_cmd->parsed()) {
      const auto res = cli_run(cfg);
      for (const auto& r : res.runs) {
        print_warnings(r.trace.warnings, err);
        out << fmt::format("{}: {} records, final f {:.15g} -> {}\n", r.algorithm, r.trace.records.size(),
                           r.trace.records.back().f_value, r.csv_path);
      }
      if (!res.svg_path.empty()) out << "svg: " << res.svg_path << "\n";
    } else if (cmp_cmd->parsed()) {
      const auto table = cli_compare(cfg);
      out << format_table(table);
      write_file(cfg.out_dir + "/" + cfg.objective + "_compare.csv", compare_csv(table));
    } else if (avd_cmd->parsed()) {
      const auto rep = cli_avoidance(cfg);
      const std::string path = cfg.out_dir + "/" + cfg.objective + "_avoidance.json";
      write_file(path, to_json(rep, cfg).dump(2) + "\n");
      out << fmt::format("trials {} saddle {} min {} other {} nonconverged {} -> {}\n", rep.trials,
                         rep.converged_to_saddle, rep.converged_to_min, rep.converged_to_other, rep.nonconverged,
                         path);
    } else if (spc_cmd->parsed()) {
      const auto rep = cli_spectra(cfg);
      print_warnings(rep.warnings, err);
      const std::string path = cfg.out_dir + "/" + cfg.objective + "_spectra.csv";
      write_file(path, spectra_csv(rep));
      for (const auto& r : rep.rows) {
        out << fmt::format("saddle {}: lambda_min {:.6g} max_eig {:.10g} unstable {} jacobian deviation {:.3g}\n",
                           r.index, r.lambda_min, r.max_eig, r.unstable, r.jacobian_deviation);
      }
      out << "-> " << path << "\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << describe(e) << "\n";
    return 2;
  }
}

}  // namespace amwu::harness
