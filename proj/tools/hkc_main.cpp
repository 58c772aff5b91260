#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hkc/cli.hpp"

namespace {

hkc::Vec3 parse_point(const std::string& s) {
  hkc::Vec3 x;
  std::istringstream in(s);
  char sep;
  if (!(in >> x[0] >> sep >> x[1] >> sep >> x[2]))
    throw CLI::ValidationError("--at expects \"x,y,z\"");
  return x;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbons-Hawking collapse toolkit: calibration checks, periodic Green's "
               "functions, and energy/invariant/volume sweeps"};
  app.require_subcommand(1);

  std::int64_t samples = 1000000;
  std::uint64_t seed = 42;
  std::string config_path, output_override, csv_path;
  std::vector<std::string> at_points;
  bool do_check = false;

  CLI::App* cal = app.add_subcommand("check-calibration", "random-matrix calibration suite");
  cal->add_option("--samples", samples, "number of random maps");
  cal->add_option("--seed", seed, "rng seed");

  CLI::App* geval = app.add_subcommand("green-eval", "evaluate h / run Green diagnostics");
  geval->add_option("--config", config_path, "config file")->required();
  geval->add_option("--at", at_points, "evaluation point \"x,y,z\" (repeatable)");
  geval->add_flag("--check", do_check, "run the Green's function diagnostic suite");

  CLI::App* vgh = app.add_subcommand("verify-gh", "harmonicity and calibration checks");
  vgh->add_option("--config", config_path, "config file")->required();

  CLI::App* swp = app.add_subcommand("sweep", "eps sweep, CSV output");
  swp->add_option("--config", config_path, "config file")->required();
  swp->add_option("--output", output_override, "override the CSV path from the config");

  CLI::App* fit = app.add_subcommand("fit", "power-law fits from a sweep CSV");
  fit->add_option("--config", config_path, "config file")->required();
  fit->add_option("--csv", csv_path, "CSV path (default: the config's output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hkc::cli::kUsage;
  }

  try {
    if (cal->parsed()) {
      if (samples < 1) {
        std::cerr << "check-calibration: --samples must be >= 1\n";
        return hkc::cli::kUsage;
      }
      return hkc::cli::check_calibration(samples, seed, std::cout);
    }

    const hkc::RunConfig cfg = hkc::load_config(config_path);

    if (geval->parsed()) {
      if (do_check) {
        const int rc = hkc::cli::green_check(cfg, std::cout);
        if (rc != hkc::cli::kPass || at_points.empty()) return rc;
      }
      std::vector<hkc::Vec3> pts;
      for (const std::string& s : at_points) pts.push_back(parse_point(s));
      if (pts.empty() && !do_check) {
        std::cerr << "green-eval: nothing to do (use --at or --check)\n";
        return hkc::cli::kUsage;
      }
      return pts.empty() ? hkc::cli::kPass : hkc::cli::green_eval_points(cfg, pts, std::cout);
    }
    if (vgh->parsed()) return hkc::cli::verify_gh(cfg, std::cout);
    if (swp->parsed()) {
      std::string csv;
      const int rc = hkc::cli::run_sweep(cfg, csv, std::cout);
      if (rc != hkc::cli::kPass) return rc;
      const std::string path = output_override.empty() ? cfg.output : output_override;
      std::ofstream out(path, std::ios::binary);
      if (!out) {
        std::cerr << "sweep: cannot write " << path << "\n";
        return hkc::cli::kFail;
      }
      out << csv;
      std::cout << "wrote " << path << "\n";
      return hkc::cli::kPass;
    }
    if (fit->parsed()) {
      const std::string path = csv_path.empty() ? cfg.output : csv_path;
      std::ifstream in(path, std::ios::binary);
      if (!in) {
        std::cerr << "fit: cannot read " << path << "\n";
        return hkc::cli::kUsage;
      }
      std::ostringstream ss;
      ss << in.rdbuf();
      return hkc::cli::fit_csv(cfg, ss.str(), std::cout);
    }
  } catch (const hkc::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return hkc::cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hkc::cli::kFail;
  }
  return hkc::cli::kUsage;
}
