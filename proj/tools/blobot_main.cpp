#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "blobot/config.hpp"
#include "blobot/experiments.hpp"
#include "blobot/parallel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  bool overwrite = false;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* cfg = cmd->add_option("config", opts.config_path, "JSON configuration file");
  if (config_required) cfg->required();
  cmd->add_option("--out", opts.out_dir, "output directory (overrides the config)");
  cmd->add_flag("--overwrite", opts.overwrite, "allow overwriting existing output files");
  cmd->add_option("--threads", opts.threads, "worker threads for pairwise sums (1 = bitwise reproducible)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized particle method for dynamic optimal transport and mean-field control"};
  app.require_subcommand(1);

  CommonOpts run_opts, landscape_opts, convergence_opts, gradcheck_opts;
  auto* run_cmd = app.add_subcommand("run", "optimize one transport problem and write reports");
  add_common(run_cmd, run_opts, true);
  auto* landscape_cmd = app.add_subcommand("landscape", "loss grid over the two-particle toy problem");
  add_common(landscape_cmd, landscape_opts, true);
  auto* convergence_cmd = app.add_subcommand("convergence", "terminal-error rate sweep over N");
  add_common(convergence_cmd, convergence_opts, true);
  auto* gradcheck_cmd = app.add_subcommand("gradcheck", "analytic vs finite-difference gradients");
  add_common(gradcheck_cmd, gradcheck_opts, false);

  CLI11_PARSE(app, argc, argv);

  try {
    const CommonOpts& opts = run_cmd->parsed()          ? run_opts
                             : landscape_cmd->parsed()  ? landscape_opts
                             : convergence_cmd->parsed() ? convergence_opts
                                                         : gradcheck_opts;
    blobot::set_thread_count(opts.threads);

    blobot::ExperimentConfig cfg;
    if (!opts.config_path.empty()) {
      cfg = blobot::parse_config_file(opts.config_path);
    } else {
      cfg.experiment = "gradcheck";
    }
    const std::string out = opts.out_dir.empty() ? cfg.output_dir : opts.out_dir;

    nlohmann::json report;
    if (run_cmd->parsed()) {
      report = blobot::run_experiment(cfg, out, opts.overwrite);
    } else if (landscape_cmd->parsed()) {
      report = blobot::run_landscape(cfg, out, opts.overwrite);
    } else if (convergence_cmd->parsed()) {
      report = blobot::run_convergence(cfg, out, opts.overwrite);
    } else {
      report = blobot::run_gradcheck(cfg, out, opts.overwrite);
      std::cout << report.dump(2) << std::endl;
      return report["pass"].get<bool>() ? kExitOk : kExitNumericalError;
    }
    std::cout << "report written to " << out << "/report.json" << std::endl;
    return kExitOk;
  } catch (const blobot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfigError;
  } catch (const blobot::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return kExitNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitConfigError;
  }
}
