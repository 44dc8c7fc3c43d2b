#pragma once

#include <string>

#include "json.hpp"

#include "blobot/config.hpp"
#include "blobot/optimize.hpp"

namespace blobot {

// Raised when the descent diverges (non-finite loss or gradient). Partial outputs
// have already been written and flagged in the report.
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// In-memory result of one optimization experiment.
struct ExperimentResult {
  ResolvedProblem problem;
  GdResult gd;
  nlohmann::json report;
};

// Resolves, initializes, optimizes, and computes metrics. Pure compute; no files.
ExperimentResult run_experiment_core(const ExperimentConfig& cfg);

// run_experiment_core plus trajectories.csv, loss.csv, report.json under out_dir.
// Throws NumericalError after writing flagged outputs if the optimizer diverged.
nlohmann::json run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                              bool overwrite);

// Loss landscape over the two free terminal coordinates of the 2-particle,
// single-step 1-d problem; writes landscape.csv and report.json.
nlohmann::json run_landscape(const ExperimentConfig& cfg, const std::string& out_dir,
                             bool overwrite);
nlohmann::json landscape_core(const ExperimentConfig& cfg);

// Terminal-error convergence sweep over particle counts with the log-log rate fit;
// writes errors.csv and report.json.
nlohmann::json run_convergence(const ExperimentConfig& cfg, const std::string& out_dir,
                               bool overwrite);
nlohmann::json convergence_core(const ExperimentConfig& cfg);

// Analytic-vs-finite-difference agreement sweep across control modes and target
// variants. corrupt_gradient is a test hook that negates the analytic terminal
// entries so the harness itself can be checked.
nlohmann::json gradcheck_core(int instances, std::uint64_t seed, bool corrupt_gradient = false);
nlohmann::json run_gradcheck(const ExperimentConfig& cfg, const std::string& out_dir,
                             bool overwrite);

// UTF-8 CSV emission, '.' decimal separator, 17 significant digits.
void write_loss_csv(const std::string& path, const LossTrace& trace);
void write_trajectories_csv(const std::string& path, const TrajectoryField& traj,
                            ControlMode mode);

}  // namespace blobot
