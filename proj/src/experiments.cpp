#include "blobot/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "blobot/gradients.hpp"
#include "blobot/metrics.hpp"
#include "blobot/oracle.hpp"
#include "blobot/rng.hpp"

namespace blobot {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_output(const fs::path& dir, const std::string& name, bool overwrite) {
  fs::create_directories(dir);
  const fs::path path = dir / name;
  if (fs::exists(path) && !overwrite) {
    throw ConfigError("output", "refusing to overwrite existing file " + path.string() +
                                    " (pass --overwrite)");
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("output", "cannot open " + path.string() + " for writing");
  return out;
}

ExactMap geodesic_map() {
  return [](std::span<const double> y, double t) {
    return std::vector<double>{continuum_geodesic(y[0], t)};
  };
}

json breakdown_json(const LossRecord& r) {
  return {{"iteration", r.iteration},       {"total", r.total},
          {"kinetic_or_cc", r.kinetic_or_cc}, {"potential", r.potential},
          {"nonlocal", r.nonlocal},          {"learning_rate", r.learning_rate}};
}

// Worst obstacle penetration over all knots (0 when obstacle-free).
double max_penetration(const TrajectoryField& traj, const ObstacleSet& obs) {
  double worst = 0.0;
  for (int i = 0; i < traj.n_particles; ++i) {
    for (int j = 0; j < traj.n_times; ++j) {
      worst = std::max(worst, obs.penetration_depth(traj.knot(i, j)));
    }
  }
  return worst;
}

}  // namespace

ExperimentResult run_experiment_core(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.problem = resolve_problem(cfg);
  ResolvedProblem& prob = result.problem;

  TrajectoryField init =
      prob.spec.mode == ControlMode::kVelocity
          ? init_straight_lines(prob.sources, prob.spec.target, prob.n_times)
          : init_acceleration(prob.sources, prob.initial_velocities, prob.spec.target, prob.n_times);

  const auto t0 = std::chrono::steady_clock::now();
  result.gd = gd_run(init, prob.spec, prob.optimizer);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const TrajectoryField& best = result.gd.best;
  const EnergyBreakdown best_eb = objective_breakdown(best, prob.spec);
  const PointCloud best_terminal =
      prob.spec.mode == ControlMode::kVelocity ? best.terminal() : phase_terminal(best);
  const double penalty_full = terminal_penalty_full(best_terminal, prob.spec);

  json metrics{
      {"terminal_penalty_full", penalty_full},
      {"total_with_constant", best_eb.kinetic_or_cc + best_eb.potential + penalty_full},
  };

  if (cfg.compare_assignment) {
    if (prob.spec.target.kind != TargetMeasure::Kind::kEmpirical) {
      throw ConfigError("config.compare_assignment", "requires an empirical target");
    }
    if (prob.spec.mode == ControlMode::kVelocity) {
      const Assignment assign = hungarian_assign(prob.sources, prob.spec.target.points);
      metrics["assignment_mean_cost"] = assign.mean_cost;
      metrics["relative_gap"] =
          std::abs(metrics["total_with_constant"].get<double>() - assign.mean_cost) /
          assign.mean_cost;
    } else {
      // Phase-space matching quality of the returned iterate.
      const Assignment assign = hungarian_assign(best_terminal, prob.spec.target.points);
      metrics["phase_assignment_mean_cost"] = assign.mean_cost;
      metrics["phase_rms_mismatch"] = std::sqrt(assign.mean_cost);
    }
  }

  if (cfg.exact_map && *cfg.exact_map == "geodesic") {
    const ExactMap exact = geodesic_map();
    metrics["error_terminal_init"] = error_terminal(init, exact);
    metrics["error_terminal"] = error_terminal(best, exact);
    metrics["error_all_times_init"] = error_all_times(init, exact);
    metrics["error_all_times"] = error_all_times(best, exact);
  }

  if (!prob.spec.obstacles.circles.empty()) {
    metrics["max_obstacle_penetration"] = max_penetration(best, prob.spec.obstacles);
    metrics["final_potential"] = best_eb.potential;
  }

  result.report = json{
      {"resolved_config", resolved_config_json(cfg, prob)},
      {"loss",
       {{"initial", breakdown_json(result.gd.trace.front())},
        {"final", breakdown_json(result.gd.trace.back())},
        {"best_total", best_eb.total()},
        {"best",
         {{"kinetic_or_cc", best_eb.kinetic_or_cc},
          {"potential", best_eb.potential},
          {"nonlocal", best_eb.nonlocal}}}}},
      {"metrics", std::move(metrics)},
      {"steps_taken", result.gd.steps_taken},
      {"numerical_failure", result.gd.numerical_failure},
      {"wall_time_seconds", wall},
  };
  return result;
}

void write_loss_csv(const std::string& path, const LossTrace& trace) {
  std::ofstream out(path);
  out << "iter,total,kinetic_or_cc,potential,nonlocal,lr\n";
  for (const auto& r : trace) {
    out << r.iteration << ',' << fmt17(r.total) << ',' << fmt17(r.kinetic_or_cc) << ','
        << fmt17(r.potential) << ',' << fmt17(r.nonlocal) << ',' << fmt17(r.learning_rate)
        << '\n';
  }
}

void write_trajectories_csv(const std::string& path, const TrajectoryField& traj,
                            ControlMode mode) {
  std::ofstream out(path);
  out << "particle_index,knot_index,t";
  for (int c = 0; c < traj.dim; ++c) out << ",coord_" << c;
  if (mode == ControlMode::kAcceleration) {
    for (int c = 0; c < traj.dim; ++c) out << ",vel_" << c;
  }
  out << '\n';
  const double inv_h = traj.n_times - 1;
  for (int i = 0; i < traj.n_particles; ++i) {
    for (int j = 0; j < traj.n_times; ++j) {
      out << i << ',' << j << ',' << fmt17(static_cast<double>(j) / (traj.n_times - 1));
      for (int c = 0; c < traj.dim; ++c) out << ',' << fmt17(traj.at(i, j, c));
      if (mode == ControlMode::kAcceleration) {
        // Backward-difference velocity; at the frozen first knot this equals the
        // initial velocity since x_2 = x_1 + h v_0.
        const int jprev = std::max(j, 1);
        for (int c = 0; c < traj.dim; ++c) {
          out << ',' << fmt17((traj.at(i, jprev, c) - traj.at(i, jprev - 1, c)) * inv_h);
        }
      }
      out << '\n';
    }
  }
}

json run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, bool overwrite) {
  const fs::path dir(out_dir);
  {
    // Reserve / validate the output slots before the (possibly long) run.
    open_output(dir, "report.json", overwrite);
    open_output(dir, "loss.csv", overwrite);
    open_output(dir, "trajectories.csv", overwrite);
  }
  ExperimentResult result = run_experiment_core(cfg);
  write_loss_csv((dir / "loss.csv").string(), result.gd.trace);
  write_trajectories_csv((dir / "trajectories.csv").string(), result.gd.best, cfg.mode);
  if (result.gd.numerical_failure) result.report["partial"] = true;
  std::ofstream out(dir / "report.json");
  out << result.report.dump(2) << '\n';
  out.close();
  if (result.gd.numerical_failure) {
    throw NumericalError("optimizer diverged (non-finite loss or gradient); partial outputs in " +
                         dir.string());
  }
  return result.report;
}

json landscape_core(const ExperimentConfig& cfg) {
  if (cfg.n_particles != 2 || cfg.n_times != 2 || cfg.dim != 1 ||
      cfg.mode != ControlMode::kVelocity) {
    throw ConfigError("config", "landscape requires N=2, M=2, d=1, velocity mode");
  }
  ResolvedProblem prob = resolve_problem(cfg);
  if (prob.spec.target.kind != TargetMeasure::Kind::kEmpirical) {
    throw ConfigError("config.target", "landscape requires an empirical target");
  }

  auto eval_at = [&](double y1, double y2) {
    TrajectoryField traj(2, 2, 1, 1);
    traj.at(0, 0, 0) = prob.sources.point(0)[0];
    traj.at(1, 0, 0) = prob.sources.point(1)[0];
    traj.at(0, 1, 0) = y1;
    traj.at(1, 1, 0) = y2;
    const EnergyBreakdown eb = objective_breakdown(traj, prob.spec);
    const double full = terminal_penalty_full(traj.terminal(), prob.spec);
    return json{{"terminal", json::array({y1, y2})},
                {"total", eb.total()},
                {"kinetic", eb.kinetic_or_cc},
                {"nonlocal", eb.nonlocal},
                {"terminal_penalty_full", full}};
  };

  const double z0 = prob.sources.point(0)[0];
  const double z1 = prob.sources.point(1)[0];
  const double w0 = prob.spec.target.points.point(0)[0];
  const double w1 = prob.spec.target.points.point(1)[0];
  const double com = 0.5 * (w0 + w1);
  return json{
      {"resolved_config", resolved_config_json(cfg, prob)},
      {"marked",
       {{"source", eval_at(z0, z1)},
        {"target", eval_at(w0, w1)},
        {"flipped", eval_at(w1, w0)},
        {"initialization", eval_at(com, com)}}},
  };
}

json run_landscape(const ExperimentConfig& cfg, const std::string& out_dir, bool overwrite) {
  const fs::path dir(out_dir);
  json report = landscape_core(cfg);
  ResolvedProblem prob = resolve_problem(cfg);

  std::ofstream grid_csv = open_output(dir, "landscape.csv", overwrite);
  grid_csv << "y_1_terminal,y_2_terminal,total\n";
  const int g = cfg.landscape.grid_size;
  const auto [lo, hi] = cfg.landscape.range;
  TrajectoryField traj(2, 2, 1, 1);
  traj.at(0, 0, 0) = prob.sources.point(0)[0];
  traj.at(1, 0, 0) = prob.sources.point(1)[0];
  for (int r = 0; r < g; ++r) {
    const double y1 = lo + (hi - lo) * r / (g - 1);
    traj.at(0, 1, 0) = y1;
    for (int c = 0; c < g; ++c) {
      const double y2 = lo + (hi - lo) * c / (g - 1);
      traj.at(1, 1, 0) = y2;
      grid_csv << fmt17(y1) << ',' << fmt17(y2) << ',' << fmt17(total_objective(traj, prob.spec))
               << '\n';
    }
  }
  report["grid"] = {{"size", g}, {"range", json::array({lo, hi})}};

  std::ofstream out = open_output(dir, "report.json", overwrite);
  out << report.dump(2) << '\n';
  return report;
}

json convergence_core(const ExperimentConfig& cfg) {
  json per_n = json::array();
  std::vector<std::pair<double, double>> points;
  bool degenerate = false;

  for (const int n : cfg.convergence.n_values) {
    ExperimentConfig sub = cfg;
    sub.experiment = "custom";
    sub.n_particles = n;
    sub.optimizer.max_steps = cfg.convergence.max_steps;
    // Independent derived seed per particle count; aggregation stays ordered by N.
    sub.optimizer.seed = cfg.optimizer.seed + static_cast<std::uint64_t>(n);
    sub.compare_assignment = false;
    sub.exact_map = "geodesic";
    ExperimentResult result = run_experiment_core(sub);
    const double err = result.report["metrics"]["error_terminal"].get<double>();
    per_n.push_back({{"n_particles", n},
                     {"delta", result.problem.delta},
                     {"error_terminal", err},
                     {"steps_taken", result.gd.steps_taken},
                     {"best_total", result.report["loss"]["best_total"]}});
    if (err > 0.0) {
      points.emplace_back(static_cast<double>(n), err);
    } else {
      degenerate = true;
    }
  }

  json report{{"per_n", std::move(per_n)}, {"degenerate", degenerate}};
  if (!degenerate && points.size() >= 2) {
    report["loglog_slope"] = loglog_slope(points);
  }
  return report;
}

json run_convergence(const ExperimentConfig& cfg, const std::string& out_dir, bool overwrite) {
  const fs::path dir(out_dir);
  {
    open_output(dir, "report.json", overwrite);
    open_output(dir, "errors.csv", overwrite);
  }
  json report = convergence_core(cfg);
  {
    std::ofstream csv(dir / "errors.csv");
    csv << "n_particles,delta,error_terminal\n";
    for (const auto& row : report["per_n"]) {
      csv << row["n_particles"].get<int>() << ',' << fmt17(row["delta"].get<double>()) << ','
          << fmt17(row["error_terminal"].get<double>()) << '\n';
    }
  }
  std::ofstream out(dir / "report.json");
  out << report.dump(2) << '\n';
  return report;
}

namespace {

// Random test instance for one gradcheck mode.
struct GradcheckInstance {
  TrajectoryField traj;
  ProblemSpec spec;
};

GradcheckInstance make_instance(const std::string& mode, Rng& rng) {
  GradcheckInstance inst;
  const bool acceleration = mode == "acceleration";
  const int d = 1 + static_cast<int>(rng.uniform() * (acceleration ? 2 : 3));
  const int n = 1 + static_cast<int>(rng.uniform() * 6);
  const int m = (acceleration ? 3 : 2) + static_cast<int>(rng.uniform() * 3);
  const int state_dim = acceleration ? 2 * d : d;

  inst.traj = TrajectoryField(n, m, d, acceleration ? 2 : 1);
  for (double& v : inst.traj.values) v = rng.uniform(-1.0, 1.0);

  inst.spec.mode = acceleration ? ControlMode::kAcceleration : ControlMode::kVelocity;
  inst.spec.epsilon = rng.uniform(0.1, 2.0);
  inst.spec.mollifier = Mollifier(rng.uniform(0.2, 1.2), state_dim);

  if (mode == "velocity_gaussian") {
    std::vector<double> mean(state_dim);
    for (double& v : mean) v = rng.uniform(-1.0, 1.0);
    inst.spec.target = TargetMeasure::gaussian_iso(std::move(mean), rng.uniform(0.3, 1.5));
  } else {
    PointCloud pts(n, state_dim);
    for (double& v : pts.x) v = rng.uniform(-1.0, 1.0);
    inst.spec.target = TargetMeasure::empirical(std::move(pts));
  }

  if (mode == "velocity_obstacle") {
    inst.spec.obstacles.strength = rng.uniform(1.0, 50.0);
    for (int k = 0; k < 2; ++k) {
      Obstacle o;
      o.center.resize(d);
      for (double& v : o.center) v = rng.uniform(-1.0, 1.0);
      o.radius = rng.uniform(0.2, 0.6);
      inst.spec.obstacles.circles.push_back(std::move(o));
    }
    // The hinge penalty is only piecewise smooth; keep knots away from circle
    // boundaries so central differences stay valid.
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        auto y = inst.traj.knot(i, j);
        for (const auto& circ : inst.spec.obstacles.circles) {
          double dist = 0.0;
          for (int c = 0; c < d; ++c) {
            const double dd = y[c] - circ.center[c];
            dist += dd * dd;
          }
          dist = std::sqrt(dist);
          if (std::abs(dist - circ.radius) < 1e-3) {
            const double target_dist = circ.radius + 2e-3;
            const double scale = dist > 0.0 ? target_dist / dist : 0.0;
            for (int c = 0; c < d; ++c) {
              y[c] = dist > 0.0 ? circ.center[c] + scale * (y[c] - circ.center[c])
                                : circ.center[c] + target_dist;
            }
          }
        }
      }
    }
  }
  return inst;
}

}  // namespace

json gradcheck_core(int instances, std::uint64_t seed, bool corrupt_gradient) {
  const std::vector<std::string> modes{"velocity_empirical", "velocity_gaussian",
                                       "velocity_obstacle", "acceleration"};
  constexpr double kTolerance = 1e-6;
  json mode_errors;
  double overall = 0.0;
  for (size_t mi = 0; mi < modes.size(); ++mi) {
    Rng rng(seed + mi * 1000003ULL);
    double worst = 0.0;
    for (int t = 0; t < instances; ++t) {
      GradcheckInstance inst = make_instance(modes[mi], rng);
      GradientField analytic = objective_gradient(inst.traj, inst.spec);
      if (corrupt_gradient) {
        for (double& v : analytic.values) v = -v;
      }
      double traj_inf = 0.0;
      for (double v : inst.traj.values) traj_inf = std::max(traj_inf, std::abs(v));
      const GradientField fd =
          finite_difference_gradient(inst.traj, inst.spec, 1e-5 * (1.0 + traj_inf));
      double err_inf = 0.0;
      double fd_inf = 0.0;
      for (size_t idx = 0; idx < fd.values.size(); ++idx) {
        err_inf = std::max(err_inf, std::abs(analytic.values[idx] - fd.values[idx]));
        fd_inf = std::max(fd_inf, std::abs(fd.values[idx]));
      }
      worst = std::max(worst, err_inf / (1.0 + fd_inf));
    }
    mode_errors[modes[mi]] = worst;
    overall = std::max(overall, worst);
  }
  return json{{"modes", std::move(mode_errors)},
              {"max_rel_error", overall},
              {"tolerance", kTolerance},
              {"instances", instances},
              {"seed", seed},
              {"pass", overall <= kTolerance}};
}

json run_gradcheck(const ExperimentConfig& cfg, const std::string& out_dir, bool overwrite) {
  json report = gradcheck_core(cfg.gradcheck.instances, cfg.gradcheck.seed);
  std::ofstream out = open_output(fs::path(out_dir), "report.json", overwrite);
  out << report.dump(2) << '\n';
  return report;
}

}  // namespace blobot
