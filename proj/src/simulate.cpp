#include "nlcancel/simulate.hpp"

#include <cmath>

namespace nlcancel {

namespace {

constexpr double kDivergeNorm = 1e6;
constexpr double kConvergeNorm = 1e-6;
constexpr int kConvergeDwell = 10;

void check_finite(const Eigen::VectorXd& x, int step) {
  if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergeNorm)
    throw DivergenceError("state overflow at step " + std::to_string(step), step);
}

}  // namespace

Trajectory simulate(const SystemModel& model, const DisturbanceSpec& disturbance,
                    const ExperimentConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const int n = model.n();
  const int m = model.m() > 0 ? model.m() : model.dictionary.input_dim();
  const int t = config.T;
  const bool continuous = model.time == TimeSemantics::kContinuous;
  const int s = disturbance.law == DisturbanceSpec::Law::kNone
                    ? 0
                    : (disturbance.law == DisturbanceSpec::Law::kStateDependent
                           ? model.s()
                           : disturbance.dim());

  Trajectory traj;
  traj.states.resize(n, t + 1);
  traj.inputs.resize(m, t);
  if (continuous) traj.derivatives.resize(n, t);
  if (s > 0) traj.disturbances.resize(s, t);
  if (model.output_index >= 0) traj.outputs.resize(t + 1);

  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i)
    x(i) = rng.uniform(-config.x0_amplitude, config.x0_amplitude);
  for (int k = 0; k < t; ++k) {
    traj.states.col(k) = x;
    if (model.output_index >= 0) traj.outputs(k) = x(model.output_index);
    Eigen::VectorXd u(m);
    for (int i = 0; i < m; ++i)
      u(i) = rng.uniform(-config.input_amplitude, config.input_amplitude);
    traj.inputs.col(k) = u;
    Eigen::VectorXd d;
    if (s > 0) {
      d = disturbance.sample(rng, x);
      traj.disturbances.col(k) = d;
    }
    const Eigen::VectorXd next = model.step(x, u, d);
    if (continuous) {
      traj.derivatives.col(k) = next;
      x = x + config.Ts * next;
    } else {
      x = next;
    }
    check_finite(x, k + 1);
  }
  traj.states.col(t) = x;
  if (model.output_index >= 0) traj.outputs(t) = x(model.output_index);
  return traj;
}

std::vector<Trajectory> simulate_repetitions(const SystemModel& model,
                                             const DisturbanceSpec& disturbance,
                                             const ExperimentConfig& config) {
  config.validate();
  std::vector<Trajectory> out;
  out.reserve(config.repetitions);
  // One input/initial-state pattern for all repetitions; only the disturbance
  // stream differs (fresh derived stream per repetition).
  for (int r = 0; r < config.repetitions; ++r) {
    Rng pattern(config.seed);
    Rng noise = Rng::derive(config.seed, static_cast<std::uint64_t>(r) + 1);
    const int n = model.n();
    const int m = model.m() > 0 ? model.m() : model.dictionary.input_dim();
    const int t = config.T;
    const int s = disturbance.law == DisturbanceSpec::Law::kNone ? 0 : disturbance.dim();
    Trajectory traj;
    traj.states.resize(n, t + 1);
    traj.inputs.resize(m, t);
    if (s > 0) traj.disturbances.resize(s, t);
    if (model.output_index >= 0) traj.outputs.resize(t + 1);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i)
      x(i) = pattern.uniform(-config.x0_amplitude, config.x0_amplitude);
    for (int k = 0; k < t; ++k) {
      traj.states.col(k) = x;
      if (model.output_index >= 0) traj.outputs(k) = x(model.output_index);
      Eigen::VectorXd u(m);
      for (int i = 0; i < m; ++i)
        u(i) = pattern.uniform(-config.input_amplitude, config.input_amplitude);
      traj.inputs.col(k) = u;
      Eigen::VectorXd d;
      if (s > 0) {
        d = disturbance.sample(noise, x);
        traj.disturbances.col(k) = d;
      }
      x = model.step(x, u, d);
      check_finite(x, k + 1);
    }
    traj.states.col(t) = x;
    if (model.output_index >= 0) traj.outputs(t) = x(model.output_index);
    out.push_back(std::move(traj));
  }
  return out;
}

namespace {

ClosedLoopRun run_loop(const SystemModel& model, const DisturbanceSpec& disturbance,
                       Eigen::VectorXd x, Eigen::VectorXd u_state, bool dynamic,
                       const Eigen::MatrixXd& K, const BasisLibrary& lib, int steps,
                       std::uint64_t seed) {
  if (model.time != TimeSemantics::kDiscrete)
    throw InputError("simulate_closed_loop: discrete-time models only");
  Rng rng(seed);
  const int n = model.n();
  ClosedLoopRun run;
  run.trajectory.states.resize(n, steps + 1);
  const int m = static_cast<int>(K.rows());
  run.trajectory.inputs.resize(m, steps);
  const int s =
      disturbance.law == DisturbanceSpec::Law::kNone ? 0 : disturbance.dim();
  if (s > 0) run.trajectory.disturbances.resize(s, steps);
  int dwell = 0;
  for (int k = 0; k < steps; ++k) {
    run.trajectory.states.col(k) = x;
    Eigen::VectorXd u;
    if (dynamic) {
      u = u_state;
    } else {
      u = K * lib.eval_z(x);
    }
    run.trajectory.inputs.col(k) = u;
    Eigen::VectorXd d;
    if (s > 0) {
      d = disturbance.sample(rng, x);
      run.trajectory.disturbances.col(k) = d;
    }
    Eigen::VectorXd xn = model.step(x, u, d);
    if (dynamic) {
      Eigen::VectorXd xi(n + u_state.size());
      xi << x, u_state;
      u_state = K * lib.eval_z(xi);
    }
    x = xn;
    const double norm = x.norm();
    if (!x.allFinite() || norm > kDivergeNorm) {
      run.verdict = Verdict::kDiverged;
      run.step = k + 1;
      run.final_norm = norm;
      run.trajectory.states.conservativeResize(n, k + 2);
      run.trajectory.inputs.conservativeResize(m, k + 1);
      if (s > 0) run.trajectory.disturbances.conservativeResize(s, k + 1);
      run.trajectory.states.col(k + 1) =
          x.allFinite() ? x : Eigen::VectorXd::Constant(n, kDivergeNorm);
      return run;
    }
    dwell = norm < kConvergeNorm ? dwell + 1 : 0;
    if (dwell >= kConvergeDwell) {
      run.verdict = Verdict::kConverged;
      run.step = k + 1;
      run.final_norm = norm;
      run.trajectory.states.conservativeResize(n, k + 2);
      run.trajectory.inputs.conservativeResize(m, k + 1);
      if (s > 0) run.trajectory.disturbances.conservativeResize(s, k + 1);
      run.trajectory.states.col(k + 1) = x;
      return run;
    }
  }
  run.trajectory.states.col(steps) = x;
  run.final_norm = x.norm();
  run.verdict = Verdict::kBounded;
  return run;
}

}  // namespace

ClosedLoopRun simulate_closed_loop(const SystemModel& model, const Eigen::MatrixXd& K,
                                   const BasisLibrary& controller_library,
                                   const Eigen::VectorXd& x0, int steps,
                                   const DisturbanceSpec& disturbance,
                                   std::uint64_t seed) {
  if (K.cols() != controller_library.total_dim())
    throw InputError("simulate_closed_loop: K width != controller dictionary size");
  return run_loop(model, disturbance, x0, Eigen::VectorXd(), false, K,
                  controller_library, steps, seed);
}

ClosedLoopRun simulate_closed_loop_dynamic(const SystemModel& model,
                                           const Eigen::MatrixXd& K,
                                           const BasisLibrary& controller_library,
                                           const Eigen::VectorXd& x0,
                                           const Eigen::VectorXd& u0, int steps,
                                           const DisturbanceSpec& disturbance,
                                           std::uint64_t seed) {
  if (K.cols() != controller_library.total_dim())
    throw InputError("simulate_closed_loop: K width != controller dictionary size");
  if (controller_library.input_dim() != u0.size())
    throw InputError("simulate_closed_loop: dynamic mode needs an extended dictionary");
  return run_loop(model, disturbance, x0, u0, true, K, controller_library, steps,
                  seed);
}

}  // namespace nlcancel
