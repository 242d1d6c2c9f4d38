#pragma once

#include <cstdint>
#include <vector>

#include "nlcancel/data.hpp"
#include "nlcancel/model.hpp"
#include "nlcancel/trajectory.hpp"

namespace nlcancel {

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int step)
      : std::runtime_error(what), step(step) {}
  int step;
};

struct ExperimentConfig {
  int T = 10;                  // horizon (number of transitions)
  double input_amplitude = 0.5;
  double x0_amplitude = 0.5;
  std::uint64_t seed = 0;
  int repetitions = 1;
  double Ts = 0.1;             // advance step for continuous-time experiments

  void validate() const {
    if (T < 1 || repetitions < 1 || input_amplitude < 0 || x0_amplitude < 0)
      throw InputError("ExperimentConfig: T >= 1, reps >= 1, amplitudes >= 0");
  }
};

// Runs one open-loop experiment. Inputs and the initial state are uniform in
// the configured intervals; ground-truth disturbance samples are recorded in
// the trajectory for harness-side checks. Continuous-time models record
// exact derivatives xdot(k) = A Z(x(k)) + B u(k) and advance the state by an
// Euler step of length Ts. Throws DivergenceError when |x| exceeds 1e6.
Trajectory simulate(const SystemModel& model, const DisturbanceSpec& disturbance,
                    const ExperimentConfig& config);

// N repetitions with the same input pattern and initial state but fresh
// disturbance draws (per-repetition derived streams).
std::vector<Trajectory> simulate_repetitions(const SystemModel& model,
                                             const DisturbanceSpec& disturbance,
                                             const ExperimentConfig& config);

enum class Verdict { kConverged, kDiverged, kBounded };

struct ClosedLoopRun {
  Trajectory trajectory;
  Verdict verdict = Verdict::kBounded;
  int step = -1;       // step of convergence/divergence, -1 if neither
  double final_norm = 0.0;
};

// Simulates u = K Z_c(x) on a discrete-time model. `controller_library` is
// the dictionary K is expressed over (state-only). Converged means
// |x| < 1e-6 on the final 10 steps; diverged means |x| > 1e6.
ClosedLoopRun simulate_closed_loop(const SystemModel& model, const Eigen::MatrixXd& K,
                                   const BasisLibrary& controller_library,
                                   const Eigen::VectorXd& x0, int steps,
                                   const DisturbanceSpec& disturbance,
                                   std::uint64_t seed = 0);

// Dynamic controller u+ = K calZ(xi) from the integrator extension; the input
// is integrated as a state starting from u0.
ClosedLoopRun simulate_closed_loop_dynamic(const SystemModel& model,
                                           const Eigen::MatrixXd& K,
                                           const BasisLibrary& controller_library,
                                           const Eigen::VectorXd& x0,
                                           const Eigen::VectorXd& u0, int steps,
                                           const DisturbanceSpec& disturbance,
                                           std::uint64_t seed = 0);

}  // namespace nlcancel
