#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace nlcancel {

// One experiment: states x(0..T), inputs u(0..T-1), and optional channels.
// `derivatives` holds xdot(k) at the sampled states (continuous-time data),
// `disturbances` the ground-truth d(k) recorded by the harness (tests only),
// `outputs` y(k) for every recorded state (normal-form data).
struct Trajectory {
  Eigen::MatrixXd states;        // n x (T+1)
  Eigen::MatrixXd inputs;        // m x T
  Eigen::MatrixXd derivatives;   // n x T or empty
  Eigen::MatrixXd disturbances;  // s x T or empty
  Eigen::VectorXd outputs;       // (T+1) or empty

  int state_dim() const { return static_cast<int>(states.rows()); }
  int input_dim() const { return static_cast<int>(inputs.rows()); }
  int horizon() const { return static_cast<int>(inputs.cols()); }

  bool has_derivatives() const { return derivatives.size() > 0; }
  bool has_disturbances() const { return disturbances.size() > 0; }
  bool has_outputs() const { return outputs.size() > 0; }

  // Throws InputError on inconsistent lengths or non-finite entries.
  void validate() const;
};

// CSV with header k,x1..xn[,u1..um][,xdot1..xdotn][,d1..ds][,y]; one row per
// sample, '.' decimal. Input/derivative/disturbance cells are empty on the
// final row(s).
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace nlcancel
