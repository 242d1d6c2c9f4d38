#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "nlcancel/basis.hpp"
#include "nlcancel/rng.hpp"

namespace nlcancel {

enum class TimeSemantics { kDiscrete, kContinuous };

// Ground-truth plant used by the experiment harness and the tests. The
// dynamics are x+ = A Z*(x) + B u + E d (or xdot = ... in continuous time);
// extended-dictionary models take Z* over xi = [x; u] and keep B = 0.
struct SystemModel {
  std::string name;
  Eigen::MatrixXd A;  // n x R
  Eigen::MatrixXd B;  // n x m
  Eigen::MatrixXd E;  // n x s
  BasisLibrary dictionary;
  TimeSemantics time = TimeSemantics::kDiscrete;
  int output_index = -1;  // which state is y, -1 when the model has no output

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int s() const { return static_cast<int>(E.cols()); }
  bool extended_dictionary() const { return dictionary.input_dim() > 0; }

  // Successor state (discrete) or state derivative (continuous).
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& d) const;
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
};

// Disturbance law for the harness. The uniform law samples each component
// i.i.d. in [-delta/sqrt(s), delta/sqrt(s)] so that |d| <= delta holds surely;
// the state-dependent law evaluates a named function d(x).
struct DisturbanceSpec {
  enum class Law { kNone, kUniform, kGaussian, kStateDependent };

  Law law = Law::kNone;
  double delta = 0.0;
  Eigen::MatrixXd sigma;  // s x s, PSD (gaussian)
  std::string function_name;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> function;

  static DisturbanceSpec none();
  static DisturbanceSpec uniform(double delta, int s);
  static DisturbanceSpec gaussian(const Eigen::MatrixXd& sigma);
  static DisturbanceSpec state_dependent(const std::string& name);

  int dim() const { return static_cast<int>(sigma.rows()); }
  Eigen::VectorXd sample(Rng& rng, const Eigen::VectorXd& x) const;
};

// Built-in plant catalog. Parameters follow the benchmark set this toolkit
// reproduces; see the README for the model equations.
SystemModel make_pendulum();             // torque at the pivot, Z* = [x; sin x1]
SystemModel make_pendulum_remainder();   // same plant over [x; sin x1 - x1]
SystemModel make_pendulum_linear();      // same plant over Z = x (sin neglected)
SystemModel make_pendulum_ct();          // continuous-time pendulum
SystemModel make_pendulum_cos();         // force at the base, extended dictionary
SystemModel make_poly2();                // x1+ = x2 + x1^3 + u ; x2+ = 0.5 x1
SystemModel make_poly4();                // poly2 with x2+ += 0.2 x2^2
SystemModel make_poly_output();          // x1+ = x2^2 + x1^3 + u, y = x2
SystemModel model_by_name(const std::string& name);

}  // namespace nlcancel
