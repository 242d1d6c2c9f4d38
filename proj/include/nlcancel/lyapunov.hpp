#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "nlcancel/basis.hpp"
#include "nlcancel/synthesis.hpp"

namespace nlcancel {

// Quadratic Lyapunov function V(x) = x' Pinv x (Pinv stores P1^-1).
class QuadLyapunov {
 public:
  explicit QuadLyapunov(const Eigen::MatrixXd& pinv);
  static QuadLyapunov from_p1(const Eigen::MatrixXd& p1);

  double value(const Eigen::VectorXd& x) const { return x.dot(pinv_ * x); }
  Eigen::VectorXd value_cols(const Eigen::MatrixXd& points) const;
  const Eigen::MatrixXd& pinv() const { return pinv_; }
  int dim() const { return static_cast<int>(pinv_.rows()); }

 private:
  Eigen::MatrixXd pinv_;
};

// State-dependent disturbance bound, a sum of absolute values of scaled basis
// functions so it can be evaluated on grids (Theorem-9-style bounds).
struct StateBound {
  std::vector<std::pair<double, BasisFunction>> terms;
  double eval(const Eigen::VectorXd& x) const {
    double v = 0.0;
    for (const auto& [c, f] : terms) v += std::abs(c * f.eval(x));
    return v;
  }
};

// Evaluates the one-step Lyapunov decrement and its data-computable upper
// bounds. The nominal variant evaluates the exact decrement h(x); the noisy
// variant evaluates the bound ell(x) and the disturbance contribution
// g(x, delta).
class DecrementModel {
 public:
  // h(x) = (Mx + N Q(x))' Pinv (Mx + N Q(x)) - x' Pinv x
  static DecrementModel nominal(const Eigen::MatrixXd& m, const Eigen::MatrixXd& n,
                                const BasisLibrary& library,
                                const QuadLyapunov& lyap);
  // ell/g terms; m = X1 G1 and n = X1 G2 as returned by synthesis.
  static DecrementModel noisy(const Eigen::MatrixXd& m, const Eigen::MatrixXd& n,
                              const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2,
                              const BasisLibrary& library, const QuadLyapunov& lyap,
                              const Eigen::MatrixXd& e, const Eigen::MatrixXd& delta,
                              const Eigen::MatrixXd& omega);
  static DecrementModel from_result(const SynthesisResult& result,
                                    const BasisLibrary& library);

  bool is_nominal() const { return nominal_; }
  const QuadLyapunov& lyapunov() const { return lyap_; }

  double h(const Eigen::VectorXd& x) const;
  double ell(const Eigen::VectorXd& x) const;
  double g(const Eigen::VectorXd& x, double delta) const;
  double g(const Eigen::VectorXd& x, const StateBound& delta) const;

  // Column-wise versions used by the grid certifiers.
  Eigen::VectorXd h_cols(const Eigen::MatrixXd& points) const;
  Eigen::VectorXd ell_cols(const Eigen::MatrixXd& points) const;
  Eigen::VectorXd g_cols(const Eigen::MatrixXd& points, double delta) const;
  Eigen::VectorXd g_cols(const Eigen::MatrixXd& points, const StateBound& delta) const;

 private:
  DecrementModel(QuadLyapunov lyap, BasisLibrary lib)
      : lyap_(std::move(lyap)), library_(std::move(lib)) {}

  bool nominal_ = true;
  QuadLyapunov lyap_;
  BasisLibrary library_;
  Eigen::MatrixXd m_, n_;       // closed-loop pair (X1 G1, X1 G2)
  Eigen::MatrixXd g1_, g2_, e_; // noisy variant data
  Eigen::MatrixXd phi_lower_;   // Pinv Omega Pinv
  double delta_norm_ = 0.0;     // ||Delta||_2
  double r3_ = 0.0;             // ||E' Pinv E||_2
};

}  // namespace nlcancel
