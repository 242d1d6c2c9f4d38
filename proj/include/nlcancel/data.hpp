#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nlcancel/basis.hpp"
#include "nlcancel/trajectory.hpp"

namespace nlcancel {

enum class DataMode { kDiscrete, kContinuous, kExtended, kOutput };

// The data matrices every program is built from. Interpretation by mode:
//   discrete   U0, X0, X1 (successors), Z0
//   continuous U0, X0, X1 (derivatives), Z0
//   extended   V0 in U0, Xi0 in X0, Xi1 in X1, calZ0 in Z0
//   output     U0, W0 in X0, W1 in X1, Z0 = [W0; Q0]
struct DataMatrices {
  DataMode mode = DataMode::kDiscrete;
  Eigen::MatrixXd U0;  // m x T
  Eigen::MatrixXd X0;  // n x T (coordinate block)
  Eigen::MatrixXd X1;  // n x T
  Eigen::MatrixXd Z0;  // S x T
  Eigen::MatrixXd D0;  // s x T harness ground truth, empty in real use
  BasisLibrary library;

  int n() const { return static_cast<int>(X0.rows()); }
  int m() const { return static_cast<int>(U0.rows()); }
  int S() const { return static_cast<int>(Z0.rows()); }
  int T() const { return static_cast<int>(Z0.cols()); }
  bool has_d0() const { return D0.size() > 0; }

  const Eigen::MatrixXd& W0() const { return X0; }
  const Eigen::MatrixXd& W1() const { return X1; }
  const Eigen::MatrixXd& V0() const { return U0; }
  Eigen::MatrixXd Q0() const { return Z0.bottomRows(S() - n()); }
};

// Assembles the data matrices of the requested mode from one trajectory.
//   discrete/continuous: T = traj.horizon() columns;
//   extended: T = horizon - 1 (the auxiliary input is v(k) = u(k+1));
//   output:   T = (#output samples) - n, rows of W0 are outputs shifted by
//             the row index.
DataMatrices build_data_matrices(const Trajectory& traj, const BasisLibrary& library,
                                 DataMode mode);

struct RankReport {
  bool full_row_rank = false;
  int rank = 0;
  double smin = 0.0;
  double smax = 0.0;
};

// Row-rank check via singular values; a singular value below
// tol * (largest singular value) counts as zero.
RankReport rank_richness_check(const Eigen::MatrixXd& mat, double tol = 1e-8);

struct RichnessReport {
  RankReport z0;       // necessary for the synthesis equalities
  RankReport stacked;  // [U0; Z0], hypothesis of the parametrization results
};

RichnessReport data_richness(const DataMatrices& data, double tol = 1e-8);

// Entry-wise mean of same-shape datasets (repeated experiments with one input
// pattern). The averaged Z0 is the mean of the Z0 matrices, not Z evaluated
// at averaged states.
DataMatrices average_datasets(const std::vector<DataMatrices>& datasets);

}  // namespace nlcancel
