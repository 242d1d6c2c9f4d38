#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nlcancel/basis.hpp"

namespace nlcancel {
namespace conic {

// Affine scalar expression over the program's scalar decision variables.
struct LinExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)

  LinExpr() = default;
  explicit LinExpr(double c) : constant(c) {}
  static LinExpr variable(int idx, double coeff = 1.0) {
    LinExpr e;
    e.terms.push_back({idx, coeff});
    return e;
  }

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double a);
  void add_term(int idx, double coeff) {
    if (coeff != 0.0) terms.push_back({idx, coeff});
  }
  // Merge duplicate variable indices (keeps expressions small after sums).
  void compress();
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double a, LinExpr e);

// Dense matrix of affine expressions. Small problems only; the matrix algebra
// below is written for clarity, not scale.
class MatExpr {
 public:
  MatExpr() = default;
  MatExpr(int rows, int cols) : rows_(rows), cols_(cols), e_(rows * cols) {}
  static MatExpr constant(const Eigen::MatrixXd& c);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  LinExpr& at(int r, int c) { return e_[r * cols_ + c]; }
  const LinExpr& at(int r, int c) const { return e_[r * cols_ + c]; }

  MatExpr transpose() const;
  MatExpr block(int r0, int c0, int nr, int nc) const;

  friend MatExpr operator+(const MatExpr& a, const MatExpr& b);
  friend MatExpr operator-(const MatExpr& a, const MatExpr& b);
  friend MatExpr operator*(const Eigen::MatrixXd& c, const MatExpr& x);
  friend MatExpr operator*(const MatExpr& x, const Eigen::MatrixXd& c);
  friend MatExpr operator*(double a, const MatExpr& x);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<LinExpr> e_;
};

MatExpr hstack(const std::vector<MatExpr>& parts);
MatExpr vstack(const std::vector<MatExpr>& parts);

// A conic program: matrix decision blocks, affine equalities, LMI constraints
// (affine symmetric blocks required PSD, with a recorded strictness margin)
// and a linear objective. Built once, solved by a backend behind solve().
class ConicProgram {
 public:
  struct Block {
    std::string name;
    int rows = 0;
    int cols = 0;
    bool symmetric = false;
    int offset = 0;  // first scalar index
    int size() const { return symmetric ? rows * (rows + 1) / 2 : rows * cols; }
  };

  int add_block(const std::string& name, int rows, int cols, bool symmetric = false);
  int add_scalar(const std::string& name);

  // Expression view of a block (entries reference the block's scalars).
  MatExpr var(int block) const;
  LinExpr scalar(int block) const;

  // Entry-wise constraint expr == 0.
  void add_equality(const MatExpr& expr);
  // expr (symmetrized) - margin I is required PSD; margin records how strict
  // inequalities are realized.
  void add_psd(const MatExpr& expr, double margin = 0.0);
  void add_nonneg(const LinExpr& expr);  // 1x1 PSD block

  void set_objective(const LinExpr& objective);

  int num_scalars() const { return num_scalars_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const LinExpr& objective() const { return objective_; }
  bool has_objective() const {
    return !objective_.terms.empty();
  }

  // Assembled equality system A y = b.
  void equalities(Eigen::MatrixXd* a, Eigen::VectorXd* b) const;

  struct LmiCoef {
    int flat = 0;  // entry (r,c) of the block at r*dim + c
    int var = 0;
    double coeff = 0.0;
  };

  struct LmiConstraint {
    int dim = 0;
    double margin = 0.0;
    Eigen::MatrixXd f0;  // constant part minus margin I
    std::vector<LmiCoef> coeffs;
  };
  const std::vector<LmiConstraint>& lmis() const { return lmis_; }

  // Value of a block / the LMI residuals at a scalar assignment.
  Eigen::MatrixXd block_value(int block, const Eigen::VectorXd& y) const;
  double scalar_value(int block, const Eigen::VectorXd& y) const;
  Eigen::MatrixXd lmi_value(int which, const Eigen::VectorXd& y) const;

 private:
  std::vector<Block> blocks_;
  int num_scalars_ = 0;
  std::vector<LinExpr> eq_rows_;
  Eigen::VectorXd eq_rhs_;  // unused; rhs kept inside LinExpr constants
  std::vector<LmiConstraint> lmis_;
  LinExpr objective_;

  friend class IpmSolver;
  const std::vector<LinExpr>& equality_rows() const { return eq_rows_; }
};

enum class SolveStatus { kOptimal, kInfeasible, kInaccurate, kFailure };

std::string to_string(SolveStatus s);

struct SolverOptions {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  double eq_tol = 1e-7;        // relative residual above which equalities are
                               // declared inconsistent
  int max_iterations = 120;
  double margin_cap = 1.0;     // phase-I margin bound
  double infeas_margin = 1e-9; // phase-I margin below which the LMIs are
                               // declared infeasible
  bool verbose = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kFailure;
  Eigen::VectorXd y;          // scalar assignment for the full program
  double objective = 0.0;
  double max_eq_residual = 0.0;
  double min_lmi_eigenvalue = 0.0;  // across blocks, margin included
  int iterations = 0;
  std::string message;
};

// Dense two-phase primal-dual interior-point backend (HKM direction with a
// Mehrotra corrector). Phase I maximizes a common LMI margin after
// eliminating the equalities; phase II optimizes the objective from the
// strictly feasible phase-I point. Written for the small dense programs this
// toolkit generates; it is not a general-purpose solver.
class IpmSolver {
 public:
  SolveResult solve(const ConicProgram& program, const SolverOptions& options) const;
};

}  // namespace conic
}  // namespace nlcancel
