#include "nlcancel/conic.hpp"

#include <algorithm>
#include <map>

namespace nlcancel {
namespace conic {

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  constant += o.constant;
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  constant -= o.constant;
  for (const auto& [i, c] : o.terms) terms.push_back({i, -c});
  return *this;
}

LinExpr& LinExpr::operator*=(double a) {
  constant *= a;
  for (auto& [i, c] : terms) c *= a;
  return *this;
}

void LinExpr::compress() {
  if (terms.size() < 2) return;
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> out;
  for (const auto& [i, c] : terms) {
    if (!out.empty() && out.back().first == i)
      out.back().second += c;
    else
      out.push_back({i, c});
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const auto& p) { return p.second == 0.0; }),
            out.end());
  terms = std::move(out);
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double a, LinExpr e) { return e *= a; }

MatExpr MatExpr::constant(const Eigen::MatrixXd& c) {
  MatExpr m(static_cast<int>(c.rows()), static_cast<int>(c.cols()));
  for (int r = 0; r < m.rows_; ++r)
    for (int cc = 0; cc < m.cols_; ++cc) m.at(r, cc) = LinExpr(c(r, cc));
  return m;
}

MatExpr MatExpr::transpose() const {
  MatExpr out(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) out.at(c, r) = at(r, c);
  return out;
}

MatExpr MatExpr::block(int r0, int c0, int nr, int nc) const {
  MatExpr out(nr, nc);
  for (int r = 0; r < nr; ++r)
    for (int c = 0; c < nc; ++c) out.at(r, c) = at(r0 + r, c0 + c);
  return out;
}

MatExpr operator+(const MatExpr& a, const MatExpr& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InputError("MatExpr: shape mismatch in +");
  MatExpr out = a;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) out.at(r, c) += b.at(r, c);
  return out;
}

MatExpr operator-(const MatExpr& a, const MatExpr& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InputError("MatExpr: shape mismatch in -");
  MatExpr out = a;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) out.at(r, c) -= b.at(r, c);
  return out;
}

MatExpr operator*(const Eigen::MatrixXd& c, const MatExpr& x) {
  if (c.cols() != x.rows()) throw InputError("MatExpr: shape mismatch in C*X");
  MatExpr out(static_cast<int>(c.rows()), x.cols());
  for (int r = 0; r < out.rows(); ++r)
    for (int j = 0; j < out.cols(); ++j) {
      LinExpr e;
      for (int k = 0; k < x.rows(); ++k) {
        if (c(r, k) == 0.0) continue;
        e += c(r, k) * x.at(k, j);
      }
      e.compress();
      out.at(r, j) = std::move(e);
    }
  return out;
}

MatExpr operator*(const MatExpr& x, const Eigen::MatrixXd& c) {
  if (x.cols() != c.rows()) throw InputError("MatExpr: shape mismatch in X*C");
  MatExpr out(x.rows(), static_cast<int>(c.cols()));
  for (int r = 0; r < out.rows(); ++r)
    for (int j = 0; j < out.cols(); ++j) {
      LinExpr e;
      for (int k = 0; k < x.cols(); ++k) {
        if (c(k, j) == 0.0) continue;
        e += c(k, j) * x.at(r, k);
      }
      e.compress();
      out.at(r, j) = std::move(e);
    }
  return out;
}

MatExpr operator*(double a, const MatExpr& x) {
  MatExpr out = x;
  for (int r = 0; r < out.rows(); ++r)
    for (int c = 0; c < out.cols(); ++c) out.at(r, c) *= a;
  return out;
}

MatExpr hstack(const std::vector<MatExpr>& parts) {
  if (parts.empty()) throw InputError("hstack: empty");
  int cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != parts[0].rows()) throw InputError("hstack: row mismatch");
    cols += p.cols();
  }
  MatExpr out(parts[0].rows(), cols);
  int c0 = 0;
  for (const auto& p : parts) {
    for (int r = 0; r < p.rows(); ++r)
      for (int c = 0; c < p.cols(); ++c) out.at(r, c0 + c) = p.at(r, c);
    c0 += p.cols();
  }
  return out;
}

MatExpr vstack(const std::vector<MatExpr>& parts) {
  if (parts.empty()) throw InputError("vstack: empty");
  int rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != parts[0].cols()) throw InputError("vstack: col mismatch");
    rows += p.rows();
  }
  MatExpr out(rows, parts[0].cols());
  int r0 = 0;
  for (const auto& p : parts) {
    for (int r = 0; r < p.rows(); ++r)
      for (int c = 0; c < p.cols(); ++c) out.at(r0 + r, c) = p.at(r, c);
    r0 += p.rows();
  }
  return out;
}

int ConicProgram::add_block(const std::string& name, int rows, int cols,
                            bool symmetric) {
  if (rows < 1 || cols < 1) throw InputError("add_block: empty block " + name);
  if (symmetric && rows != cols)
    throw InputError("add_block: symmetric block must be square");
  Block b{name, rows, cols, symmetric, num_scalars_};
  num_scalars_ += b.size();
  blocks_.push_back(b);
  return static_cast<int>(blocks_.size()) - 1;
}

int ConicProgram::add_scalar(const std::string& name) {
  return add_block(name, 1, 1, false);
}

namespace {
// packed index of (r,c), r <= c, in the upper triangle stored row-wise
int sym_index(int n, int r, int c) {
  if (r > c) std::swap(r, c);
  return r * n - r * (r - 1) / 2 + (c - r);
}
}  // namespace

MatExpr ConicProgram::var(int block) const {
  const Block& b = blocks_.at(block);
  MatExpr out(b.rows, b.cols);
  for (int r = 0; r < b.rows; ++r)
    for (int c = 0; c < b.cols; ++c) {
      const int idx = b.symmetric ? b.offset + sym_index(b.rows, r, c)
                                  : b.offset + r * b.cols + c;
      out.at(r, c) = LinExpr::variable(idx);
    }
  return out;
}

LinExpr ConicProgram::scalar(int block) const {
  const Block& b = blocks_.at(block);
  if (b.rows != 1 || b.cols != 1) throw InputError("scalar: block is not 1x1");
  return LinExpr::variable(b.offset);
}

void ConicProgram::add_equality(const MatExpr& expr) {
  for (int r = 0; r < expr.rows(); ++r)
    for (int c = 0; c < expr.cols(); ++c) {
      LinExpr e = expr.at(r, c);
      e.compress();
      if (e.terms.empty()) {
        if (std::abs(e.constant) > 0.0)
          throw InputError("add_equality: contradictory constant row");
        continue;
      }
      eq_rows_.push_back(std::move(e));
    }
}

void ConicProgram::add_psd(const MatExpr& expr, double margin) {
  if (expr.rows() != expr.cols()) throw InputError("add_psd: block not square");
  const int dim = expr.rows();
  LmiConstraint lmi;
  lmi.dim = dim;
  lmi.margin = margin;
  lmi.f0 = Eigen::MatrixXd::Zero(dim, dim);
  std::map<std::pair<int, int>, double> acc;  // (flat, var) -> coeff
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      // symmetrized entry (e(r,c) + e(c,r)) / 2
      LinExpr e = expr.at(r, c);
      e += expr.at(c, r);
      e *= 0.5;
      e.compress();
      lmi.f0(r, c) = e.constant;
      for (const auto& [v, coef] : e.terms) acc[{r * dim + c, v}] += coef;
    }
  lmi.f0 -= margin * Eigen::MatrixXd::Identity(dim, dim);
  for (const auto& [key, coef] : acc)
    if (coef != 0.0) lmi.coeffs.push_back({key.first, key.second, coef});
  lmis_.push_back(std::move(lmi));
}

void ConicProgram::add_nonneg(const LinExpr& expr) {
  MatExpr m(1, 1);
  m.at(0, 0) = expr;
  add_psd(m, 0.0);
}

void ConicProgram::set_objective(const LinExpr& objective) {
  objective_ = objective;
  objective_.compress();
}

void ConicProgram::equalities(Eigen::MatrixXd* a, Eigen::VectorXd* b) const {
  const int rows = static_cast<int>(eq_rows_.size());
  a->setZero(rows, num_scalars_);
  b->setZero(rows);
  for (int r = 0; r < rows; ++r) {
    (*b)(r) = -eq_rows_[r].constant;
    for (const auto& [i, c] : eq_rows_[r].terms) (*a)(r, i) += c;
  }
}

Eigen::MatrixXd ConicProgram::block_value(int block, const Eigen::VectorXd& y) const {
  const Block& b = blocks_.at(block);
  Eigen::MatrixXd out(b.rows, b.cols);
  for (int r = 0; r < b.rows; ++r)
    for (int c = 0; c < b.cols; ++c) {
      const int idx = b.symmetric ? b.offset + sym_index(b.rows, r, c)
                                  : b.offset + r * b.cols + c;
      out(r, c) = y(idx);
    }
  return out;
}

double ConicProgram::scalar_value(int block, const Eigen::VectorXd& y) const {
  return y(blocks_.at(block).offset);
}

Eigen::MatrixXd ConicProgram::lmi_value(int which, const Eigen::VectorXd& y) const {
  const LmiConstraint& l = lmis_.at(which);
  Eigen::MatrixXd f = l.f0;
  for (const auto& c : l.coeffs) f(c.flat / l.dim, c.flat % l.dim) += c.coeff * y(c.var);
  return f;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kInaccurate:
      return "inaccurate";
    case SolveStatus::kFailure:
      return "failure";
  }
  return "unknown";
}

}  // namespace conic
}  // namespace nlcancel
