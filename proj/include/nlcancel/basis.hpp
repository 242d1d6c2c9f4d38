#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlcancel {

// Errors raised by library construction / transformation.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TransformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Atomic scalar factors a basis function is a product of. Every factor has an
// exact value and gradient at the origin, which is what the Taylor-remainder
// transform and the small-nonlinearity hypothesis checks rely on.
enum class FactorKind {
  kPower,           // x_i^e
  kSine,            // sin(x_i)
  kCosine,          // cos(x_i)
  kSineRemainder,   // sin(x_i) - x_i
  kCosineMinusOne,  // cos(x_i) - 1
};

struct Factor {
  FactorKind kind = FactorKind::kPower;
  int index = 0;     // coordinate index, 0-based
  int exponent = 1;  // only for kPower

  double eval(const Eigen::VectorXd& x) const;
  double value_at_zero() const;
  // d(factor)/dx at 0 is along coordinate `index`; returns that component.
  double grad_at_zero() const;
  std::string label() const;
};

// A scalar basis function: coefficient times a product of factors.
// Covers monomials, sines/cosines, the remainder forms sin(x_i) - x_i and
// (cos(x_i) - 1) x_j, and arbitrary scaled products of those.
class BasisFunction {
 public:
  static BasisFunction monomial(const std::vector<int>& exponents);
  static BasisFunction sine(int index);
  static BasisFunction cosine(int index);
  static BasisFunction sine_remainder(int index);
  static BasisFunction cosine_remainder_product(int i, int j);
  static BasisFunction scaled_product(double coeff, std::vector<Factor> factors);

  double eval(const Eigen::VectorXd& x) const;
  double value_at_zero() const;
  Eigen::VectorXd grad_at_zero(int dim) const;

  // True when the function is identically c * x_i (rejected inside Q).
  bool is_linear() const;
  bool is_constant() const;
  // Total degree when the function is a pure monomial, -1 otherwise.
  int monomial_degree() const;

  double coeff() const { return coeff_; }
  const std::vector<Factor>& factors() const { return factors_; }
  std::string label() const;

 private:
  BasisFunction(double coeff, std::vector<Factor> factors)
      : coeff_(coeff), factors_(std::move(factors)) {}

  double coeff_ = 1.0;
  std::vector<Factor> factors_;
};

// Ordered dictionary Z = [coordinates; Q]. For state-only dictionaries the
// coordinate block is x (input_dim = 0); for the extended dictionaries it is
// xi = [x; u].
class BasisLibrary {
 public:
  BasisLibrary() : n_(1), m_(0) {}  // trivial scalar dictionary Z(x) = x
  BasisLibrary(int state_dim, int input_dim, std::vector<BasisFunction> q);

  static BasisLibrary state_only(int n, std::vector<BasisFunction> q) {
    return BasisLibrary(n, 0, std::move(q));
  }

  int state_dim() const { return n_; }
  int input_dim() const { return m_; }
  int coord_dim() const { return n_ + m_; }
  int total_dim() const { return coord_dim() + static_cast<int>(q_.size()); }
  int q_dim() const { return static_cast<int>(q_.size()); }
  const std::vector<BasisFunction>& q() const { return q_; }

  // Z(x) = [x; Q(x)], length total_dim().
  Eigen::VectorXd eval_z(const Eigen::VectorXd& point) const;
  Eigen::VectorXd eval_q(const Eigen::VectorXd& point) const;
  // Column-wise evaluation, points is coord_dim x P.
  Eigen::MatrixXd eval_q_cols(const Eigen::MatrixXd& points) const;
  Eigen::MatrixXd eval_z_cols(const Eigen::MatrixXd& points) const;

  // dQ/dx at 0, shape q_dim x coord_dim.
  Eigen::MatrixXd grad_q_at_zero() const;

  // True when every Q entry vanishes at 0 with zero gradient, i.e.
  // |Q(x)|/|x| -> 0 as x -> 0. Controllers synthesized without exact
  // cancellation are only locally stabilizing when this holds.
  bool q_is_small_at_origin() const;

  // Labels for the entries of Z in order (controller entries are reported
  // against these).
  std::vector<std::string> labels() const;

  friend bool operator==(const BasisLibrary& a, const BasisLibrary& b);

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<BasisFunction> q_;
};

struct TaylorRemainder {
  Eigen::MatrixXd F;        // dQ/dx at 0
  BasisLibrary remainder;   // same coordinates, Q replaced by r(x) = Q(x) - F x
};

// Splits Q(x) = F x + r(x) at the origin. Entries with zero gradient pass
// through unchanged; sin(x_i) maps to sin(x_i) - x_i and cos(x_i) x_j maps to
// (cos(x_i) - 1) x_j. Throws TransformError when an entry has Q(0) != 0 or a
// nonzero gradient with no remainder form in the closed kind enumeration.
TaylorRemainder taylor_remainder(const BasisLibrary& library);

// All monomials of total degree 2..d over n coordinates. Per degree the pure
// powers x_i^d come first in coordinate order, then the mixed monomials in
// ascending lexicographic order of the exponent vector; this matches the
// entry order used when controllers are reported.
BasisLibrary monomials_up_to_degree(int n, int d);

}  // namespace nlcancel
