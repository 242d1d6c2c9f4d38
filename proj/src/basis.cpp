#include "nlcancel/basis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace nlcancel {

double Factor::eval(const Eigen::VectorXd& x) const {
  const double v = x(index);
  switch (kind) {
    case FactorKind::kPower: {
      double r = 1.0;
      for (int e = 0; e < exponent; ++e) r *= v;
      return r;
    }
    case FactorKind::kSine:
      return std::sin(v);
    case FactorKind::kCosine:
      return std::cos(v);
    case FactorKind::kSineRemainder:
      return std::sin(v) - v;
    case FactorKind::kCosineMinusOne:
      return std::cos(v) - 1.0;
  }
  return 0.0;
}

double Factor::value_at_zero() const {
  switch (kind) {
    case FactorKind::kPower:
      return exponent == 0 ? 1.0 : 0.0;
    case FactorKind::kCosine:
      return 1.0;
    default:
      return 0.0;
  }
}

double Factor::grad_at_zero() const {
  switch (kind) {
    case FactorKind::kPower:
      return exponent == 1 ? 1.0 : 0.0;
    case FactorKind::kSine:
      return 1.0;
    default:
      // cos'(0) = 0; the remainder kinds have zero slope at 0 as well.
      return 0.0;
  }
}

std::string Factor::label() const {
  std::ostringstream os;
  const std::string xi = "x" + std::to_string(index + 1);
  switch (kind) {
    case FactorKind::kPower:
      os << xi;
      if (exponent != 1) os << "^" << exponent;
      break;
    case FactorKind::kSine:
      os << "sin(" << xi << ")";
      break;
    case FactorKind::kCosine:
      os << "cos(" << xi << ")";
      break;
    case FactorKind::kSineRemainder:
      os << "sin(" << xi << ")-" << xi;
      break;
    case FactorKind::kCosineMinusOne:
      os << "(cos(" << xi << ")-1)";
      break;
  }
  return os.str();
}

BasisFunction BasisFunction::monomial(const std::vector<int>& exponents) {
  std::vector<Factor> fs;
  for (int i = 0; i < static_cast<int>(exponents.size()); ++i) {
    if (exponents[i] < 0) throw InputError("monomial: negative exponent");
    if (exponents[i] > 0)
      fs.push_back(Factor{FactorKind::kPower, i, exponents[i]});
  }
  return BasisFunction(1.0, std::move(fs));
}

BasisFunction BasisFunction::sine(int index) {
  return BasisFunction(1.0, {Factor{FactorKind::kSine, index, 1}});
}

BasisFunction BasisFunction::cosine(int index) {
  return BasisFunction(1.0, {Factor{FactorKind::kCosine, index, 1}});
}

BasisFunction BasisFunction::sine_remainder(int index) {
  return BasisFunction(1.0, {Factor{FactorKind::kSineRemainder, index, 1}});
}

BasisFunction BasisFunction::cosine_remainder_product(int i, int j) {
  return BasisFunction(
      1.0, {Factor{FactorKind::kCosineMinusOne, i, 1}, Factor{FactorKind::kPower, j, 1}});
}

BasisFunction BasisFunction::scaled_product(double coeff, std::vector<Factor> factors) {
  return BasisFunction(coeff, std::move(factors));
}

double BasisFunction::eval(const Eigen::VectorXd& x) const {
  double r = coeff_;
  for (const auto& f : factors_) r *= f.eval(x);
  return r;
}

double BasisFunction::value_at_zero() const {
  double r = coeff_;
  for (const auto& f : factors_) r *= f.value_at_zero();
  return r;
}

Eigen::VectorXd BasisFunction::grad_at_zero(int dim) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
  // Product rule at 0: each factor contributes its slope times the values of
  // the others.
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    double rest = coeff_;
    for (std::size_t j = 0; j < factors_.size(); ++j) {
      if (j != i) rest *= factors_[j].value_at_zero();
    }
    g(factors_[i].index) += rest * factors_[i].grad_at_zero();
  }
  return g;
}

bool BasisFunction::is_constant() const {
  for (const auto& f : factors_) {
    if (!(f.kind == FactorKind::kPower && f.exponent == 0)) return false;
  }
  return true;
}

bool BasisFunction::is_linear() const {
  if (factors_.size() != 1) return false;
  const auto& f = factors_[0];
  return f.kind == FactorKind::kPower && f.exponent == 1;
}

int BasisFunction::monomial_degree() const {
  int deg = 0;
  for (const auto& f : factors_) {
    if (f.kind != FactorKind::kPower) return -1;
    deg += f.exponent;
  }
  return deg;
}

std::string BasisFunction::label() const {
  std::ostringstream os;
  if (coeff_ != 1.0) os << coeff_ << "*";
  if (factors_.empty()) os << "1";
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) os << "*";
    os << factors_[i].label();
  }
  return os.str();
}

BasisLibrary::BasisLibrary(int state_dim, int input_dim, std::vector<BasisFunction> q)
    : n_(state_dim), m_(input_dim), q_(std::move(q)) {
  if (n_ < 1 || m_ < 0) throw InputError("BasisLibrary: bad dimensions");
  for (const auto& f : q_) {
    if (f.is_linear())
      throw InputError("BasisLibrary: Q must not duplicate the identity block (entry " +
                       f.label() + ")");
    if (f.is_constant())
      throw InputError("BasisLibrary: Q must contain nonlinear entries only");
    for (const auto& fac : f.factors()) {
      if (fac.index < 0 || fac.index >= coord_dim())
        throw InputError("BasisLibrary: factor index out of range in " + f.label());
    }
  }
}

Eigen::VectorXd BasisLibrary::eval_q(const Eigen::VectorXd& point) const {
  if (point.size() != coord_dim())
    throw InputError("eval_z: point dimension mismatch");
  Eigen::VectorXd out(q_dim());
  for (int i = 0; i < q_dim(); ++i) out(i) = q_[i].eval(point);
  return out;
}

Eigen::VectorXd BasisLibrary::eval_z(const Eigen::VectorXd& point) const {
  if (point.size() != coord_dim())
    throw InputError("eval_z: point dimension mismatch");
  Eigen::VectorXd out(total_dim());
  out.head(coord_dim()) = point;
  for (int i = 0; i < q_dim(); ++i) out(coord_dim() + i) = q_[i].eval(point);
  return out;
}

Eigen::MatrixXd BasisLibrary::eval_q_cols(const Eigen::MatrixXd& points) const {
  if (points.rows() != coord_dim())
    throw InputError("eval_q_cols: point dimension mismatch");
  Eigen::MatrixXd out(q_dim(), points.cols());
  for (int k = 0; k < points.cols(); ++k)
    for (int i = 0; i < q_dim(); ++i) out(i, k) = q_[i].eval(points.col(k));
  return out;
}

Eigen::MatrixXd BasisLibrary::eval_z_cols(const Eigen::MatrixXd& points) const {
  Eigen::MatrixXd out(total_dim(), points.cols());
  out.topRows(coord_dim()) = points;
  out.bottomRows(q_dim()) = eval_q_cols(points);
  return out;
}

Eigen::MatrixXd BasisLibrary::grad_q_at_zero() const {
  Eigen::MatrixXd f(q_dim(), coord_dim());
  for (int i = 0; i < q_dim(); ++i) f.row(i) = q_[i].grad_at_zero(coord_dim()).transpose();
  return f;
}

bool BasisLibrary::q_is_small_at_origin() const {
  for (const auto& q : q_) {
    if (q.value_at_zero() != 0.0) return false;
    if (q.grad_at_zero(coord_dim()).cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

std::vector<std::string> BasisLibrary::labels() const {
  std::vector<std::string> out;
  for (int i = 0; i < n_; ++i) out.push_back("x" + std::to_string(i + 1));
  for (int i = 0; i < m_; ++i) out.push_back("u" + std::to_string(i + 1));
  for (const auto& q : q_) out.push_back(q.label());
  return out;
}

bool operator==(const BasisLibrary& a, const BasisLibrary& b) {
  if (a.n_ != b.n_ || a.m_ != b.m_ || a.q_.size() != b.q_.size()) return false;
  for (std::size_t i = 0; i < a.q_.size(); ++i) {
    if (a.q_[i].label() != b.q_[i].label() || a.q_[i].coeff() != b.q_[i].coeff())
      return false;
  }
  return true;
}

TaylorRemainder taylor_remainder(const BasisLibrary& library) {
  const int nc = library.coord_dim();
  Eigen::MatrixXd f(library.q_dim(), nc);
  std::vector<BasisFunction> rem;
  for (int i = 0; i < library.q_dim(); ++i) {
    const BasisFunction& q = library.q()[i];
    if (q.value_at_zero() != 0.0)
      throw TransformError("taylor_remainder: entry " + q.label() + " has Q(0) != 0");
    const Eigen::VectorXd g = q.grad_at_zero(nc);
    f.row(i) = g.transpose();
    if (g.cwiseAbs().maxCoeff() == 0.0) {
      rem.push_back(q);
      continue;
    }
    // Nonzero slope at the origin: rewrite in a remainder kind.
    const auto& fs = q.factors();
    if (fs.size() == 1 && fs[0].kind == FactorKind::kSine) {
      rem.push_back(BasisFunction::scaled_product(
          q.coeff(), {Factor{FactorKind::kSineRemainder, fs[0].index, 1}}));
      continue;
    }
    if (fs.size() == 2 && fs[0].kind == FactorKind::kCosine &&
        fs[1].kind == FactorKind::kPower && fs[1].exponent == 1) {
      rem.push_back(BasisFunction::scaled_product(
          q.coeff(), {Factor{FactorKind::kCosineMinusOne, fs[0].index, 1},
                      Factor{FactorKind::kPower, fs[1].index, 1}}));
      continue;
    }
    if (fs.size() == 2 && fs[1].kind == FactorKind::kCosine &&
        fs[0].kind == FactorKind::kPower && fs[0].exponent == 1) {
      rem.push_back(BasisFunction::scaled_product(
          q.coeff(), {Factor{FactorKind::kCosineMinusOne, fs[1].index, 1},
                      Factor{FactorKind::kPower, fs[0].index, 1}}));
      continue;
    }
    throw TransformError("taylor_remainder: no remainder form for entry " + q.label());
  }
  return TaylorRemainder{f, BasisLibrary(library.state_dim(), library.input_dim(),
                                         std::move(rem))};
}

BasisLibrary monomials_up_to_degree(int n, int d) {
  if (n < 1) throw InputError("monomials_up_to_degree: n must be >= 1");
  if (d < 2) throw InputError("monomials_up_to_degree: degree must be >= 2, Q would be empty");
  std::vector<BasisFunction> q;
  for (int deg = 2; deg <= d; ++deg) {
    // pure powers first
    for (int i = 0; i < n; ++i) {
      std::vector<int> e(n, 0);
      e[i] = deg;
      q.push_back(BasisFunction::monomial(e));
    }
    // mixed monomials, ascending lexicographic exponent vectors
    std::vector<std::vector<int>> mixed;
    std::vector<int> e(n, 0);
    // enumerate all compositions of deg into n nonnegative parts
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == n - 1) {
        e[pos] = left;
        int nz = 0;
        for (int v : e)
          if (v > 0) ++nz;
        if (nz > 1) mixed.push_back(e);
        return;
      }
      for (int v = 0; v <= left; ++v) {
        e[pos] = v;
        rec(pos + 1, left - v);
      }
    };
    rec(0, deg);
    std::sort(mixed.begin(), mixed.end());
    for (const auto& me : mixed) q.push_back(BasisFunction::monomial(me));
  }
  return BasisLibrary::state_only(n, std::move(q));
}

}  // namespace nlcancel
