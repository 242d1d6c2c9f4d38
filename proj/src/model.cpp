#include "nlcancel/model.hpp"

#include <cmath>

namespace nlcancel {

namespace {
// Pendulum parameters shared by the catalog entries.
constexpr double kTs = 0.1;
constexpr double kMass = 1.0;
constexpr double kLength = 1.0;
constexpr double kGravity = 9.8;
constexpr double kFriction = 0.01;
}  // namespace

Eigen::VectorXd SystemModel::step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& d) const {
  Eigen::VectorXd z;
  if (extended_dictionary()) {
    Eigen::VectorXd xi(x.size() + u.size());
    xi << x, u;
    z = dictionary.eval_z(xi);
  } else {
    z = dictionary.eval_z(x);
  }
  Eigen::VectorXd xp = A * z + B * u;
  if (d.size() > 0) xp += E * d;
  return xp;
}

Eigen::VectorXd SystemModel::step(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& u) const {
  return step(x, u, Eigen::VectorXd());
}

DisturbanceSpec DisturbanceSpec::none() {
  DisturbanceSpec d;
  d.law = Law::kNone;
  d.sigma = Eigen::MatrixXd::Zero(0, 0);
  return d;
}

DisturbanceSpec DisturbanceSpec::uniform(double delta, int s) {
  if (delta < 0) throw InputError("DisturbanceSpec: delta must be >= 0");
  DisturbanceSpec d;
  d.law = Law::kUniform;
  d.delta = delta;
  d.sigma = (delta * delta / (3.0 * s)) * Eigen::MatrixXd::Identity(s, s);
  return d;
}

DisturbanceSpec DisturbanceSpec::gaussian(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() ||
      (sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InputError("DisturbanceSpec: sigma must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.eigenvalues().minCoeff() < -1e-12)
    throw InputError("DisturbanceSpec: sigma must be PSD");
  DisturbanceSpec d;
  d.law = Law::kGaussian;
  d.sigma = sigma;
  return d;
}

DisturbanceSpec DisturbanceSpec::state_dependent(const std::string& name) {
  DisturbanceSpec d;
  d.law = Law::kStateDependent;
  d.function_name = name;
  d.sigma = Eigen::MatrixXd::Zero(1, 1);
  if (name == "pendulum_neglected_sin") {
    // gap between the pendulum's sin term and its linearization
    d.function = [](const Eigen::VectorXd& x) {
      Eigen::VectorXd out(1);
      out(0) = kTs * kGravity / kLength * (std::sin(x(0)) - x(0));
      return out;
    };
  } else {
    throw InputError("unknown state-dependent disturbance: " + name);
  }
  return d;
}

Eigen::VectorXd DisturbanceSpec::sample(Rng& rng, const Eigen::VectorXd& x) const {
  switch (law) {
    case Law::kNone:
      return Eigen::VectorXd();
    case Law::kUniform: {
      const int s = dim();
      const double a = delta / std::sqrt(static_cast<double>(s));
      Eigen::VectorXd d(s);
      for (int i = 0; i < s; ++i) d(i) = rng.uniform(-a, a);
      return d;
    }
    case Law::kGaussian: {
      const int s = dim();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
      Eigen::MatrixXd half =
          es.eigenvectors() *
          es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
          es.eigenvectors().transpose();
      Eigen::VectorXd w(s);
      for (int i = 0; i < s; ++i) w(i) = rng.normal();
      return half * w;
    }
    case Law::kStateDependent:
      return function(x);
  }
  return Eigen::VectorXd();
}

SystemModel make_pendulum() {
  SystemModel md{.name = "pendulum",
                 .A = Eigen::MatrixXd(2, 3),
                 .B = Eigen::MatrixXd(2, 1),
                 .E = Eigen::MatrixXd(2, 1),
                 .dictionary = BasisLibrary::state_only(2, {BasisFunction::sine(0)})};
  md.A << 1.0, kTs, 0.0,
          0.0, 1.0 - kTs * kFriction / (kMass * kLength * kLength),
          kTs * kGravity / kLength;
  md.B << 0.0, kTs / (kMass * kLength * kLength);
  md.E << 0.0, 1.0;  // disturbance enters on the velocity equation
  return md;
}

SystemModel make_pendulum_remainder() {
  SystemModel md = make_pendulum();
  md.name = "pendulum-remainder";
  md.dictionary =
      BasisLibrary::state_only(2, {BasisFunction::sine_remainder(0)});
  // sin x1 = x1 + (sin x1 - x1), so the x1 column absorbs the linear part.
  const double c = kTs * kGravity / kLength;
  md.A << 1.0, kTs, 0.0,
          c, 1.0 - kTs * kFriction / (kMass * kLength * kLength), c;
  return md;
}

SystemModel make_pendulum_linear() {
  SystemModel md = make_pendulum();
  md.name = "pendulum-linear";
  md.dictionary = BasisLibrary::state_only(2, {});
  const double c = kTs * kGravity / kLength;
  md.A.resize(2, 2);
  md.A << 1.0, kTs, c, 1.0 - kTs * kFriction / (kMass * kLength * kLength);
  return md;
}

SystemModel make_pendulum_ct() {
  SystemModel md{.name = "pendulum-ct",
                 .A = Eigen::MatrixXd(2, 3),
                 .B = Eigen::MatrixXd(2, 1),
                 .E = Eigen::MatrixXd(2, 1),
                 .dictionary = BasisLibrary::state_only(2, {BasisFunction::sine(0)}),
                 .time = TimeSemantics::kContinuous};
  md.A << 0.0, 1.0, 0.0,
          0.0, -kFriction / (kMass * kLength * kLength), kGravity / kLength;
  md.B << 0.0, 1.0 / (kMass * kLength * kLength);
  md.E << 0.0, 1.0;
  return md;
}

SystemModel make_pendulum_cos() {
  // Force applied at the base: the input enters through cos(x1) u, handled by
  // the extended dictionary over xi = [x1, x2, u].
  std::vector<BasisFunction> q;
  q.push_back(BasisFunction::sine(0));
  q.push_back(BasisFunction::scaled_product(
      1.0, {Factor{FactorKind::kCosine, 0, 1}, Factor{FactorKind::kPower, 2, 1}}));
  SystemModel md{.name = "pendulum-cos",
                 .A = Eigen::MatrixXd(2, 5),
                 .B = Eigen::MatrixXd::Zero(2, 1),
                 .E = Eigen::MatrixXd(2, 1),
                 .dictionary = BasisLibrary(2, 1, std::move(q))};
  md.A << 1.0, kTs, 0.0, 0.0, 0.0,
          0.0, 1.0 - kTs * kFriction / (kMass * kLength * kLength), 0.0,
          kTs * kGravity / kLength, kTs / (kMass * kLength);
  md.E << 0.0, 1.0;
  return md;
}

SystemModel make_poly2() {
  SystemModel md{.name = "poly2",
                 .A = Eigen::MatrixXd(2, 3),
                 .B = Eigen::MatrixXd(2, 1),
                 .E = Eigen::MatrixXd::Identity(2, 2),
                 .dictionary = BasisLibrary::state_only(
                     2, {BasisFunction::monomial({3, 0})})};
  md.A << 0.0, 1.0, 1.0,
          0.5, 0.0, 0.0;
  md.B << 1.0, 0.0;
  return md;
}

SystemModel make_poly4() {
  SystemModel md{.name = "poly4",
                 .A = Eigen::MatrixXd(2, 4),
                 .B = Eigen::MatrixXd(2, 1),
                 .E = Eigen::MatrixXd::Identity(2, 2),
                 .dictionary = BasisLibrary::state_only(
                     2, {BasisFunction::monomial({0, 2}),
                         BasisFunction::monomial({3, 0})})};
  md.A << 0.0, 1.0, 0.0, 1.0,
          0.5, 0.0, 0.2, 0.0;
  md.B << 1.0, 0.0;
  return md;
}

SystemModel make_poly_output() {
  SystemModel md = make_poly4();
  md.name = "poly-output";
  md.A << 0.0, 0.0, 1.0, 1.0,
          0.5, 0.0, 0.2, 0.0;  // x1+ = x2^2 + x1^3 + u
  md.output_index = 1;         // y = x2
  return md;
}

SystemModel model_by_name(const std::string& name) {
  if (name == "pendulum") return make_pendulum();
  if (name == "pendulum-remainder") return make_pendulum_remainder();
  if (name == "pendulum-linear") return make_pendulum_linear();
  if (name == "pendulum-ct") return make_pendulum_ct();
  if (name == "pendulum-cos") return make_pendulum_cos();
  if (name == "poly2") return make_poly2();
  if (name == "poly4") return make_poly4();
  if (name == "poly-output") return make_poly_output();
  throw InputError("unknown model: " + name);
}

}  // namespace nlcancel
