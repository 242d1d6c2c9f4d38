#include "nlcancel/lyapunov.hpp"

#include <cmath>

namespace nlcancel {

QuadLyapunov::QuadLyapunov(const Eigen::MatrixXd& pinv) : pinv_(pinv) {
  if (pinv.rows() != pinv.cols())
    throw InputError("QuadLyapunov: square matrix required");
  if ((pinv - pinv.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw InputError("QuadLyapunov: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pinv, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw InputError("QuadLyapunov: matrix must be positive definite");
  pinv_ = 0.5 * (pinv + pinv.transpose());
}

QuadLyapunov QuadLyapunov::from_p1(const Eigen::MatrixXd& p1) {
  Eigen::MatrixXd pinv =
      p1.llt().solve(Eigen::MatrixXd::Identity(p1.rows(), p1.cols()));
  return QuadLyapunov(0.5 * (pinv + pinv.transpose()));
}

Eigen::VectorXd QuadLyapunov::value_cols(const Eigen::MatrixXd& points) const {
  const Eigen::MatrixXd pp = pinv_ * points;
  Eigen::VectorXd out(points.cols());
  for (int i = 0; i < points.cols(); ++i) out(i) = points.col(i).dot(pp.col(i));
  return out;
}

DecrementModel DecrementModel::nominal(const Eigen::MatrixXd& m,
                                       const Eigen::MatrixXd& n,
                                       const BasisLibrary& library,
                                       const QuadLyapunov& lyap) {
  DecrementModel d(lyap, library);
  d.nominal_ = true;
  d.m_ = m;
  d.n_ = n;
  return d;
}

DecrementModel DecrementModel::noisy(const Eigen::MatrixXd& m, const Eigen::MatrixXd& n,
                                     const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2,
                                     const BasisLibrary& library, const QuadLyapunov& lyap,
                                     const Eigen::MatrixXd& e, const Eigen::MatrixXd& delta,
                                     const Eigen::MatrixXd& omega) {
  DecrementModel d(lyap, library);
  d.nominal_ = false;
  d.m_ = m;
  d.n_ = n;
  d.g1_ = g1;
  d.g2_ = g2;
  d.e_ = e;
  d.phi_lower_ = lyap.pinv() * omega * lyap.pinv();
  d.delta_norm_ = delta.size() ? delta.operatorNorm() : 0.0;
  d.r3_ = (e.transpose() * lyap.pinv() * e).operatorNorm();
  return d;
}

DecrementModel DecrementModel::from_result(const SynthesisResult& result,
                                           const BasisLibrary& library) {
  QuadLyapunov lyap = QuadLyapunov::from_p1(result.P1);
  if (result.robust.has_value()) {
    const RobustParams& rp = *result.robust;
    return noisy(result.M, result.N, result.G1, result.G2, library, lyap, rp.E,
                 rp.Delta, rp.Omega);
  }
  return nominal(result.M, result.N, library, lyap);
}

double DecrementModel::h(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd q = library_.eval_q(x);
  const Eigen::VectorXd xp = m_ * x + n_ * q;
  return xp.dot(lyap_.pinv() * xp) - x.dot(lyap_.pinv() * x);
}

double DecrementModel::ell(const Eigen::VectorXd& x) const {
  if (nominal_) throw InputError("ell: noisy decrement model required");
  const Eigen::VectorXd q = library_.eval_q(x);
  const Eigen::VectorXd nq = n_ * q;
  const Eigen::VectorXd v = 2.0 * (m_ * x) + nq;   // 2 X1G1 x + X1G2 Q
  const Eigen::VectorXd gq = g2_ * q;              // G2 Q
  const Eigen::VectorXd w = 2.0 * (g1_ * x) + gq;  // 2 G1 x + G2 Q
  const double l1 = v.dot(lyap_.pinv() * nq);
  const double l2 = delta_norm_ * (e_.transpose() * (lyap_.pinv() * v)).norm() * gq.norm();
  const double l3 = delta_norm_ * w.norm() * (e_.transpose() * (lyap_.pinv() * nq)).norm();
  const double l4 = delta_norm_ * delta_norm_ * r3_ * w.norm() * gq.norm();
  return -x.dot(phi_lower_ * x) + l1 + l2 + l3 + l4;
}

double DecrementModel::g(const Eigen::VectorXd& x, double delta) const {
  if (nominal_) throw InputError("g: noisy decrement model required");
  const Eigen::VectorXd q = library_.eval_q(x);
  const Eigen::VectorXd cl = m_ * x + n_ * q;   // X1G1 x + X1G2 Q
  const Eigen::VectorXd w = g1_ * x + g2_ * q;  // G1 x + G2 Q
  const double r1 = 2.0 * (e_.transpose() * (lyap_.pinv() * cl)).norm();
  const double r2 = 2.0 * delta_norm_ * r3_ * w.norm();
  return r1 * delta + r2 * delta + r3_ * delta * delta;
}

double DecrementModel::g(const Eigen::VectorXd& x, const StateBound& delta) const {
  return g(x, delta.eval(x));
}

Eigen::VectorXd DecrementModel::h_cols(const Eigen::MatrixXd& points) const {
  const Eigen::MatrixXd q = library_.eval_q_cols(points);
  const Eigen::MatrixXd xp = m_ * points + n_ * q;
  const Eigen::MatrixXd pxp = lyap_.pinv() * xp;
  const Eigen::MatrixXd px = lyap_.pinv() * points;
  Eigen::VectorXd out(points.cols());
  for (int i = 0; i < points.cols(); ++i)
    out(i) = xp.col(i).dot(pxp.col(i)) - points.col(i).dot(px.col(i));
  return out;
}

Eigen::VectorXd DecrementModel::ell_cols(const Eigen::MatrixXd& points) const {
  if (nominal_) throw InputError("ell_cols: noisy decrement model required");
  const Eigen::MatrixXd q = library_.eval_q_cols(points);
  const Eigen::MatrixXd nq = n_ * q;
  const Eigen::MatrixXd v = 2.0 * (m_ * points) + nq;
  const Eigen::MatrixXd gq = g2_ * q;
  const Eigen::MatrixXd w = 2.0 * (g1_ * points) + gq;
  const Eigen::MatrixXd pinv_v = lyap_.pinv() * v;
  const Eigen::MatrixXd pinv_nq = lyap_.pinv() * nq;
  const Eigen::MatrixXd ev = e_.transpose() * pinv_v;
  const Eigen::MatrixXd enq = e_.transpose() * pinv_nq;
  const Eigen::MatrixXd phix = phi_lower_ * points;
  Eigen::VectorXd out(points.cols());
  for (int i = 0; i < points.cols(); ++i) {
    const double gqn = gq.col(i).norm();
    const double wn = w.col(i).norm();
    out(i) = -points.col(i).dot(phix.col(i)) + v.col(i).dot(pinv_nq.col(i)) +
             delta_norm_ * ev.col(i).norm() * gqn +
             delta_norm_ * wn * enq.col(i).norm() +
             delta_norm_ * delta_norm_ * r3_ * wn * gqn;
  }
  return out;
}

Eigen::VectorXd DecrementModel::g_cols(const Eigen::MatrixXd& points,
                                       double delta) const {
  if (nominal_) throw InputError("g_cols: noisy decrement model required");
  const Eigen::MatrixXd q = library_.eval_q_cols(points);
  const Eigen::MatrixXd cl = m_ * points + n_ * q;
  const Eigen::MatrixXd w = g1_ * points + g2_ * q;
  const Eigen::MatrixXd ecl = e_.transpose() * (lyap_.pinv() * cl);
  Eigen::VectorXd out(points.cols());
  for (int i = 0; i < points.cols(); ++i) {
    const double r1 = 2.0 * ecl.col(i).norm();
    const double r2 = 2.0 * delta_norm_ * r3_ * w.col(i).norm();
    out(i) = (r1 + r2) * delta + r3_ * delta * delta;
  }
  return out;
}

Eigen::VectorXd DecrementModel::g_cols(const Eigen::MatrixXd& points,
                                       const StateBound& delta) const {
  if (nominal_) throw InputError("g_cols: noisy decrement model required");
  const Eigen::MatrixXd q = library_.eval_q_cols(points);
  const Eigen::MatrixXd cl = m_ * points + n_ * q;
  const Eigen::MatrixXd w = g1_ * points + g2_ * q;
  const Eigen::MatrixXd ecl = e_.transpose() * (lyap_.pinv() * cl);
  Eigen::VectorXd out(points.cols());
  for (int i = 0; i < points.cols(); ++i) {
    const double d = delta.eval(points.col(i));
    const double r1 = 2.0 * ecl.col(i).norm();
    const double r2 = 2.0 * delta_norm_ * r3_ * w.col(i).norm();
    out(i) = (r1 + r2) * d + r3_ * d * d;
  }
  return out;
}

}  // namespace nlcancel
