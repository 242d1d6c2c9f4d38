#include "nlcancel/probbounds.hpp"

#include <cmath>
#include <sstream>

#include "nlcancel/basis.hpp"

namespace nlcancel {

ProbBound prob_bound_bounded(double delta, double sigma_norm, int T, int N, double mu,
                             int s) {
  if (delta <= 0 || sigma_norm < 0 || T < 1 || N < 1 || mu <= 0 || s < 1)
    throw InputError("prob_bound_bounded: all arguments must be positive");
  ProbBound out;
  out.bound = std::sqrt(T * (sigma_norm / N + mu));
  out.probability =
      1.0 - 2.0 * s *
                std::exp(-(static_cast<double>(T) * N * mu * mu) /
                         (2.0 * delta * delta * (sigma_norm + N * mu)));
  return out;
}

ProbBound prob_bound_gaussian(const Eigen::MatrixXd& sigma, int T, int N, double mu) {
  if (T < 1 || N < 1 || mu <= 0)
    throw InputError("prob_bound_gaussian: all arguments must be positive");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InputError("prob_bound_gaussian: Sigma must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < -1e-12) throw InputError("prob_bound_gaussian: Sigma must be PSD");
  const double lmax_half = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  ProbBound out;
  out.bound = std::sqrt(static_cast<double>(T) / N) *
              (lmax_half * (1.0 + mu) + std::sqrt(std::max(0.0, sigma.trace()) / T));
  out.probability = 1.0 - std::exp(-T * mu * mu / 2.0);
  return out;
}

StabilityProbability stability_probability(double p_d0_in_set) {
  if (p_d0_in_set < 0.0 || p_d0_in_set > 1.0)
    throw InputError("stability_probability: p must be in [0, 1]");
  StabilityProbability sp;
  sp.p = p_d0_in_set;
  std::ostringstream os;
  os << "stabilizing with probability >= " << p_d0_in_set;
  sp.statement = os.str();
  return sp;
}

}  // namespace nlcancel
