#pragma once

#include <Eigen/Dense>
#include <string>

namespace nlcancel {

struct ProbBound {
  double bound = 0.0;        // high-confidence bound on ||averaged D0||_2
  double probability = 0.0;  // holds with at least this probability
};

// Bounded zero-mean i.i.d. disturbances, |d| <= delta almost surely, with
// ||Sigma||_2 = sigma_norm: after N experiments of length T,
//   bound = sqrt(T (sigma_norm / N + mu))
//   prob  = 1 - 2 s exp(-T N mu^2 / (2 delta^2 (sigma_norm + N mu))).
ProbBound prob_bound_bounded(double delta, double sigma_norm, int T, int N, double mu,
                             int s);

// Gaussian i.i.d. disturbances with covariance Sigma:
//   bound = sqrt(T/N) (lambda_max(Sigma^1/2) (1 + mu) + sqrt(trace(Sigma)/T))
//   prob  = 1 - exp(-T mu^2 / 2).
ProbBound prob_bound_gaussian(const Eigen::MatrixXd& sigma, int T, int N, double mu);

// Law-of-total-probability bookkeeping: a robust design that is stabilizing
// whenever D0 lies in its uncertainty set is stabilizing with at least the
// probability of that event.
struct StabilityProbability {
  double p = 1.0;
  std::string statement;
};

StabilityProbability stability_probability(double p_d0_in_set);

}  // namespace nlcancel
