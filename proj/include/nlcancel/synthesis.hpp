#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nlcancel/conic.hpp"
#include "nlcancel/data.hpp"

namespace nlcancel {

enum class ObjectiveNorm { kSpectral, kFrobenius };

// Parameters of the robust (Petersen-block) program: uncertainty bound
// D D' <= Delta Delta', margin matrix Omega > 0, regularization weights.
struct RobustParams {
  Eigen::MatrixXd Delta;  // s x s
  Eigen::MatrixXd Omega;  // n x n, symmetric PD
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Eigen::MatrixXd E;      // n x s disturbance channel, identity by default

  static RobustParams worst_case(double delta, int T, int n, int s,
                                 double lambda1 = 0.0, double lambda2 = 0.0);
};

struct ResidualReport {
  double max_eq_residual = 0.0;   // solver equality residual
  double min_lmi_eigenvalue = 0.0;
  double zg_identity_error = 0.0; // || Z0 [G1 G2] - I ||_inf
};

struct SynthesisResult {
  std::string mode;
  conic::SolveStatus status = conic::SolveStatus::kFailure;
  std::string message;

  Eigen::MatrixXd K;   // m x S, over the dictionary labels below
  Eigen::MatrixXd P1;  // n x n (empty in normal-form mode)
  Eigen::MatrixXd Y1, G1, G2;
  Eigen::MatrixXd M;   // X1 G1 (closed-loop linear part)
  Eigen::MatrixXd N;   // X1 G2 (closed-loop nonlinear part)
  double objective = 0.0;
  double k1 = std::numeric_limits<double>::quiet_NaN();
  double epsilon = std::numeric_limits<double>::quiet_NaN();  // Petersen scalar
  bool small_q_warning = false;  // dictionary fails |Q(x)|/|x| -> 0; local
                                 // stability claim is not justified
  bool z0_rank_warning = false;

  ResidualReport residuals;
  int iterations = 0;
  std::vector<std::string> labels;

  // Discrete modes: spectral radius of M; continuous: max real part.
  double stability_measure = std::numeric_limits<double>::quiet_NaN();

  // Robust parameters are carried along for certification.
  std::optional<RobustParams> robust;

  bool feasible() const {
    return status == conic::SolveStatus::kOptimal ||
           status == conic::SolveStatus::kInaccurate;
  }
};

// Exact nonlinearity cancellation: feasibility of
//   Z0 Y1 = [P1; 0],  [P1 (X1Y1)'; X1Y1 P1] > 0,  Z0 G2 = [0; I],  X1 G2 = 0.
// Infeasibility signals that exact cancellation is impossible from this data.
SynthesisResult synth_exact(const DataMatrices& data,
                            const conic::SolverOptions& opts = {});

// Approximate cancellation: minimize ||X1 G2|| subject to the same program
// without X1 G2 = 0. Zero objective recovers the global claim.
SynthesisResult synth_min_norm(const DataMatrices& data,
                               ObjectiveNorm norm = ObjectiveNorm::kSpectral,
                               const conic::SolverOptions& opts = {});

// Sparsity-promoting variant: minimize trace X + trace V with the coupling
// [X, X1G2; (X1G2)', V] >= 0; optionally an analogous pair for X1 Y1.
SynthesisResult synth_sparse(const DataMatrices& data, bool regularize_linear,
                             const conic::SolverOptions& opts = {});

// Continuous-time program: X1 holds derivative samples and the Lyapunov
// constraint becomes X1 Y1 + (X1 Y1)' < 0 with P1 > 0.
SynthesisResult synth_ct(const DataMatrices& data,
                         ObjectiveNorm norm = ObjectiveNorm::kSpectral,
                         const conic::SolverOptions& opts = {});

// Integrator extension (dynamic controller u+ = K calZ(xi)) on extended data.
SynthesisResult synth_extended(const DataMatrices& data,
                               ObjectiveNorm norm = ObjectiveNorm::kSpectral,
                               const conic::SolverOptions& opts = {});

// Robust program: minimize ||X1G2|| + lambda1 ||P1|| + lambda2 ||G2|| with the
// Petersen block in place of the nominal Lyapunov constraint.
SynthesisResult synth_robust(const DataMatrices& data, const RobustParams& params,
                             ObjectiveNorm norm = ObjectiveNorm::kSpectral,
                             const conic::SolverOptions& opts = {});

// Normal-form program on output data (scalar input/output): feasibility in
// G1, G2 and k1 in (-1, 1); returns K = U0 [G1 G2] over [w; Q(x)] and k1.
SynthesisResult synth_normal_form(const DataMatrices& data,
                                  const conic::SolverOptions& opts = {});

// Stability check of a given K (or of the open loop, K = 0 constraint form)
// from data alone: feasibility of the min-norm constraints plus
// U0 [Y1 G2] = K blkdiag(P1, I).
SynthesisResult verify_given_K(const DataMatrices& data, const Eigen::MatrixXd& K,
                               const conic::SolverOptions& opts = {});
SynthesisResult verify_open_loop(const DataMatrices& data,
                                 const conic::SolverOptions& opts = {});

// The robust-stability block (P1 - Omega | (X1Y1)' | Y1') / (X1Y1 | P1 -
// eps E Delta Delta' E' | 0) / (Y1 | 0 | eps I). Shared by synth_robust and
// the randomized falsification tests.
Eigen::MatrixXd petersen_block(const Eigen::MatrixXd& P1, const Eigen::MatrixXd& Y1,
                               const Eigen::MatrixXd& X1, const Eigen::MatrixXd& E,
                               const Eigen::MatrixXd& Delta, const Eigen::MatrixXd& Omega,
                               double epsilon);

// Entries with |k_ij| < 1e-6 ||K||_inf zeroed for display; raw K is kept.
Eigen::MatrixXd display_zeroed(const Eigen::MatrixXd& K);

}  // namespace nlcancel
