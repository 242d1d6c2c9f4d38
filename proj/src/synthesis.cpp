#include "nlcancel/synthesis.hpp"

#include <cmath>

namespace nlcancel {

using conic::ConicProgram;
using conic::IpmSolver;
using conic::LinExpr;
using conic::MatExpr;
using conic::SolveResult;
using conic::SolveStatus;
using conic::SolverOptions;

namespace {

Eigen::MatrixXd eye(int n) { return Eigen::MatrixXd::Identity(n, n); }
Eigen::MatrixXd zeros(int r, int c) { return Eigen::MatrixXd::Zero(r, c); }

// Strict inequalities are realized as ">= margin I" with the margin scaled by
// the data magnitude.
double strict_margin(const DataMatrices& data) {
  return 1e-7 * std::max(1.0, data.X1.cwiseAbs().maxCoeff());
}

// C * s for a scalar expression s.
MatExpr scale_by_scalar(const Eigen::MatrixXd& c, const LinExpr& s) {
  MatExpr out(static_cast<int>(c.rows()), static_cast<int>(c.cols()));
  for (int r = 0; r < c.rows(); ++r)
    for (int j = 0; j < c.cols(); ++j) {
      LinExpr e = s;
      e *= c(r, j);
      out.at(r, j) = std::move(e);
    }
  return out;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

double max_real_eig(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return m.eigenvalues().real().maxCoeff();
}

// Shared scaffolding for the programs over (P1, Y1, G2).
struct StandardBlocks {
  ConicProgram prog;
  int P1 = -1;
  int Y1 = -1;
  int G2 = -1;  // absent when S == n
  bool has_g2 = false;
};

StandardBlocks make_standard(const DataMatrices& data) {
  StandardBlocks sb;
  const int n = data.n();
  const int S = data.S();
  const int T = data.T();
  sb.P1 = sb.prog.add_block("P1", n, n, /*symmetric=*/true);
  sb.Y1 = sb.prog.add_block("Y1", T, n);
  sb.has_g2 = S > n;
  if (sb.has_g2) sb.G2 = sb.prog.add_block("G2", T, S - n);

  // Z0 Y1 = [P1; 0]
  MatExpr zy = MatExpr::constant(data.Z0) * sb.prog.var(sb.Y1);
  MatExpr rhs = vstack({sb.prog.var(sb.P1),
                        MatExpr::constant(zeros(S - n, n))});
  sb.prog.add_equality(zy - rhs);
  // Z0 G2 = [0; I]
  if (sb.has_g2) {
    MatExpr zg = MatExpr::constant(data.Z0) * sb.prog.var(sb.G2);
    Eigen::MatrixXd tgt(S, S - n);
    tgt << zeros(n, S - n), eye(S - n);
    sb.prog.add_equality(zg - MatExpr::constant(tgt));
  }
  return sb;
}

void add_discrete_lyapunov(StandardBlocks& sb, const DataMatrices& data) {
  MatExpr xy = MatExpr::constant(data.X1) * sb.prog.var(sb.Y1);
  MatExpr blk = vstack({hstack({sb.prog.var(sb.P1), xy.transpose()}),
                        hstack({xy, sb.prog.var(sb.P1)})});
  sb.prog.add_psd(blk, strict_margin(data));
}

// Epigraph t >= ||A_expr|| in the requested norm; returns the epigraph scalar.
LinExpr add_norm_epigraph(ConicProgram& prog, const MatExpr& a, ObjectiveNorm norm,
                          const std::string& name) {
  const int t = prog.add_scalar(name);
  const LinExpr te = prog.scalar(t);
  if (norm == ObjectiveNorm::kSpectral) {
    MatExpr blk = vstack({hstack({scale_by_scalar(eye(a.rows()), te), a}),
                          hstack({a.transpose(), scale_by_scalar(eye(a.cols()), te)})});
    prog.add_psd(blk, 0.0);
  } else {
    // ||vec(A)||_2 <= t as the arrow block [t, v'; v, t I]
    const int len = a.rows() * a.cols();
    MatExpr v(len, 1);
    int k = 0;
    for (int r = 0; r < a.rows(); ++r)
      for (int c = 0; c < a.cols(); ++c) v.at(k++, 0) = a.at(r, c);
    MatExpr blk = vstack({hstack({scale_by_scalar(eye(1), te), v.transpose()}),
                          hstack({v, scale_by_scalar(eye(len), te)})});
    prog.add_psd(blk, 0.0);
  }
  return te;
}

SynthesisResult extract(const DataMatrices& data, const StandardBlocks& sb,
                        const SolveResult& sol, const std::string& mode) {
  SynthesisResult r;
  r.mode = mode;
  r.status = sol.status;
  r.message = sol.message;
  r.iterations = sol.iterations;
  r.labels = data.library.labels();
  r.residuals.max_eq_residual = sol.max_eq_residual;
  r.residuals.min_lmi_eigenvalue = sol.min_lmi_eigenvalue;
  r.z0_rank_warning = !rank_richness_check(data.Z0).full_row_rank;
  if (!r.feasible()) return r;

  const int n = data.n();
  const int S = data.S();
  r.P1 = sb.prog.block_value(sb.P1, sol.y);
  r.Y1 = sb.prog.block_value(sb.Y1, sol.y);
  r.G1 = r.P1.llt().solve(r.Y1.transpose()).transpose();
  if (sb.has_g2) {
    r.G2 = sb.prog.block_value(sb.G2, sol.y);
  } else {
    r.G2.resize(data.T(), 0);
  }
  r.M = data.X1 * r.G1;
  r.N = data.X1 * r.G2;
  Eigen::MatrixXd g(data.T(), S);
  g.leftCols(n) = r.G1;
  if (sb.has_g2) g.rightCols(S - n) = r.G2;
  r.K = data.U0 * g;
  r.objective = sol.objective;
  Eigen::MatrixXd zg = data.Z0 * g - eye(S);
  r.residuals.zg_identity_error = zg.cwiseAbs().maxCoeff();
  r.stability_measure = spectral_radius(r.M);
  return r;
}

}  // namespace

RobustParams RobustParams::worst_case(double delta, int T, int n, int s,
                                      double lambda1, double lambda2) {
  RobustParams p;
  p.Delta = delta * std::sqrt(static_cast<double>(T)) * eye(s);
  p.Omega = eye(n);
  p.lambda1 = lambda1;
  p.lambda2 = lambda2;
  p.E = Eigen::MatrixXd::Identity(n, s);
  return p;
}

SynthesisResult synth_exact(const DataMatrices& data, const SolverOptions& opts) {
  if (data.mode != DataMode::kDiscrete)
    throw InputError("synth_exact: discrete-mode data required");
  if (data.S() <= data.n())
    throw InputError("synth_exact: dictionary has no nonlinear part");
  StandardBlocks sb = make_standard(data);
  add_discrete_lyapunov(sb, data);
  // X1 G2 = 0: exact cancellation
  sb.prog.add_equality(MatExpr::constant(data.X1) * sb.prog.var(sb.G2));
  SolveResult sol = IpmSolver().solve(sb.prog, opts);
  return extract(data, sb, sol, "exact");
}

SynthesisResult synth_min_norm(const DataMatrices& data, ObjectiveNorm norm,
                               const SolverOptions& opts) {
  if (data.mode != DataMode::kDiscrete && data.mode != DataMode::kExtended)
    throw InputError("synth_min_norm: discrete or extended data required");
  StandardBlocks sb = make_standard(data);
  add_discrete_lyapunov(sb, data);
  if (sb.has_g2) {
    MatExpr xg = MatExpr::constant(data.X1) * sb.prog.var(sb.G2);
    sb.prog.set_objective(add_norm_epigraph(sb.prog, xg, norm, "t_obj"));
  }
  SolveResult sol = IpmSolver().solve(sb.prog, opts);
  SynthesisResult r =
      extract(data, sb, sol, data.mode == DataMode::kExtended ? "extended" : "minnorm");
  r.small_q_warning = !data.library.q_is_small_at_origin();
  return r;
}

SynthesisResult synth_extended(const DataMatrices& data, ObjectiveNorm norm,
                               const SolverOptions& opts) {
  if (data.mode != DataMode::kExtended)
    throw InputError("synth_extended: extended-mode data required");
  return synth_min_norm(data, norm, opts);
}

SynthesisResult synth_sparse(const DataMatrices& data, bool regularize_linear,
                             const SolverOptions& opts) {
  if (data.mode != DataMode::kDiscrete)
    throw InputError("synth_sparse: discrete-mode data required");
  StandardBlocks sb = make_standard(data);
  add_discrete_lyapunov(sb, data);
  const int n = data.n();
  const int S = data.S();
  LinExpr obj;
  if (sb.has_g2) {
    const int x = sb.prog.add_block("Xtr", n, n, true);
    const int v = sb.prog.add_block("Vtr", S - n, S - n, true);
    MatExpr xg = MatExpr::constant(data.X1) * sb.prog.var(sb.G2);
    MatExpr blk = vstack({hstack({sb.prog.var(x), xg}),
                          hstack({xg.transpose(), sb.prog.var(v)})});
    sb.prog.add_psd(blk, 0.0);
    for (int i = 0; i < n; ++i) obj += sb.prog.var(x).at(i, i);
    for (int i = 0; i < S - n; ++i) obj += sb.prog.var(v).at(i, i);
  }
  if (regularize_linear) {
    const int x2 = sb.prog.add_block("Xtr_lin", n, n, true);
    const int v2 = sb.prog.add_block("Vtr_lin", n, n, true);
    MatExpr xy = MatExpr::constant(data.X1) * sb.prog.var(sb.Y1);
    MatExpr blk = vstack({hstack({sb.prog.var(x2), xy}),
                          hstack({xy.transpose(), sb.prog.var(v2)})});
    sb.prog.add_psd(blk, 0.0);
    for (int i = 0; i < n; ++i)
      obj += sb.prog.var(x2).at(i, i) + sb.prog.var(v2).at(i, i);
  }
  sb.prog.set_objective(obj);
  SolveResult sol = IpmSolver().solve(sb.prog, opts);
  SynthesisResult r = extract(data, sb, sol, "sparse");
  r.small_q_warning = !data.library.q_is_small_at_origin();
  if (r.feasible()) r.objective = sol.objective;
  return r;
}

SynthesisResult synth_ct(const DataMatrices& data, ObjectiveNorm norm,
                         const SolverOptions& opts) {
  if (data.mode != DataMode::kContinuous)
    throw InputError("synth_ct: continuous-mode data required");
  StandardBlocks sb = make_standard(data);
  const double margin = strict_margin(data);
  MatExpr xy = MatExpr::constant(data.X1) * sb.prog.var(sb.Y1);
  sb.prog.add_psd(MatExpr::constant(zeros(data.n(), data.n())) - xy - xy.transpose(),
                  margin);
  sb.prog.add_psd(sb.prog.var(sb.P1), margin);
  if (sb.has_g2) {
    MatExpr xg = MatExpr::constant(data.X1) * sb.prog.var(sb.G2);
    sb.prog.set_objective(add_norm_epigraph(sb.prog, xg, norm, "t_obj"));
  }
  SolveResult sol = IpmSolver().solve(sb.prog, opts);
  SynthesisResult r = extract(data, sb, sol, "ct");
  r.small_q_warning = !data.library.q_is_small_at_origin();
  if (r.feasible()) r.stability_measure = max_real_eig(r.M);
  return r;
}

Eigen::MatrixXd petersen_block(const Eigen::MatrixXd& P1, const Eigen::MatrixXd& Y1,
                               const Eigen::MatrixXd& X1, const Eigen::MatrixXd& E,
                               const Eigen::MatrixXd& Delta, const Eigen::MatrixXd& Omega,
                               double epsilon) {
  const int n = static_cast<int>(P1.rows());
  const int T = static_cast<int>(Y1.rows());
  Eigen::MatrixXd blk(2 * n + T, 2 * n + T);
  const Eigen::MatrixXd xy = X1 * Y1;
  const Eigen::MatrixXd edd = E * Delta * Delta.transpose() * E.transpose();
  blk << P1 - Omega, xy.transpose(), Y1.transpose(),
         xy, P1 - epsilon * edd, zeros(n, T),
         Y1, zeros(T, n), epsilon * eye(T);
  return blk;
}

SynthesisResult synth_robust(const DataMatrices& data, const RobustParams& params,
                             ObjectiveNorm norm, const SolverOptions& opts) {
  if (data.mode != DataMode::kDiscrete)
    throw InputError("synth_robust: discrete-mode data required");
  const int n = data.n();
  const int T = data.T();
  const int S = data.S();
  const Eigen::MatrixXd& E = params.E;
  if (E.rows() != n || params.Delta.rows() != E.cols())
    throw InputError("synth_robust: E/Delta dimensions inconsistent");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> om(params.Omega);
  if (om.eigenvalues().minCoeff() <= 0)
    throw InputError("synth_robust: Omega must be PD");

  StandardBlocks sb = make_standard(data);
  const int epsb = sb.prog.add_scalar("epsilon");
  const LinExpr eps = sb.prog.scalar(epsb);
  sb.prog.add_nonneg(eps - LinExpr(1e-9));

  const Eigen::MatrixXd edd = E * params.Delta * params.Delta.transpose() * E.transpose();
  MatExpr xy = MatExpr::constant(data.X1) * sb.prog.var(sb.Y1);
  MatExpr y1 = sb.prog.var(sb.Y1);
  MatExpr p1 = sb.prog.var(sb.P1);
  MatExpr row1 = hstack({p1 - MatExpr::constant(params.Omega), xy.transpose(),
                         y1.transpose()});
  MatExpr row2 = hstack({xy, p1 - scale_by_scalar(edd, eps),
                         MatExpr::constant(zeros(n, T))});
  MatExpr row3 = hstack({y1, MatExpr::constant(zeros(T, n)),
                         scale_by_scalar(eye(T), eps)});
  sb.prog.add_psd(vstack({row1, row2, row3}), strict_margin(data));

  LinExpr obj;
  if (sb.has_g2) {
    MatExpr xg = MatExpr::constant(data.X1) * sb.prog.var(sb.G2);
    obj += add_norm_epigraph(sb.prog, xg, norm, "t_obj");
  }
  if (params.lambda1 > 0) {
    const int tp = sb.prog.add_scalar("t_P1");
    const LinExpr te = sb.prog.scalar(tp);
    // P1 is PD here, so its spectral norm is its largest eigenvalue.
    sb.prog.add_psd(scale_by_scalar(eye(n), te) - sb.prog.var(sb.P1), 0.0);
    obj += params.lambda1 * te;
  }
  if (params.lambda2 > 0 && sb.has_g2) {
    obj += params.lambda2 *
           add_norm_epigraph(sb.prog, sb.prog.var(sb.G2), ObjectiveNorm::kSpectral,
                             "t_G2");
  }
  sb.prog.set_objective(obj);
  SolveResult sol = IpmSolver().solve(sb.prog, opts);
  SynthesisResult r = extract(data, sb, sol, "robust");
  r.small_q_warning = !data.library.q_is_small_at_origin();
  r.robust = params;
  if (r.feasible()) {
    r.epsilon = sb.prog.scalar_value(epsb, sol.y);
    if (r.epsilon < 1e-8) r.message += " (epsilon near its lower bound)";
    if (sb.has_g2) r.objective = (data.X1 * r.G2).operatorNorm();
  }
  return r;
}

SynthesisResult synth_normal_form(const DataMatrices& data, const SolverOptions& opts) {
  if (data.mode != DataMode::kOutput)
    throw InputError("synth_normal_form: output-mode data required");
  if (data.m() != 1)
    throw InputError("synth_normal_form: scalar input required");
  const int n = data.n();
  const int S = data.S();
  const int T = data.T();
  ConicProgram prog;
  const int g1b = prog.add_block("G1", T, n);
  const int g2b = prog.add_block("G2", T, S - n);
  const int k1b = prog.add_scalar("k1");
  const LinExpr k1 = prog.scalar(k1b);

  Eigen::MatrixXd tgt1(S, n);
  tgt1 << eye(n), zeros(S - n, n);
  prog.add_equality(MatExpr::constant(data.Z0) * prog.var(g1b) -
                    MatExpr::constant(tgt1));
  // W1 G1 = A_c + B_c [k1 0 ... 0]
  Eigen::MatrixXd ac = zeros(n, n);
  ac.topRightCorner(n - 1, n - 1) = eye(n - 1);
  Eigen::MatrixXd bc_e1 = zeros(n, n);
  bc_e1(n - 1, 0) = 1.0;
  MatExpr wg1 = MatExpr::constant(data.W1()) * prog.var(g1b);
  prog.add_equality(wg1 - MatExpr::constant(ac) - scale_by_scalar(bc_e1, k1));
  Eigen::MatrixXd tgt2(S, S - n);
  tgt2 << zeros(n, S - n), eye(S - n);
  prog.add_equality(MatExpr::constant(data.Z0) * prog.var(g2b) -
                    MatExpr::constant(tgt2));
  prog.add_equality(MatExpr::constant(data.W1()) * prog.var(g2b));
  // k1 in (-1, 1), realized with a fixed interval margin
  const double km = 1e-6;
  prog.add_nonneg(LinExpr(1.0 - km) - k1);
  prog.add_nonneg(k1 + LinExpr(1.0 - km));

  SolveResult sol = IpmSolver().solve(prog, opts);
  SynthesisResult r;
  r.mode = "normal_form";
  r.status = sol.status;
  r.message = sol.message;
  r.iterations = sol.iterations;
  r.residuals.max_eq_residual = sol.max_eq_residual;
  r.residuals.min_lmi_eigenvalue = sol.min_lmi_eigenvalue;
  r.z0_rank_warning = !rank_richness_check(data.Z0).full_row_rank;
  if (r.z0_rank_warning && r.status == SolveStatus::kInfeasible)
    r.message += " (Z0 = [W0; Q0] is rank deficient; a dictionary that includes"
                 " the state makes W0 rows linear combinations of Q0 columns -"
                 " exclude x from Q)";
  std::vector<std::string> lab;
  for (int i = 0; i < n; ++i) lab.push_back("w" + std::to_string(i + 1));
  for (const auto& q : data.library.q()) lab.push_back(q.label());
  r.labels = lab;
  if (!r.feasible()) return r;
  r.G1 = prog.block_value(g1b, sol.y);
  r.G2 = prog.block_value(g2b, sol.y);
  r.k1 = prog.scalar_value(k1b, sol.y);
  Eigen::MatrixXd g(T, S);
  g << r.G1, r.G2;
  r.K = data.U0 * g;
  r.M = data.W1() * r.G1;
  r.N = data.W1() * r.G2;
  r.residuals.zg_identity_error = (data.Z0 * g - eye(S)).cwiseAbs().maxCoeff();
  r.stability_measure = spectral_radius(r.M);
  return r;
}

namespace {

SynthesisResult verify_impl(const DataMatrices& data, const Eigen::MatrixXd& K,
                            bool open_loop, const SolverOptions& opts) {
  if (data.mode != DataMode::kDiscrete)
    throw InputError("verify_given_K: discrete-mode data required");
  const int n = data.n();
  const int S = data.S();
  if (!open_loop && (K.rows() != data.m() || K.cols() != S))
    throw InputError("verify_given_K: K must be m x S");
  StandardBlocks sb = make_standard(data);
  add_discrete_lyapunov(sb, data);
  // U0 [Y1 G2] = K blkdiag(P1, I)  (0 for the open loop)
  MatExpr uy = MatExpr::constant(data.U0) * sb.prog.var(sb.Y1);
  if (open_loop) {
    sb.prog.add_equality(uy);
  } else {
    sb.prog.add_equality(uy - MatExpr::constant(K.leftCols(n)) * sb.prog.var(sb.P1));
  }
  if (sb.has_g2) {
    MatExpr ug = MatExpr::constant(data.U0) * sb.prog.var(sb.G2);
    if (open_loop)
      sb.prog.add_equality(ug);
    else
      sb.prog.add_equality(ug - MatExpr::constant(K.rightCols(S - n)));
  }
  SolveResult sol = IpmSolver().solve(sb.prog, opts);
  SynthesisResult r = extract(data, sb, sol, open_loop ? "open_loop" : "verify");
  if (r.feasible() && sb.has_g2)
    r.objective = (data.X1 * r.G2).operatorNorm();
  return r;
}

}  // namespace

SynthesisResult verify_given_K(const DataMatrices& data, const Eigen::MatrixXd& K,
                               const SolverOptions& opts) {
  return verify_impl(data, K, false, opts);
}

SynthesisResult verify_open_loop(const DataMatrices& data, const SolverOptions& opts) {
  return verify_impl(data, Eigen::MatrixXd(), true, opts);
}

Eigen::MatrixXd display_zeroed(const Eigen::MatrixXd& K) {
  if (K.size() == 0) return K;
  const double cut = 1e-6 * K.cwiseAbs().maxCoeff();
  return (K.cwiseAbs().array() < cut).select(Eigen::MatrixXd::Zero(K.rows(), K.cols()), K);
}

}  // namespace nlcancel
