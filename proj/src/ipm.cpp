#include <cmath>
#include <cstdio>
#include <limits>

#include "nlcancel/conic.hpp"

namespace nlcancel {
namespace conic {

namespace {

struct ReducedProblem {
  // min g'z s.t. F0_j + sum_i z_i Fi_j >= 0
  std::vector<Eigen::MatrixXd> f0;
  std::vector<std::vector<Eigen::MatrixXd>> fi;  // [block][var]
  Eigen::VectorXd g;
  int p = 0;
  int nblocks = 0;
  int ktotal = 0;
};

struct IpmOutcome {
  bool converged = false;
  Eigen::VectorXd z;
  double mu = 0.0;
  double dual_res = 0.0;
  int iterations = 0;
};

// Largest a with A + a dA psd, via the smallest eigenvalue of L^-1 dA L^-T.
double max_step(const Eigen::MatrixXd& a, const Eigen::MatrixXd& da) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return 0.0;
  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd w = l.triangularView<Eigen::Lower>().solve(da);
  w = l.triangularView<Eigen::Lower>().solve(w.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (w + w.transpose()), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

// Feasible-start Mehrotra predictor-corrector with the HKM direction on
//   min g'z  s.t.  S(z) = F0 + sum_i z_i Fi  >= 0  (block diagonal).
// `z` must be strictly feasible on entry.
IpmOutcome hkm(const ReducedProblem& rp, Eigen::VectorXd z, double tol_gap,
               double tol_feas, int max_iters, bool verbose) {
  const int p = rp.p;
  const int nb = rp.nblocks;
  IpmOutcome out;
  auto eval_s = [&](const Eigen::VectorXd& zz) {
    std::vector<Eigen::MatrixXd> s(nb);
    for (int j = 0; j < nb; ++j) {
      s[j] = rp.f0[j];
      for (int i = 0; i < p; ++i)
        if (zz(i) != 0.0) s[j] += zz(i) * rp.fi[j][i];
    }
    return s;
  };
  std::vector<Eigen::MatrixXd> s = eval_s(z);
  std::vector<Eigen::MatrixXd> x(nb);
  for (int j = 0; j < nb; ++j) {
    Eigen::LLT<Eigen::MatrixXd> llt(s[j]);
    if (llt.info() != Eigen::Success) return out;  // not interior
    x[j] = llt.solve(Eigen::MatrixXd::Identity(s[j].rows(), s[j].rows()));
    x[j] = 0.5 * (x[j] + x[j].transpose());
  }
  const double gscale = 1.0 + rp.g.cwiseAbs().maxCoeff();

  for (int it = 0; it < max_iters; ++it) {
    double mu = 0.0;
    for (int j = 0; j < nb; ++j) mu += (x[j].array() * s[j].array()).sum();
    mu /= rp.ktotal;
    Eigen::VectorXd d = rp.g;
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < nb; ++j) d(i) -= (rp.fi[j][i].array() * x[j].array()).sum();
    const double dres = d.cwiseAbs().maxCoeff();
    const double objv = rp.g.dot(z);
    out.z = z;
    out.mu = mu;
    out.dual_res = dres;
    out.iterations = it;
    if (verbose)
      printf("  ipm it %2d  mu %.3e  dres %.3e  obj % .10f\n", it, mu, dres, objv);
    if (std::abs(mu) * rp.ktotal <= tol_gap * (1.0 + std::abs(objv)) &&
        dres <= tol_feas * gscale) {
      out.converged = true;
      return out;
    }

    // factor S blocks, precompute X Fi S^-1 and the Schur complement
    std::vector<Eigen::LLT<Eigen::MatrixXd>> llt(nb);
    for (int j = 0; j < nb; ++j) {
      llt[j].compute(s[j]);
      if (llt[j].info() != Eigen::Success) return out;
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    std::vector<std::vector<Eigen::MatrixXd>> xfs(nb);
    for (int j = 0; j < nb; ++j) {
      xfs[j].resize(p);
      for (int i = 0; i < p; ++i)
        xfs[j][i] = x[j] * llt[j].solve(rp.fi[j][i]).transpose();
      for (int i = 0; i < p; ++i)
        for (int k = i; k < p; ++k)
          m(i, k) += (rp.fi[j][k].array() * xfs[j][i].array()).sum();
    }
    m = m.selfadjointView<Eigen::Upper>();
    m.diagonal().array() += 1e-13 * (1.0 + m.diagonal().cwiseAbs().maxCoeff());
    Eigen::LDLT<Eigen::MatrixXd> mf(m);
    if (mf.info() != Eigen::Success) return out;

    auto solve_dir = [&](const std::vector<Eigen::MatrixXd>& rc, Eigen::VectorXd* dz,
                         std::vector<Eigen::MatrixXd>* ds,
                         std::vector<Eigen::MatrixXd>* dx) {
      Eigen::VectorXd rhs = -d;
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < nb; ++j)
          rhs(i) += (rp.fi[j][i].array() *
                     llt[j].solve(rc[j].transpose()).transpose().array())
                        .sum();
      *dz = mf.solve(rhs);
      ds->assign(nb, Eigen::MatrixXd());
      dx->assign(nb, Eigen::MatrixXd());
      for (int j = 0; j < nb; ++j) {
        Eigen::MatrixXd dsj = Eigen::MatrixXd::Zero(s[j].rows(), s[j].rows());
        for (int i = 0; i < p; ++i)
          if ((*dz)(i) != 0.0) dsj += (*dz)(i) * rp.fi[j][i];
        // dX = (Rc - X dS) S^-1, symmetrized
        Eigen::MatrixXd dxj = llt[j].solve((rc[j] - x[j] * dsj).transpose()).transpose();
        (*ds)[j] = std::move(dsj);
        (*dx)[j] = 0.5 * (dxj + dxj.transpose());
      }
    };

    // predictor (affine scaling)
    std::vector<Eigen::MatrixXd> rc(nb);
    for (int j = 0; j < nb; ++j) rc[j] = -x[j] * s[j];
    Eigen::VectorXd dz_a;
    std::vector<Eigen::MatrixXd> ds_a, dx_a;
    solve_dir(rc, &dz_a, &ds_a, &dx_a);
    double ap = 1.0, ad = 1.0;
    for (int j = 0; j < nb; ++j) {
      ap = std::min(ap, 0.98 * max_step(s[j], ds_a[j]));
      ad = std::min(ad, 0.98 * max_step(x[j], dx_a[j]));
    }
    double mu_aff = 0.0;
    for (int j = 0; j < nb; ++j)
      mu_aff += ((x[j] + ad * dx_a[j]).array() * (s[j] + ap * ds_a[j]).array()).sum();
    mu_aff /= rp.ktotal;
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3);
    sigma = std::min(std::max(sigma, 1e-10), 0.99);

    // corrector
    for (int j = 0; j < nb; ++j) {
      rc[j] = sigma * mu * Eigen::MatrixXd::Identity(s[j].rows(), s[j].rows()) -
              x[j] * s[j] - dx_a[j] * ds_a[j];
    }
    Eigen::VectorXd dz;
    std::vector<Eigen::MatrixXd> ds, dx;
    solve_dir(rc, &dz, &ds, &dx);
    ap = 1.0;
    ad = 1.0;
    for (int j = 0; j < nb; ++j) {
      ap = std::min(ap, 0.98 * max_step(s[j], ds[j]));
      ad = std::min(ad, 0.98 * max_step(x[j], dx[j]));
    }
    if (!(ap > 1e-12) || !(ad > 1e-12)) return out;  // stalled
    z += ap * dz;
    for (int j = 0; j < nb; ++j) {
      s[j] += ap * ds[j];
      x[j] += ad * dx[j];
    }
  }
  out.iterations = max_iters;
  return out;
}

}  // namespace

SolveResult IpmSolver::solve(const ConicProgram& program,
                             const SolverOptions& options) const {
  SolveResult res;
  const int ny = program.num_scalars();
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  program.equalities(&a, &b);

  // Eliminate the equalities: y = y0 + N z with N an orthonormal null basis.
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(ny);
  Eigen::MatrixXd nullbasis = Eigen::MatrixXd::Identity(ny, ny);
  if (a.rows() > 0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = sv.size() ? sv(0) * 1e-12 : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > cut) ++rank;
    Eigen::VectorXd ub = svd.matrixU().transpose() * b;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < rank; ++i) w(i) = ub(i) / sv(i);
    y0 = svd.matrixV().leftCols(sv.size()) * w;
    const double resid = (a * y0 - b).cwiseAbs().maxCoeff();
    res.max_eq_residual = resid;
    if (resid > options.eq_tol * (1.0 + b.cwiseAbs().maxCoeff())) {
      res.status = SolveStatus::kInfeasible;
      res.message = "equality constraints are inconsistent (residual " +
                    std::to_string(resid) + ")";
      return res;
    }
    nullbasis = svd.matrixV().rightCols(ny - rank);
  }
  const int p = static_cast<int>(nullbasis.cols());

  // Reduced LMI data.
  ReducedProblem rp;
  rp.p = p;
  rp.nblocks = static_cast<int>(program.lmis().size());
  for (const auto& lmi : program.lmis()) {
    Eigen::MatrixXd f0 = lmi.f0;
    std::vector<Eigen::MatrixXd> fi(p, Eigen::MatrixXd::Zero(lmi.dim, lmi.dim));
    for (const auto& c : lmi.coeffs) {
      const int r = c.flat / lmi.dim;
      const int cc = c.flat % lmi.dim;
      f0(r, cc) += c.coeff * y0(c.var);
      for (int i = 0; i < p; ++i) {
        const double v = c.coeff * nullbasis(c.var, i);
        if (v != 0.0) fi[i](r, cc) += v;
      }
    }
    rp.f0.push_back(0.5 * (f0 + f0.transpose()));
    for (auto& f : fi) f = 0.5 * (f + f.transpose());
    rp.fi.push_back(std::move(fi));
    rp.ktotal += lmi.dim;
  }
  Eigen::VectorXd gy = Eigen::VectorXd::Zero(ny);
  for (const auto& [i, c] : program.objective().terms) gy(i) += c;
  rp.g = nullbasis.transpose() * gy;
  const double obj_const = program.objective().constant + gy.dot(y0);

  auto finish = [&](const Eigen::VectorXd& z, SolveStatus status, int iters,
                    const std::string& msg) {
    res.y = y0 + nullbasis * z;
    res.status = status;
    res.iterations = iters;
    res.message = msg;
    res.objective = gy.dot(res.y) + program.objective().constant;
    if (a.rows() > 0)
      res.max_eq_residual = (a * res.y - b).cwiseAbs().maxCoeff();
    double minlam = std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(program.lmis().size()); ++j) {
      const Eigen::MatrixXd f = program.lmi_value(j, res.y);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f, Eigen::EigenvaluesOnly);
      minlam = std::min(minlam, es.eigenvalues().minCoeff() + program.lmis()[j].margin);
    }
    res.min_lmi_eigenvalue = program.lmis().empty() ? 0.0 : minlam;
    return res;
  };

  if (rp.nblocks == 0) {
    // Equality-only program: the least-squares point decides it.
    if (!program.has_objective())
      return finish(Eigen::VectorXd::Zero(p), SolveStatus::kOptimal, 0, "");
    // Linear objective over an affine set is unbounded unless g is zero on it.
    if (rp.g.cwiseAbs().maxCoeff() < 1e-14)
      return finish(Eigen::VectorXd::Zero(p), SolveStatus::kOptimal, 0, "");
    res.status = SolveStatus::kFailure;
    res.message = "unbounded: linear objective with no conic constraints";
    return res;
  }

  if (p == 0) {
    // Fully determined by the equalities; just check the LMIs.
    Eigen::VectorXd z0(0);
    SolveResult check = finish(z0, SolveStatus::kOptimal, 0, "");
    if (check.min_lmi_eigenvalue < -1e-9) {
      res.status = SolveStatus::kInfeasible;
      res.message = "LMIs violated at the unique equality solution";
    }
    return res;
  }

  // Phase I: maximize the common margin t (capped) to find an interior point.
  ReducedProblem ph1;
  ph1.p = p + 1;
  ph1.nblocks = rp.nblocks + 1;
  ph1.ktotal = rp.ktotal + 1;
  double lam0 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < rp.nblocks; ++j) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rp.f0[j], Eigen::EigenvaluesOnly);
    lam0 = std::min(lam0, es.eigenvalues().minCoeff());
    ph1.f0.push_back(rp.f0[j]);
    auto fi = rp.fi[j];
    fi.push_back(-Eigen::MatrixXd::Identity(rp.f0[j].rows(), rp.f0[j].rows()));
    ph1.fi.push_back(std::move(fi));
  }
  ph1.f0.push_back(Eigen::MatrixXd::Constant(1, 1, options.margin_cap));
  {
    std::vector<Eigen::MatrixXd> fi(p, Eigen::MatrixXd::Zero(1, 1));
    fi.push_back(-Eigen::MatrixXd::Identity(1, 1));
    ph1.fi.push_back(std::move(fi));
  }
  ph1.g = Eigen::VectorXd::Zero(p + 1);
  ph1.g(p) = -1.0;
  Eigen::VectorXd zt = Eigen::VectorXd::Zero(p + 1);
  zt(p) = std::min(lam0, options.margin_cap) - 1.0;

  IpmOutcome o1 = hkm(ph1, zt, std::max(options.tol_gap, 1e-10),
                      std::max(options.tol_feas, 1e-10), options.max_iterations,
                      options.verbose);
  if (o1.z.size() == 0) {
    res.status = SolveStatus::kFailure;
    res.message = "phase I numerical failure";
    return res;
  }
  const double tstar = o1.z(p);
  if (tstar <= options.infeas_margin) {
    res.status = SolveStatus::kInfeasible;
    res.message = "LMI constraints have no strictly feasible point (max margin " +
                  std::to_string(tstar) + ")";
    res.iterations = o1.iterations;
    return res;
  }
  Eigen::VectorXd z1 = o1.z.head(p);
  if (!program.has_objective()) {
    return finish(z1, o1.converged ? SolveStatus::kOptimal : SolveStatus::kInaccurate,
                  o1.iterations, o1.converged ? "" : "phase I not fully converged");
  }

  // Phase II from the interior phase-I point.
  IpmOutcome o2 = hkm(rp, z1, options.tol_gap, options.tol_feas,
                      options.max_iterations, options.verbose);
  if (o2.z.size() == 0) {
    res.status = SolveStatus::kFailure;
    res.message = "phase II numerical failure";
    return res;
  }
  SolveStatus st = SolveStatus::kOptimal;
  std::string msg;
  if (!o2.converged) {
    // accept moderately converged iterates, flag the rest
    const double obj = rp.g.dot(o2.z) + obj_const;
    const bool near = std::abs(o2.mu) * rp.ktotal <= 1e-6 * (1.0 + std::abs(obj)) &&
                      o2.dual_res <= 1e-6 * (1.0 + rp.g.cwiseAbs().maxCoeff());
    st = near ? SolveStatus::kInaccurate : SolveStatus::kFailure;
    msg = near ? "reduced accuracy" : "phase II did not converge";
  }
  return finish(o2.z, st, o1.iterations + o2.iterations, msg);
}

}  // namespace conic
}  // namespace nlcancel
