#include "nlcancel/data.hpp"

namespace nlcancel {

DataMatrices build_data_matrices(const Trajectory& traj, const BasisLibrary& library,
                                 DataMode mode) {
  traj.validate();
  const int n = traj.state_dim();
  const int m = traj.input_dim();
  DataMatrices d{.mode = mode, .library = library};
  if (traj.has_disturbances()) d.D0 = traj.disturbances;

  switch (mode) {
    case DataMode::kDiscrete:
    case DataMode::kContinuous: {
      if (library.coord_dim() != n)
        throw InputError("build_data_matrices: library dimension != state dimension");
      const int t = traj.horizon();
      d.U0 = traj.inputs;
      d.X0 = traj.states.leftCols(t);
      if (mode == DataMode::kContinuous) {
        if (!traj.has_derivatives())
          throw InputError("build_data_matrices: continuous mode needs derivative samples");
        d.X1 = traj.derivatives;
      } else {
        d.X1 = traj.states.rightCols(t);
      }
      d.Z0 = library.eval_z_cols(d.X0);
      return d;
    }
    case DataMode::kExtended: {
      if (library.coord_dim() != n + m)
        throw InputError("build_data_matrices: extended library must be over [x; u]");
      const int t = traj.horizon() - 1;
      if (t < 1)
        throw InputError("build_data_matrices: extended mode needs horizon >= 2");
      Eigen::MatrixXd xi0(n + m, t), xi1(n + m, t);
      for (int k = 0; k < t; ++k) {
        xi0.col(k) << traj.states.col(k), traj.inputs.col(k);
        xi1.col(k) << traj.states.col(k + 1), traj.inputs.col(k + 1);
      }
      d.X0 = xi0;
      d.X1 = xi1;
      d.U0 = traj.inputs.middleCols(1, t);  // v(k) = u(k+1)
      d.Z0 = library.eval_z_cols(xi0);
      if (traj.has_disturbances()) d.D0 = traj.disturbances.leftCols(t);
      return d;
    }
    case DataMode::kOutput: {
      if (!traj.has_outputs())
        throw InputError("build_data_matrices: output mode needs output samples");
      if (library.coord_dim() != n)
        throw InputError("build_data_matrices: output-mode library is over the state");
      const int ylen = static_cast<int>(traj.outputs.size());
      const int t = ylen - n;
      if (t < 1) throw InputError("build_data_matrices: too few output samples");
      if (traj.horizon() < t)
        throw InputError("build_data_matrices: too few inputs for output mode");
      Eigen::MatrixXd w0(n, t), w1(n, t);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < t; ++k) {
          w0(i, k) = traj.outputs(k + i);
          w1(i, k) = traj.outputs(k + i + 1);
        }
      d.X0 = w0;
      d.X1 = w1;
      d.U0 = traj.inputs.leftCols(t);
      const Eigen::MatrixXd q0 = library.eval_q_cols(traj.states.leftCols(t));
      d.Z0.resize(n + q0.rows(), t);
      d.Z0 << w0, q0;
      if (traj.has_disturbances()) d.D0 = traj.disturbances.leftCols(t);
      return d;
    }
  }
  throw InputError("build_data_matrices: bad mode");
}

RankReport rank_richness_check(const Eigen::MatrixXd& mat, double tol) {
  RankReport r;
  if (mat.size() == 0) {
    r.full_row_rank = mat.rows() == 0;
    return r;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
  const auto& sv = svd.singularValues();
  r.smax = sv(0);
  r.smin = sv(sv.size() - 1);
  const double cut = r.smax * tol;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r.rank;
  r.full_row_rank = r.rank == mat.rows();
  return r;
}

RichnessReport data_richness(const DataMatrices& data, double tol) {
  RichnessReport rep;
  rep.z0 = rank_richness_check(data.Z0, tol);
  Eigen::MatrixXd stacked(data.m() + data.S(), data.T());
  stacked << data.U0, data.Z0;
  rep.stacked = rank_richness_check(stacked, tol);
  return rep;
}

DataMatrices average_datasets(const std::vector<DataMatrices>& datasets) {
  if (datasets.empty()) throw InputError("average_datasets: empty list");
  DataMatrices avg = datasets[0];
  const bool with_d0 = datasets[0].has_d0();
  for (std::size_t i = 1; i < datasets.size(); ++i) {
    const auto& d = datasets[i];
    if (d.mode != avg.mode || d.U0.rows() != avg.U0.rows() ||
        d.U0.cols() != avg.U0.cols() || d.Z0.rows() != avg.Z0.rows() ||
        d.Z0.cols() != avg.Z0.cols() || d.X1.rows() != avg.X1.rows())
      throw InputError("average_datasets: shape mismatch at dataset " + std::to_string(i));
    if (with_d0 != d.has_d0())
      throw InputError("average_datasets: inconsistent D0 recording");
    avg.U0 += d.U0;
    avg.X0 += d.X0;
    avg.X1 += d.X1;
    avg.Z0 += d.Z0;
    if (with_d0) avg.D0 += d.D0;
  }
  const double inv = 1.0 / static_cast<double>(datasets.size());
  avg.U0 *= inv;
  avg.X0 *= inv;
  avg.X1 *= inv;
  avg.Z0 *= inv;
  if (with_d0) avg.D0 *= inv;
  return avg;
}

}  // namespace nlcancel
