#include "nlcancel/certify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace nlcancel {

namespace {
constexpr long kMaxGridPoints = 4'000'000;
// Grid points this close to the origin (in V units) stand in for x = 0 and
// are excluded from negativity requirements.
constexpr double kOriginLevel = 1e-14;
}  // namespace

GridSpec GridSpec::symmetric(const Eigen::VectorXd& half_width, int points_per_dim) {
  GridSpec g;
  g.lo = -half_width;
  g.hi = half_width;
  g.points.assign(half_width.size(), points_per_dim);
  g.validate();
  return g;
}

GridSpec GridSpec::symmetric(double half_width, int dim, int points_per_dim) {
  return symmetric(Eigen::VectorXd::Constant(dim, half_width), points_per_dim);
}

void GridSpec::validate() const {
  if (lo.size() != hi.size() || static_cast<int>(points.size()) != lo.size())
    throw InputError("GridSpec: inconsistent dimensions");
  for (int d = 0; d < lo.size(); ++d) {
    if (points[d] < 3) throw InputError("GridSpec: need >= 3 points per dimension");
    if (lo(d) > 0.0 || hi(d) < 0.0 || lo(d) >= hi(d))
      throw InputError("GridSpec: box must contain the origin");
  }
  if (total_points() > kMaxGridPoints)
    throw InputError("GridSpec: grid exceeds the point cap");
}

long GridSpec::total_points() const {
  long t = 1;
  for (int p : points) t *= p;
  return t;
}

Eigen::MatrixXd GridSpec::generate(std::vector<bool>* boundary) const {
  validate();
  const int dim = static_cast<int>(lo.size());
  const long total = total_points();
  Eigen::MatrixXd pts(dim, total);
  if (boundary) boundary->assign(total, false);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    bool on_bd = false;
    for (int d = dim - 1; d >= 0; --d) {
      const int i = static_cast<int>(rem % points[d]);
      rem /= points[d];
      const double step = (hi(d) - lo(d)) / (points[d] - 1);
      pts(d, idx) = lo(d) + i * step;
      on_bd = on_bd || i == 0 || i == points[d] - 1;
    }
    if (boundary) (*boundary)[idx] = on_bd;
  }
  return pts;
}

namespace {

double cell_volume(const GridSpec& grid) {
  double v = 1.0;
  for (int d = 0; d < grid.lo.size(); ++d)
    v *= (grid.hi(d) - grid.lo(d)) / (grid.points[d] - 1);
  return v;
}

double gamma_box_cap(const Eigen::VectorXd& v, const std::vector<bool>& boundary) {
  double cap = std::numeric_limits<double>::infinity();
  for (long i = 0; i < v.size(); ++i)
    if (boundary[i]) cap = std::min(cap, v(i));
  return cap;
}

long count_in_region(const Eigen::VectorXd& v, double gamma) {
  long c = 0;
  for (long i = 0; i < v.size(); ++i)
    if (v(i) <= gamma) ++c;
  return c;
}

}  // namespace

RegionEstimate estimate_roa(const QuadLyapunov& lyap, const Eigen::VectorXd& decrement,
                            const GridSpec& grid, RegionKind kind) {
  std::vector<bool> boundary;
  const Eigen::MatrixXd pts = grid.generate(&boundary);
  const Eigen::VectorXd v = lyap.value_cols(pts);
  if (decrement.size() != v.size())
    throw InputError("estimate_roa: decrement vector does not match the grid");

  RegionEstimate est;
  est.kind = kind;
  est.pinv = lyap.pinv();
  est.points_total = v.size();
  est.cell_volume = cell_volume(grid);
  est.gamma_box = gamma_box_cap(v, boundary);

  auto ok = [&](double gamma) {
    for (long i = 0; i < v.size(); ++i)
      if (v(i) <= gamma && v(i) > kOriginLevel && decrement(i) >= 0.0) return false;
    return true;
  };

  double lo = 0.0;
  double hi = est.gamma_box;
  if (ok(hi)) {
    lo = hi;
  } else {
    for (int it = 0; it < 40 && (hi - lo) > 1e-3 * std::max(hi, 1e-12); ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? lo : hi) = mid;
    }
  }
  est.gamma = lo;
  est.gamma_min = 0.0;
  est.points_in_region = count_in_region(v, est.gamma);
  est.empty = est.points_in_region <= 1;
  return est;
}

RegionEstimate estimate_roa_nominal(const DecrementModel& model, const GridSpec& grid) {
  const Eigen::MatrixXd pts = grid.generate();
  return estimate_roa(model.lyapunov(), model.h_cols(pts), grid, RegionKind::kRoa);
}

RegionEstimate estimate_roa_noisy(const DecrementModel& model, const GridSpec& grid) {
  const Eigen::MatrixXd pts = grid.generate();
  return estimate_roa(model.lyapunov(), model.ell_cols(pts), grid, RegionKind::kPi);
}

RegionEstimate estimate_roa_state_bound(const DecrementModel& model,
                                        const StateBound& delta, const GridSpec& grid) {
  const Eigen::MatrixXd pts = grid.generate();
  const Eigen::VectorXd dec = model.ell_cols(pts) + model.g_cols(pts, delta);
  return estimate_roa(model.lyapunov(), dec, grid, RegionKind::kRoa);
}

namespace {

struct RpiSweep {
  bool found = false;
  double gamma = 0.0;
  double gamma_min = 0.0;
  double max_vlg = 0.0;
};

// Certifies: every point of R_gamma with ell + g > 0 satisfies
// V + ell + g <= gamma (if no such point exists, R_gamma lies in the
// nonpositive-decrement set). `extra` (optional) is an additional pointwise
// admissibility mask for R_gamma (containment in Q).
RpiSweep rpi_sweep(const Eigen::VectorXd& v, const Eigen::VectorXd& lg,
                   double gamma_cap, const std::vector<char>* extra) {
  auto ok = [&](double gamma, double* max_vlg) {
    double worst = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < v.size(); ++i) {
      if (v(i) > gamma) continue;
      if (extra && !(*extra)[i]) return false;
      if (lg(i) > 0.0) worst = std::max(worst, v(i) + lg(i));
    }
    if (max_vlg) *max_vlg = std::isfinite(worst) ? worst : 0.0;
    return !(worst > gamma);
  };

  RpiSweep out;
  // descending candidate scan, then upward bisection refinement
  const int ncand = 140;
  double lo = -1.0, hi = gamma_cap;
  for (int i = 0; i < ncand; ++i) {
    const double c = gamma_cap * std::pow(10.0, -6.0 * i / (ncand - 1));
    if (ok(c, nullptr)) {
      lo = c;
      break;
    }
    hi = c;
  }
  if (lo < 0.0) return out;
  for (int it = 0; it < 40 && (hi - lo) > 1e-3 * std::max(lo, 1e-12); ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid, nullptr) ? lo : hi) = mid;
  }
  out.found = true;
  out.gamma = lo;
  ok(lo, &out.max_vlg);
  // Every gamma in [max_vlg, gamma] is certified: shrinking gamma only
  // shrinks the residual set, so its maximum cannot grow.
  out.gamma_min = out.max_vlg;
  return out;
}

}  // namespace

RegionEstimate certify_rpi(const DecrementModel& model, double delta,
                           const GridSpec& grid) {
  std::vector<bool> boundary;
  const Eigen::MatrixXd pts = grid.generate(&boundary);
  const Eigen::VectorXd v = model.lyapunov().value_cols(pts);
  const Eigen::VectorXd lg = model.ell_cols(pts) + model.g_cols(pts, delta);

  RegionEstimate est;
  est.kind = RegionKind::kRpi;
  est.pinv = model.lyapunov().pinv();
  est.points_total = v.size();
  est.cell_volume = cell_volume(grid);
  est.gamma_box = gamma_box_cap(v, boundary);

  const RpiSweep sweep = rpi_sweep(v, lg, est.gamma_box, nullptr);
  if (!sweep.found) {
    est.note = "no certifiable gamma on this grid";
    return est;
  }
  est.gamma = sweep.gamma;
  est.gamma_min = sweep.gamma_min;
  est.max_vlg_on_z = sweep.max_vlg;
  est.points_in_region = count_in_region(v, est.gamma);
  est.empty = est.points_in_region <= 1;
  return est;
}

RegionEstimate certify_pi_neglected(const DecrementModel& model, double delta,
                                    const Eigen::VectorXd& q_lo,
                                    const Eigen::VectorXd& q_hi,
                                    const Eigen::MatrixXd& experiment_states,
                                    const GridSpec& grid) {
  RegionEstimate est;
  est.kind = RegionKind::kPi;
  est.pinv = model.lyapunov().pinv();
  // Theorem hypothesis: the experiment never left Q.
  for (long k = 0; k < experiment_states.cols(); ++k) {
    const auto x = experiment_states.col(k);
    for (int d = 0; d < x.size(); ++d)
      if (x(d) < q_lo(d) || x(d) > q_hi(d)) {
        est.violations.push_back(k);
        break;
      }
  }
  if (!est.violations.empty()) {
    est.note = "experiment states leave Q; certificate refused";
    return est;
  }

  std::vector<bool> boundary;
  const Eigen::MatrixXd pts = grid.generate(&boundary);
  const Eigen::VectorXd v = model.lyapunov().value_cols(pts);
  const Eigen::VectorXd lg = model.ell_cols(pts) + model.g_cols(pts, delta);
  est.points_total = v.size();
  est.cell_volume = cell_volume(grid);
  est.gamma_box = gamma_box_cap(v, boundary);

  std::vector<char> in_q(pts.cols(), 1);
  for (long i = 0; i < pts.cols(); ++i)
    for (int d = 0; d < pts.rows(); ++d)
      if (pts(d, i) < q_lo(d) || pts(d, i) > q_hi(d)) {
        in_q[i] = 0;
        break;
      }

  const RpiSweep sweep = rpi_sweep(v, lg, est.gamma_box, &in_q);
  if (!sweep.found) {
    // Distinguish "decrement fails" from "containment fails" for diagnostics.
    const RpiSweep plain = rpi_sweep(v, lg, est.gamma_box, nullptr);
    if (plain.found) {
      for (long i = 0; i < v.size(); ++i)
        if (v(i) <= plain.gamma && !in_q[i]) est.violations.push_back(i);
      est.note = "sublevel set is not contained in Q; certificate refused";
    } else {
      est.note = "no certifiable gamma on this grid";
    }
    return est;
  }
  est.gamma = sweep.gamma;
  est.gamma_min = sweep.gamma_min;
  est.max_vlg_on_z = sweep.max_vlg;
  est.points_in_region = count_in_region(v, est.gamma);
  est.empty = est.points_in_region <= 1;
  return est;
}

void export_region_csv(const std::string& path, const GridSpec& grid,
                       const QuadLyapunov& lyap, const Eigen::VectorXd& decrement,
                       const RegionEstimate& estimate) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot open " + path + " for writing");
  const Eigen::MatrixXd pts = grid.generate();
  const Eigen::VectorXd v = lyap.value_cols(pts);
  f << std::setprecision(12);
  f << "idx";
  for (int d = 0; d < pts.rows(); ++d) f << ",x" << d + 1;
  f << ",V,decrement,in_X,in_Rgamma,in_Z\n";
  for (long i = 0; i < pts.cols(); ++i) {
    const bool in_x = decrement(i) <= 0.0;
    const bool in_r = v(i) <= estimate.gamma;
    f << i;
    for (int d = 0; d < pts.rows(); ++d) f << "," << pts(d, i);
    f << "," << v(i) << "," << decrement(i) << "," << (in_x ? 1 : 0) << ","
      << (in_r ? 1 : 0) << "," << ((in_r && !in_x) ? 1 : 0) << "\n";
  }
}

}  // namespace nlcancel
