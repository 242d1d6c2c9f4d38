#pragma once

#include <optional>
#include <string>

#include "nlcancel/lyapunov.hpp"

namespace nlcancel {

// Rectangular evaluation grid. The box must contain the origin; certificates
// never extend past the largest sublevel set inscribed in the box.
struct GridSpec {
  Eigen::VectorXd lo, hi;
  std::vector<int> points;  // per dimension, >= 3

  static GridSpec symmetric(const Eigen::VectorXd& half_width, int points_per_dim);
  static GridSpec symmetric(double half_width, int dim, int points_per_dim = 201);

  void validate() const;
  long total_points() const;
  // All grid points, dim x total, and a boundary mask (any coordinate at its
  // extreme).
  Eigen::MatrixXd generate(std::vector<bool>* boundary = nullptr) const;
};

enum class RegionKind { kRoa, kPi, kRpi };

struct RegionEstimate {
  RegionKind kind = RegionKind::kRoa;
  bool empty = true;
  double gamma = 0.0;       // certified level (largest)
  double gamma_min = 0.0;   // RPI/PI: lower end of the certified interval
  double gamma_box = 0.0;   // largest sublevel set inside the grid box
  double max_vlg_on_z = 0.0;  // max of V + ell + g over the residual set Z
  Eigen::MatrixXd pinv;
  long points_in_region = 0;
  long points_total = 0;
  double cell_volume = 0.0;
  std::vector<long> violations;  // grid indices breaking a containment check
  std::string note;

  double grid_area() const { return points_in_region * cell_volume; }
};

// Largest gamma (relative bisection tolerance 1e-3) such that every grid
// point with V(x) <= gamma, x != 0, has a negative decrement. The decrement
// values are supplied per grid point so the same sweep serves h, ell and
// ell + g(x, delta(x)).
RegionEstimate estimate_roa(const QuadLyapunov& lyap, const Eigen::VectorXd& decrement,
                            const GridSpec& grid, RegionKind kind = RegionKind::kRoa);

// Convenience wrappers evaluating the decrement on the grid first.
RegionEstimate estimate_roa_nominal(const DecrementModel& model, const GridSpec& grid);
RegionEstimate estimate_roa_noisy(const DecrementModel& model, const GridSpec& grid);
RegionEstimate estimate_roa_state_bound(const DecrementModel& model,
                                        const StateBound& delta, const GridSpec& grid);

// Robust positively invariant sublevel set: sweeps gamma (descending, then
// bisection refinement) for the condition
//   max { V + ell + g : x in R_gamma, ell + g > 0 } <= gamma,
// and reports the certified interval [gamma_min, gamma].
RegionEstimate certify_rpi(const DecrementModel& model, double delta,
                           const GridSpec& grid);

// Theorem-8-style certificate: RPI sweep plus containment R_gamma inside the
// box Q where |d(x)| <= delta is known to hold; `experiment_states` must lie
// in Q as well (checked, refusal lists the violating columns).
RegionEstimate certify_pi_neglected(const DecrementModel& model, double delta,
                                    const Eigen::VectorXd& q_lo,
                                    const Eigen::VectorXd& q_hi,
                                    const Eigen::MatrixXd& experiment_states,
                                    const GridSpec& grid);

// One row per grid point: coordinates, V, decrement, flags.
void export_region_csv(const std::string& path, const GridSpec& grid,
                       const QuadLyapunov& lyap, const Eigen::VectorXd& decrement,
                       const RegionEstimate& estimate);

}  // namespace nlcancel
