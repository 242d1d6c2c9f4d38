#include "nlcancel/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nlcancel/basis.hpp"

namespace nlcancel {

void Trajectory::validate() const {
  const int t = horizon();
  if (states.cols() != t + 1)
    throw InputError("Trajectory: expected T+1 state samples for T inputs");
  if (has_derivatives() &&
      (derivatives.rows() != states.rows() || derivatives.cols() != t))
    throw InputError("Trajectory: derivative channel shape mismatch");
  if (has_disturbances() && disturbances.cols() != t)
    throw InputError("Trajectory: disturbance channel shape mismatch");
  if (has_outputs() && outputs.size() != states.cols())
    throw InputError("Trajectory: output channel shape mismatch");
  if (!states.allFinite() || !inputs.allFinite())
    throw InputError("Trajectory: non-finite entries");
  if (has_derivatives() && !derivatives.allFinite())
    throw InputError("Trajectory: non-finite derivatives");
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot open " + path + " for writing");
  f << std::setprecision(17);
  const int n = traj.state_dim();
  const int m = traj.input_dim();
  const int s = traj.has_disturbances() ? static_cast<int>(traj.disturbances.rows()) : 0;
  f << "k";
  for (int i = 0; i < n; ++i) f << ",x" << i + 1;
  for (int i = 0; i < m; ++i) f << ",u" << i + 1;
  if (traj.has_derivatives())
    for (int i = 0; i < n; ++i) f << ",xdot" << i + 1;
  for (int i = 0; i < s; ++i) f << ",d" << i + 1;
  if (traj.has_outputs()) f << ",y";
  f << "\n";
  for (int k = 0; k < traj.states.cols(); ++k) {
    f << k;
    for (int i = 0; i < n; ++i) f << "," << traj.states(i, k);
    const bool last = k >= traj.horizon();
    for (int i = 0; i < m; ++i) {
      f << ",";
      if (!last) f << traj.inputs(i, k);
    }
    if (traj.has_derivatives())
      for (int i = 0; i < n; ++i) {
        f << ",";
        if (!last) f << traj.derivatives(i, k);
      }
    for (int i = 0; i < s; ++i) {
      f << ",";
      if (!last) f << traj.disturbances(i, k);
    }
    if (traj.has_outputs()) f << "," << traj.outputs(k);
    f << "\n";
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw InputError("empty trajectory file " + path);
  const auto header = split(line);
  int n = 0, m = 0, nd = 0, s = 0;
  bool has_y = false;
  for (const auto& h : header) {
    if (h.rfind("xdot", 0) == 0)
      ++nd;
    else if (h.rfind('x', 0) == 0)
      ++n;
    else if (h.rfind('u', 0) == 0)
      ++m;
    else if (h.rfind('d', 0) == 0)
      ++s;
    else if (h == "y")
      has_y = true;
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    rows.push_back(split(line));
  }
  const int total = static_cast<int>(rows.size());
  if (total < 2) throw InputError("trajectory file too short: " + path);
  const int t = total - 1;
  Trajectory traj;
  traj.states.resize(n, total);
  traj.inputs.resize(m, t);
  if (nd > 0) traj.derivatives.resize(nd, t);
  if (s > 0) traj.disturbances.resize(s, t);
  if (has_y) traj.outputs.resize(total);
  for (int k = 0; k < total; ++k) {
    const auto& r = rows[k];
    if (static_cast<int>(r.size()) != static_cast<int>(header.size()))
      throw InputError("trajectory row " + std::to_string(k) + " width mismatch");
    int c = 1;
    for (int i = 0; i < n; ++i) traj.states(i, k) = std::stod(r[c++]);
    for (int i = 0; i < m; ++i) {
      if (k < t) traj.inputs(i, k) = std::stod(r[c]);
      ++c;
    }
    for (int i = 0; i < nd; ++i) {
      if (k < t) traj.derivatives(i, k) = std::stod(r[c]);
      ++c;
    }
    for (int i = 0; i < s; ++i) {
      if (k < t) traj.disturbances(i, k) = std::stod(r[c]);
      ++c;
    }
    if (has_y) traj.outputs(k) = std::stod(r[c]);
  }
  traj.validate();
  return traj;
}

}  // namespace nlcancel
