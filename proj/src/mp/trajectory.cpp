#include "mprl/mp/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "mprl/error.hpp"

namespace mprl::mp {

WeightVector::WeightVector(int num_dof, int num_basis)
    : per_dof_(Eigen::MatrixXd::Zero(num_dof, num_basis + 1)) {
  require(num_dof >= 1 && num_basis >= 0, "WeightVector: bad dimensions");
}

WeightVector::WeightVector(Eigen::MatrixXd per_dof) : per_dof_(std::move(per_dof)) {
  require(per_dof_.rows() >= 1 && per_dof_.cols() >= 1,
          "WeightVector: need at least one DoF and the goal column");
}

WeightVector WeightVector::from_flat(std::span<const double> flat, int num_dof,
                                     int num_basis) {
  const auto cols = static_cast<std::size_t>(num_basis + 1);
  require(flat.size() == static_cast<std::size_t>(num_dof) * cols,
          "WeightVector::from_flat: expected " +
              std::to_string(num_dof * (num_basis + 1)) + " entries, got " +
              std::to_string(flat.size()));
  WeightVector w(num_dof, num_basis);
  for (int d = 0; d < num_dof; ++d)
    for (std::size_t j = 0; j < cols; ++j) w.per_dof_(d, j) = flat[d * cols + j];
  return w;
}

Eigen::VectorXd WeightVector::flat() const {
  Eigen::VectorXd out(per_dof_.size());
  const auto cols = per_dof_.cols();
  for (Eigen::Index d = 0; d < per_dof_.rows(); ++d)
    for (Eigen::Index j = 0; j < cols; ++j) out[d * cols + j] = per_dof_(d, j);
  return out;
}

void WeightVector::validate(int expected_num_basis) const {
  require(num_basis() == expected_num_basis,
          "WeightVector: expected " + std::to_string(expected_num_basis) +
              " basis weights per DoF, got " + std::to_string(num_basis()));
  require(per_dof_.allFinite(), "WeightVector: non-finite entry");
}

void DesiredTrajectory::validate() const {
  require(pos.rows() == static_cast<Eigen::Index>(times.size()) &&
              vel.rows() == pos.rows() && vel.cols() == pos.cols(),
          "DesiredTrajectory: inconsistent shapes");
  for (std::size_t i = 1; i < times.size(); ++i)
    require(times[i] > times[i - 1], "DesiredTrajectory: times must increase");
  require(pos.allFinite() && vel.allFinite(), "DesiredTrajectory: non-finite values");
}

void write_csv(std::ostream& out, const DesiredTrajectory& traj) {
  out << "t,dof,pos,vel\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < traj.steps(); ++i) {
    for (int d = 0; d < traj.num_dof(); ++d) {
      out << traj.times[i] << ',' << d << ',' << traj.pos(i, d) << ','
          << traj.vel(i, d) << '\n';
    }
  }
}

void write_csv(const std::string& path, const DesiredTrajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(out, traj);
}

namespace {

double parse_double(const std::string& field, int line) {
  // strtod handles every form max_digits10 output produces
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0')
    throw FormatError("trajectory csv line " + std::to_string(line) +
                      ": bad number '" + field + "'");
  return v;
}

}  // namespace

DesiredTrajectory read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,dof,pos,vel")
    throw FormatError("trajectory csv: missing header 't,dof,pos,vel'");

  struct Row {
    double t;
    int dof;
    double pos;
    double vel;
  };
  std::vector<Row> rows;
  int line_no = 1;
  int max_dof = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[4];
    for (auto& s : f) {
      if (!std::getline(ss, s, ','))
        throw FormatError("trajectory csv line " + std::to_string(line_no) +
                          ": expected 4 fields");
    }
    Row r{parse_double(f[0], line_no), 0, parse_double(f[2], line_no),
          parse_double(f[3], line_no)};
    const auto res = std::from_chars(f[1].data(), f[1].data() + f[1].size(), r.dof);
    if (res.ec != std::errc() || r.dof < 0)
      throw FormatError("trajectory csv line " + std::to_string(line_no) + ": bad dof");
    max_dof = std::max(max_dof, r.dof);
    rows.push_back(r);
  }
  const int num_dof = max_dof + 1;
  if (num_dof == 0) return {};
  if (rows.size() % num_dof != 0) throw FormatError("trajectory csv: ragged rows");

  DesiredTrajectory traj;
  const auto steps = rows.size() / num_dof;
  traj.pos.resize(steps, num_dof);
  traj.vel.resize(steps, num_dof);
  for (std::size_t i = 0; i < steps; ++i) {
    traj.times.push_back(rows[i * num_dof].t);
    for (int d = 0; d < num_dof; ++d) {
      const Row& r = rows[i * num_dof + d];
      if (r.dof != d || r.t != traj.times.back())
        throw FormatError("trajectory csv: rows must be grouped by time, dof ascending");
      traj.pos(i, d) = r.pos;
      traj.vel(i, d) = r.vel;
    }
  }
  return traj;
}

DesiredTrajectory read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

}  // namespace mprl::mp
