#include "mprl/mp/basis_set.hpp"

#include <cmath>
#include <fstream>

#include "mprl/binary_io.hpp"
#include "mprl/error.hpp"

namespace mprl::mp {

namespace {

constexpr std::string_view kBasisMagic = "MPRLBAS1";

}  // namespace

MpBasisSet precompute_basis_set(const DmpConfig& cfg, int grid_len) {
  require(grid_len >= 2, "precompute_basis_set: grid_len must be >= 2");
  require(cfg.critically_damped(),
          "precompute_basis_set: closed form requires beta = alpha / 4");

  const int n = cfg.num_basis();
  const double tau = cfg.tau();
  const double a = cfg.alpha() / (2.0 * tau);
  const double h = tau / (grid_len - 1);

  MpBasisSet b;
  b.config = cfg;
  b.time_grid.resize(grid_len);
  b.y1.resize(grid_len);
  b.y2.resize(grid_len);
  b.dy1.resize(grid_len);
  b.dy2.resize(grid_len);
  b.q1.resize(grid_len);
  b.q2.resize(grid_len);
  b.p1 = Eigen::MatrixXd::Zero(grid_len, n);
  b.p2 = Eigen::MatrixXd::Zero(grid_len, n);

  const RbfLayout layout = n > 0 ? rbf_layout(cfg.phase(), n) : RbfLayout{};

  // integrands of p1 (with the extra t') and p2 at every grid point
  Eigen::MatrixXd f1(grid_len, n), f2(grid_len, n);
  for (int i = 0; i < grid_len; ++i) {
    const double t = i == grid_len - 1 ? tau : i * h;
    b.time_grid[i] = t;
    const Complementary c = complementary(t, cfg);
    b.y1[i] = c.y1;
    b.y2[i] = c.y2;
    b.dy1[i] = c.dy1;
    b.dy2[i] = c.dy2;
    const GoalIntegrals q = q1q2(t, cfg);
    b.q1[i] = q.q1;
    b.q2[i] = q.q2;
    if (n > 0) {
      const double x = phase(t, cfg.phase());
      const Eigen::VectorXd phi = rbf_basis(x, layout);
      const double common = std::exp(a * t) * x / (tau * tau);
      f2.row(i) = common * phi.transpose();
      f1.row(i) = t * f2.row(i);
    }
  }
  for (int i = 1; i < grid_len; ++i) {
    const double dt = b.time_grid[i] - b.time_grid[i - 1];
    b.p1.row(i) = b.p1.row(i - 1) + 0.5 * dt * (f1.row(i - 1) + f1.row(i));
    b.p2.row(i) = b.p2.row(i - 1) + 0.5 * dt * (f2.row(i - 1) + f2.row(i));
  }

  b.pos_basis.resize(grid_len, n + 1);
  b.vel_basis.resize(grid_len, n + 1);
  for (int i = 0; i < grid_len; ++i) {
    if (n > 0) {
      b.pos_basis.row(i).head(n) = b.y2[i] * b.p2.row(i) - b.y1[i] * b.p1.row(i);
      b.vel_basis.row(i).head(n) = b.dy2[i] * b.p2.row(i) - b.dy1[i] * b.p1.row(i);
    }
    b.pos_basis(i, n) = b.y2[i] * b.q2[i] - b.y1[i] * b.q1[i];
    b.vel_basis(i, n) = b.dy2[i] * b.q2[i] - b.dy1[i] * b.q1[i];
  }
  return b;
}

BasisRows basis_rows_at(const MpBasisSet& basis, double t) {
  const double t_end = basis.t_end();
  const double h = basis.spacing();
  if (!(t >= 0.0) || t > t_end * (1.0 + 1e-12)) {
    throw RangeError("basis_rows_at: t = " + std::to_string(t) +
                     " outside basis grid [0, " + std::to_string(t_end) + "]");
  }
  const auto last = basis.grid_len() - 1;
  const double u = t / h;
  const double nearest = std::round(u);
  if (std::abs(u - nearest) <= 1e-9) {
    const auto i = std::min(static_cast<Eigen::Index>(nearest), last);
    return {basis.pos_basis.row(i), basis.vel_basis.row(i)};
  }
  const auto i = std::min(static_cast<Eigen::Index>(std::floor(u)), last - 1);
  const double frac = u - static_cast<double>(i);
  return {(1.0 - frac) * basis.pos_basis.row(i) + frac * basis.pos_basis.row(i + 1),
          (1.0 - frac) * basis.vel_basis.row(i) + frac * basis.vel_basis.row(i + 1)};
}

void save_basis_set(const std::string& path, const MpBasisSet& b) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  io::BinaryWriter w(out);
  w.bytes(kBasisMagic);
  w.f64(b.config.alpha());
  w.f64(b.config.beta());
  w.f64(b.config.phase().alpha_x);
  w.f64(b.config.tau());
  w.u64(static_cast<std::uint64_t>(b.config.num_basis()));
  w.u64(static_cast<std::uint64_t>(b.grid_len()));
  w.matrix_rowmajor(b.time_grid.transpose());
  w.matrix_rowmajor(b.pos_basis);
  w.matrix_rowmajor(b.vel_basis);
  w.matrix_rowmajor(b.y1.transpose());
  w.matrix_rowmajor(b.y2.transpose());
  w.matrix_rowmajor(b.dy1.transpose());
  w.matrix_rowmajor(b.dy2.transpose());
  w.matrix_rowmajor(b.p1);
  w.matrix_rowmajor(b.p2);
  w.matrix_rowmajor(b.q1.transpose());
  w.matrix_rowmajor(b.q2.transpose());
  if (!out) throw std::runtime_error("write failed: " + path);
}

MpBasisSet load_basis_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  io::BinaryReader r(in, "basis set " + path);
  if (r.bytes(kBasisMagic.size()) != kBasisMagic) r.fail("bad magic");
  const double alpha = r.f64();
  const double beta = r.f64();
  const double alpha_x = r.f64();
  const double tau = r.f64();
  const auto n = r.u64();
  const auto len = r.u64();
  if (n > 100000 || len < 2 || len > 100000000) r.fail("implausible header");
  MpBasisSet b;
  b.config = DmpConfig(alpha, static_cast<int>(n), PhaseConfig{alpha_x, tau}, beta);
  const auto rows = static_cast<Eigen::Index>(len);
  const auto cols = static_cast<Eigen::Index>(n);
  b.time_grid = r.matrix_rowmajor(1, rows).transpose();
  b.pos_basis = r.matrix_rowmajor(rows, cols + 1);
  b.vel_basis = r.matrix_rowmajor(rows, cols + 1);
  b.y1 = r.matrix_rowmajor(1, rows).transpose();
  b.y2 = r.matrix_rowmajor(1, rows).transpose();
  b.dy1 = r.matrix_rowmajor(1, rows).transpose();
  b.dy2 = r.matrix_rowmajor(1, rows).transpose();
  b.p1 = r.matrix_rowmajor(rows, cols);
  b.p2 = r.matrix_rowmajor(rows, cols);
  b.q1 = r.matrix_rowmajor(1, rows).transpose();
  b.q2 = r.matrix_rowmajor(1, rows).transpose();
  if (in.peek() != std::char_traits<char>::eof()) r.fail("trailing bytes");
  return b;
}

}  // namespace mprl::mp
