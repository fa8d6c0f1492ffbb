#include "mprl/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "mprl/error.hpp"

namespace mprl::stats {

double iqm(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 4) throw PreconditionError("iqm: need at least 4 values, got " + std::to_string(n));
  std::vector<double> v(values.begin(), values.end());
  for (double x : v)
    if (!std::isfinite(x)) throw DomainError("iqm: non-finite value");
  std::sort(v.begin(), v.end());
  const std::size_t trim = n / 4;
  double sum = 0.0;
  for (std::size_t i = trim; i < n - trim; ++i) sum += v[i];
  return sum / static_cast<double>(n - 2 * trim);
}

double mean(std::span<const double> values) {
  require(!values.empty(), "mean: empty input");
  double sum = 0.0;
  for (double x : values) sum += x;
  return sum / static_cast<double>(values.size());
}

double median(std::span<const double> values) {
  require(!values.empty(), "median: empty input");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double stddev(std::span<const double> values) {
  const double m = mean(values);
  double ss = 0.0;
  for (double x : values) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

void validate_run_matrix(const RunMatrix& scores) {
  if (scores.rows() < 1 || scores.cols() < 1)
    throw PreconditionError("run matrix: need at least one seed and one evaluation");
  if (!scores.allFinite()) throw DomainError("run matrix: non-finite entry");
}

double iqm_of(const RunMatrix& scores) {
  return iqm(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())));
}

double mean_of(const RunMatrix& scores) {
  return mean(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())));
}

std::vector<double> bootstrap_replicates(const RunMatrix& scores, const Statistic& statistic,
                                         int reps, std::uint64_t seed) {
  validate_run_matrix(scores);
  require(reps >= 100, "bootstrap: reps must be >= 100");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, scores.cols() - 1);
  RunMatrix resampled(scores.rows(), scores.cols());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    for (Eigen::Index s = 0; s < scores.rows(); ++s)
      for (Eigen::Index j = 0; j < scores.cols(); ++j) resampled(s, j) = scores(s, pick(rng));
    out.push_back(statistic(resampled));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Interval percentile_interval(const std::vector<double>& sorted, double level) {
  require(!sorted.empty(), "percentile_interval: no replicates");
  require(level > 0.0 && level < 1.0, "percentile_interval: level must be in (0, 1)");
  // linear interpolation between order statistics
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const std::size_t j = std::min(i + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(i);
    return sorted[i] + frac * (sorted[j] - sorted[i]);
  };
  const double tail = 0.5 * (1.0 - level);
  return {quantile(tail), quantile(1.0 - tail)};
}

Interval stratified_bootstrap_ci(const RunMatrix& scores, const Statistic& statistic, int reps,
                                 double level, std::uint64_t seed) {
  require(level > 0.0 && level < 1.0, "bootstrap: level must be in (0, 1)");
  return percentile_interval(bootstrap_replicates(scores, statistic, reps, seed), level);
}

Summary summarize_iqm(const std::string& metric, const RunMatrix& scores, int reps,
                      double level, std::uint64_t seed) {
  Summary s;
  s.metric = metric;
  s.point = iqm_of(scores);
  s.ci = stratified_bootstrap_ci(scores, iqm_of, reps, level, seed);
  s.n = static_cast<int>(scores.size());
  s.seeds = static_cast<int>(scores.rows());
  s.level = level;
  s.reps = reps;
  return s;
}

std::string to_json(const Summary& s) {
  nlohmann::ordered_json j;
  j["metric"] = s.metric;
  j["iqm"] = s.point;
  j["ci_lo"] = s.ci.lo;
  j["ci_hi"] = s.ci.hi;
  j["level"] = s.level;
  j["n"] = s.n;
  j["seeds"] = s.seeds;
  j["reps"] = s.reps;
  return j.dump();
}

std::vector<std::string> read_jsonl_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!nlohmann::json::accept(line) || !nlohmann::json::parse(line).is_object())
      throw FormatError(path + ":" + std::to_string(lineno) + ": not a JSON object");
    lines.push_back(line);
  }
  return lines;
}

double last_value(const std::string& jsonl_path, const std::string& key) {
  const auto lines = read_jsonl_lines(jsonl_path);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    const auto j = nlohmann::json::parse(*it);
    if (j.contains(key) && j[key].is_number()) return j[key].get<double>();
  }
  throw FormatError(jsonl_path + ": no numeric '" + key + "' field");
}

}  // namespace mprl::stats
