#ifndef MPRL_STATS_STATS_HPP_
#define MPRL_STATS_STATS_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mprl::stats {

// Interquartile mean with rank trimming: sorts, drops floor(n / 4) values
// from each end and averages the rest in ascending order. Needs n >= 4.
double iqm(std::span<const double> values);

double mean(std::span<const double> values);
double median(std::span<const double> values);
// Population standard deviation.
double stddev(std::span<const double> values);

// Final scores, one row per seed and one column per evaluation episode.
using RunMatrix = Eigen::MatrixXd;
void validate_run_matrix(const RunMatrix& scores);

using Statistic = std::function<double(const RunMatrix&)>;
// IQM over every entry of the matrix.
double iqm_of(const RunMatrix& scores);
double mean_of(const RunMatrix& scores);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Percentile bootstrap: each replicate resamples the evaluations of every
// seed independently (with replacement, same row count per seed) and
// recomputes the statistic. Replicates come from one stream seeded with
// `seed`, so equal seeds give equal replicate sets for any level.
Interval stratified_bootstrap_ci(const RunMatrix& scores, const Statistic& statistic,
                                 int reps = 2000, double level = 0.95, std::uint64_t seed = 0);

// Sorted replicate statistics, exposed for tests and for sharing one
// resample stream across several levels.
std::vector<double> bootstrap_replicates(const RunMatrix& scores, const Statistic& statistic,
                                         int reps, std::uint64_t seed);
Interval percentile_interval(const std::vector<double>& sorted_replicates, double level);

struct Summary {
  std::string metric;
  double point = 0.0;
  Interval ci;
  int n = 0;  // entries in the matrix
  int seeds = 0;
  double level = 0.95;
  int reps = 2000;
};
Summary summarize_iqm(const std::string& metric, const RunMatrix& scores, int reps = 2000,
                      double level = 0.95, std::uint64_t seed = 0);
std::string to_json(const Summary& s);

// Parses one JSON object per non-empty line; throws FormatError naming the
// line on malformed input.
std::vector<std::string> read_jsonl_lines(const std::string& path);
// Numeric field `key` of the last line that has it.
double last_value(const std::string& jsonl_path, const std::string& key);

}  // namespace mprl::stats

#endif  // MPRL_STATS_STATS_HPP_
