#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pednav/dataset.hpp"
#include "pednav/nav_state.hpp"

namespace pednav {

/// Estimated joint states at (possibly irregular) timestamps.
struct Trajectory {
  std::vector<double> t;
  std::vector<JointState> x;

  std::size_t size() const { return t.size(); }
};

/// ||(p_est - p_true)_xy|| per estimate, matching each estimate to the
/// nearest truth epoch. Throws if that epoch is further than `tolerance`
/// seconds away.
std::vector<double> horizontal_errors(const Trajectory& est, const std::vector<TruthSample>& truth, Foot foot,
                                      double tolerance);

/// Empirical quantiles by linear interpolation of the sorted series:
/// position (n - 1) q between order statistics.
std::vector<double> percentile_bounds(std::vector<double> series, const std::vector<double>& levels);

struct ErrorStats {
  double mean = 0.0;
  double rms = 0.0;
  double max = 0.0;
  double p90 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
};
ErrorStats summarize(const std::vector<double>& series);

/// Sorted errors with cumulative fraction i / n; the last fraction is 1.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> series);

/// Fraction of `epochs` (indices into est) where ||p1 - p2|| > d + slack.
double violation_fraction(const Trajectory& est, const std::vector<std::size_t>& epochs, double d, double slack);

struct ErrorReport {
  std::string method;
  std::array<std::vector<double>, 2> errors;  // per foot, per estimate epoch
  std::array<ErrorStats, 2> stats;
  double violation_frac = 0.0;
};
ErrorReport make_report(std::string method, std::array<std::vector<double>, 2> errors, double violation_frac);

/// Rows of the comparison table, sorted by right-foot RMS (ascending,
/// ties by name).
std::vector<const ErrorReport*> rank(const std::vector<ErrorReport>& reports);

/// summary: method,foot,mean,rms,max,p90,p95,p99,violation_frac
void write_summary_csv(const std::filesystem::path& path, const std::vector<const ErrorReport*>& rows);
/// cdf: error_m,fraction
void write_cdf_csv(const std::filesystem::path& path, const std::vector<double>& series);
/// errors: epoch,right,left
void write_errors_csv(const std::filesystem::path& path, const ErrorReport& report);
std::array<std::vector<double>, 2> read_errors_csv(const std::filesystem::path& path);

/// t,p1x..,v1x..,q1w,q1x,q1y,q1z,p2x..,v2x..,q2w..q2z
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace pednav
