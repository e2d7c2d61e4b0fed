#include "pednav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pednav/csv.hpp"

namespace pednav {

std::vector<double> horizontal_errors(const Trajectory& est, const std::vector<TruthSample>& truth, Foot foot,
                                      double tolerance) {
  if (est.t.size() != est.x.size()) throw std::invalid_argument("horizontal_errors: trajectory size mismatch");
  if (truth.empty()) throw std::invalid_argument("horizontal_errors: empty truth");
  std::vector<double> out;
  out.reserve(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double t = est.t[i];
    auto it = std::lower_bound(truth.begin(), truth.end(), t,
                               [](const TruthSample& s, double v) { return s.t < v; });
    if (it == truth.end() || (it != truth.begin() && t - std::prev(it)->t < it->t - t)) --it;
    if (!(std::abs(it->t - t) <= tolerance)) {
      throw std::invalid_argument("horizontal_errors: no truth epoch within tolerance of t = " + format_double(t));
    }
    const Vec3 d = est.x[i][foot].p - it->p;
    out.push_back(std::hypot(d.x(), d.y()));
  }
  return out;
}

std::vector<double> percentile_bounds(std::vector<double> series, const std::vector<double>& levels) {
  if (series.empty()) throw std::invalid_argument("percentile_bounds: empty series");
  std::sort(series.begin(), series.end());
  std::vector<double> out;
  out.reserve(levels.size());
  const double last = static_cast<double>(series.size() - 1);
  for (double q : levels) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("percentile_bounds: level outside [0,1]");
    const double h = last * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, series.size() - 1);
    out.push_back(series[lo] + (h - static_cast<double>(lo)) * (series[hi] - series[lo]));
  }
  return out;
}

ErrorStats summarize(const std::vector<double>& series) {
  if (series.empty()) throw std::invalid_argument("summarize: empty series");
  ErrorStats s;
  double sum = 0.0, sq = 0.0;
  for (double e : series) {
    sum += e;
    sq += e * e;
    s.max = std::max(s.max, e);
  }
  const auto n = static_cast<double>(series.size());
  s.mean = sum / n;
  s.rms = std::sqrt(sq / n);
  const auto b = percentile_bounds(series, {0.90, 0.95, 0.99});
  s.p90 = b[0];
  s.p95 = b[1];
  s.p99 = b[2];
  return s;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> series) {
  std::sort(series.begin(), series.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(series.size());
  const std::size_t n = series.size();
  for (std::size_t i = 0; i < n; ++i) {
    // Right-continuous: a run of equal errors reports its last fraction.
    if (i + 1 < n && series[i + 1] == series[i]) continue;
    out.emplace_back(series[i], static_cast<double>(i + 1) / static_cast<double>(n));
  }
  return out;
}

double violation_fraction(const Trajectory& est, const std::vector<std::size_t>& epochs, double d, double slack) {
  if (epochs.empty()) return 0.0;
  std::size_t bad = 0;
  for (std::size_t i : epochs) {
    if (i >= est.size()) throw std::out_of_range("violation_fraction: epoch outside trajectory");
    if ((est.x[i][Foot::kRight].p - est.x[i][Foot::kLeft].p).norm() > d + slack) ++bad;
  }
  return static_cast<double>(bad) / static_cast<double>(epochs.size());
}

ErrorReport make_report(std::string method, std::array<std::vector<double>, 2> errors, double violation_frac) {
  ErrorReport r;
  r.method = std::move(method);
  for (Foot f : kFeet) r.stats[index(f)] = summarize(errors[index(f)]);
  r.errors = std::move(errors);
  r.violation_frac = violation_frac;
  return r;
}

std::vector<const ErrorReport*> rank(const std::vector<ErrorReport>& reports) {
  std::vector<const ErrorReport*> rows;
  for (const auto& r : reports) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(), [](const ErrorReport* a, const ErrorReport* b) {
    if (a->stats[0].rms != b->stats[0].rms) return a->stats[0].rms < b->stats[0].rms;
    return a->method < b->method;
  });
  return rows;
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<const ErrorReport*>& rows) {
  CsvWriter w(path);
  w.header({"method", "foot", "mean", "rms", "max", "p90", "p95", "p99", "violation_frac"});
  for (const ErrorReport* r : rows) {
    for (Foot f : kFeet) {
      const ErrorStats& s = r->stats[index(f)];
      w.row(r->method, f == Foot::kRight ? "right" : "left", s.mean, s.rms, s.max, s.p90, s.p95, s.p99,
            r->violation_frac);
    }
  }
}

void write_cdf_csv(const std::filesystem::path& path, const std::vector<double>& series) {
  CsvWriter w(path);
  w.header({"error_m", "fraction"});
  for (const auto& [e, frac] : empirical_cdf(series)) w.row(e, frac);
}

void write_errors_csv(const std::filesystem::path& path, const ErrorReport& report) {
  if (report.errors[0].size() != report.errors[1].size()) {
    throw std::invalid_argument("write_errors_csv: per-foot series differ in length");
  }
  CsvWriter w(path);
  w.header({"epoch", "right", "left"});
  for (std::size_t i = 0; i < report.errors[0].size(); ++i) {
    w.row(static_cast<int>(i), report.errors[0][i], report.errors[1][i]);
  }
}

std::array<std::vector<double>, 2> read_errors_csv(const std::filesystem::path& path) {
  CsvReader r(path, {"epoch", "right", "left"});
  std::array<std::vector<double>, 2> out;
  std::vector<double> row;
  while (r.next_numeric(row)) {
    out[0].push_back(row[1]);
    out[1].push_back(row[2]);
  }
  if (out[0].empty()) r.fail("no error rows");
  return out;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  CsvWriter w(path);
  w.header({"t", "p1x", "p1y", "p1z", "v1x", "v1y", "v1z", "q1w", "q1x", "q1y", "q1z",
            "p2x", "p2y", "p2z", "v2x", "v2y", "v2z", "q2w", "q2x", "q2y", "q2z"});
  std::vector<double> row;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    row.assign(1, traj.t[i]);
    for (Foot f : kFeet) {
      const NavState& s = traj.x[i][f];
      row.insert(row.end(), {s.p.x(), s.p.y(), s.p.z(), s.v.x(), s.v.y(), s.v.z(),
                             s.q.w(), s.q.x(), s.q.y(), s.q.z()});
    }
    w.row(row);
  }
}

}  // namespace pednav
