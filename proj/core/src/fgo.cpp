#include "pednav/fgo.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace pednav {

namespace {

void check(const SolverReport& r, int window_end) {
  if (!r.success()) {
    throw EstimationError("fgo: optimization failed (" + std::string(to_string(r.reason)) + ") in window ending at keyframe " +
                          std::to_string(window_end));
  }
}

}  // namespace

int marginalization_head(const Values& values, const SolverConfig& solver) {
  const int lo = values.last_key() - solver.window_length + 1;
  const int hi = std::min(lo + solver.slide_step - 1, values.last_key() - 1);
  // A head at rest keeps the linearized prior consistent with rotations
  // about the vertical, which the data cannot observe.
  int best = lo;
  double best_speed = std::numeric_limits<double>::infinity();
  for (int k = lo; k <= hi; ++k) {
    const JointState& x = values.at(k);
    const double speed = x[Foot::kRight].v.norm() + x[Foot::kLeft].v.norm();
    if (speed < best_speed) {
      best_speed = speed;
      best = k;
    }
  }
  return best;
}

FgoResult run_fgo(const TrajectoryDataset& ds, const GraphSettings& settings, const SolverConfig& solver,
                  const PriorFactor& prior) {
  solver.validate();
  if (prior.key != 0) throw std::invalid_argument("run_fgo: prior must sit on keyframe 0");

  FgoResult out;
  out.schedule = make_schedule(ds, settings, stance_flags(ds, settings));
  const int K = static_cast<int>(out.schedule.size());
  out.smoothed.resize(static_cast<std::size_t>(K));
  out.filtered.resize(static_cast<std::size_t>(K));

  const GraphBuilder builder(ds, out.schedule, settings);
  FactorGraph graph;
  Values values(0, {prior.mean});
  graph.add(prior);
  builder.add_unary_factors(0, graph);

  auto solve = [&](int window_end) {
    OptimizeResult res = optimize(graph, values, solver);
    check(res.report, window_end);
    values = std::move(res.values);
    out.reports.push_back(res.report);
  };

  solve(0);
  out.filtered[0] = values.at(0);
  for (int next = 1; next < K;) {
    const int end = std::min(next + solver.slide_step, K);
    for (int k = next; k < end; ++k) builder.append(k, graph, values);
    if (static_cast<int>(values.size()) > solver.window_length) {
      const int new_first = marginalization_head(values, solver);
      for (int k = values.first_key(); k < new_first; ++k) out.smoothed[static_cast<std::size_t>(k)] = values.at(k);
      marginalize(graph, values, new_first);
    }
    solve(end - 1);
    for (int k = next; k < end; ++k) out.filtered[static_cast<std::size_t>(k)] = values.at(k);
    next = end;
  }
  for (int k = values.first_key(); k <= values.last_key(); ++k) out.smoothed[static_cast<std::size_t>(k)] = values.at(k);

  for (const auto& x : out.smoothed) {
    if (!x.is_finite()) throw EstimationError("fgo: non-finite state estimate");
  }
  return out;
}

}  // namespace pednav
