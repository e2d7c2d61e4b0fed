#pragma once

#include <vector>

#include "pednav/errors.hpp"
#include "pednav/factor_graph.hpp"
#include "pednav/optimizer.hpp"

namespace pednav {

struct FgoResult {
  KeyframeSchedule schedule;
  /// Estimate of each keyframe when it left the window (fixed-lag smoothed).
  std::vector<JointState> smoothed;
  /// Estimate of each keyframe right after the window update that added it.
  std::vector<JointState> filtered;
  std::vector<SolverReport> reports;
};

/// Key of the node that becomes the window head when `values` exceeds the
/// window length: the slowest node (sum of foot speeds) among the first
/// `slide_step` keys that keep at most `window_length` nodes.
int marginalization_head(const Values& values, const SolverConfig& solver);

/// Sliding-window smoother over the whole dataset. The window holds at most
/// `solver.window_length` keyframes, grows by `solver.slide_step` per update
/// and summarizes older keyframes as a prior on the window head.
FgoResult run_fgo(const TrajectoryDataset& ds, const GraphSettings& settings, const SolverConfig& solver,
                  const PriorFactor& prior);

}  // namespace pednav
