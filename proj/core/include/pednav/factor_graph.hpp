#pragma once

#include <array>
#include <map>
#include <vector>

#include "pednav/constraints.hpp"
#include "pednav/dataset.hpp"
#include "pednav/factors.hpp"
#include "pednav/preintegration.hpp"
#include "pednav/zupt.hpp"

namespace pednav {

class FactorGraph {
 public:
  void add(Factor f) { factors_.push_back(std::move(f)); }
  std::size_t size() const { return factors_.size(); }
  const std::vector<Factor>& factors() const { return factors_; }
  std::vector<Factor>& factors() { return factors_; }

  template <typename T>
  std::size_t count() const {
    std::size_t n = 0;
    for (const auto& f : factors_) n += std::holds_alternative<T>(f) ? 1 : 0;
    return n;
  }

 private:
  std::vector<Factor> factors_;
};

/// Sum of factor costs; throws if a factor references a key outside `values`.
double total_cost(const FactorGraph& graph, const Values& values);

/// Which factor families enter the graph and how they are weighted.
struct GraphSettings {
  bool use_zupt = true;
  bool use_position = true;
  bool use_distance = false;
  /// true: ZUPT at every keyframe inside a stance phase. false: only at the
  /// keyframe placed on each stance midpoint.
  bool zupt_every_stance_keyframe = true;
  /// Use the dataset's stance labels instead of running the detector.
  bool use_true_stance = false;

  double keyframe_interval = 0.1;  // s
  int snap_samples = 2;            // forced keyframes this close to the grid snap onto it
  double zupt_sigma = 0.01;        // m/s
  double pos_sigma = 0.30;         // m
  double distance_interval = 0.5;  // s
  DistanceConstraint constraint;
  /// Per-epoch penalty weights: constraint epoch index (0 at t = 0, one per
  /// distance_interval) -> lambda. Epochs not listed use constraint.lambda.
  std::map<int, double> lambda_override;
  ImuNoiseModel noise;
  GravityModel gravity;
  StanceDetectorConfig stance;

  void validate() const;
};

/// Keyframe epochs (sample indices) and the unary factors attached to each.
struct KeyframeSchedule {
  double imu_rate = 60.0;
  std::vector<int> epochs;
  StanceMask zupt;            // feet receiving a ZUPT factor at each keyframe
  std::vector<int> fix;       // index into dataset.fixes, -1 if none
  std::vector<bool> penalty;  // on the distance-constraint schedule (used only with use_distance)

  std::size_t size() const { return epochs.size(); }
  double time(std::size_t k) const { return epochs[k] / imu_rate; }
};

/// Per-sample stance flags for both feet, from the detector or the labels.
std::array<std::vector<bool>, 2> stance_flags(const TrajectoryDataset& ds, const GraphSettings& s);

/// Regular keyframe grid plus forced keyframes at stance midpoints, position
/// fixes and penalty epochs.
KeyframeSchedule make_schedule(const TrajectoryDataset& ds, const GraphSettings& s,
                               const std::array<std::vector<bool>, 2>& stance);

/// Adds keyframes to a graph one at a time: the preintegration factors from
/// the previous keyframe, the unary factors, and an initial value predicted
/// from the previous node's current estimate.
class GraphBuilder {
 public:
  GraphBuilder(const TrajectoryDataset& ds, const KeyframeSchedule& schedule, const GraphSettings& settings);

  /// Factors attached to keyframe k alone (ZUPT, position, penalty).
  void add_unary_factors(int k, FactorGraph& graph) const;
  /// Appends keyframe k; `values` must end at k - 1.
  void append(int k, FactorGraph& graph, Values& values) const;
  PreintegratedImu preintegrate(int k, Foot f, const NavState& x_prev) const;

 private:
  const TrajectoryDataset& ds_;
  const KeyframeSchedule& schedule_;
  const GraphSettings& settings_;
};

/// Graph over keyframes [first, last] headed by `prior`, with initial values
/// dead-reckoned from the prior mean.
struct BuiltGraph {
  FactorGraph graph;
  Values values;
};
BuiltGraph build_graph(const TrajectoryDataset& ds, const KeyframeSchedule& schedule, const GraphSettings& settings,
                       int first, int last, const PriorFactor& prior);

}  // namespace pednav
