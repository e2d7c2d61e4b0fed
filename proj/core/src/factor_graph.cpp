#include "pednav/factor_graph.hpp"

#include <cmath>
#include <iterator>
#include <map>
#include <set>
#include <stdexcept>

namespace pednav {

double total_cost(const FactorGraph& graph, const Values& values) {
  double cost = 0.0;
  for (const auto& f : graph.factors()) cost += factor_cost(f, values);
  return cost;
}

void GraphSettings::validate() const {
  if (!(keyframe_interval > 0.0)) throw std::invalid_argument("GraphSettings: keyframe_interval must be > 0");
  if (snap_samples < 0) throw std::invalid_argument("GraphSettings: snap_samples must be >= 0");
  if (!(zupt_sigma > 0.0)) throw std::invalid_argument("GraphSettings: zupt_sigma must be > 0");
  if (!(pos_sigma > 0.0)) throw std::invalid_argument("GraphSettings: pos_sigma must be > 0");
  if (!(distance_interval > 0.0)) throw std::invalid_argument("GraphSettings: distance_interval must be > 0");
  constraint.validate();
  for (const auto& [idx, lambda] : lambda_override) {
    if (idx < 0 || !(lambda >= 0.0)) throw std::invalid_argument("GraphSettings: invalid lambda override");
  }
  noise.validate();
  stance.validate();
}

std::array<std::vector<bool>, 2> stance_flags(const TrajectoryDataset& ds, const GraphSettings& s) {
  std::array<std::vector<bool>, 2> out;
  if (s.use_true_stance) {
    if (ds.stance_labels.size() < ds.samples()) throw std::invalid_argument("stance_flags: dataset has no stance labels");
    for (Foot f : kFeet) {
      out[index(f)].resize(ds.samples());
      for (std::size_t k = 0; k < ds.samples(); ++k) out[index(f)][k] = ds.stance_labels[k][f];
    }
    return out;
  }
  for (Foot f : kFeet) out[index(f)] = detect_stance(ds.imu_of(f), s.stance);
  return out;
}

namespace {

int samples_for(double seconds, double rate) {
  return std::max(1, static_cast<int>(std::lround(seconds * rate)));
}

// Epoch of `target` in `set`, snapping onto an existing one within `snap`
// samples or inserting it otherwise.
int snap_or_insert(std::set<int>& set, int target, int snap) {
  int best = -1;
  auto it = set.lower_bound(target - snap);
  for (; it != set.end() && *it <= target + snap; ++it) {
    if (best < 0 || std::abs(*it - target) < std::abs(best - target)) best = *it;
  }
  if (best >= 0) return best;
  set.insert(target);
  return target;
}

}  // namespace

KeyframeSchedule make_schedule(const TrajectoryDataset& ds, const GraphSettings& s,
                               const std::array<std::vector<bool>, 2>& stance) {
  s.validate();
  const int n = static_cast<int>(ds.samples());
  if (n < 2) throw std::invalid_argument("make_schedule: dataset needs at least two samples");
  for (const auto& fl : stance) {
    if (static_cast<int>(fl.size()) != n) throw std::invalid_argument("make_schedule: stance flags length mismatch");
  }

  const int grid = samples_for(s.keyframe_interval, ds.imu_rate);
  const int pen = samples_for(s.distance_interval, ds.imu_rate);

  std::set<int> epochs;
  for (int e = 0; e < n; e += grid) epochs.insert(e);
  for (int e = 0; e < n; e += pen) epochs.insert(e);

  std::map<int, int> fix_at;
  for (std::size_t i = 0; i < ds.fixes.size(); ++i) {
    const auto e = static_cast<int>(std::lround(ds.fixes[i].t * ds.imu_rate));
    if (e < 0 || e >= n) continue;
    epochs.insert(e);
    fix_at.emplace(e, static_cast<int>(i));
  }

  // Stance midpoints, snapped so no interval shrinks below snap_samples + 1.
  std::array<std::set<int>, 2> midpoints;
  for (Foot f : kFeet) {
    const auto& fl = stance[index(f)];
    for (int k = 0; k < n;) {
      if (!fl[k]) {
        ++k;
        continue;
      }
      int end = k;
      while (end + 1 < n && fl[end + 1]) ++end;
      midpoints[index(f)].insert(snap_or_insert(epochs, (k + end) / 2, s.snap_samples));
      k = end + 1;
    }
  }

  KeyframeSchedule out;
  out.imu_rate = ds.imu_rate;
  out.epochs.assign(epochs.begin(), epochs.end());
  const std::size_t K = out.epochs.size();
  out.zupt.t.resize(K);
  out.zupt.feet.resize(K);
  out.fix.assign(K, -1);
  out.penalty.assign(K, false);
  for (std::size_t k = 0; k < K; ++k) {
    const int e = out.epochs[k];
    out.zupt.t[k] = e / ds.imu_rate;
    if (s.use_zupt) {
      FootMask m;
      if (s.zupt_every_stance_keyframe) {
        m.right = stance[0][e];
        m.left = stance[1][e];
      } else {
        m.right = midpoints[0].count(e) > 0;
        m.left = midpoints[1].count(e) > 0;
      }
      out.zupt.feet[k] = m;
    }
    if (s.use_position) {
      if (auto it = fix_at.find(e); it != fix_at.end()) out.fix[k] = it->second;
    }
    out.penalty[k] = e % pen == 0;
  }
  return out;
}

GraphBuilder::GraphBuilder(const TrajectoryDataset& ds, const KeyframeSchedule& schedule,
                           const GraphSettings& settings)
    : ds_(ds), schedule_(schedule), settings_(settings) {}

PreintegratedImu GraphBuilder::preintegrate(int k, Foot f, const NavState& x_prev) const {
  if (k <= 0 || k >= static_cast<int>(schedule_.size())) throw std::out_of_range("GraphBuilder: keyframe out of range");
  PreintegratedImu acc(x_prev.b_a, x_prev.b_g);
  const auto& stream = ds_.imu_of(f);
  const double dt = ds_.dt();
  for (int e = schedule_.epochs[k - 1]; e < schedule_.epochs[k]; ++e) {
    acc = integrate_sample(acc, stream[static_cast<std::size_t>(e)], dt, settings_.noise);
  }
  return acc;
}

void GraphBuilder::add_unary_factors(int k, FactorGraph& graph) const {
  const auto kk = static_cast<std::size_t>(k);
  if (settings_.use_zupt && schedule_.zupt.feet[kk].any()) {
    graph.add(ZuptFactor{k, schedule_.zupt.feet[kk], settings_.zupt_sigma});
  }
  if (settings_.use_position && schedule_.fix[kk] >= 0) {
    const PositionFix& fx = ds_.fixes[static_cast<std::size_t>(schedule_.fix[kk])];
    Vec6 y;
    y << fx.y[0], fx.y[1];
    graph.add(PositionFactor::isotropic(k, y, settings_.pos_sigma));
  }
  if (settings_.use_distance && schedule_.penalty[kk]) {
    DistanceConstraint c = settings_.constraint;
    const int idx = schedule_.epochs[kk] / samples_for(settings_.distance_interval, ds_.imu_rate);
    if (auto it = settings_.lambda_override.find(idx); it != settings_.lambda_override.end()) c.lambda = it->second;
    graph.add(DistancePenaltyFactor{k, c});
  }
}

void GraphBuilder::append(int k, FactorGraph& graph, Values& values) const {
  if (values.empty() || values.last_key() != k - 1) throw std::logic_error("GraphBuilder::append: keys not contiguous");
  const JointState& prev = values.at(k - 1);
  JointState next;
  for (Foot f : kFeet) {
    PreintFactor pf = make_preint_factor(k - 1, k, f, preintegrate(k, f, prev[f]), settings_.noise, settings_.gravity);
    next[f] = predict(prev[f], pf.preint, settings_.gravity);
    graph.add(std::move(pf));
  }
  values.push_back(next);
  add_unary_factors(k, graph);
}

BuiltGraph build_graph(const TrajectoryDataset& ds, const KeyframeSchedule& schedule, const GraphSettings& settings,
                       int first, int last, const PriorFactor& prior) {
  if (schedule.size() == 0) throw std::invalid_argument("build_graph: empty segment");
  if (first < 0 || last >= static_cast<int>(schedule.size()) || last <= first) {
    throw std::invalid_argument("build_graph: segment must span at least two keyframes");
  }
  if (prior.key != first) throw std::invalid_argument("build_graph: missing prior on the segment head");
  BuiltGraph out;
  out.values = Values(first, {prior.mean});
  out.graph.add(prior);
  const GraphBuilder builder(ds, schedule, settings);
  builder.add_unary_factors(first, out.graph);
  for (int k = first + 1; k <= last; ++k) builder.append(k, out.graph, out.values);
  return out;
}

}  // namespace pednav
