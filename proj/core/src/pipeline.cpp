#include "pednav/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <sstream>

#include "pednav/csv.hpp"

namespace pednav {

namespace {

constexpr const char* kMethodNames[] = {
    "EKF-ZUPT", "EKF-ZUPT-STEP", "EKF-ZUPT-POS", "EKF-ZUPT-POS-STEP",
    "FGO-ZUPT", "FGO-ZUPT-STEP", "FGO-ZUPT-POS", "FGO-ZUPT-POS-STEP",
};

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::string to_string(Method m) { return kMethodNames[static_cast<int>(m)]; }

Method parse_method(const std::string& name) {
  const std::string u = upper(name);
  for (Method m : kAllMethods) {
    if (to_string(m) == u) return m;
  }
  throw ConfigError("unknown method '" + name + "'");
}

bool is_fgo(Method m) { return static_cast<int>(m) >= static_cast<int>(Method::kFgoZupt); }
bool uses_position(Method m) {
  return m == Method::kEkfZuptPos || m == Method::kEkfZuptPosStep || m == Method::kFgoZuptPos ||
         m == Method::kFgoZuptPosStep;
}
bool uses_distance(Method m) {
  return m == Method::kEkfZuptStep || m == Method::kEkfZuptPosStep || m == Method::kFgoZuptStep ||
         m == Method::kFgoZuptPosStep;
}

void SimulationConfig::set_seed(std::uint64_t seed) {
  if (seed == 0) throw ConfigError("seed must be >= 1");
  gait.seed = 4 * seed - 3;
  imu_seed = 4 * seed - 2;
  corruption.seed = 4 * seed - 1;
  bias_seed = 4 * seed;
}

// ---------------------------------------------------------------- config keys

namespace {

struct Key {
  std::string name;
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, const std::string&)> set;
};

double to_double(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const std::invalid_argument&) {
    throw ConfigError("config: " + key + ": expected a number, got '" + v + "'");
  }
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config: " + key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: " + key + ": expected true or false, got '" + v + "'");
}

std::string list_to_string(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  return out;
}

// "index:lambda,index:lambda"
std::string overrides_to_string(const std::map<int, double>& m) {
  std::string s;
  for (const auto& [k, v] : m) s += (s.empty() ? "" : ",") + std::to_string(k) + ":" + format_double(v);
  return s;
}

std::map<int, double> to_overrides(const std::string& key, const std::string& v) {
  std::map<int, double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("config: " + key + ": expected index:lambda, got '" + item + "'");
    out[to_int<int>(key, item.substr(0, colon))] = to_double(key, item.substr(colon + 1));
  }
  return out;
}

#define PEDNAV_DOUBLE(name, member)                                                   \
  Key {                                                                                \
    name, [](const PipelineConfig& c) { return format_double(c.member); },            \
        [](PipelineConfig& c, const std::string& v) { c.member = to_double(name, v); } \
  }
#define PEDNAV_INT(name, member, type)                                                   \
  Key {                                                                                   \
    name, [](const PipelineConfig& c) { return std::to_string(c.member); },              \
        [](PipelineConfig& c, const std::string& v) { c.member = to_int<type>(name, v); } \
  }
#define PEDNAV_BOOL(name, member)                                                         \
  Key {                                                                                    \
    name, [](const PipelineConfig& c) { return std::string(c.member ? "true" : "false"); }, \
        [](PipelineConfig& c, const std::string& v) { c.member = to_bool(name, v); }       \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      PEDNAV_DOUBLE("gait.step_length", sim.gait.step_length),
      PEDNAV_DOUBLE("gait.cadence", sim.gait.cadence),
      PEDNAV_DOUBLE("gait.step_width", sim.gait.step_width),
      PEDNAV_DOUBLE("gait.stance_ratio", sim.gait.stance_ratio),
      PEDNAV_DOUBLE("gait.duration", sim.gait.duration),
      PEDNAV_DOUBLE("gait.imu_rate", sim.gait.imu_rate),
      PEDNAV_DOUBLE("gait.foot_lift", sim.gait.foot_lift),
      PEDNAV_DOUBLE("gait.swing_pitch", sim.gait.swing_pitch),
      PEDNAV_INT("gait.seed", sim.gait.seed, std::uint64_t),
      PEDNAV_DOUBLE("imu.sigma_a", sim.imu_noise.sigma_a),
      PEDNAV_DOUBLE("imu.sigma_g", sim.imu_noise.sigma_g),
      PEDNAV_DOUBLE("imu.sigma_ba", sim.imu_noise.sigma_ba),
      PEDNAV_DOUBLE("imu.sigma_bg", sim.imu_noise.sigma_bg),
      PEDNAV_DOUBLE("imu.bias0_sigma_a", sim.bias0_sigma_a),
      PEDNAV_DOUBLE("imu.bias0_sigma_g", sim.bias0_sigma_g),
      PEDNAV_INT("imu.seed", sim.imu_seed, std::uint64_t),
      PEDNAV_INT("imu.bias_seed", sim.bias_seed, std::uint64_t),
      PEDNAV_DOUBLE("corruption.pos_sigma", sim.corruption.pos_sigma),
      PEDNAV_DOUBLE("corruption.pos_interval", sim.corruption.pos_interval),
      PEDNAV_DOUBLE("corruption.outlier_prob", sim.corruption.outlier_prob),
      Key{"corruption.outlier_set",
          [](const PipelineConfig& c) { return list_to_string(c.sim.corruption.outlier_set); },
          [](PipelineConfig& c, const std::string& v) {
            c.sim.corruption.outlier_set = to_list("corruption.outlier_set", v);
          }},
      PEDNAV_INT("corruption.seed", sim.corruption.seed, std::uint64_t),
      PEDNAV_DOUBLE("gravity.magnitude", sim.gravity.magnitude),
      PEDNAV_DOUBLE("stance.acc_thresh", graph.stance.acc_thresh),
      PEDNAV_DOUBLE("stance.gyro_thresh", graph.stance.gyro_thresh),
      PEDNAV_INT("stance.window", graph.stance.window, int),
      PEDNAV_INT("stance.min_duration", graph.stance.min_duration, int),
      PEDNAV_BOOL("stance.use_labels", graph.use_true_stance),
      PEDNAV_DOUBLE("zupt.sigma", graph.zupt_sigma),
      PEDNAV_BOOL("zupt.every_stance_keyframe", graph.zupt_every_stance_keyframe),
      PEDNAV_DOUBLE("position.sigma", graph.pos_sigma),
      PEDNAV_DOUBLE("constraint.d", graph.constraint.d),
      PEDNAV_DOUBLE("constraint.alpha", graph.constraint.alpha),
      PEDNAV_DOUBLE("constraint.lambda", graph.constraint.lambda),
      PEDNAV_DOUBLE("constraint.eps_norm", graph.constraint.eps_norm),
      PEDNAV_DOUBLE("constraint.interval", graph.distance_interval),
      Key{"constraint.lambda_override",
          [](const PipelineConfig& c) { return overrides_to_string(c.graph.lambda_override); },
          [](PipelineConfig& c, const std::string& v) {
            c.graph.lambda_override = to_overrides("constraint.lambda_override", v);
          }},
      PEDNAV_DOUBLE("fgo.keyframe_interval", graph.keyframe_interval),
      PEDNAV_INT("fgo.snap_samples", graph.snap_samples, int),
      PEDNAV_INT("fgo.window_length", solver.window_length, int),
      PEDNAV_INT("fgo.slide_step", solver.slide_step, int),
      PEDNAV_INT("fgo.max_iterations", solver.max_iterations, int),
      PEDNAV_DOUBLE("fgo.cost_tolerance", solver.cost_tolerance),
      PEDNAV_DOUBLE("fgo.param_tolerance", solver.param_tolerance),
      PEDNAV_DOUBLE("fgo.initial_damping", solver.initial_damping),
      PEDNAV_DOUBLE("fgo.damping_up", solver.damping_up),
      PEDNAV_DOUBLE("fgo.damping_down", solver.damping_down),
      PEDNAV_BOOL("fgo.filtered_output", fgo_filtered_output),
      PEDNAV_INT("ekf.projection_iterations", projection.max_iterations, int),
      PEDNAV_DOUBLE("ekf.projection_tolerance", projection.tolerance),
      PEDNAV_DOUBLE("prior.sigma_p", prior.p),
      PEDNAV_DOUBLE("prior.sigma_v", prior.v),
      PEDNAV_DOUBLE("prior.sigma_att", prior.att),
      PEDNAV_DOUBLE("prior.sigma_ba", prior.b_a),
      PEDNAV_DOUBLE("prior.sigma_bg", prior.b_g),
      PEDNAV_DOUBLE("metrics.violation_slack", violation_slack),
  };
  return k;
}

#undef PEDNAV_DOUBLE
#undef PEDNAV_INT
#undef PEDNAV_BOOL

}  // namespace

std::map<std::string, std::string> PipelineConfig::to_key_values() const {
  std::map<std::string, std::string> kv;
  for (const auto& k : keys()) kv[k.name] = k.get(*this);
  return kv;
}

PipelineConfig PipelineConfig::from_key_values(const std::map<std::string, std::string>& kv) {
  PipelineConfig cfg;
  for (const auto& [name, value] : kv) {
    auto it = std::find_if(keys().begin(), keys().end(), [&](const Key& k) { return k.name == name; });
    if (it == keys().end()) throw ConfigError("config: unknown key '" + name + "'");
    it->set(cfg, value);
  }
  try {
    cfg.sim.gait.validate();
    cfg.sim.imu_noise.validate();
    cfg.sim.corruption.validate();
    cfg.graph.validate();
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.projection.max_iterations < 1 || !(cfg.projection.tolerance > 0.0)) {
    throw ConfigError("config: invalid projection settings");
  }
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  try {
    return from_key_values(read_key_values(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------- simulation

TrajectoryDataset simulate_dataset(const SimulationConfig& cfg) {
  const GroundTruth gt = generate_gait(cfg.gait);
  ImuErrorConfig ie;
  ie.noise = cfg.imu_noise;
  ie.bias0 = draw_initial_biases(cfg.bias0_sigma_a, cfg.bias0_sigma_g, cfg.bias_seed);
  ie.seed = cfg.imu_seed;

  TrajectoryDataset ds;
  ds.imu_rate = cfg.gait.imu_rate;
  ds.imu = synthesize_imu(gt, ie, cfg.gravity);
  const std::size_t n = ds.imu[0].size();
  for (Foot f : kFeet) {
    const auto& src = gt.feet[index(f)];
    ds.truth[index(f)].assign(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(n));
  }
  ds.stance_labels.assign(gt.stance.begin(), gt.stance.begin() + static_cast<std::ptrdiff_t>(n));
  ds.fixes = corrupt_positions(gt, n, cfg.corruption);

  PipelineConfig pc;
  pc.sim = cfg;
  for (const auto& [k, v] : pc.to_key_values()) {
    if (k.rfind("gait.", 0) == 0 || k.rfind("imu.", 0) == 0 || k.rfind("corruption.", 0) == 0 ||
        k.rfind("gravity.", 0) == 0) {
      ds.metadata[k] = v;
    }
  }
  ds.validate();
  return ds;
}

EkfState initial_estimate(const TrajectoryDataset& ds, const PriorSigmas& s) {
  if (ds.samples() == 0) throw std::invalid_argument("initial_estimate: empty dataset");
  EkfState out;
  for (Foot f : kFeet) {
    const TruthSample& t0 = ds.truth_of(f).front();
    out.x[f].p = t0.p;
    out.x[f].v = t0.v;
    out.x[f].q = t0.q;
  }
  ErrorVector d;
  d << Vec3::Constant(s.p * s.p), Vec3::Constant(s.v * s.v), Vec3::Constant(s.att * s.att),
      Vec3::Constant(s.b_a * s.b_a), Vec3::Constant(s.b_g * s.b_g);
  JointErrorVector dd;
  dd << d, d;
  out.P = dd.asDiagonal();
  return out;
}

GraphSettings method_settings(const PipelineConfig& cfg, Method m) {
  GraphSettings s = cfg.graph;
  s.use_zupt = true;
  s.use_position = uses_position(m);
  s.use_distance = uses_distance(m);
  s.noise = cfg.sim.imu_noise;
  s.gravity = cfg.sim.gravity;
  s.stance.gravity = cfg.sim.gravity.magnitude;
  return s;
}

MethodResult run_method(const TrajectoryDataset& ds, Method m, const PipelineConfig& cfg) {
  ds.validate();
  const GraphSettings settings = method_settings(cfg, m);
  const EkfState init = initial_estimate(ds, cfg.prior);

  MethodResult out;
  out.method = m;
  KeyframeSchedule schedule;
  if (is_fgo(m)) {
    FgoResult r = run_fgo(ds, settings, cfg.solver, PriorFactor::from_covariance(0, init.x, init.P));
    schedule = std::move(r.schedule);
    out.trajectory.x = cfg.fgo_filtered_output ? std::move(r.filtered) : std::move(r.smoothed);
    out.solver_reports = std::move(r.reports);
  } else {
    EkfResult r = run_ekf(ds, settings, init, cfg.projection);
    schedule = std::move(r.schedule);
    out.trajectory.x = std::move(r.estimates);
    out.projected = std::move(r.projected);
  }
  out.epochs = schedule.epochs;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    out.trajectory.t.push_back(schedule.time(k));
    if (schedule.penalty[k]) out.constraint_epochs.push_back(k);
  }

  const double tol = 0.5 * settings.keyframe_interval;
  std::array<std::vector<double>, 2> errors;
  for (Foot f : kFeet) errors[index(f)] = horizontal_errors(out.trajectory, ds.truth_of(f), f, tol);
  const double viol =
      violation_fraction(out.trajectory, out.constraint_epochs, settings.constraint.d, cfg.violation_slack);
  out.report = make_report(to_string(m), std::move(errors), viol);
  return out;
}

std::vector<const ErrorReport*> compare(const std::vector<ErrorReport>& reports) {
  if (reports.size() < 2) throw std::invalid_argument("compare: need at least two reports");
  return rank(reports);
}

void write_method_outputs(const std::filesystem::path& dir, const MethodResult& r) {
  std::filesystem::create_directories(dir);
  write_trajectory_csv(dir / "trajectory.csv", r.trajectory);
  write_errors_csv(dir / "errors.csv", r.report);
  write_summary_csv(dir / "summary.csv", {&r.report});
  write_cdf_csv(dir / "cdf_right.csv", r.report.errors[0]);
  write_cdf_csv(dir / "cdf_left.csv", r.report.errors[1]);
}

ErrorReport read_method_report(const std::filesystem::path& dir) {
  CsvReader summary(dir / "summary.csv",
                    {"method", "foot", "mean", "rms", "max", "p90", "p95", "p99", "violation_frac"});
  std::vector<std::string> row;
  if (!summary.next(row)) summary.fail("no summary rows");
  const std::string method = row[0];
  double viol = 0.0;
  try {
    viol = parse_double(row[8]);
  } catch (const std::invalid_argument& e) {
    summary.fail(e.what());
  }
  return make_report(method, read_errors_csv(dir / "errors.csv"), viol);
}

void write_comparison(const std::filesystem::path& dir, const std::vector<ErrorReport>& reports) {
  const auto rows = compare(reports);
  std::filesystem::create_directories(dir);
  write_summary_csv(dir / "summary.csv", rows);
  for (const ErrorReport* r : rows) {
    write_cdf_csv(dir / ("cdf_" + r->method + "_right.csv"), r->errors[0]);
    write_cdf_csv(dir / ("cdf_" + r->method + "_left.csv"), r->errors[1]);
  }
}

}  // namespace pednav
