#include "pednav/dataset.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "pednav/csv.hpp"

namespace pednav {

namespace {

constexpr const char* kFootName[2] = {"right", "left"};

std::filesystem::path imu_file(const std::filesystem::path& dir, int foot) {
  return dir / (std::string("imu_") + kFootName[foot] + ".csv");
}
std::filesystem::path truth_file(const std::filesystem::path& dir, int foot) {
  return dir / (std::string("truth_") + kFootName[foot] + ".csv");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void TrajectoryDataset::validate() const {
  const std::size_t n = imu[0].size();
  if (n == 0) throw std::invalid_argument("dataset: empty IMU stream");
  if (!(imu_rate > 0.0)) throw std::invalid_argument("dataset: imu_rate must be positive");
  for (int f = 0; f < 2; ++f) {
    if (imu[f].size() != n || truth[f].size() != n) {
      throw std::invalid_argument("dataset: stream lengths differ");
    }
  }
  if (stance_labels.size() != n) throw std::invalid_argument("dataset: stance labels misaligned");
  const double tol = 1e-9;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / imu_rate;
    for (int f = 0; f < 2; ++f) {
      if (std::abs(imu[f][k].t - t) > tol || std::abs(truth[f][k].t - t) > tol) {
        throw std::invalid_argument("dataset: non-uniform timestamps at sample " + std::to_string(k));
      }
    }
  }
}

void write_key_values(const std::filesystem::path& path, const std::map<std::string, std::string>& kv) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    kv[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
  }
  return kv;
}

void save_dataset(const std::filesystem::path& dir, const TrajectoryDataset& ds) {
  ds.validate();
  std::filesystem::create_directories(dir);

  auto manifest = ds.metadata;
  manifest["dataset.imu_rate"] = format_double(ds.imu_rate);
  manifest["dataset.samples"] = std::to_string(ds.samples());
  manifest["dataset.fixes"] = std::to_string(ds.fixes.size());
  write_key_values(dir / "manifest.txt", manifest);

  for (int f = 0; f < 2; ++f) {
    CsvWriter imu(imu_file(dir, f));
    imu.header({"t", "fx", "fy", "fz", "wx", "wy", "wz"});
    for (const auto& s : ds.imu[f]) {
      imu.row(s.t, s.f_b.x(), s.f_b.y(), s.f_b.z(), s.w_b.x(), s.w_b.y(), s.w_b.z());
    }
    CsvWriter truth(truth_file(dir, f));
    truth.header({"t", "px", "py", "pz", "vx", "vy", "vz", "qw", "qx", "qy", "qz"});
    for (const auto& s : ds.truth[f]) {
      truth.row(s.t, s.p.x(), s.p.y(), s.p.z(), s.v.x(), s.v.y(), s.v.z(), s.q.w(), s.q.x(), s.q.y(),
                s.q.z());
    }
  }

  CsvWriter fixes(dir / "fixes.csv");
  fixes.header({"t", "p1x", "p1y", "p1z", "p2x", "p2y", "p2z", "outlier_flag"});
  for (const auto& fx : ds.fixes) {
    fixes.row(fx.t, fx.y[0].x(), fx.y[0].y(), fx.y[0].z(), fx.y[1].x(), fx.y[1].y(), fx.y[1].z(),
              fx.outlier_flag);
  }

  CsvWriter stance(dir / "stance.csv");
  stance.header({"t", "right", "left"});
  for (std::size_t k = 0; k < ds.stance_labels.size(); ++k) {
    stance.row(ds.imu[0][k].t, ds.stance_labels[k].right ? 1 : 0, ds.stance_labels[k].left ? 1 : 0);
  }
}

TrajectoryDataset load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error(dir.string() + ": dataset directory not found");
  }
  TrajectoryDataset ds;
  const auto manifest_path = dir / "manifest.txt";
  ds.metadata = read_key_values(manifest_path);
  auto take = [&](const std::string& key) {
    auto it = ds.metadata.find(key);
    if (it == ds.metadata.end()) {
      throw std::runtime_error(manifest_path.string() + ": missing key '" + key + "'");
    }
    std::string v = it->second;
    ds.metadata.erase(it);
    return v;
  };
  ds.imu_rate = parse_double(take("dataset.imu_rate"));
  const auto n = static_cast<std::size_t>(std::stoull(take("dataset.samples")));
  const auto n_fixes = static_cast<std::size_t>(std::stoull(take("dataset.fixes")));

  std::vector<double> v;
  for (int f = 0; f < 2; ++f) {
    CsvReader imu(imu_file(dir, f), {"t", "fx", "fy", "fz", "wx", "wy", "wz"});
    while (imu.next_numeric(v)) {
      ds.imu[f].push_back({v[0], Vec3(v[1], v[2], v[3]), Vec3(v[4], v[5], v[6])});
    }
    if (ds.imu[f].size() != n) {
      imu.fail("truncated: expected " + std::to_string(n) + " samples, found " +
               std::to_string(ds.imu[f].size()));
    }
    CsvReader truth(truth_file(dir, f), {"t", "px", "py", "pz", "vx", "vy", "vz", "qw", "qx", "qy", "qz"});
    while (truth.next_numeric(v)) {
      TruthSample s;
      s.t = v[0];
      s.p = Vec3(v[1], v[2], v[3]);
      s.v = Vec3(v[4], v[5], v[6]);
      s.q = Quat(v[7], v[8], v[9], v[10]);
      ds.truth[f].push_back(s);
    }
    if (ds.truth[f].size() != n) {
      truth.fail("truncated: expected " + std::to_string(n) + " samples, found " +
                 std::to_string(ds.truth[f].size()));
    }
  }

  CsvReader fixes(dir / "fixes.csv", {"t", "p1x", "p1y", "p1z", "p2x", "p2y", "p2z", "outlier_flag"});
  while (fixes.next_numeric(v)) {
    PositionFix fx;
    fx.t = v[0];
    fx.y[0] = Vec3(v[1], v[2], v[3]);
    fx.y[1] = Vec3(v[4], v[5], v[6]);
    fx.outlier_flag = static_cast<int>(v[7]);
    ds.fixes.push_back(fx);
  }
  if (ds.fixes.size() != n_fixes) {
    fixes.fail("truncated: expected " + std::to_string(n_fixes) + " fixes, found " +
               std::to_string(ds.fixes.size()));
  }

  CsvReader stance(dir / "stance.csv", {"t", "right", "left"});
  while (stance.next_numeric(v)) {
    ds.stance_labels.push_back({v[1] != 0.0, v[2] != 0.0});
  }
  if (ds.stance_labels.size() != n) stance.fail("truncated stance labels");

  try {
    ds.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(dir.string() + ": " + e.what());
  }
  return ds;
}

}  // namespace pednav
