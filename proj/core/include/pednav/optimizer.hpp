#pragma once

#include <string>
#include <vector>

#include "pednav/factor_graph.hpp"

namespace pednav {

struct SolverConfig {
  int max_iterations = 50;
  double cost_tolerance = 1e-9;   // relative decrease
  double param_tolerance = 1e-10; // step norm
  double initial_damping = 1e-4;
  double damping_up = 10.0;
  double damping_down = 10.0;
  double max_damping = 1e12;
  int window_length = 100;  // keyframes
  int slide_step = 10;      // keyframes added per window update

  void validate() const;
};

enum class Termination { kCostConverged, kStepConverged, kMaxIterations, kDampingExhausted, kNonFinite };
const char* to_string(Termination t);

struct SolverReport {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  Termination reason = Termination::kMaxIterations;

  bool success() const {
    return reason == Termination::kCostConverged || reason == Termination::kStepConverged ||
           reason == Termination::kMaxIterations;
  }
};

/// Gauss-Newton system H dx = -g over a chain of nodes: `diag[i]` couples
/// node i with itself, `upper[i]` node i with node i + 1.
struct BlockTridiagonal {
  std::vector<JointMatrix> diag;
  std::vector<JointMatrix> upper;
  std::vector<JointErrorVector> g;

  explicit BlockTridiagonal(std::size_t nodes);
  std::size_t nodes() const { return diag.size(); }
  /// Adds J^T J and J^T r of one linearized factor. Keys are relative to
  /// the first node.
  void accumulate(const Linearization& lin, int first_key);
  Eigen::MatrixXd dense() const;
};

/// Solves (H + mu diag(H)) dx = -g by block Cholesky. Returns false if the
/// damped matrix is not positive definite.
bool solve_damped(const BlockTridiagonal& sys, double mu, std::vector<JointErrorVector>& dx);

BlockTridiagonal linearize_graph(const FactorGraph& graph, const Values& values);

struct OptimizeResult {
  Values values;
  SolverReport report;
};

/// Levenberg-Marquardt with retraction updates. Only cost-decreasing steps
/// are accepted.
OptimizeResult optimize(const FactorGraph& graph, const Values& initial, const SolverConfig& cfg);

/// Replaces every factor touching keys below `new_first` with a Gaussian
/// prior on `new_first`, obtained by eliminating those nodes from the
/// linearized system at the current values, and drops them from `values`.
void marginalize(FactorGraph& graph, Values& values, int new_first);

}  // namespace pednav
