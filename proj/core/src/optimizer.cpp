#include "pednav/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace pednav {

void SolverConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
  if (!(cost_tolerance > 0.0) || !(param_tolerance > 0.0)) {
    throw std::invalid_argument("SolverConfig: tolerances must be > 0");
  }
  if (!(initial_damping > 0.0) || !(damping_up > 1.0) || !(damping_down > 1.0) || !(max_damping > initial_damping)) {
    throw std::invalid_argument("SolverConfig: invalid damping schedule");
  }
  if (window_length < 2) throw std::invalid_argument("SolverConfig: window_length must be >= 2");
  if (slide_step < 1) throw std::invalid_argument("SolverConfig: slide_step must be >= 1");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kCostConverged: return "cost_converged";
    case Termination::kStepConverged: return "step_converged";
    case Termination::kMaxIterations: return "max_iterations";
    case Termination::kDampingExhausted: return "damping_exhausted";
    case Termination::kNonFinite: return "non_finite";
  }
  return "unknown";
}

BlockTridiagonal::BlockTridiagonal(std::size_t nodes)
    : diag(nodes, JointMatrix::Zero()),
      upper(nodes > 0 ? nodes - 1 : 0, JointMatrix::Zero()),
      g(nodes, JointErrorVector::Zero()) {}

void BlockTridiagonal::accumulate(const Linearization& lin, int first_key) {
  const int a = lin.key0 - first_key;
  if (a < 0 || a >= static_cast<int>(nodes())) throw std::out_of_range("BlockTridiagonal: key outside window");
  const auto ia = static_cast<std::size_t>(a);
  const Eigen::Index c = lin.col, w = lin.J0.cols();
  diag[ia].block(c, c, w, w).noalias() += lin.J0.transpose() * lin.J0;
  g[ia].segment(c, w).noalias() += lin.J0.transpose() * lin.r;
  if (lin.key1 < 0) return;
  const int b = lin.key1 - first_key;
  if (b != a + 1 || b >= static_cast<int>(nodes())) {
    throw std::invalid_argument("BlockTridiagonal: binary factors must link consecutive keys");
  }
  const auto ib = static_cast<std::size_t>(b);
  diag[ib].block(c, c, w, w).noalias() += lin.J1.transpose() * lin.J1;
  upper[ia].block(c, c, w, w).noalias() += lin.J0.transpose() * lin.J1;
  g[ib].segment(c, w).noalias() += lin.J1.transpose() * lin.r;
}

Eigen::MatrixXd BlockTridiagonal::dense() const {
  const int n = static_cast<int>(nodes());
  constexpr int B = err::kJointDim;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n * B, n * B);
  for (int i = 0; i < n; ++i) {
    H.block<B, B>(i * B, i * B) = diag[static_cast<std::size_t>(i)];
    if (i + 1 < n) {
      H.block<B, B>(i * B, (i + 1) * B) = upper[static_cast<std::size_t>(i)];
      H.block<B, B>((i + 1) * B, i * B) = upper[static_cast<std::size_t>(i)].transpose();
    }
  }
  return H;
}

bool solve_damped(const BlockTridiagonal& sys, double mu, std::vector<JointErrorVector>& dx) {
  const std::size_t n = sys.nodes();
  dx.assign(n, JointErrorVector::Zero());
  if (n == 0) return true;

  std::vector<Eigen::LLT<JointMatrix>> S(n);
  std::vector<JointMatrix> W(n > 0 ? n - 1 : 0);  // S_i^-1 U_i
  std::vector<JointErrorVector> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    JointMatrix A = sys.diag[i];
    A.diagonal() += mu * sys.diag[i].diagonal();
    c[i] = -sys.g[i];
    if (i > 0) {
      A.noalias() -= sys.upper[i - 1].transpose() * W[i - 1];
      c[i].noalias() -= sys.upper[i - 1].transpose() * S[i - 1].solve(c[i - 1]);
    }
    S[i].compute(0.5 * (A + A.transpose()));
    if (S[i].info() != Eigen::Success) return false;
    if (i + 1 < n) W[i] = S[i].solve(sys.upper[i]);
  }
  dx[n - 1] = S[n - 1].solve(c[n - 1]);
  for (std::size_t i = n - 1; i-- > 0;) dx[i] = S[i].solve(c[i]) - W[i] * dx[i + 1];
  for (const auto& d : dx) {
    if (!d.allFinite()) return false;
  }
  return true;
}

BlockTridiagonal linearize_graph(const FactorGraph& graph, const Values& values) {
  BlockTridiagonal sys(values.size());
  for (const auto& f : graph.factors()) sys.accumulate(linearize(f, values), values.first_key());
  return sys;
}

namespace {

// Decrease of the quadratic model ||r + J dx||^2 for step dx.
double model_decrease(const BlockTridiagonal& sys, const std::vector<JointErrorVector>& dx) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    lin += sys.g[i].dot(dx[i]);
    quad += dx[i].dot(sys.diag[i] * dx[i]);
    if (i + 1 < dx.size()) quad += 2.0 * dx[i].dot(sys.upper[i] * dx[i + 1]);
  }
  return -(2.0 * lin + quad);
}

}  // namespace

OptimizeResult optimize(const FactorGraph& graph, const Values& initial, const SolverConfig& cfg) {
  cfg.validate();
  OptimizeResult out{initial, {}};
  double cost = total_cost(graph, out.values);
  out.report.initial_cost = cost;
  out.report.final_cost = cost;
  if (!std::isfinite(cost)) {
    out.report.reason = Termination::kNonFinite;
    return out;
  }

  double mu = cfg.initial_damping;
  std::vector<JointErrorVector> dx;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    out.report.iterations = iter;
    const BlockTridiagonal sys = linearize_graph(graph, out.values);
    for (;;) {
      if (!solve_damped(sys, mu, dx)) {
        mu *= cfg.damping_up;
        if (mu > cfg.max_damping) {
          out.report.reason = Termination::kDampingExhausted;
          return out;
        }
        continue;
      }
      double step2 = 0.0;
      for (const auto& d : dx) step2 += d.squaredNorm();
      if (std::sqrt(step2) < cfg.param_tolerance) {
        out.report.reason = Termination::kStepConverged;
        return out;
      }

      std::vector<JointState> cand(out.values.states());
      for (std::size_t i = 0; i < cand.size(); ++i) cand[i] = retract(cand[i], dx[i]);
      Values next(out.values.first_key(), std::move(cand));
      const double new_cost = total_cost(graph, next);
      if (std::isfinite(new_cost) && new_cost < cost) {
        const double rel = (cost - new_cost) / std::max(cost, std::numeric_limits<double>::min());
        out.values = std::move(next);
        cost = new_cost;
        out.report.final_cost = cost;
        mu = std::max(mu / cfg.damping_down, 1e-15);
        if (rel < cfg.cost_tolerance) {
          out.report.reason = Termination::kCostConverged;
          return out;
        }
        break;
      }
      // Rejected. If even the model promises no meaningful decrease, the
      // current point is already optimal to within the tolerance.
      if (model_decrease(sys, dx) <= cfg.cost_tolerance * cost) {
        out.report.reason = Termination::kCostConverged;
        return out;
      }
      mu *= cfg.damping_up;
      if (mu > cfg.max_damping) {
        out.report.reason = Termination::kDampingExhausted;
        return out;
      }
    }
  }
  out.report.reason = Termination::kMaxIterations;
  return out;
}

namespace {

// Cholesky of a symmetric block that should be positive definite, computed
// on the unit-diagonal (Jacobi scaled) matrix. Information blocks mix scales
// over many decades; round-off can push them just past semi-definiteness, so
// a small jitter on the scaled matrix is tried before giving up.
class ScaledCholesky {
 public:
  ScaledCholesky(const JointMatrix& M, const char* what) {
    const JointMatrix S = 0.5 * (M + M.transpose());
    for (int i = 0; i < err::kJointDim; ++i) {
      if (!(S(i, i) > 0.0)) throw std::runtime_error(std::string("marginalize: ") + what + " is not positive definite");
    }
    d_ = S.diagonal().cwiseSqrt().cwiseInverse();
    const JointMatrix A = d_.asDiagonal() * S * d_.asDiagonal();
    llt_.compute(A);
    for (double eps = 1e-12; llt_.info() != Eigen::Success; eps *= 10.0) {
      if (eps > 1e-6) throw std::runtime_error(std::string("marginalize: ") + what + " is not positive definite");
      llt_.compute(A + eps * JointMatrix::Identity());
    }
  }

  template <typename Rhs>
  Rhs solve(const Rhs& b) const {
    return d_.asDiagonal() * llt_.solve(d_.asDiagonal() * b);
  }
  /// U with M = U^T U.
  JointMatrix matrixU() const {
    return JointMatrix(llt_.matrixU()) * d_.cwiseInverse().asDiagonal();
  }

 private:
  JointErrorVector d_;
  Eigen::LLT<JointMatrix> llt_;
};

}  // namespace

void marginalize(FactorGraph& graph, Values& values, int new_first) {
  const int old_first = values.first_key();
  const int m = new_first - old_first;
  if (m <= 0) return;
  if (new_first > values.last_key()) throw std::invalid_argument("marginalize: cannot remove every node");

  BlockTridiagonal sys(static_cast<std::size_t>(m) + 1);
  std::vector<Factor> kept;
  kept.reserve(graph.size());
  for (auto& f : graph.factors()) {
    if (keys_of(f).first < new_first) {
      sys.accumulate(linearize(f, values), old_first);
    } else {
      kept.push_back(std::move(f));
    }
  }

  // Forward Schur elimination along the chain.
  JointMatrix S = sys.diag[0];
  JointErrorVector c = sys.g[0];
  for (int i = 0; i < m; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const ScaledCholesky llt(S, "eliminated block");
    const JointMatrix W = llt.solve(JointMatrix(sys.upper[ii]));
    const JointErrorVector w = llt.solve(c);
    S = sys.diag[ii + 1] - sys.upper[ii].transpose() * W;
    c = sys.g[ii + 1] - sys.upper[ii].transpose() * w;
  }
  const ScaledCholesky llt(S, "marginal information");

  PriorFactor prior;
  prior.key = new_first;
  prior.mean = values.at(new_first);
  prior.offset = -llt.solve(c);
  prior.sqrt_info = llt.matrixU();

  graph.factors().clear();
  graph.add(std::move(prior));
  for (auto& f : kept) graph.add(std::move(f));
  values.drop_front(m);
}

}  // namespace pednav
