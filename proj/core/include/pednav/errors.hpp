#pragma once

#include <stdexcept>

namespace pednav {

/// Raised when an estimator cannot produce a trajectory (solver failure,
/// degenerate covariance, non-finite state).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pednav
