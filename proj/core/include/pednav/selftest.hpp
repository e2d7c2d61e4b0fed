#pragma once

#include <string>
#include <vector>

namespace pednav {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;

  bool passed() const;
};

/// Fast consistency checks of the numerical core (a few seconds): penalty
/// values and gradients, preintegration against strapdown, projection, a
/// short end-to-end run of both estimators.
SelftestReport run_selftest();

}  // namespace pednav
