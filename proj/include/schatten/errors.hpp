#pragma once

#include <stdexcept>
#include <string>

namespace schatten {

/// A computation that was set up correctly but did not succeed numerically
/// (no contraction, divergence, inconsistent calibration).
class NumericFailure : public std::runtime_error {
 public:
  explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace schatten
