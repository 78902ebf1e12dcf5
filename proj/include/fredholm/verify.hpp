#pragma once

// Built-in property suites run by `fredholm verify`.

#include "fredholm/config.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fredholm {

struct PropertyResult {
  std::string suite;
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

struct VerifyReport {
  std::vector<PropertyResult> rows;
  bool pass = true;

  std::string table() const;
};

struct VerifyOptions {
  std::string suite = "all";  // spectrum | bounds | nonlinear | nemytskii | all
  std::uint64_t seed = 0;
  std::optional<double> tol;  // overrides the residual tolerance
  int trials = 20;
};

// Throws InvalidArgument for an unknown suite name.
VerifyReport run_verify(const Problem& problem, const VerifyOptions& options);

}  // namespace fredholm
