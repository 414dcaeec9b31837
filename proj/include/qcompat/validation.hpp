#pragma once

// Acceptance checks against the pinned values in a golden JSON file.

#include <functional>
#include <string>
#include <vector>

namespace qcompat {

struct CheckOutcome {
  std::string name;
  bool passed;
  std::string detail;
  double seconds;
};

struct ValidationOptions {
  std::string golden_path;         // empty: the file shipped in data/
  std::vector<std::string> only;   // empty: every check
  unsigned workers = 1;
};

/// Check names in execution order.
const std::vector<std::string>& check_names();

std::string default_golden_path();

/// Runs the selected checks; `on_result` sees each outcome as soon as it is
/// known. Throws DomainError for unknown names, IoError / ParseError when the
/// golden file cannot be read.
std::vector<CheckOutcome> validate(const ValidationOptions& opts,
                                   const std::function<void(const CheckOutcome&)>& on_result = {});

}  // namespace qcompat
