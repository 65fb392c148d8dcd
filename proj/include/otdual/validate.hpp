#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "otdual/serialize.hpp"

namespace otdual {

struct PropertyResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::string first_failure;
};

struct ValidationReport {
  std::uint64_t seed = 0;
  std::size_t instances = 0;
  std::vector<PropertyResult> properties;

  bool passed() const;
};

/// Runs the invariant suite on `instance` (when given) and on `random_count` seeded
/// random instances (half of them with tied block masses).
ValidationReport validate(const Instance* instance, std::uint64_t seed, std::size_t random_count = 100);

Json to_json(const ValidationReport& report);

}  // namespace otdual
