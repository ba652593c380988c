#pragma once

#include <stdexcept>
#include <string>

namespace evaug {

/// Single exception type for framework failures. Messages always name the
/// offending file, field, or sample id so callers can surface them verbatim.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace evaug
