#pragma once

#include <stdexcept>
#include <string>

namespace mevsim {

struct EmptyInput : std::invalid_argument {
  explicit EmptyInput(const std::string& what) : std::invalid_argument(what) {}
};

/// No bid was eligible at the requested baseline time.
struct NoBaselineBid : std::runtime_error {
  explicit NoBaselineBid(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mevsim
