#pragma once

#include <stdexcept>
#include <string>

namespace orthant {

// Library errors carry a stable machine-readable code (used by the CLI)
// in addition to the human-readable message.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

}  // namespace orthant
