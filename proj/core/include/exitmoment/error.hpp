#pragma once

#include <stdexcept>
#include <string>

namespace exitmoment {

/// Exception carrying the name of the module that raised it. what() is
/// prefixed with "[module] " so messages can be surfaced unchanged by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error("[" + module + "] " + message),
        module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace exitmoment
