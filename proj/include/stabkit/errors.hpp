#pragma once

#include <stdexcept>
#include <string>

namespace stabkit {

// Base of every error raised by the library. `kind()` is the stable
// machine-readable name written into CLI error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define STABKIT_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  };

STABKIT_DEFINE_ERROR(DomainError)
STABKIT_DEFINE_ERROR(NoBracket)
STABKIT_DEFINE_ERROR(NoCollision)
STABKIT_DEFINE_ERROR(DegenerateChain)
STABKIT_DEFINE_ERROR(DegenerateSurface)
STABKIT_DEFINE_ERROR(IntegrationError)
STABKIT_DEFINE_ERROR(NoBoundary)
STABKIT_DEFINE_ERROR(QuadratureError)
STABKIT_DEFINE_ERROR(NoFlutter)
STABKIT_DEFINE_ERROR(DegenerateQuadratic)

#undef STABKIT_DEFINE_ERROR

}  // namespace stabkit
