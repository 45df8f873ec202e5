#ifndef OCBF_ERRORS_HPP
#define OCBF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ocbf {

// Invalid or inconsistent scenario/parameter input.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The entry-trajectory solver failed for all initializations.
class NoConvergence : public std::runtime_error {
 public:
  explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Requested vehicle id does not appear in a trace.
class UnknownVehicle : public std::runtime_error {
 public:
  explicit UnknownVehicle(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ocbf

#endif  // OCBF_ERRORS_HPP
