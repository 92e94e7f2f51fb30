#pragma once

#include <stdexcept>
#include <string>

namespace superres {

enum class Hypothesis { H1, H2 };

const char* to_string(Hypothesis h);

// Parameters outside the region where an operation is defined.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved = 0.0)
      : std::runtime_error(what), achieved_error(achieved) {}
  double achieved_error;
};

}  // namespace superres
