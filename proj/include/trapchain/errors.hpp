#pragma once

#include <stdexcept>
#include <string>

namespace trapchain {

// Eigensolver non-convergence, biorthogonal-norm collapse near an
// exceptional point, degenerate perturbation gaps, non-finite results.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace trapchain
