#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rodbif {

/// Mathematical-domain violation: parameter out of its admissible range,
/// evaluation point outside the rod, slope magnitude reaching 1, ...
struct domain_error : std::invalid_argument {
  explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Structural misconfiguration: bad grid size, bad resolution, bad flag value.
struct config_error : std::invalid_argument {
  explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Two sampled functions (or a function and an operator) live on different grids.
struct shape_error : std::invalid_argument {
  explicit shape_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A closed-form denominator vanished; `mode` names the offending index.
struct singular_error : std::runtime_error {
  int mode;
  singular_error(const std::string& what, int mode_) : std::runtime_error(what), mode(mode_) {}
};

/// Newton iteration failed to converge; the sup-norm residual of every
/// iterate is kept for diagnosis.
struct newton_error : std::runtime_error {
  std::vector<double> residual_history;
  newton_error(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
};

/// A winding number could not be pinned down: the reduced map passed too
/// close to zero on the sample circle, or the loop stayed under-resolved
/// after the allowed refinements.
struct degree_error : std::runtime_error {
  explicit degree_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rodbif
