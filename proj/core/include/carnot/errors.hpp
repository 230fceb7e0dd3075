#ifndef CARNOT_ERRORS_HPP
#define CARNOT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace carnot {

/// Malformed inputs: bad dimensions, invalid parameters, unusable regions.
class input_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A series or fit failed to reach the requested tolerance. Carries the
/// residual bound at the point the computation gave up.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// The covector is degenerate for the requested operation (nontrivial
/// stable annihilator, so the scaling-limit matrix does not exist).
class degenerate_covector_error : public input_error {
 public:
  using input_error::input_error;
};

/// Broken internal invariant; indicates a bug, not a user mistake.
class internal_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace carnot

#endif
