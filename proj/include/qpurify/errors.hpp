#ifndef QPURIFY_ERRORS_HPP
#define QPURIFY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qpurify {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Algebra basis is not numerically closed under products.
struct ClosureViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Random-element spectra stayed degenerate after the retry budget.
struct DegeneracyRetryExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MaxRejectsExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonGaussianInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Requested problem size exceeds the dense desk-scale budget.
struct BudgetExceeded : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace qpurify

#endif
