#pragma once

#include <stdexcept>
#include <string>

namespace roelab {

/// Precondition or argument outside the operation's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or out-of-tolerance input data (parse errors, non-unitary matrices).
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method ran out of iterations. Carries the best bracket found.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double lower, double upper)
      : std::runtime_error(what), lower_(lower), upper_(upper) {}

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double lower_;
  double upper_;
};

/// Something that is mathematically guaranteed did not happen.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A lemma's hypothesis could not be certified numerically.
class UncertifiedHypothesis : public std::runtime_error {
 public:
  UncertifiedHypothesis(const std::string& bound_name, double value, double limit)
      : std::runtime_error("uncertified hypothesis: " + bound_name + " = " +
                           std::to_string(value) + " exceeds " + std::to_string(limit)),
        bound_name_(bound_name),
        value_(value),
        limit_(limit) {}

  const std::string& bound_name() const noexcept { return bound_name_; }
  double value() const noexcept { return value_; }
  double limit() const noexcept { return limit_; }

 private:
  std::string bound_name_;
  double value_;
  double limit_;
};

/// A certified hypothesis held but the stated conclusion failed.
class ConclusionViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace roelab
