#pragma once

#include <stdexcept>
#include <string>

namespace qineq {

/// Argument outside the mathematical domain of an operation (p outside the
/// knot range, nonpositive quantile in a ratio, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Violated precondition on shapes or sizes (mismatched lengths, even Simpson
/// sample counts, m < 4).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested EFLD moment does not exist (r * beta >= 1).
class InfiniteMomentError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterative routine ran out of its iteration/term budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (CSV or experiment config).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qineq
