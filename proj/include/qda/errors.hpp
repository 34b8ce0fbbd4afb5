#pragma once

#include <stdexcept>
#include <string>

namespace qda {

enum class ErrorKind {
  invalid_input,
  unsupported_d,
  generator_not_found,
  not_coprime,
  no_solution,
  representation_not_found,
  precision_exhausted,
  budget_exhausted,
  truncation_insufficient,
  ill_conditioned,
  order_violation,
  too_many_primes,
  non_conformant,
  inverse_nonexistent,
  certificate_invalid,
  non_positive_partial,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::invalid_input, what);
}

}  // namespace qda
