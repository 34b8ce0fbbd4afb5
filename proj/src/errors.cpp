#include "qda/errors.hpp"

namespace qda {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::unsupported_d: return "unsupported-d";
    case ErrorKind::generator_not_found: return "generator-not-found";
    case ErrorKind::not_coprime: return "not-coprime";
    case ErrorKind::no_solution: return "no-solution";
    case ErrorKind::representation_not_found: return "representation-not-found";
    case ErrorKind::precision_exhausted: return "precision-exhausted";
    case ErrorKind::budget_exhausted: return "budget-exhausted";
    case ErrorKind::truncation_insufficient: return "truncation-insufficient";
    case ErrorKind::ill_conditioned: return "ill-conditioned";
    case ErrorKind::order_violation: return "order-violation";
    case ErrorKind::too_many_primes: return "too-many-primes";
    case ErrorKind::non_conformant: return "non-conformant";
    case ErrorKind::inverse_nonexistent: return "inverse-nonexistent";
    case ErrorKind::certificate_invalid: return "certificate-invalid";
    case ErrorKind::non_positive_partial: return "non-positive-partial";
  }
  return "error";
}

}  // namespace qda
