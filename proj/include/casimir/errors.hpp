#ifndef CASIMIR_ERRORS_HPP
#define CASIMIR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace casimir {

/// A precondition on the physical or numerical domain was violated.
/// The message names the invariant (e.g. "d_y > 0").
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& invariant)
      : std::domain_error(invariant), invariant_(invariant) {}
  const std::string& invariant() const noexcept { return invariant_; }

private:
  std::string invariant_;
};

/// A numerical procedure failed in a way that leaves no usable estimate
/// (non-finite integrand, singular matrix, non-real determinant, ...).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const char* invariant) {
  if (!condition) throw DomainError(invariant);
}

}  // namespace casimir

#endif  // CASIMIR_ERRORS_HPP
