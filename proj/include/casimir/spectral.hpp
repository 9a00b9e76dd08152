#ifndef CASIMIR_SPECTRAL_HPP
#define CASIMIR_SPECTRAL_HPP

// The energy integrand depends on (kappa, k_z) only through
// q = sqrt(kappa^2 + k_z^2), so int dkappa/2pi int dk_z/2pi over the half
// plane kappa > 0 reduces to (1/4pi) int_0^inf q dq.

#include <cmath>
#include <numbers>
#include <type_traits>
#include <vector>

#include "casimir/numerics.hpp"

namespace casimir {

/// Window of dimensionless q*length kept by the radial integral. Below the
/// lower edge the integrand is O(q^2 log q); above the upper edge every kernel
/// carries at least exp(-2 q length).
inline constexpr double kRadialLow = 1e-4;
inline constexpr double kRadialHigh = 30.0;

/// Quadrature used for spectral integrals of energies unless overridden.
inline numerics::QuadratureSpec default_energy_quadrature() {
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-7;
  spec.abs_tol = 1e-13;
  spec.max_refinements = 200;
  spec.parallel_nodes = true;
  return spec;
}

/// (1/4pi) int_0^inf q f(q) dq with the substitution q = exp(u) / length.
/// f receives q in inverse units of `length`.
template <class F>
auto radial_integral(F&& f, double length, const numerics::QuadratureSpec& spec) {
  const double lo = std::log(kRadialLow);
  const double hi = std::log(kRadialHigh);
  const std::vector<double> breaks = {lo, -5.0, -2.5, -1.0, 0.0, 1.0, hi};
  auto integrand = [&](double u) -> std::decay_t<decltype(f(1.0))> {
    const double q = std::exp(u) / length;
    return f(q) * (q * q);
  };
  auto r = numerics::integrate_panels(integrand, breaks, spec);
  r.value = r.value * (1.0 / (4.0 * std::numbers::pi));
  r.error_estimate /= 4.0 * std::numbers::pi;
  return r;
}

}  // namespace casimir

#endif  // CASIMIR_SPECTRAL_HPP
