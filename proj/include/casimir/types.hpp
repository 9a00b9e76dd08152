#ifndef CASIMIR_TYPES_HPP
#define CASIMIR_TYPES_HPP

// Geometry, truncation and result types shared by the wedge and parabolic
// engines and the observables built on them. All lengths are dimensionless
// (ratios to a reference separation) and energies are per unit length in
// units of hbar*c*L over the squared reference separation.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "casimir/errors.hpp"

namespace casimir {

enum class Polarization { dirichlet, neumann };

inline const char* to_string(Polarization p) {
  return p == Polarization::dirichlet ? "dirichlet" : "neumann";
}

/// Imaginary-frequency radial wave number q = sqrt(kappa^2 + k_z^2). The
/// kernels parameterize k_x = q sinh t, so that k_y = i q cosh t and the
/// propagation factor is exp(-q d_y cosh t).
struct SpectralPoint {
  double q;
};

struct TruncationSpec {
  /// Channel cutoff of the parabolic basis at q*d_y >= 1. Below that the
  /// retained channel count grows like nu_max/(q*d_y), up to nu_ceiling.
  int nu_max = 24;
  int nu_ceiling = 400;
  /// Cutoff of the continuous imaginary angular momentum in the wedge basis.
  double lambda_max = 40.0 / std::numbers::pi;
  /// Gauss-Legendre nodes on [0, lambda_max].
  int lambda_nodes = 200;
  /// Relative change allowed when a cutoff is doubled.
  double convergence_tol = 1e-3;

  void validate() const {
    require(nu_max >= 2, "nu_max >= 2");
    require(nu_ceiling >= nu_max, "nu_ceiling >= nu_max");
    require(lambda_max > 0.0, "lambda_max > 0");
    require(lambda_nodes >= 8, "lambda_nodes >= 8");
    require(convergence_tol > 0.0, "convergence_tol > 0");
  }

  TruncationSpec doubled() const {
    TruncationSpec t = *this;
    t.nu_max *= 2;
    t.nu_ceiling *= 2;
    t.lambda_max *= 2.0;
    t.lambda_nodes *= 2;
    return t;
  }
};

/// Two half-planes with parallel edges along z. The upper edge sits at
/// (d_x, d_y) relative to the lower one; theta and theta_bar are the tilts of
/// the upper and lower half-planes away from the y axis. For
/// theta = theta_bar = pi/2 the planes are parallel and positive d_x is the
/// width of the overlap.
struct TwoHalfPlaneConfig {
  double d_x = 0.0;
  double d_y = 1.0;
  double theta = std::numbers::pi / 2;
  double theta_bar = std::numbers::pi / 2;

  void validate() const {
    require(std::isfinite(d_x), "d_x finite");
    require(std::isfinite(d_y) && d_y > 0.0, "d_y > 0");
    require(std::isfinite(theta) && std::isfinite(theta_bar), "angles finite");
  }
};

/// A half-plane whose edge is a distance d from an infinite plane, tilted by
/// theta from the plane's normal.
struct HalfPlaneVsPlaneConfig {
  double d = 1.0;
  double theta = 0.0;

  void validate() const {
    require(std::isfinite(d) && d > 0.0, "d > 0");
    require(theta >= 0.0 && theta < std::numbers::pi / 2, "0 <= theta < pi/2");
  }
};

enum class MethodKind { exact_parabolic, reflection, pfa, closed_form, two_reflection };

/// Engine selector. `order` is only meaningful for reflection.
struct Method {
  MethodKind kind = MethodKind::exact_parabolic;
  int order = 1;

  static Method exact() { return {MethodKind::exact_parabolic, 0}; }
  static Method reflection(int n) { return {MethodKind::reflection, n}; }
  static Method pfa() { return {MethodKind::pfa, 0}; }
  static Method closed_form() { return {MethodKind::closed_form, 0}; }
  static Method two_reflection() { return {MethodKind::two_reflection, 2}; }

  std::string tag() const {
    switch (kind) {
      case MethodKind::exact_parabolic: return "exact";
      case MethodKind::reflection: return "reflection:" + std::to_string(order);
      case MethodKind::pfa: return "pfa";
      case MethodKind::closed_form: return "closed-form";
      case MethodKind::two_reflection: return "two-reflection";
    }
    return "unknown";
  }

  /// Parses exact | reflection:N | pfa | closed-form | two-reflection.
  static std::optional<Method> parse(const std::string& text) {
    if (text == "exact" || text == "exact-parabolic") return exact();
    if (text == "pfa") return pfa();
    if (text == "closed-form") return closed_form();
    if (text == "two-reflection") return two_reflection();
    const std::string prefix = "reflection:";
    if (text.rfind(prefix, 0) == 0) {
      const std::string digits = text.substr(prefix.size());
      if (digits.empty() || digits.size() > 3) return std::nullopt;
      for (char c : digits)
        if (c < '0' || c > '9') return std::nullopt;
      const int n = std::stoi(digits);
      if (n < 1) return std::nullopt;
      return reflection(n);
    }
    return std::nullopt;
  }
};

struct EnergyResult {
  double value = 0.0;
  double error_estimate = 0.0;
  Method method;
  bool converged = true;
  std::optional<TruncationSpec> truncation_used;
};

/// Per-order energies of the expansion -tr log(1 - N) = sum_n tr N^n / n.
/// orders[k] is the contribution of k+1 reflections.
struct ReflectionSeries {
  std::vector<double> orders;
  std::vector<double> partial_sums;
  std::vector<double> error_estimates;
  static constexpr int space_dimension = 3;
  bool converged = true;

  static ReflectionSeries from_orders(std::vector<double> values, std::vector<double> errors) {
    ReflectionSeries s;
    s.orders = std::move(values);
    s.error_estimates = std::move(errors);
    double acc = 0.0;
    for (double v : s.orders) s.partial_sums.push_back(acc += v);
    return s;
  }
};

}  // namespace casimir

#endif  // CASIMIR_TYPES_HPP
