#ifndef CASIMIR_THERMAL_HPP
#define CASIMIR_THERMAL_HPP

// First-reflection free energy of a half-plane opposite a plane at finite
// temperature. Frequencies are the Matsubara values kappa_n = n / lambda_T
// with lambda_T = hbar c / (2 pi k_B T); the n = 0 term carries weight 1/2.
// Every quantity is returned in units hbar c L / d^2 with x = d / lambda_T.
//
// Per polarization the (k_x, k_z) integral splits into a 1/cos(theta) part,
//   int dk_x dk_z e^{-2dR}/R = pi e^{-2 d kappa} / d,
// and a +/- part, which after polar coordinates and the substitution
// R = kappa t becomes
//   int dk_x dk_z e^{-2dR} sqrt(kappa^2 + k_z^2)/R^2
//       = 4 kappa int_1^inf dt e^{-2 d kappa t} E(1 - 1/t^2),
// tending to 2/d as kappa -> 0. Dirichlet takes the upper sign.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/numerics.hpp"
#include "casimir/types.hpp"

namespace casimir::thermal {

inline constexpr double pi = std::numbers::pi;

struct ThermalConfig {
  /// d / lambda_T.
  double ratio = 1.0;
  /// Upper bound on the number of Matsubara terms in direct sums.
  int n_max = 100000;

  void validate() const {
    require(std::isfinite(ratio) && ratio > 0.0, "ratio > 0");
    require(n_max >= 1, "n_max >= 1");
  }
};

struct ThermalResult {
  double value = 0.0;
  /// Matsubara terms summed (0 for closed forms).
  int terms = 0;
  /// false when n_max was reached before the terms fell below 1e-12 of the sum.
  bool converged = true;
};

/// Relative size of the last Matsubara term at which a direct sum stops.
inline constexpr double kSumTolerance = 1e-12;

namespace detail {

inline double polarization_sign(Polarization pol) { return pol == Polarization::dirichlet ? 1.0 : -1.0; }

// The +/- part of the inner integral at kappa > 0, with s = 2 d kappa (t - 1).
inline double signed_part(double d, double kappa) {
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-300;
  const double a = 2.0 * d * kappa;
  auto f = [a](double s) {
    const double t = 1.0 + s / a;
    return std::exp(-s) * numerics::elliptic_e(1.0 - 1.0 / (t * t));
  };
  const auto r = numerics::integrate_decaying(f, {0.0, numerics::kInf}, spec);
  return 2.0 / d * std::exp(-a) * r.value;
}

// Shared prefactor of every Matsubara term: -(k_B T / hbar c)(1/2pi)(1/4pi).
inline double prefactor(double lambda_t) { return -1.0 / (2.0 * pi * lambda_t) / (8.0 * pi * pi); }

}  // namespace detail

/// Direct Matsubara sum of the single-polarization first-reflection free
/// energy, stopped once a term falls below kSumTolerance of the running sum.
inline ThermalResult matsubara_free_energy(const HalfPlaneVsPlaneConfig& config, const ThermalConfig& thermal,
                                           Polarization pol) {
  config.validate();
  thermal.validate();
  const double d = config.d;
  const double lambda_t = d / thermal.ratio;
  const double sec = 1.0 / std::cos(config.theta);
  const double sign = detail::polarization_sign(pol);
  ThermalResult out;
  double sum = 0.5 * (sec * pi / d + sign * 2.0 / d);
  out.converged = false;
  for (int n = 1; n <= thermal.n_max; ++n) {
    const double kappa = n / lambda_t;
    const double term = sec * pi * std::exp(-2.0 * d * kappa) / d + sign * detail::signed_part(d, kappa);
    sum += term;
    out.terms = n + 1;
    if (std::abs(term) <= kSumTolerance * std::abs(sum)) {
      out.converged = true;
      break;
    }
  }
  out.value = detail::prefactor(lambda_t) * sum;
  return out;
}

/// Direct Matsubara sum of the electromagnetic free energy (both
/// polarizations), where the +/- parts cancel term by term.
inline ThermalResult matsubara_free_energy_em(const HalfPlaneVsPlaneConfig& config, const ThermalConfig& thermal) {
  config.validate();
  thermal.validate();
  const double d = config.d;
  const double lambda_t = d / thermal.ratio;
  const double sec = 1.0 / std::cos(config.theta);
  ThermalResult out;
  double sum = 0.5 * 2.0 * sec * pi / d;
  out.converged = false;
  for (int n = 1; n <= thermal.n_max; ++n) {
    const double term = 2.0 * sec * pi * std::exp(-2.0 * d * n / lambda_t) / d;
    sum += term;
    out.terms = n + 1;
    if (term <= kSumTolerance * sum) {
      out.converged = true;
      break;
    }
  }
  out.value = detail::prefactor(lambda_t) * sum;
  return out;
}

/// Electromagnetic closed form -sec(theta) coth(x) / (16 pi^2 lambda_T d).
/// Each polarization contributes half; T -> 0 recovers -sec(theta)/(16 pi^2 d^2).
inline double em_free_energy_closed(const HalfPlaneVsPlaneConfig& config, const ThermalConfig& thermal) {
  config.validate();
  thermal.validate();
  const double x = thermal.ratio;
  const double d = config.d;
  return -x / (std::tanh(x) * std::cos(config.theta) * 16.0 * pi * pi * d * d);
}

/// The +/- (scalar-only) part of the single-polarization free energy,
///   -/+ (x / (16 pi^3 d^2)) [1 + x int_1^inf dt csch^2(x t) E(1 - t^2) / t],
/// with E(1 - t^2)/t = E(1 - 1/t^2) and the integral taken in u = x t.
inline double scalar_free_energy_elliptic(double d, const ThermalConfig& thermal, Polarization pol) {
  require(std::isfinite(d) && d > 0.0, "d > 0");
  thermal.validate();
  const double x = thermal.ratio;
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-300;
  auto f = [x](double u) {
    const double s = std::sinh(u);
    return numerics::elliptic_e(1.0 - (x * x) / (u * u)) / (s * s);
  };
  // int_1^inf dt csch^2(xt) E(1-1/t^2) = (1/x) int_x^inf du csch^2(u) E(1 - x^2/u^2).
  const auto r = numerics::integrate_decaying(f, {x, numerics::kInf}, spec);
  const double bracket = 1.0 + r.value;
  return -detail::polarization_sign(pol) * x / (16.0 * pi * pi * pi * d * d) * bracket;
}

/// Zero-temperature limit of scalar_free_energy_elliptic, -/+ 1/(128 pi d^2).
inline double scalar_zero_temperature(double d, Polarization pol) {
  require(std::isfinite(d) && d > 0.0, "d > 0");
  return -detail::polarization_sign(pol) / (128.0 * pi * d * d);
}

struct LowTemperatureReport {
  /// F_em(x) / F_em(0) fitted to c0 + c2 x^2 + c4 x^4.
  double c0 = 0.0, c2 = 0.0, c4 = 0.0;
  double em_residual_rms = 0.0;
  /// Dirichlet +/- part fitted to F(0) + a x^2 + x^3 (g0 + g1 ln x).
  double scalar_a = 0.0;
  double g_intercept = 0.0, g_slope = 0.0;
  /// Pearson correlation of G(x) = [F - F(0) - a x^2]/x^3 with ln x.
  double g_correlation = 0.0;
  std::vector<double> ratios;
  std::vector<double> g_values;
  bool flagged = false;
};

namespace detail {

inline Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, bool& flagged) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < a.cols()) flagged = true;
  const Eigen::VectorXd r = qr.matrixR().diagonal().cwiseAbs();
  if (r.minCoeff() < 1e-13 * r.maxCoeff()) flagged = true;
  return qr.solve(b);
}

}  // namespace detail

/// Low-temperature expansion check at theta = 0. The electromagnetic free
/// energy comes from the direct Matsubara sum; the scalar channel from the
/// elliptic representation.
inline LowTemperatureReport low_temperature_fit(double d, const std::vector<double>& ratios) {
  require(std::isfinite(d) && d > 0.0, "d > 0");
  require(ratios.size() >= 4, "at least 4 ratios");
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    require(ratios[i] > 0.0 && ratios[i] <= 0.3, "ratios within (0, 0.3]");
    if (i > 0) require(ratios[i] < ratios[i - 1], "ratios decreasing");
  }
  const int n = static_cast<int>(ratios.size());
  const HalfPlaneVsPlaneConfig config{d, 0.0};
  const double f0 = -1.0 / (16.0 * pi * pi * d * d);
  const double s0 = scalar_zero_temperature(d, Polarization::dirichlet);

  LowTemperatureReport rep;
  rep.ratios = ratios;
  Eigen::MatrixXd a(n, 3), b(n, 3);
  Eigen::VectorXd ye(n), ys(n);
  for (int i = 0; i < n; ++i) {
    const double x = ratios[i];
    const ThermalResult em = matsubara_free_energy_em(config, {x, 100000});
    if (!em.converged) rep.flagged = true;
    ye[i] = em.value / f0;
    a.row(i) << 1.0, x * x, x * x * x * x;
    ys[i] = scalar_free_energy_elliptic(d, {x, 1}, Polarization::dirichlet) - s0;
    b.row(i) << x * x, x * x * x, x * x * x * std::log(x);
  }
  const Eigen::VectorXd ce = detail::least_squares(a, ye, rep.flagged);
  rep.c0 = ce[0];
  rep.c2 = ce[1];
  rep.c4 = ce[2];
  rep.em_residual_rms = std::sqrt((a * ce - ye).squaredNorm() / n);

  const Eigen::VectorXd cs = detail::least_squares(b, ys, rep.flagged);
  rep.scalar_a = cs[0];
  rep.g_intercept = cs[1];
  rep.g_slope = cs[2];

  Eigen::VectorXd g(n), lx(n);
  for (int i = 0; i < n; ++i) {
    const double x = ratios[i];
    g[i] = (ys[i] - rep.scalar_a * x * x) / (x * x * x);
    lx[i] = std::log(x);
  }
  rep.g_values.assign(g.data(), g.data() + n);
  const Eigen::VectorXd gc = g.array() - g.mean();
  const Eigen::VectorXd lc = lx.array() - lx.mean();
  const double denom = gc.norm() * lc.norm();
  if (denom == 0.0) rep.flagged = true;
  rep.g_correlation = denom > 0.0 ? gc.dot(lc) / denom : 0.0;
  return rep;
}

}  // namespace casimir::thermal

#endif  // CASIMIR_THERMAL_HPP
