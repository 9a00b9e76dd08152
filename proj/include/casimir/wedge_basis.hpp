#ifndef CASIMIR_WEDGE_BASIS_HPP
#define CASIMIR_WEDGE_BASIS_HPP

// The half-plane as a wedge of zero opening angle. Channels carry a
// continuous imaginary angular momentum lambda >= 0 and the T-matrix is
// diagonal, T = -/+ 1/cosh(lambda pi) for Dirichlet/Neumann.
//
// With k_x = q sinh t the translation kernel between the two edges becomes
//   U(lambda, lambda') = 2 int dt cosh(lambda(it + theta))
//                                cosh(lambda'(it + theta_bar)) exp(-q d_y cosh t)
// (sinh for Neumann). Each continuous index carries the measure dlambda/2pi,
// and the return trip is the transpose of the outgoing kernel, so
//   N = T U T U^T  ~  B B^T,  B = S U S,  S = sqrt(w / (2 pi cosh(lambda pi)))
// on a Gauss-Legendre lambda grid. tr N^n is then the sum of the 2n-th powers
// of the singular values of B.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/numerics.hpp"
#include "casimir/spectral.hpp"
#include "casimir/types.hpp"

namespace casimir::wedge {

using numerics::cdouble;
inline constexpr double pi = std::numbers::pi;

inline double t_wedge(double lambda, Polarization pol) {
  require(lambda >= 0.0, "lambda >= 0");
  const double mag = 1.0 / std::cosh(lambda * pi);
  return pol == Polarization::dirichlet ? -mag : mag;
}

namespace detail {

inline cdouble angular(double lambda, double t, double theta, Polarization pol) {
  const cdouble z = lambda * cdouble(theta, t);
  return pol == Polarization::dirichlet ? std::cosh(z) : std::sinh(z);
}

}  // namespace detail

/// Translation kernel element by adaptive quadrature over t. Real because the
/// imaginary part of the integrand is odd in t.
inline double u_wedge(double lambda, double lambda_p, SpectralPoint point, double d_y, double theta,
                      double theta_bar, Polarization pol, numerics::QuadratureSpec quad = {}) {
  require(d_y > 0.0, "d_y > 0");
  require(point.q > 0.0, "q > 0");
  quad.map = numerics::DomainMap::exponential_tail;
  const double a = point.q * d_y;
  auto integrand = [&](double t) {
    const double decay = std::exp(-a * std::cosh(t));
    if (decay == 0.0) return 0.0;
    const cdouble p = detail::angular(lambda, t, theta, pol) *
                      detail::angular(lambda_p, t, theta_bar, pol);
    return 2.0 * p.real() * decay;
  };
  // Split at the origin keeps the two halves symmetric for the error model.
  auto r = numerics::integrate_decaying(integrand, {-numerics::kInf, numerics::kInf}, quad);
  if (!r.converged) throw NumericalError("u_wedge: accuracy not reached");
  return r.value;
}

/// Discretized symmetric factor B of N at one spectral point.
struct WedgeOperator {
  Eigen::MatrixXd b;

  /// Eigenvalues of N, i.e. of the positive semi-definite B B^T, ascending.
  Eigen::VectorXd spectrum() const {
    const Eigen::MatrixXd n = b * b.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(n, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseMax(0.0);
  }
};

inline WedgeOperator wedge_operator(double q, double d_y, double theta, double theta_bar,
                                    Polarization pol, const TruncationSpec& trunc) {
  require(d_y > 0.0, "d_y > 0");
  require(q > 0.0, "q > 0");
  trunc.validate();
  const auto [lam, wl] = numerics::gauss_legendre(trunc.lambda_nodes, 0.0, trunc.lambda_max);
  const int nl = trunc.lambda_nodes;

  // Trapezoid in t over the region where exp(-q d_y (cosh t - 1)) > e^-40;
  // the integrand is analytic and decays doubly exponentially.
  const double a = q * d_y;
  const double t_max = std::acosh(1.0 + 40.0 / a);
  const double h = std::min(0.05, t_max / 64.0);
  const int nt = 2 * static_cast<int>(std::ceil(t_max / h)) + 1;
  const double t0 = -h * (nt / 2);

  Eigen::MatrixXcd p1(nl, nt), p2(nl, nt);
  for (int k = 0; k < nt; ++k) {
    const double t = t0 + h * k;
    const double e = 2.0 * h * std::exp(-a * std::cosh(t));
    for (int i = 0; i < nl; ++i) {
      p1(i, k) = detail::angular(lam[i], t, theta, pol) * e;
      p2(i, k) = detail::angular(lam[i], t, theta_bar, pol);
    }
  }
  Eigen::MatrixXd u = (p1 * p2.transpose()).real();

  Eigen::VectorXd s(nl);
  for (int i = 0; i < nl; ++i) s[i] = std::sqrt(wl[i] / (2.0 * pi * std::cosh(lam[i] * pi)));
  return {s.asDiagonal() * u * s.asDiagonal()};
}

struct TraceValue {
  double value;
  /// false when doubling lambda_max changed the trace by more than the
  /// truncation tolerance.
  bool converged;
};

inline double trace_power(const Eigen::VectorXd& spectrum, int n) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) sum += std::pow(spectrum[i], n);
  return sum;
}

/// tr N^n at one spectral point, for d_x = 0.
inline TraceValue trace_n_power_wedge(const TwoHalfPlaneConfig& config, SpectralPoint point, int n,
                                      Polarization pol, const TruncationSpec& trunc = {}) {
  config.validate();
  require(config.d_x == 0.0, "d_x = 0 in the wedge basis");
  require(n >= 1, "n >= 1");
  const double value = trace_power(
      wedge_operator(point.q, config.d_y, config.theta, config.theta_bar, pol, trunc).spectrum(),
      n);
  const double check = trace_power(wedge_operator(point.q, config.d_y, config.theta,
                                                  config.theta_bar, pol, trunc.doubled())
                                       .spectrum(),
                                   n);
  const double scale = std::max(std::abs(check), 1e-300);
  return {value, std::abs(value - check) <= trunc.convergence_tol * scale};
}

/// Energies of the first n_max reflections in units hbar c L / d_y^2 (for
/// d_y in the caller's length unit), summed over both polarizations.
inline ReflectionSeries energy_reflection_series(const TwoHalfPlaneConfig& config, int n_max,
                                                 const TruncationSpec& trunc = {},
                                                 const numerics::QuadratureSpec& quad =
                                                     default_energy_quadrature()) {
  config.validate();
  require(config.d_x == 0.0, "d_x = 0 in the wedge basis");
  require(n_max >= 1, "n_max >= 1");
  trunc.validate();
  require(config.theta > 0.0 && config.theta < pi, "0 < theta < pi");
  require(config.theta_bar > 0.0 && config.theta_bar < pi, "0 < theta_bar < pi");

  auto traces = [&](double q, const TruncationSpec& tr) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_max);
    for (Polarization pol : {Polarization::dirichlet, Polarization::neumann}) {
      const Eigen::VectorXd spec =
          wedge_operator(q, config.d_y, config.theta, config.theta_bar, pol, tr).spectrum();
      for (int n = 1; n <= n_max; ++n) out[n - 1] += trace_power(spec, n) / n;
    }
    return out;
  };
  auto r = radial_integral([&](double q) -> Eigen::VectorXd { return traces(q, trunc); },
                           config.d_y, quad);

  // Truncation probe: compare the integrand against doubled lambda cutoffs at
  // a few representative points of the spectral window.
  bool truncation_ok = true;
  for (double qd : {0.05, 0.5, 2.0}) {
    const Eigen::VectorXd base = traces(qd / config.d_y, trunc);
    const Eigen::VectorXd fine = traces(qd / config.d_y, trunc.doubled());
    if ((base - fine).cwiseAbs().maxCoeff() > trunc.convergence_tol * fine.cwiseAbs().maxCoeff())
      truncation_ok = false;
  }

  std::vector<double> values(n_max), errors(n_max, r.error_estimate);
  for (int n = 0; n < n_max; ++n) values[n] = -r.value[n];
  auto series = ReflectionSeries::from_orders(std::move(values), std::move(errors));
  series.converged = r.converged && truncation_ok;
  return series;
}

namespace detail {

// Bracket of the tilted first-reflection energy; symmetric in its arguments.
inline double tilted_bracket(double th, double tb) {
  if (std::abs(th - tb) < 1e-4) {
    const double m = 0.5 * (th + tb);
    const double csc2 = 1.0 / (std::sin(m) * std::sin(m));
    return 8.0 / 3.0 + 8.0 * csc2 - 8.0 * m * (std::cos(m) / std::sin(m)) * csc2;
  }
  const double st = std::sin(th), sb = std::sin(tb);
  return 8.0 / 3.0 + 4.0 / (st * sb) + 4.0 * (th / (st * st) - tb / (sb * sb)) / std::sin(th - tb);
}

// x - sin x without cancellation for small x.
inline double x_minus_sin(double x) {
  if (std::abs(x) > 0.5) return x - std::sin(x);
  double term = x * x * x / 6.0, sum = 0.0;
  for (int k = 1; k < 12; ++k) {
    sum += term;
    term *= -x * x / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
  }
  return sum;
}

// (2 theta - sin 2 theta) / sin^3 theta, continuous at 0 with value 4/3.
inline double edge_ratio(double theta) {
  if (std::abs(theta) < 1e-4) return 4.0 / 3.0 + 0.4 * theta * theta;
  const double s = std::sin(theta);
  return x_minus_sin(2.0 * theta) / (s * s * s);
}

}  // namespace detail

/// First-reflection energy of two tilted half-planes at d_x = 0.
inline EnergyResult energy_first_reflection_tilted(double d_y, double theta, double theta_bar) {
  require(d_y > 0.0, "d_y > 0");
  require(theta > 0.0 && theta < pi, "0 < theta < pi");
  require(theta_bar > 0.0 && theta_bar < pi, "0 < theta_bar < pi");
  const double value = -detail::tilted_bracket(theta, theta_bar) / (64.0 * pi * pi * pi * d_y * d_y);
  return {value, 0.0, Method::reflection(1), true, std::nullopt};
}

/// First-reflection energy of two parallel half-planes (theta = theta_bar =
/// pi/2) with signed horizontal displacement d_x.
inline double overlap_bracket(double r) {
  return 1.0 / (1.0 + r * r) + 3.0 * (1.0 + r * std::atan2(1.0, -r));
}

/// d(overlap_bracket)/dr.
inline double overlap_bracket_slope(double r) {
  const double s = 1.0 + r * r;
  return -2.0 * r / (s * s) + 3.0 * std::atan2(1.0, -r) + 3.0 * r / s;
}

inline EnergyResult energy_first_reflection_overlap(double d_x, double d_y) {
  require(d_y > 0.0, "d_y > 0");
  require(std::isfinite(d_x), "d_x finite");
  const double value = -overlap_bracket(d_x / d_y) / (24.0 * pi * pi * pi * d_y * d_y);
  return {value, 0.0, Method::reflection(1), true, std::nullopt};
}

/// The two terms of the two-reflection energy of a half-plane opposite an
/// infinite plane: {one reflection, two reflections}.
struct EdgeTerms {
  double first;
  double second;
};

inline EdgeTerms two_reflection_edge_terms(double d, double theta) {
  require(d > 0.0, "d > 0");
  require(theta >= 0.0 && theta < pi / 2, "0 <= theta < pi/2");
  const double sec = 1.0 / std::cos(theta);
  const double first = -sec / (16.0 * pi * pi * d * d);
  const double second = -(4.0 / 3.0 + detail::edge_ratio(theta) * sec) / (256.0 * pi * pi * pi * d * d);
  return {first, second};
}

inline EnergyResult energy_two_reflection_edge(double d, double theta) {
  const EdgeTerms e = two_reflection_edge_terms(d, theta);
  return {e.first + e.second, 0.0, Method::two_reflection(), true, std::nullopt};
}

/// c(theta) = -E cos(theta) d^2 of the two-reflection energy, continuous
/// through theta = pi/2 where it equals 17/(256 pi^2).
inline double two_reflection_c(double theta) {
  require(theta >= 0.0 && theta <= pi / 2, "0 <= theta <= pi/2");
  const double c = theta == pi / 2 ? 0.0 : std::cos(theta);
  return 1.0 / (16.0 * pi * pi) + (4.0 / 3.0 * c + detail::edge_ratio(theta)) / (256.0 * pi * pi * pi);
}

}  // namespace casimir::wedge

#endif  // CASIMIR_WEDGE_BASIS_HPP
