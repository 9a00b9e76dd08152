#ifndef CASIMIR_OBSERVABLES_HPP
#define CASIMIR_OBSERVABLES_HPP

// Physics outputs assembled from the wedge and parabolic engines: energy
// curves for overlapping half-planes, the proximity-force baseline, asymptote
// fits, lateral forces, the tilt coefficient c(theta) of a half-plane facing
// a plane, and its slope c_edge at the parallel configuration.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/numerics.hpp"
#include "casimir/parabolic_basis.hpp"
#include "casimir/parallel.hpp"
#include "casimir/spectral.hpp"
#include "casimir/types.hpp"
#include "casimir/wedge_basis.hpp"

namespace casimir {

namespace obs_detail {
inline constexpr double pi = std::numbers::pi;
}

/// Controls shared by every engine-backed observable.
struct EngineOptions {
  TruncationSpec truncation{};
  numerics::QuadratureSpec quadrature = default_energy_quadrature();
  /// Exact energies are recomputed with doubled cutoffs to certify convergence.
  bool verify = true;
};

/// Proximity-force energy of the overlap region, -pi^2 d_x / (720 d_y^3).
inline EnergyResult pfa_energy(double d_x, double d_y) {
  require(std::isfinite(d_y) && d_y > 0.0, "d_y > 0");
  require(std::isfinite(d_x) && d_x > 0.0, "d_x > 0 for the proximity-force estimate");
  const double value = -obs_detail::pi * obs_detail::pi * d_x / (720.0 * d_y * d_y * d_y);
  return {value, 0.0, Method::pfa(), true, std::nullopt};
}

/// Energy of two parallel half-planes (theta = theta_bar = pi/2) at a single
/// displacement with the requested engine.
inline EnergyResult overlap_energy(double d_x, double d_y, Method method, const EngineOptions& opts = {}) {
  const TwoHalfPlaneConfig config{d_x, d_y, std::numbers::pi / 2, std::numbers::pi / 2};
  config.validate();
  switch (method.kind) {
    case MethodKind::exact_parabolic:
      return parabolic::exact_energy(config, opts.truncation, opts.quadrature,
                                     parabolic::ExactOptions{opts.verify});
    case MethodKind::pfa:
      return pfa_energy(d_x, d_y);
    case MethodKind::closed_form:
      return wedge::energy_first_reflection_overlap(d_x, d_y);
    case MethodKind::reflection: {
      if (method.order == 1) return wedge::energy_first_reflection_overlap(d_x, d_y);
      const ReflectionSeries s =
          parabolic::reflection_series(config, method.order, opts.truncation, opts.quadrature);
      double err = 0.0;
      for (double e : s.error_estimates) err += e;
      return {s.partial_sums.back(), err, method, s.converged, opts.truncation};
    }
    case MethodKind::two_reflection:
      break;
  }
  throw DomainError("method is exact, reflection:N, pfa or closed-form");
}

struct CurveRow {
  double abscissa = 0.0;
  double energy = 0.0;
  double error = 0.0;
  std::string method;
  bool converged = false;
  /// Set when the row could not be computed; energy is then NaN.
  std::optional<std::string> failure;
};

struct CurveTable {
  std::vector<CurveRow> rows;
  std::string x_label;
  std::string y_label;

  bool all_ok() const {
    for (const auto& r : rows)
      if (r.failure || !r.converged) return false;
    return true;
  }
};

/// Evaluates fn(x) for every abscissa on the worker pool. A row whose
/// evaluation throws is recorded as failed instead of aborting the table.
template <class Fn>
CurveTable tabulate(const std::vector<double>& abscissae, const std::string& tag, Fn&& fn) {
  for (std::size_t i = 1; i < abscissae.size(); ++i)
    require(abscissae[i] > abscissae[i - 1], "abscissae strictly increasing");
  CurveTable table;
  table.rows = parallel_map(abscissae.size(), [&](std::size_t i) {
    CurveRow row;
    row.abscissa = abscissae[i];
    row.method = tag;
    try {
      const EnergyResult r = fn(abscissae[i]);
      row.energy = r.value;
      row.error = r.error_estimate;
      row.converged = r.converged;
    } catch (const std::exception& e) {
      row.energy = std::numeric_limits<double>::quiet_NaN();
      row.failure = e.what();
    }
    return row;
  });
  return table;
}

/// Energy of two parallel half-planes against d_x/d_y. Energies are in units
/// hbar c L / d_y^2 scaled by the caller's d_y, i.e. the physical value.
inline CurveTable overlap_curve(double d_y, const std::vector<double>& abscissae, Method method,
                                const EngineOptions& opts = {}) {
  require(std::isfinite(d_y) && d_y > 0.0, "d_y > 0");
  CurveTable t = tabulate(abscissae, method.tag(),
                          [&](double r) { return overlap_energy(r * d_y, d_y, method, opts); });
  t.x_label = "d_x/d_y";
  t.y_label = "E/(hbar c L)";
  return t;
}

struct AsymptoteFit {
  double slope = 0.0;
  double intercept = 0.0;
  numerics::Interval window{};
  double residual_rms = 0.0;
  int points = 0;
};

/// Least-squares line through the successful rows inside window.
inline AsymptoteFit asymptote_fit(const CurveTable& table, numerics::Interval window = {3.0, 6.0}) {
  require(window.lo < window.hi, "window lo < hi");
  std::vector<double> xs, ys;
  for (const auto& r : table.rows) {
    if (r.failure || r.abscissa < window.lo || r.abscissa > window.hi) continue;
    xs.push_back(r.abscissa);
    ys.push_back(r.energy);
  }
  require(xs.size() >= 4, "at least 4 rows inside the fit window");
  const int n = static_cast<int>(xs.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    a(i, 0) = xs[i];
    a(i, 1) = 1.0;
    b[i] = ys[i];
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd res = a * c - b;
  return {c[0], c[1], window, std::sqrt(res.squaredNorm() / n), n};
}

struct ForceResult {
  double value = 0.0;
  double error_estimate = 0.0;
  Method method;
  bool converged = true;
};

namespace obs_detail {

// Central differences of log det(1 - N) in d_x at steps h and h/2, evaluated
// with the channel count of the central configuration so the truncation does
// not jump between the shifted geometries.
inline Eigen::Vector2d logdet_slopes(const TwoHalfPlaneConfig& c, double q, double h,
                                     const TruncationSpec& trunc) {
  const int nu = parabolic::channel_count(q * c.d_y, parabolic::reach_of(c), trunc);
  auto at = [&](double shift) {
    TwoHalfPlaneConfig s = c;
    s.d_x += shift;
    return parabolic::checked_real(parabolic::log_det_one_minus(parabolic::blocks_of(s, q, nu)));
  };
  return {(at(h) - at(-h)) / (2.0 * h), (at(0.5 * h) - at(-0.5 * h)) / h};
}

}  // namespace obs_detail

/// Lateral force F_x = -dE/dd_x per unit length.
///
/// reflection:1 and pfa are differentiated analytically (parallel half-planes
/// only). exact uses central differences with step 1e-3 d_y and h/2, combined
/// by Richardson extrapolation; both differences share the spectral quadrature.
inline ForceResult lateral_force(const TwoHalfPlaneConfig& config, Method method,
                                 const EngineOptions& opts = {}) {
  config.validate();
  using obs_detail::pi;
  const double d_y = config.d_y;
  const bool parallel = config.theta == pi / 2 && config.theta_bar == pi / 2;
  switch (method.kind) {
    case MethodKind::closed_form:
    case MethodKind::reflection:
      require(method.kind == MethodKind::closed_form || method.order == 1,
              "analytic force only at reflection:1");
      require(parallel, "theta = theta_bar = pi/2 for the analytic force");
      return {wedge::overlap_bracket_slope(config.d_x / d_y) / (24.0 * pi * pi * pi * d_y * d_y * d_y),
              0.0, method, true};
    case MethodKind::pfa:
      require(parallel, "theta = theta_bar = pi/2 for the analytic force");
      require(config.d_x > 0.0, "d_x > 0 for the proximity-force estimate");
      return {pi * pi / (720.0 * d_y * d_y * d_y), 0.0, method, true};
    case MethodKind::exact_parabolic: {
      opts.truncation.validate();
      const double h = 1e-3 * d_y;
      auto run = [&](const TruncationSpec& tr) {
        return radial_integral(
            [&](double q) -> Eigen::Vector2d { return obs_detail::logdet_slopes(config, q, h, tr); },
            d_y, opts.quadrature);
      };
      const auto r = run(opts.truncation);
      // dE/dd_x at steps h and h/2, then Richardson for the O(h^2) term.
      const double d_h = r.value[0], d_half = r.value[1];
      double force = -(4.0 * d_half - d_h) / 3.0;
      double err = std::abs(d_half - d_h) / 3.0 + r.error_estimate / h;
      bool ok = r.converged;
      if (opts.verify) {
        const auto fine = run(opts.truncation.doubled());
        const double f2 = -(4.0 * fine.value[1] - fine.value[0]) / 3.0;
        err += std::abs(f2 - force);
        ok = ok && fine.converged &&
             std::abs(f2 - force) <= opts.truncation.convergence_tol * std::abs(f2);
        force = f2;
      }
      return {force, err, method, ok};
    }
    case MethodKind::two_reflection:
      break;
  }
  throw DomainError("method is exact, reflection:1 or pfa");
}

/// Babinet consistency at first reflection: for each |d_x| = m, the force at
/// +m with its proximity-force term 1/(8 pi^2 d_y^3) removed, plus the force
/// at -m. The edge contribution at positive displacement mirrors the full
/// force at negative displacement with opposite sign, so the residual
/// vanishes up to higher powers of d_y/m.
inline std::vector<double> babinet_residual(double d_y, const std::vector<double>& magnitudes) {
  require(std::isfinite(d_y) && d_y > 0.0, "d_y > 0");
  using obs_detail::pi;
  std::vector<double> out;
  out.reserve(magnitudes.size());
  const double lead = 1.0 / (8.0 * pi * pi * d_y * d_y * d_y);
  for (double m : magnitudes) {
    require(std::isfinite(m) && m > 0.0, "|d_x| > 0");
    const double plus = lateral_force({m, d_y, pi / 2, pi / 2}, Method::reflection(1)).value;
    const double minus = lateral_force({-m, d_y, pi / 2, pi / 2}, Method::reflection(1)).value;
    out.push_back((plus - lead) + minus);
  }
  return out;
}

struct CoefficientResult {
  double value = 0.0;
  double error_estimate = 0.0;
  Method method;
  bool converged = true;
};

/// Offset from pi/2 of the two tilts used to extrapolate the exact c(theta)
/// to the parallel configuration, where the energy per length diverges.
inline constexpr double kParallelProbe = 0.1;

/// c(theta) = -E cos(theta) d^2 for a half-plane at distance d from a plane.
///
/// two-reflection is the closed form; reflection:1 is 1/(16 pi^2) at every
/// angle; reflection:N (N >= 2) sums the parabolic reflection series. exact
/// evaluates the full determinant for theta < pi/2 and at theta = pi/2
/// extrapolates linearly from pi/2 - kParallelProbe/2 and pi/2 - kParallelProbe.
inline CoefficientResult c_of_theta(double theta, Method method, const EngineOptions& opts = {}) {
  using obs_detail::pi;
  require(theta >= 0.0 && theta <= pi / 2, "0 <= theta <= pi/2");
  switch (method.kind) {
    case MethodKind::two_reflection:
    case MethodKind::closed_form:
      return {wedge::two_reflection_c(theta), 0.0, method, true};
    case MethodKind::reflection: {
      if (method.order == 1) return {1.0 / (16.0 * pi * pi), 0.0, method, true};
      require(theta < pi / 2, "theta < pi/2 for a reflection series");
      const ReflectionSeries s = parabolic::reflection_series(HalfPlaneVsPlaneConfig{1.0, theta},
                                                              method.order, opts.truncation,
                                                              opts.quadrature);
      double err = 0.0;
      for (double e : s.error_estimates) err += e;
      return {-s.partial_sums.back() * std::cos(theta), err * std::cos(theta), method, s.converged};
    }
    case MethodKind::exact_parabolic: {
      auto tilted = [&](double th) {
        const EnergyResult e = parabolic::exact_energy(HalfPlaneVsPlaneConfig{1.0, th}, opts.truncation,
                                                       opts.quadrature,
                                                       parabolic::ExactOptions{opts.verify});
        return CoefficientResult{-e.value * std::cos(th), e.error_estimate * std::cos(th), method,
                                 e.converged};
      };
      if (theta < pi / 2) return tilted(theta);
      const std::array<double, 2> probes = {pi / 2 - kParallelProbe, pi / 2 - 0.5 * kParallelProbe};
      const auto pts = parallel_map(2, [&](std::size_t i) { return tilted(probes[i]); });
      return {2.0 * pts[1].value - pts[0].value, 2.0 * pts[1].error_estimate + pts[0].error_estimate,
              method, pts[0].converged && pts[1].converged};
    }
    case MethodKind::pfa:
      break;
  }
  throw DomainError("method is exact, reflection:N or two-reflection");
}

/// c(theta) over a grid of tilts, one row per angle.
inline CurveTable tilt_curve(const std::vector<double>& thetas, Method method, const EngineOptions& opts = {}) {
  CurveTable t = tabulate(thetas, method.tag(), [&](double th) {
    const CoefficientResult c = c_of_theta(th, method, opts);
    return EnergyResult{c.value, c.error_estimate, c.method, c.converged, std::nullopt};
  });
  t.x_label = "theta";
  t.y_label = "c(theta)";
  return t;
}

struct EdgeCoefficient {
  double value = 0.0;  ///< Richardson-extrapolated slope of c at pi/2
  double at_h = 0.0;   ///< one-sided difference with step h
  double at_half = 0.0;
  bool converged = true;
};

/// c_edge = dc/dtheta at pi/2 from [c(pi/2) - c(pi/2 - h)]/h at steps h and
/// h/2, combined by Richardson extrapolation. Flagged when the extrapolation
/// moves the value by more than 10 percent.
inline EdgeCoefficient edge_coefficient(Method method, double h, const EngineOptions& opts = {}) {
  using obs_detail::pi;
  require(h > 0.0 && h <= 0.1, "0 < h <= 0.1");
  const double top = c_of_theta(pi / 2, method, opts).value;
  const auto lower = parallel_map(2, [&](std::size_t i) {
    return c_of_theta(pi / 2 - (i == 0 ? h : 0.5 * h), method, opts);
  });
  EdgeCoefficient out;
  out.at_h = (top - lower[0].value) / h;
  out.at_half = (top - lower[1].value) / (0.5 * h);
  out.value = 2.0 * out.at_half - out.at_h;
  out.converged = lower[0].converged && lower[1].converged &&
                  std::abs(out.value - out.at_half) <= 0.1 * std::abs(out.value);
  return out;
}

}  // namespace casimir

#endif  // CASIMIR_OBSERVABLES_HPP
