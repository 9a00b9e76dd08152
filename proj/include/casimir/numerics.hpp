#ifndef CASIMIR_NUMERICS_HPP
#define CASIMIR_NUMERICS_HPP

// Basis-agnostic numerical kernels: adaptive quadrature for smooth decaying
// integrands, complex log-determinants, log-factorials, the complete elliptic
// integral of the second kind, and partial sums of zeta(4).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <utility>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/parallel.hpp"

namespace casimir::numerics {

using cdouble = std::complex<double>;

enum class DomainMap {
  linear,            ///< rational map u/(1-u) for infinite limits
  hyperbolic,        ///< x = sinh t, then exponential tails in t
  exponential_tail,  ///< unit linear panel plus x = a + 1 - ln u tail
};

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_refinements = 400;
  DomainMap map = DomainMap::exponential_tail;
  /// Evaluate the nodes of each Kronrod panel on the worker pool. Only worth it
  /// for expensive integrands.
  bool parallel_nodes = false;

  void validate() const {
    require(rel_tol > 0.0, "rel_tol > 0");
    require(abs_tol >= 0.0, "abs_tol >= 0");
    require(max_refinements >= 1, "max_refinements >= 1");
  }
};

template <class V>
struct IntegralValue {
  V value{};
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  /// false means "accuracy not reached"; value is the best estimate.
  bool converged = false;
};

/// Integration domain. Use +/-infinity for (semi-)infinite limits.
struct Interval {
  double lo;
  double hi;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double norm_inf(double v) { return std::abs(v); }
inline double norm_inf(const cdouble& v) { return std::abs(v); }
inline double norm_inf(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}
inline bool all_finite(double v) { return std::isfinite(v); }
inline bool all_finite(const cdouble& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}
inline bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights at Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Panel {
  double a, b;
  V value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class V, class G>
Panel<V> kronrod_panel(const G& g, double a, double b, bool parallel) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, 15> x{};
  for (int k = 0; k < 7; ++k) {
    x[2 * k] = c - h * kKronrodNodes[k];
    x[2 * k + 1] = c + h * kKronrodNodes[k];
  }
  x[14] = c;
  std::vector<V> fx;
  if (parallel) {
    fx = parallel_map(15, [&](std::size_t i) { return g(x[i]); });
  } else {
    fx.reserve(15);
    for (double xi : x) fx.push_back(g(xi));
  }
  for (const V& v : fx)
    if (!all_finite(v)) throw NumericalError("invalid integrand: non-finite value");
  V kron = fx[14] * kKronrodWeights[7];
  V gauss = fx[14] * kGaussWeights[3];
  for (int k = 0; k < 7; ++k) {
    const V pair = fx[2 * k] + fx[2 * k + 1];
    kron = kron + pair * kKronrodWeights[k];
    if (k % 2 == 1) gauss = gauss + pair * kGaussWeights[k / 2];
  }
  kron = kron * h;
  gauss = gauss * h;
  return {a, b, kron, norm_inf(kron - gauss)};
}

// Globally adaptive Gauss-Kronrod over a set of finite panels of a smooth
// integrand g (already mapped to finite variables).
template <class V, class G>
IntegralValue<V> adaptive(const G& g, const std::vector<std::pair<double, double>>& segments,
                          const QuadratureSpec& spec) {
  std::priority_queue<Panel<V>> heap;
  IntegralValue<V> out;
  for (auto [a, b] : segments) {
    heap.push(kronrod_panel<V>(g, a, b, spec.parallel_nodes));
    out.evaluations += 15;
  }
  auto totals = [&heap] {
    auto copy = heap;
    V sum = copy.top().value;
    double err = copy.top().error;
    copy.pop();
    while (!copy.empty()) {
      sum = sum + copy.top().value;
      err += copy.top().error;
      copy.pop();
    }
    return std::pair<V, double>(sum, err);
  };
  for (int refinement = 0;; ++refinement) {
    auto [sum, err] = totals();
    out.value = sum;
    out.error_estimate = err;
    if (err <= std::max(spec.rel_tol * norm_inf(sum), spec.abs_tol)) {
      out.converged = true;
      return out;
    }
    if (refinement >= spec.max_refinements) return out;
    Panel<V> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      return out;  // panel cannot be split further in double precision
    }
    heap.push(kronrod_panel<V>(g, worst.a, mid, spec.parallel_nodes));
    heap.push(kronrod_panel<V>(g, mid, worst.b, spec.parallel_nodes));
    out.evaluations += 30;
  }
}

}  // namespace detail

namespace detail {

// Products f(x) * dx/du where f underflowed to zero must stay zero even when
// the Jacobian overflows.
template <class V>
V weighted(const V& v, double jac) {
  if (norm_inf(v) == 0.0) return v * 0.0;
  return v * jac;
}

// Maps g on [0, inf) to a function on finite segments.
template <class V, class G>
std::pair<std::function<V(double)>, std::vector<std::pair<double, double>>> semi_infinite(
    G g, DomainMap map) {
  if (map == DomainMap::linear) {
    auto h = [g](double u) -> V {
      const double s = u / (1.0 - u);
      return weighted<V>(g(s), 1.0 / ((1.0 - u) * (1.0 - u)));
    };
    return {h, {{0.0, 1.0}}};
  }
  // Unit linear panel, then s = 1 - ln v for the tail with v = 2 - u.
  auto h = [g](double u) -> V {
    if (u < 1.0) return g(u);
    const double v = 2.0 - u;
    return weighted<V>(g(1.0 - std::log(v)), 1.0 / v);
  };
  return {h, {{0.0, 1.0}, {1.0, 2.0}}};
}

// Non-hyperbolic maps only, so template instantiation does not recurse.
template <class V, class F>
IntegralValue<V> integrate_mapped(const F& f, double lo, double hi, const QuadratureSpec& spec) {
  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  const DomainMap map =
      spec.map == DomainMap::linear ? DomainMap::linear : DomainMap::exponential_tail;
  if (!lo_inf && !hi_inf) return adaptive<V>([&](double x) -> V { return f(x); }, {{lo, hi}}, spec);
  if (lo_inf && hi_inf) {
    auto [hr, segr] = semi_infinite<V>([&](double s) -> V { return f(s); }, map);
    auto [hl, segl] = semi_infinite<V>([&](double s) -> V { return f(-s); }, map);
    // Encode the left piece on shifted segments so both share one adaptive heap.
    const double shift = 10.0;
    auto h = [&](double u) -> V { return u < shift - 1.0 ? hr(u) : hl(u - shift); };
    std::vector<std::pair<double, double>> segs = segr;
    for (auto [a, b] : segl) segs.emplace_back(a + shift, b + shift);
    return adaptive<V>(h, segs, spec);
  }
  if (hi_inf) {
    auto [h, segs] = semi_infinite<V>([&](double s) -> V { return f(lo + s); }, map);
    return adaptive<V>(h, segs, spec);
  }
  auto [h, segs] = semi_infinite<V>([&](double s) -> V { return f(hi - s); }, map);
  return adaptive<V>(h, segs, spec);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of a smooth integrand over a possibly
/// (semi-)infinite interval. Infinite limits are handled by the variable
/// substitution chosen in spec.map; the integrand must decay at least
/// exponentially there. Throws NumericalError if f returns a non-finite value.
template <class F>
auto integrate_decaying(F&& f, Interval domain, const QuadratureSpec& spec = {})
    -> IntegralValue<std::decay_t<decltype(f(0.0))>> {
  using V = std::decay_t<decltype(f(0.0))>;
  spec.validate();
  const double lo = domain.lo;
  const double hi = domain.hi;
  require(!(std::isnan(lo) || std::isnan(hi)), "interval limits are numbers");
  require(lo < hi, "interval lo < hi");
  if (spec.map != DomainMap::hyperbolic || (std::isfinite(lo) && std::isfinite(hi)))
    return detail::integrate_mapped<V>(f, lo, hi, spec);

  // x = x0 +/- sinh(t); the t-tails are then handled exponentially.
  QuadratureSpec tail = spec;
  tail.map = DomainMap::exponential_tail;
  if (std::isinf(lo) && std::isinf(hi)) {
    auto g = [&](double t) -> V { return detail::weighted<V>(f(std::sinh(t)), std::cosh(t)); };
    return detail::integrate_mapped<V>(g, -kInf, kInf, tail);
  }
  if (std::isinf(hi)) {
    auto g = [&](double t) -> V { return detail::weighted<V>(f(lo + std::sinh(t)), std::cosh(t)); };
    return detail::integrate_mapped<V>(g, 0.0, kInf, tail);
  }
  auto g = [&](double t) -> V { return detail::weighted<V>(f(hi - std::sinh(t)), std::cosh(t)); };
  return detail::integrate_mapped<V>(g, 0.0, kInf, tail);
}

/// Adaptive Gauss-Kronrod integration over [breaks.front(), breaks.back()],
/// starting from one panel per consecutive pair of breakpoints.
template <class F>
auto integrate_panels(F&& f, const std::vector<double>& breaks, const QuadratureSpec& spec = {})
    -> IntegralValue<std::decay_t<decltype(f(0.0))>> {
  using V = std::decay_t<decltype(f(0.0))>;
  spec.validate();
  require(breaks.size() >= 2, "at least two breakpoints");
  std::vector<std::pair<double, double>> segments;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    require(std::isfinite(breaks[i]) && breaks[i] < breaks[i + 1], "breakpoints finite and increasing");
    segments.emplace_back(breaks[i], breaks[i + 1]);
  }
  return detail::adaptive<V>([&](double x) { return f(x); }, segments, spec);
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [lo, hi].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double lo = -1.0,
                                                                          double hi = 1.0) {
  require(n >= 1, "n >= 1");
  std::vector<double> x(n), w(n);
  const double mid = 0.5 * (hi + lo);
  const double half = 0.5 * (hi - lo);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = mid - half * z;
    x[n - 1 - i] = mid + half * z;
    w[i] = w[n - 1 - i] = 2.0 * half / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// log det(matrix) from a partially pivoted LU factorization: the sum of the
/// logs of the pivots, plus i*pi for an odd row permutation.
inline cdouble log_det(const Eigen::MatrixXcd& matrix) {
  require(matrix.rows() == matrix.cols(), "matrix is square");
  if (matrix.size() == 0) return {0.0, 0.0};
  if (!matrix.allFinite()) throw NumericalError("log_det: non-finite matrix entry");
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(matrix);
  const auto& packed = lu.matrixLU();
  cdouble sum{0.0, 0.0};
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    const cdouble pivot = packed(i, i);
    if (pivot == cdouble{0.0, 0.0}) throw NumericalError("log_det: singular matrix");
    sum += std::log(pivot);
  }
  if (lu.permutationP().determinant() < 0) sum += cdouble{0.0, std::numbers::pi};
  return sum;
}

inline double log_factorial(int n) {
  require(n >= 0, "n >= 0");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

/// Complete elliptic integral of the second kind in the parameter convention,
/// E(m) = int_0^{pi/2} sqrt(1 - m sin^2 psi) dpsi, for m <= 1 (including m < 0).
inline double elliptic_e(double m) {
  require(m <= 1.0, "elliptic_e: m <= 1");
  QuadratureSpec spec;
  spec.rel_tol = 1e-14;
  spec.map = DomainMap::linear;
  auto integrand = [m](double psi) {
    const double s = std::sin(psi);
    return std::sqrt(std::max(0.0, 1.0 - m * s * s));
  };
  return integrate_decaying(integrand, Interval{0.0, std::numbers::pi / 2}, spec).value;
}

/// sum_{k=1}^{n} k^-4.
inline double zeta4_partial(long n) {
  require(n >= 1, "n >= 1");
  double sum = 0.0;
  for (long k = n; k >= 1; --k) {
    const double kk = static_cast<double>(k) * static_cast<double>(k);
    sum += 1.0 / (kk * kk);
  }
  return sum;
}

inline constexpr double zeta4 = std::numbers::pi * std::numbers::pi * std::numbers::pi *
                                std::numbers::pi / 90.0;

}  // namespace casimir::numerics

#endif  // CASIMIR_NUMERICS_HPP
