#ifndef CASIMIR_PARABOLIC_BASIS_HPP
#define CASIMIR_PARABOLIC_BASIS_HPP

// The half-plane as a parabolic cylinder of zero radius. Channels are
// discrete, nu = 0, 1, 2, ...; even nu obey Dirichlet and odd nu Neumann
// conditions, and the two parities never mix, so N is block diagonal.
//
// With k_x = q sinh t (phi = -i t, dk_x i/k_y = dt) the translation matrix is
//   U(nu, nu') = F(nu, nu') / sqrt(8 pi nu! nu'!),
//   F(nu, nu') = int dt a1^nu a2^nu' exp(i q d_x sinh t - q d_y cosh t)
//                       / (cos((theta1 - it)/2) cos((theta2 - it)/2)),
// a_k = tan((theta_k - it)/2). Since T_nu = -sqrt(2/pi) nu!, each product
// T U = -(1/2pi) sqrt(nu!/nu'!) F, and the factorial ratios form a diagonal
// similarity that cancels from every trace and determinant. The matrices
// built here are the balanced ones, N = F G / (4 pi^2), with no factorials.
//
// F is evaluated by the trapezoid rule in t. For theta1 = theta2 = pi/2 the
// Gudermannian variable g = gd(t) gives a = exp(-i g), so F depends on
// nu + nu' only (a Hankel matrix) and its entries are the Fourier
// coefficients of one function on (-pi/2, pi/2), which vanishes to all orders
// at the end points; a single FFT yields all of them.

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/numerics.hpp"
#include "casimir/parallel.hpp"
#include "casimir/spectral.hpp"
#include "casimir/types.hpp"

namespace casimir::parabolic {

using numerics::cdouble;
inline constexpr double pi = std::numbers::pi;

struct SignedLog {
  int sign;
  double log_magnitude;
};

/// T_nu = -sqrt(2/pi) nu! in sign / log-magnitude form.
inline SignedLog t_parabolic_log(int nu) {
  require(nu >= 0, "nu >= 0");
  return {-1, 0.5 * std::log(2.0 / pi) + numerics::log_factorial(nu)};
}

/// One leg of a translation: the angles pairing the row and column channels,
/// the displacement, and the separation that sets the decay.
struct Leg {
  double theta_row;
  double theta_col;
  double d_x;
  double d_y;
};

namespace detail {

inline cdouble half_tan(double theta, double t) { return std::tan(cdouble(0.5 * theta, -0.5 * t)); }
inline cdouble half_sec(double theta, double t) {
  return 1.0 / std::cos(cdouble(0.5 * theta, -0.5 * t));
}

// The exponent below which exp() underflows; nodes past it contribute zero.
inline constexpr double kUnderflow = 740.0;

// Uniform grid g_k = -pi + k (2 pi / n) on one period; the integrand is
// supported on |g| < pi/2. n is a power of two chosen so that aliasing of the
// Fourier coefficients up to index max_index stays below double precision.
// With a displacement the phase q d_x tan(g) oscillates at rate q d_x sec^2(g),
// largest where the decay exp(-q d_y sec g) reaches e^-40. Returns 0 when the
// required grid exceeds cap.
inline int grid_size(double q, const Leg& leg, int max_index, int cap) {
  const double z = std::hypot(leg.d_x, leg.d_y);
  const double q_eff = q * 0.5 * (z + leg.d_y);
  const double sec_max = 40.0 / (q * leg.d_y);
  const double phase_rate = q * std::abs(leg.d_x) * sec_max * sec_max;
  const double want = 4.0 * (max_index + 2) + 300.0 / q_eff + 4.0 * phase_rate;
  if (want > cap) return 0;
  const double n = std::max(64.0, want);
  return static_cast<int>(std::bit_ceil(static_cast<unsigned long>(std::ceil(n))));
}

struct Node {
  double t;
  cdouble weight;  // trapezoid weight times propagator and half-angle factors
};

// Trapezoid nodes in t for the generic kernel. The integrand is analytic in
// the strip |Im t| < pi - max|theta| and decays like exp(-q d_y cosh t), so
// the rule converges geometrically once h resolves the phase, whose rate is
// at most (index sum) + q |d_x| cosh t.
inline std::vector<Node> t_nodes(double q, const Leg& leg, int index_sum) {
  const double a = q * leg.d_y;
  const double t_max = std::acosh(1.0 + 40.0 / a);
  const double rate = index_sum + q * std::abs(leg.d_x) * std::cosh(t_max);
  const double h = std::min(0.04, 2.0 / (rate + 2.0));
  const int half = static_cast<int>(std::ceil(t_max / h));
  std::vector<Node> out;
  out.reserve(2 * half + 1);
  for (int k = -half; k <= half; ++k) {
    const double t = h * k;
    const cdouble prop = std::exp(cdouble(-a * std::cosh(t), q * leg.d_x * std::sinh(t)));
    out.push_back({t, h * prop * half_sec(leg.theta_row, t) * half_sec(leg.theta_col, t)});
  }
  return out;
}

// Block of F restricted to one parity p: entries F(p + 2i, p + 2j) for
// i, j < size.
inline Eigen::MatrixXcd kernel_block_generic(double q, const Leg& leg, int parity, int size) {
  const std::vector<Node> pts = t_nodes(q, leg, 2 * (parity + 2 * (size - 1)));
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(size, size);
  constexpr std::size_t chunk = 2048;
  for (std::size_t start = 0; start < pts.size(); start += chunk) {
    const std::size_t m = std::min(chunk, pts.size() - start);
    Eigen::MatrixXcd rows(size, m), cols(size, m);
    for (std::size_t k = 0; k < m; ++k) {
      const Node& node = pts[start + k];
      const cdouble a = half_tan(leg.theta_row, node.t);
      const cdouble b = half_tan(leg.theta_col, node.t);
      cdouble pa = parity ? a : cdouble(1.0), pb = parity ? b : cdouble(1.0);
      const cdouble a2 = a * a, b2 = b * b;
      for (int i = 0; i < size; ++i) {
        rows(i, k) = pa * node.weight;
        cols(i, k) = pb;
        pa *= a2;
        pb *= b2;
      }
    }
    out.noalias() += rows * cols.transpose();
  }
  return out;
}

// Fourier coefficients f_m = int dg psi(g) exp(-i m g), m < count, for the
// parallel case theta_row = theta_col = pi/2 where a = b = exp(-i g).
inline std::vector<cdouble> hankel_coefficients(double q, const Leg& leg, int count, int n) {
  const double h = 2.0 * pi / n;
  std::vector<cdouble> psi(n, cdouble(0.0));
  for (int k = n / 4 + 1; k < 3 * n / 4; ++k) {
    const double g = -pi + h * k;
    const double t = std::asinh(std::tan(g));
    const double ch = std::cosh(t);
    const double decay = q * leg.d_y * ch;
    if (decay > kUnderflow) continue;
    const cdouble prop = std::exp(cdouble(-decay, q * leg.d_x * std::sinh(t)));
    const cdouble s = half_sec(pi / 2, t);
    psi[k] = h * ch * prop * s * s;
  }
  Eigen::FFT<double> fft;
  std::vector<cdouble> spec;
  fft.fwd(spec, psi);
  // exp(-i m g_k) = (-1)^m exp(-2 pi i m k / n)
  std::vector<cdouble> f(count);
  for (int m = 0; m < count; ++m) f[m] = (m % 2 ? -1.0 : 1.0) * spec[m];
  return f;
}

inline bool parallel_leg(const Leg& leg) {
  return leg.theta_row == pi / 2 && leg.theta_col == pi / 2;
}

inline constexpr int kGridCap = 1 << 20;

inline Eigen::MatrixXcd kernel_block(double q, const Leg& leg, int parity, int size) {
  const int max_index = parity + 2 * (size - 1);
  if (parallel_leg(leg)) {
    const int n = grid_size(q, leg, 2 * max_index, kGridCap);
    if (n == 0) return kernel_block_generic(q, leg, parity, size);
    const std::vector<cdouble> f = hankel_coefficients(q, leg, 2 * max_index + 1, n);
    Eigen::MatrixXcd out(size, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) out(i, j) = f[2 * parity + 2 * (i + j)];
    return out;
  }
  return kernel_block_generic(q, leg, parity, size);
}

inline void require_spectral(double q, const Leg& leg) {
  require(leg.d_y > 0.0, "d_y > 0");
  require(std::isfinite(leg.d_x), "d_x finite");
  require(q > 0.0, "q > 0");
}

inline int block_size(int nu_max, int parity) { return (nu_max - parity) / 2 + 1; }

}  // namespace detail

/// Kernel F(nu, nu') of one leg by the trapezoid rule in t. Cross-parity
/// entries are returned as computed (they do not enter N).
inline cdouble kernel_element(int nu, int nu_p, double q, const Leg& leg) {
  detail::require_spectral(q, leg);
  require(nu >= 0 && nu_p >= 0, "channel indices >= 0");
  cdouble sum(0.0);
  for (const auto& node : detail::t_nodes(q, leg, nu + nu_p))
    sum += node.weight * std::pow(detail::half_tan(leg.theta_row, node.t), nu) *
           std::pow(detail::half_tan(leg.theta_col, node.t), nu_p);
  return sum;
}

/// Translation matrix element U(nu, nu') of the outgoing leg (d_x, d_y,
/// theta, theta_bar). With `scaled`, returns T_nu U(nu, nu') sqrt(nu'!/nu!)
/// = -F(nu, nu') / 2pi, the factor entering the balanced N.
inline cdouble u_parabolic(int nu, int nu_p, SpectralPoint point, const TwoHalfPlaneConfig& config,
                           bool scaled = false) {
  config.validate();
  const Leg leg{config.theta, config.theta_bar, config.d_x, config.d_y};
  const cdouble f = kernel_element(nu, nu_p, point.q, leg);
  if (scaled) return -f / (2.0 * pi);
  const double log_norm =
      0.5 * (std::log(8.0 * pi) + numerics::log_factorial(nu) + numerics::log_factorial(nu_p));
  return f * std::exp(-log_norm);
}

/// Balanced N restricted to each parity block: {Dirichlet (even nu), Neumann
/// (odd nu)}. Channels 0..nu_max.
struct BlockMatrix {
  std::array<Eigen::MatrixXcd, 2> blocks;

  Eigen::MatrixXcd dense() const {
    const Eigen::Index n = blocks[0].rows() + blocks[1].rows();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (int p = 0; p < 2; ++p)
      for (Eigen::Index i = 0; i < blocks[p].rows(); ++i)
        for (Eigen::Index j = 0; j < blocks[p].cols(); ++j) out(p + 2 * i, p + 2 * j) = blocks[p](i, j);
    return out;
  }
};

namespace detail {

inline void guard_finite(const Eigen::MatrixXcd& m) {
  if (!m.allFinite()) throw NumericalError("truncation too aggressive: non-finite N element");
}

inline BlockMatrix two_halfplane_blocks(const TwoHalfPlaneConfig& c, double q, int nu_max) {
  const Leg out{c.theta, c.theta_bar, c.d_x, c.d_y};
  const Leg back{-c.theta_bar, -c.theta, -c.d_x, c.d_y};
  BlockMatrix m;
  for (int p = 0; p < 2; ++p) {
    const int size = block_size(nu_max, p);
    const Eigen::MatrixXcd f = kernel_block(q, out, p, size);
    if (parallel_leg(out)) {
      // The return leg is the conjugate of the outgoing Hankel block.
      m.blocks[p] = f * f.adjoint() / (4.0 * pi * pi);
    } else {
      m.blocks[p] = f * kernel_block(q, back, p, size) / (4.0 * pi * pi);
    }
    guard_finite(m.blocks[p]);
  }
  return m;
}

// Half-plane opposite an infinite plane: the round trip to the plane is a
// mirror image with amplitude -1 (Dirichlet) or +1 (Neumann), i.e. a leg from
// angle theta to the image angle -theta over twice the edge distance.
inline BlockMatrix halfplane_plane_blocks(const HalfPlaneVsPlaneConfig& c, double q, int nu_max) {
  const Leg leg{c.theta, -c.theta, 0.0, 2.0 * c.d};
  BlockMatrix m;
  for (int p = 0; p < 2; ++p) {
    const double mirror = p == 0 ? 1.0 : -1.0;  // (-T sign) x (image amplitude)
    m.blocks[p] = mirror * kernel_block(q, leg, p, block_size(nu_max, p)) / (2.0 * pi);
    guard_finite(m.blocks[p]);
  }
  return m;
}

}  // namespace detail

inline Eigen::MatrixXcd n_matrix_two_halfplanes(const TwoHalfPlaneConfig& config, SpectralPoint point,
                                                const TruncationSpec& trunc = {}) {
  config.validate();
  trunc.validate();
  require(point.q > 0.0, "q > 0");
  return detail::two_halfplane_blocks(config, point.q, trunc.nu_max).dense();
}

inline Eigen::MatrixXcd n_matrix_halfplane_plane(const HalfPlaneVsPlaneConfig& config,
                                                 SpectralPoint point,
                                                 const TruncationSpec& trunc = {}) {
  config.validate();
  trunc.validate();
  require(point.q > 0.0, "q > 0");
  return detail::halfplane_plane_blocks(config, point.q, trunc.nu_max).dense();
}

/// log det(1 - N) summed over the parity blocks, complex.
inline cdouble log_det_one_minus(const BlockMatrix& m) {
  cdouble sum(0.0);
  for (const auto& b : m.blocks) {
    const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(b.rows(), b.cols()) - b;
    sum += numerics::log_det(a);
  }
  return sum;
}

inline double checked_real(cdouble v) {
  if (std::abs(v.imag()) >= 1e-8 * std::max(1.0, std::abs(v.real())))
    throw NumericalError("non-real determinant: log det = " + std::to_string(v.real()) + " + " +
                         std::to_string(v.imag()) + "i");
  return v.real();
}

/// Number of channels kept at spectral point q. Geometries whose surfaces stay
/// close over a long stretch (large overlap, small tilt from parallel) have
/// slowly decaying channel sums, as do small q; `reach` measures the former.
inline int channel_count(double q_hat, double reach, const TruncationSpec& trunc) {
  const double want = trunc.nu_max * reach / std::min(1.0, q_hat);
  return static_cast<int>(std::min<double>(trunc.nu_ceiling, std::ceil(want)));
}

inline double reach_of(const TwoHalfPlaneConfig& c) { return 1.0 + std::abs(c.d_x) / c.d_y; }
inline double reach_of(const HalfPlaneVsPlaneConfig& c) { return 1.0 / std::cos(c.theta); }

inline double length_of(const TwoHalfPlaneConfig& c) { return c.d_y; }
inline double length_of(const HalfPlaneVsPlaneConfig& c) { return c.d; }

inline BlockMatrix blocks_of(const TwoHalfPlaneConfig& c, double q, int nu) {
  return detail::two_halfplane_blocks(c, q, nu);
}
inline BlockMatrix blocks_of(const HalfPlaneVsPlaneConfig& c, double q, int nu) {
  return detail::halfplane_plane_blocks(c, q, nu);
}

/// Real part of log det(1 - N) at one spectral point with exactly
/// trunc.nu_max channels. Throws NumericalError if the determinant is not real.
template <class Config>
double logdet_integrand(const Config& config, SpectralPoint point, const TruncationSpec& trunc = {}) {
  config.validate();
  trunc.validate();
  require(point.q > 0.0, "q > 0");
  return checked_real(log_det_one_minus(blocks_of(config, point.q, trunc.nu_max)));
}

/// Same, with the channel count adapted to q and the geometry.
template <class Config>
double adaptive_logdet(const Config& config, double q, const TruncationSpec& trunc) {
  const int nu = channel_count(q * length_of(config), reach_of(config), trunc);
  return checked_real(log_det_one_minus(blocks_of(config, q, nu)));
}

struct ExactOptions {
  /// Recompute with doubled channel cutoffs and a tighter quadrature and
  /// report convergence from the change. Without it, `converged` only
  /// reflects the quadrature.
  bool verify = true;
};

/// Exact energy (1/4pi) int q dq log det(1 - N), in units hbar c L / length^2
/// where length is d_y (two half-planes) or d (half-plane and plane).
template <class Config>
EnergyResult exact_energy(const Config& config, const TruncationSpec& trunc = {},
                          const numerics::QuadratureSpec& quad = default_energy_quadrature(),
                          ExactOptions options = {}) {
  config.validate();
  trunc.validate();
  const double length = length_of(config);
  auto run = [&](const TruncationSpec& tr, const numerics::QuadratureSpec& qs) {
    return radial_integral([&](double q) { return adaptive_logdet(config, q, tr); }, length, qs);
  };
  const auto base = run(trunc, quad);
  EnergyResult out{base.value, base.error_estimate, Method::exact(), base.converged, trunc};
  if (!options.verify) return out;

  numerics::QuadratureSpec tight = quad;
  tight.rel_tol = quad.rel_tol / 10.0;
  const auto fine = run(trunc.doubled(), tight);
  const double change = std::abs(fine.value - base.value);
  out.value = fine.value;
  out.error_estimate = change + fine.error_estimate;
  out.converged = base.converged && fine.converged &&
                  change <= trunc.convergence_tol * std::abs(fine.value);
  out.truncation_used = trunc.doubled();
  return out;
}

/// Per-order energies -(1/n)(1/4pi) int q dq tr N^n in the parabolic basis.
template <class Config>
ReflectionSeries reflection_series(const Config& config, int n_max, const TruncationSpec& trunc = {},
                                   const numerics::QuadratureSpec& quad = default_energy_quadrature()) {
  config.validate();
  trunc.validate();
  require(n_max >= 1, "n_max >= 1");
  auto traces = [&](double q) -> Eigen::VectorXd {
    const int nu = channel_count(q * length_of(config), reach_of(config), trunc);
    const BlockMatrix m = blocks_of(config, q, nu);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_max);
    for (const auto& b : m.blocks) {
      Eigen::MatrixXcd power = b;
      for (int n = 1; n <= n_max; ++n) {
        out[n - 1] += power.trace().real() / n;
        if (n < n_max) power = power * b;
      }
    }
    return out;
  };
  auto r = radial_integral(traces, length_of(config), quad);
  std::vector<double> values(n_max), errors(n_max, r.error_estimate);
  for (int n = 0; n < n_max; ++n) values[n] = -r.value[n];
  auto series = ReflectionSeries::from_orders(std::move(values), std::move(errors));
  series.converged = r.converged;
  return series;
}

}  // namespace casimir::parabolic

#endif  // CASIMIR_PARABOLIC_BASIS_HPP
