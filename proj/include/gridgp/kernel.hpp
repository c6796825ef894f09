#ifndef GRIDGP_KERNEL_HPP
#define GRIDGP_KERNEL_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridgp/errors.hpp"
#include "gridgp/grid.hpp"

namespace gridgp {

enum class KernelFamily { SquaredExponential, Matern05, Matern15, Matern25 };

inline std::string family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::SquaredExponential: return "sqexp";
    case KernelFamily::Matern05: return "matern05";
    case KernelFamily::Matern15: return "matern15";
    case KernelFamily::Matern25: return "matern25";
  }
  return "?";
}

inline KernelFamily family_from_name(const std::string& s) {
  if (s == "sqexp") return KernelFamily::SquaredExponential;
  if (s == "matern05") return KernelFamily::Matern05;
  if (s == "matern15") return KernelFamily::Matern15;
  if (s == "matern25") return KernelFamily::Matern25;
  throw std::invalid_argument("unknown kernel family: " + s);
}

/// Stationary covariance k(delta) = sigma_f^2 * phi(r) with the scaled
/// distance r = sqrt(sum_d (delta_d / ell_d)^2). Immutable once built.
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  double signal_variance = 1.0;
  Vec lengthscales;

  KernelSpec() = default;
  KernelSpec(KernelFamily f, double sf2, Vec ell)
      : family(f), signal_variance(sf2), lengthscales(std::move(ell)) {
    validate();
  }

  int input_dim() const { return static_cast<int>(lengthscales.size()); }

  void validate() const {
    if (!(signal_variance > 0.0))
      throw std::invalid_argument("kernel: signal_variance must be positive");
    if (lengthscales.size() == 0)
      throw std::invalid_argument("kernel: lengthscales empty");
    for (int d = 0; d < lengthscales.size(); ++d)
      if (!(lengthscales[d] > 0.0))
        throw std::invalid_argument("kernel: lengthscales must be positive");
  }

  bool differentiable() const { return family != KernelFamily::Matern05; }
};

namespace detail {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;

inline double scaled_distance(const KernelSpec& k, const Vec& delta) {
  double r2 = 0.0;
  for (int d = 0; d < delta.size(); ++d) {
    const double u = delta[d] / k.lengthscales[d];
    r2 += u * u;
  }
  return std::sqrt(r2);
}

inline double shape_fn(KernelFamily f, double r) {
  switch (f) {
    case KernelFamily::SquaredExponential: return std::exp(-0.5 * r * r);
    case KernelFamily::Matern05: return std::exp(-r);
    case KernelFamily::Matern15: return (1.0 + kSqrt3 * r) * std::exp(-kSqrt3 * r);
    case KernelFamily::Matern25:
      return (1.0 + kSqrt5 * r + 5.0 / 3.0 * r * r) * std::exp(-kSqrt5 * r);
  }
  return 0.0;
}

// g(r) = -sigma^2 * phi'(r) / r, the smooth radial factor in
// d k / d delta_d = -g(r) * delta_d / ell_d^2. Undefined (singular) for
// Matern05, which is why derivative observations reject that family.
inline double radial_grad_fn(const KernelSpec& k, double r) {
  const double s2 = k.signal_variance;
  switch (k.family) {
    case KernelFamily::SquaredExponential: return s2 * std::exp(-0.5 * r * r);
    case KernelFamily::Matern15: return 3.0 * s2 * std::exp(-kSqrt3 * r);
    case KernelFamily::Matern25:
      return 5.0 / 3.0 * s2 * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
    case KernelFamily::Matern05:
      throw DerivativeNotSupported("Matern05 does not support derivative observations");
  }
  return 0.0;
}

inline void require_differentiable(const KernelSpec& k) {
  if (!k.differentiable())
    throw DerivativeNotSupported("Matern05 does not support derivative observations");
}

// Deterministic uniform(0,1) draws; fixed mapping from the 64-bit stream.
inline std::vector<double> unit_uniforms(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return t;
}

} // namespace detail

/// k_theta(delta); stationary, total on valid kernels.
inline double eval(const KernelSpec& kernel, const Vec& delta) {
  return kernel.signal_variance * detail::shape_fn(kernel.family, detail::scaled_distance(kernel, delta));
}

/// d k / d delta_d in closed form (rejects Matern05).
inline double eval_ddelta(const KernelSpec& kernel, const Vec& delta, int d) {
  const double r = detail::scaled_distance(kernel, delta);
  const double g = detail::radial_grad_fn(kernel, r);
  const double ell = kernel.lengthscales[d];
  return -g * delta[d] / (ell * ell);
}

/// Cov(d rho(a)/d a_d, d rho(b)/d b_d) = -d^2 k / d delta_d^2 at delta = a - b.
/// Used by the dense exact-GP reference; rejects Matern05.
inline double eval_deriv_deriv(const KernelSpec& kernel, const Vec& delta, int d) {
  detail::require_differentiable(kernel);
  const double r = detail::scaled_distance(kernel, delta);
  const double s2 = kernel.signal_variance;
  const double ell2 = kernel.lengthscales[d] * kernel.lengthscales[d];
  const double dd2 = delta[d] * delta[d];
  switch (kernel.family) {
    case KernelFamily::SquaredExponential: {
      const double k = s2 * std::exp(-0.5 * r * r);
      return k * (1.0 - dd2 / ell2) / ell2;
    }
    case KernelFamily::Matern15: {
      const double e = std::exp(-detail::kSqrt3 * r);
      const double corr = (r > 0.0) ? detail::kSqrt3 * dd2 / (ell2 * r) : 0.0;
      return 3.0 * s2 * e * (1.0 - corr) / ell2;
    }
    case KernelFamily::Matern25: {
      const double e = std::exp(-detail::kSqrt5 * r);
      return 5.0 / 3.0 * s2 * e * ((1.0 + detail::kSqrt5 * r) - 5.0 * dd2 / ell2) / ell2;
    }
    default: return 0.0;
  }
}

/// Linear-operator descriptor attached to an observation: identity map,
/// partial derivative along one input dimension, or a line integral over
/// the segment [a, b] estimated with n_nodes Monte Carlo nodes.
struct OperatorTag {
  enum class Kind { Identity, Derivative, Integral };
  Kind kind = Kind::Identity;
  int dim = 0;
  Vec a, b;
  int n_nodes = 64;

  static OperatorTag identity() { return {}; }
  static OperatorTag derivative(int d) {
    OperatorTag t;
    t.kind = Kind::Derivative;
    t.dim = d;
    return t;
  }
  static OperatorTag integral(Vec a, Vec b, int n_nodes = 64) {
    OperatorTag t;
    t.kind = Kind::Integral;
    t.a = std::move(a);
    t.b = std::move(b);
    t.n_nodes = n_nodes;
    return t;
  }

  void validate(int input_dim) const {
    switch (kind) {
      case Kind::Identity: return;
      case Kind::Derivative:
        if (dim < 0 || dim >= input_dim)
          throw std::invalid_argument("operator: derivative dim out of range");
        return;
      case Kind::Integral:
        if (a.size() != input_dim || b.size() != input_dim)
          throw std::invalid_argument("operator: integral endpoint dimension mismatch");
        if ((a - b).norm() == 0.0)
          throw std::invalid_argument("operator: integral endpoints must differ");
        if (n_nodes < 1) throw std::invalid_argument("operator: n_nodes must be >= 1");
        return;
    }
  }
};

namespace detail {

// Monte Carlo nodes on the segment [a, b]; shared by cross_cov and
// transformed_var so one (seed, op) pair always sees the same nodes.
inline std::vector<Vec> integral_nodes(const OperatorTag& op, std::uint64_t seed) {
  const auto t = unit_uniforms(seed, op.n_nodes);
  std::vector<Vec> s(op.n_nodes);
  for (int j = 0; j < op.n_nodes; ++j) s[j] = op.a + t[j] * (op.b - op.a);
  return s;
}

} // namespace detail

/// First row of K_uu as a C-order flattened tensor of shape M_1 x ... x M_D:
/// c[i_1,...,i_D] = k((i_1 h_1, ..., i_D h_D)).
inline Vec gram_first_row(const KernelSpec& kernel, const InducingGrid& grid) {
  const std::int64_t M = grid.size();
  Vec c(M);
  Vec delta(grid.input_dim());
  for (std::int64_t i = 0; i < M; ++i) {
    const auto mi = grid.multi_index(i);
    for (int d = 0; d < grid.input_dim(); ++d) delta[d] = mi[d] * grid.spacing[d];
    c[i] = eval(kernel, delta);
  }
  return c;
}

/// Inter-domain covariance vector k*_{u,n}: entry m is Cov(rho(xbar_m), rho*(x)).
inline Vec cross_cov(const KernelSpec& kernel, const InducingGrid& grid, const Vec& x,
                     const OperatorTag& op, std::uint64_t rng_seed = 0) {
  op.validate(grid.input_dim());
  const std::int64_t M = grid.size();
  Vec out(M);
  switch (op.kind) {
    case OperatorTag::Kind::Identity: {
      for (std::int64_t m = 0; m < M; ++m) out[m] = eval(kernel, grid.point(m) - x);
      return out;
    }
    case OperatorTag::Kind::Derivative: {
      detail::require_differentiable(kernel);
      const double ell = kernel.lengthscales[op.dim];
      for (std::int64_t m = 0; m < M; ++m) {
        const Vec delta = grid.point(m) - x;
        const double r = detail::scaled_distance(kernel, delta);
        // Cov(rho(xbar), d rho(x)/d x_d) = -d k/d delta_d at delta = xbar - x
        out[m] = detail::radial_grad_fn(kernel, r) * delta[op.dim] / (ell * ell);
      }
      return out;
    }
    case OperatorTag::Kind::Integral: {
      const auto nodes = detail::integral_nodes(op, rng_seed);
      const double len = (op.b - op.a).norm();
      for (std::int64_t m = 0; m < M; ++m) {
        const Vec xm = grid.point(m);
        double acc = 0.0;
        for (const auto& s : nodes) acc += eval(kernel, xm - s);
        out[m] = len * acc / static_cast<double>(op.n_nodes);
      }
      return out;
    }
  }
  return out;
}

/// Transformed-domain variance k**_{n,n} = Cov(rho*(x), rho*(x)).
inline double transformed_var(const KernelSpec& kernel, const Vec& x, const OperatorTag& op,
                              std::uint64_t rng_seed = 0) {
  op.validate(kernel.input_dim());
  (void)x;
  switch (op.kind) {
    case OperatorTag::Kind::Identity:
      return kernel.signal_variance;
    case OperatorTag::Kind::Derivative: {
      detail::require_differentiable(kernel);
      const double ell2 = kernel.lengthscales[op.dim] * kernel.lengthscales[op.dim];
      switch (kernel.family) {
        case KernelFamily::SquaredExponential: return kernel.signal_variance / ell2;
        case KernelFamily::Matern15: return 3.0 * kernel.signal_variance / ell2;
        case KernelFamily::Matern25: return 5.0 * kernel.signal_variance / (3.0 * ell2);
        default: return 0.0;
      }
    }
    case OperatorTag::Kind::Integral: {
      const auto nodes = detail::integral_nodes(op, rng_seed);
      const double len = (op.b - op.a).norm();
      double acc = 0.0;
      for (const auto& si : nodes)
        for (const auto& sj : nodes) acc += eval(kernel, si - sj);
      const double n = static_cast<double>(op.n_nodes);
      return len * len * acc / (n * n);
    }
  }
  return 0.0;
}

/// Closed-form d c / d theta for theta in (sigma_f^2, ell_1, ..., ell_D);
/// one tensor per hyperparameter, each shaped like the first row.
inline std::vector<Vec> first_row_grad(const KernelSpec& kernel, const InducingGrid& grid) {
  const int D = grid.input_dim();
  const std::int64_t M = grid.size();
  std::vector<Vec> grads(1 + D, Vec(M));
  Vec delta(D);
  for (std::int64_t i = 0; i < M; ++i) {
    const auto mi = grid.multi_index(i);
    for (int d = 0; d < D; ++d) delta[d] = mi[d] * grid.spacing[d];
    const double r = detail::scaled_distance(kernel, delta);
    grads[0][i] = detail::shape_fn(kernel.family, r);  // dk/dsigma_f^2 = k / sigma_f^2
    for (int d = 0; d < D; ++d) {
      const double ell = kernel.lengthscales[d];
      double g;
      if (kernel.family == KernelFamily::Matern05) {
        // g(r) = sigma^2 exp(-r)/r is singular; the ell-gradient
        // g * delta_d^2 / ell^3 still has a zero limit at r = 0.
        g = (r > 0.0) ? kernel.signal_variance * std::exp(-r) / r : 0.0;
      } else {
        g = detail::radial_grad_fn(kernel, r);
      }
      grads[1 + d][i] = g * delta[d] * delta[d] / (ell * ell * ell);
    }
  }
  return grads;
}

/// Gradient of k(delta) w.r.t. log-hyperparameters (ln sigma_f^2, ln ell_1..D).
inline Vec eval_grad_log(const KernelSpec& kernel, const Vec& delta) {
  const int D = kernel.input_dim();
  Vec out(1 + D);
  const double r = detail::scaled_distance(kernel, delta);
  out[0] = kernel.signal_variance * detail::shape_fn(kernel.family, r);
  for (int d = 0; d < D; ++d) {
    const double ell = kernel.lengthscales[d];
    double g;
    if (kernel.family == KernelFamily::Matern05) {
      g = (r > 0.0) ? kernel.signal_variance * std::exp(-r) / r : 0.0;
    } else {
      g = detail::radial_grad_fn(kernel, r);
    }
    out[1 + d] = g * delta[d] * delta[d] / (ell * ell);
  }
  return out;
}

/// Gradient of the derivative-operator cross-covariance entry
/// g(r) * delta_d / ell_d^2 w.r.t. log-hyperparameters.
inline Vec deriv_cross_grad_log(const KernelSpec& kernel, const Vec& delta, int dim) {
  detail::require_differentiable(kernel);
  const int D = kernel.input_dim();
  const double r = detail::scaled_distance(kernel, delta);
  const double g = detail::radial_grad_fn(kernel, r);
  const double elld = kernel.lengthscales[dim];
  const double entry = g * delta[dim] / (elld * elld);
  Vec out(1 + D);
  out[0] = entry;  // g scales with sigma_f^2
  for (int j = 0; j < D; ++j) {
    const double ellj = kernel.lengthscales[j];
    const double uj2 = delta[j] * delta[j] / (ellj * ellj);
    double dg_dlnell;  // dg/d ln ell_j = -g'(r) * delta_j^2 / (ell_j^2 r)
    switch (kernel.family) {
      case KernelFamily::SquaredExponential: dg_dlnell = g * uj2; break;
      case KernelFamily::Matern15:
        dg_dlnell = (r > 0.0) ? detail::kSqrt3 * g * uj2 / r : 0.0;
        break;
      case KernelFamily::Matern25:
        dg_dlnell = 25.0 / 3.0 * kernel.signal_variance * std::exp(-detail::kSqrt5 * r) * uj2;
        break;
      default: dg_dlnell = 0.0;
    }
    out[1 + j] = dg_dlnell * delta[dim] / (elld * elld) - (j == dim ? 2.0 * entry : 0.0);
  }
  return out;
}

/// Gradient of k**_{n,n} w.r.t. log-hyperparameters for identity and
/// derivative operators (integral operators do not support hyper learning).
inline Vec transformed_var_grad_log(const KernelSpec& kernel, const Vec& x, const OperatorTag& op) {
  const int D = kernel.input_dim();
  Vec out = Vec::Zero(1 + D);
  switch (op.kind) {
    case OperatorTag::Kind::Identity:
      out[0] = kernel.signal_variance;
      return out;
    case OperatorTag::Kind::Derivative: {
      const double kss = transformed_var(kernel, x, op);
      out[0] = kss;
      out[1 + op.dim] = -2.0 * kss;
      return out;
    }
    case OperatorTag::Kind::Integral:
      throw std::invalid_argument("hyperparameter gradients unsupported for integral observations");
  }
  return out;
}

/// Accumulate sum_m u_m * d k*_{u,n}[m] / d(log theta) without materializing
/// the M x (1+D) Jacobian. Identity and derivative operators only.
inline Vec cross_cov_grad_dot(const KernelSpec& kernel, const InducingGrid& grid, const Vec& x,
                              const OperatorTag& op, const Vec& u) {
  op.validate(grid.input_dim());
  const int D = grid.input_dim();
  const std::int64_t M = grid.size();
  if (u.size() != M) throw ShapeMismatch("cross_cov_grad_dot: weight length mismatch");
  Vec acc = Vec::Zero(1 + D);
  for (std::int64_t m = 0; m < M; ++m) {
    const Vec delta = grid.point(m) - x;
    switch (op.kind) {
      case OperatorTag::Kind::Identity:
        acc += u[m] * eval_grad_log(kernel, delta);
        break;
      case OperatorTag::Kind::Derivative:
        acc += u[m] * deriv_cross_grad_log(kernel, delta, op.dim);
        break;
      case OperatorTag::Kind::Integral:
        throw std::invalid_argument("hyperparameter gradients unsupported for integral observations");
    }
  }
  return acc;
}

/// One datum: operator descriptor, location, value, noise level.
struct Observation {
  Vec x;
  OperatorTag op;
  double y = 0.0;
  double sigma = 1.0;
};

} // namespace gridgp

#endif
