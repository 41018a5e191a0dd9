#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cbound/errors.hpp"
#include "cbound/info_theory.hpp"

namespace cbound {

// Upper incomplete gamma for integer order, via the exact closed form
// Gamma(n,x) = (n-1)! e^-x sum_{k<n} x^k/k!. All terms are positive, so the
// sum never cancels.
inline double upper_incomplete_gamma_int(int n, double x) {
  if (n < 1) fail(errc::domain_error, "order must be a positive integer");
  if (x < 0.0) fail(errc::domain_error, "argument must be nonnegative");
  double term = 1.0;  // x^k / k!
  double sum = 1.0;
  for (int k = 1; k < n; ++k) {
    term *= x / k;
    sum += term;
  }
  double fact = 1.0;
  for (int k = 2; k < n; ++k) fact *= k;
  return fact * std::exp(-x) * sum;
}

namespace detail {

// log{ [ (N-1)! - (N-1) Gamma(N-1, kappa) ] / kappa^(N-1) }.
// The bracket equals (N-1) * gamma_lower(N-1, kappa) and behaves as
// kappa^(N-1) * (1 + O(kappa)) near zero, so the direct subtraction loses all
// precision there; below the switch point the lower-gamma series
//   gamma(n,k)/k^n = e^-k sum_j k^j / (n (n+1) ... (n+j))
// is used instead. The ratio tends to 1 as kappa -> 0, which reproduces the
// whole-manifold constraint F(pi/2) = -(beta + alpha/N).
inline double log_gamma_bracket_ratio(int n_dim, double kappa) {
  const int n = n_dim - 1;
  if (kappa < 0.0) fail(errc::domain_error, "negative gamma argument");
  if (kappa < 1.0) {
    double term = 1.0 / n;
    double sum = term;
    for (int j = 1; j < 80; ++j) {
      term *= kappa / (n + j);
      sum += term;
      if (term < sum * 1e-18) break;
    }
    return -kappa + std::log(static_cast<double>(n) * sum);
  }
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  const double bracket = fact - n * upper_incomplete_gamma_int(n, kappa);
  return std::log(bracket) - n * std::log(kappa);
}

inline void require_bound_dimension(int n) {
  if (n < 2) fail(errc::domain_error, "dimension must be >= 2");
  if (n > 4) {
    fail(errc::unsupported_dimension,
         "closed-form bounds are only established for N in {2,3,4}; the "
         "differentiability assumption behind them fails for N >= 5");
  }
}

}  // namespace detail

// Haar measure of the cone, duplicated here to keep the analytic header
// self-contained: S(theta) = sin^(2N-2) theta.
inline double analytic_cone_measure(double theta, int n) {
  return std::pow(std::sin(theta), 2.0 * n - 2.0);
}

// The constraint margin
//   F(theta,alpha,beta) = -S(theta)[beta + alpha(sin^2/N + cos^2)]
//                         - log{[(N-1)! - (N-1)Gamma(N-1,kappa)]/kappa^(N-1)},
// kappa = alpha S(theta) cos^2 theta. Feasibility of the two-parameter ansatz
// requires F >= offset for every theta.
inline double F_value(double theta, double alpha, double beta, int n) {
  if (n < 2) fail(errc::domain_error, "dimension must be >= 2");
  if (alpha <= 0.0) fail(errc::domain_error, "alpha must be positive");
  if (theta < 0.0 || theta > M_PI / 2 + 1e-15) {
    fail(errc::domain_error, "theta outside [0, pi/2]");
  }
  const double s = analytic_cone_measure(theta, n);
  const double c2 = std::cos(theta) * std::cos(theta);
  const double kappa = alpha * s * c2;
  const double linear = -s * (beta + alpha * (std::sin(theta) * std::sin(theta) / n + c2));
  return linear - detail::log_gamma_bracket_ratio(n, kappa);
}

// Angle with S(theta_m) = 1/N.
inline double theta_m(int n) {
  if (n < 2) fail(errc::domain_error, "dimension must be >= 2");
  return std::asin(std::pow(static_cast<double>(n), -1.0 / (2.0 * n - 2.0)));
}

// Stationary alpha with the incomplete-gamma term neglected:
// alpha = N^2 (N+1) / (N - (N+1) N^(1/(1-N))).
inline double alpha_approx(int n) {
  if (n < 2) fail(errc::domain_error, "dimension must be >= 2");
  const double t = std::pow(static_cast<double>(n), 1.0 / (1.0 - n));
  return n * n * (n + 1.0) / (n - (n + 1.0) * t);
}

// beta = ( [ (1 - N^(1/(1-N)))^-1 - 1 ] / N - 2 ) alpha / (N+1), checked
// against the significant region -2a/(N+1) <= beta <= -a/(N+1).
inline double beta_of_alpha(double alpha, int n) {
  if (alpha <= 0.0) fail(errc::domain_error, "alpha must be positive");
  const double t = std::pow(static_cast<double>(n), 1.0 / (1.0 - n));
  const double beta = ((1.0 / (1.0 - t) - 1.0) / n - 2.0) * alpha / (n + 1.0);
  const double lo = -2.0 * alpha / (n + 1.0);
  const double hi = -alpha / (n + 1.0);
  if (beta < lo - 1e-9 || beta > hi + 1e-9) {
    fail(errc::region_violation, "beta = " + std::to_string(beta) + " outside [" +
                                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return beta;
}

// Ansatz parameters (alpha, beta differences, the binding offset alpha_2/N +
// beta_2, and theta_m) with the significant-region invariants enforced.
struct AnalyticParams {
  int n = 2;
  double alpha = 0.0;
  double beta = 0.0;
  double theta_m = 0.0;
  double offset = 0.0;
};

inline AnalyticParams make_analytic_params(int n, double alpha, double beta, double offset) {
  if (n < 2) fail(errc::domain_error, "dimension must be >= 2");
  if (alpha < 0.0) fail(errc::region_violation, "alpha must be nonnegative");
  const double lo = -2.0 * alpha / (n + 1.0);
  const double hi = -alpha / (n + 1.0);
  if (beta < lo - 1e-9 || beta > hi + 1e-9) {
    fail(errc::region_violation, "beta outside the significant region");
  }
  return AnalyticParams{n, alpha, beta, theta_m(n), offset};
}

// Closed-form maximum with the incomplete-gamma term neglected, in bits:
//   I_max = (N-1) log{ N(N+1)(N^(1/(1-N)) - 1) e^-1 /
//                      ([(1+N) N^(1/(1-N)) - N] Gamma(N)^(1/(N-1))) }.
inline double bound_approx_bits(int n) {
  detail::require_bound_dimension(n);
  const double t = std::pow(static_cast<double>(n), 1.0 / (1.0 - n));
  double gamma_n = 1.0;
  for (int k = 2; k < n; ++k) gamma_n *= k;  // Gamma(N) = (N-1)!
  const double numerator = n * (n + 1.0) * (t - 1.0) / M_E;
  const double denominator = ((1.0 + n) * t - n) * std::pow(gamma_n, 1.0 / (n - 1.0));
  return nats_to_bits((n - 1.0) * std::log(numerator / denominator));
}

namespace detail {

// Residual of the implicit stationarity equation for alpha:
//   (N^(N/(1-N)) - 1/(N+1)) alpha/N + 1
//     = e^-kappa kappa^(N-1) / [Gamma(N) - (N-1) Gamma(N-1, kappa)],
// kappa = cos^2(theta_m) alpha / N. Setting the right side to zero recovers
// alpha_approx.
struct AlphaResidual {
  int n;
  double c;  // cos^2(theta_m)/N

  double lhs_slope() const {
    return (std::pow(static_cast<double>(n), n / (1.0 - n)) - 1.0 / (n + 1.0)) / n;
  }

  double rhs(double alpha) const {
    const double kappa = c * alpha;
    double fact = 1.0;
    for (int k = 2; k <= n - 1; ++k) fact *= k;
    const double bracket = fact - (n - 1.0) * upper_incomplete_gamma_int(n - 1, kappa);
    return std::exp(-kappa) * std::pow(kappa, n - 1.0) / bracket;
  }

  // d/d kappa of the right side, using dGamma(n,x)/dx = -x^(n-1) e^-x
  double rhs_derivative(double alpha) const {
    const double kappa = c * alpha;
    double fact = 1.0;
    for (int k = 2; k <= n - 1; ++k) fact *= k;
    const double bracket = fact - (n - 1.0) * upper_incomplete_gamma_int(n - 1, kappa);
    const double u = std::exp(-kappa) * std::pow(kappa, n - 1.0);
    const double du = std::exp(-kappa) * std::pow(kappa, n - 2.0) * (n - 1.0 - kappa);
    const double dbracket = (n - 1.0) * std::pow(kappa, n - 2.0) * std::exp(-kappa);
    return c * (du * bracket - u * dbracket) / (bracket * bracket);
  }

  double operator()(double alpha) const { return lhs_slope() * alpha + 1.0 - rhs(alpha); }
};

}  // namespace detail

// Newton solve of the implicit alpha equation, started at alpha_approx, with
// a bisection fallback on the bracket [alpha_approx/2, 4 alpha_approx].
inline double alpha_exact(int n, double tol = 1e-12) {
  detail::require_bound_dimension(n);
  if (tol <= 0.0) fail(errc::domain_error, "tolerance must be positive");
  const double tm = theta_m(n);
  detail::AlphaResidual residual{n, std::cos(tm) * std::cos(tm) / n};

  double lo = alpha_approx(n) / 2.0;
  double hi = 4.0 * alpha_approx(n);
  double alpha = alpha_approx(n);
  double g = residual(alpha);
  for (int it = 0; it < 100; ++it) {
    if (std::abs(g) <= tol) return alpha;
    const double slope = residual.lhs_slope() - residual.rhs_derivative(alpha);
    double next = alpha - g / slope;
    if (!(next > lo && next < hi)) {
      // keep a sign-changing bracket and bisect
      const double glo = residual(lo);
      if ((glo < 0.0) == (g < 0.0)) lo = alpha; else hi = alpha;
      next = 0.5 * (lo + hi);
    }
    alpha = next;
    g = residual(alpha);
  }
  fail(errc::non_convergence, "alpha Newton iteration did not reach tol");
}

struct BoundRow {
  int n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double theta_m = 0.0;
  double bound_bits_approx = 0.0;
  double bound_bits_refined = 0.0;
};

// Refined bound: exact alpha from the implicit equation, beta and theta_m
// from the same closed forms, assembled as
//   I = beta/N + 2 alpha/(N(N+1)) + F(theta_m, alpha, beta).
inline BoundRow bound_refined_bits(int n) {
  detail::require_bound_dimension(n);
  BoundRow row;
  row.n = n;
  row.alpha = alpha_exact(n);
  row.beta = beta_of_alpha(row.alpha, n);
  row.theta_m = theta_m(n);
  row.bound_bits_approx = bound_approx_bits(n);
  const double nats = row.beta / n + 2.0 * row.alpha / (n * (n + 1.0)) +
                      F_value(row.theta_m, row.alpha, row.beta, n);
  row.bound_bits_refined = nats_to_bits(nats);
  return row;
}

struct ProfilePoint {
  double theta = 0.0;
  double f = 0.0;
};

// Uniform grid of F over (0, pi/2]; used to confirm that theta_m is a minimum
// and to regenerate the profile plot data.
inline std::vector<ProfilePoint> f_profile(int n, double alpha, double beta, int grid_points) {
  if (grid_points < 2) fail(errc::domain_error, "need at least two grid points");
  std::vector<ProfilePoint> out;
  out.reserve(grid_points);
  for (int i = 1; i <= grid_points; ++i) {
    const double theta = (M_PI / 2) * static_cast<double>(i) / grid_points;
    out.push_back(ProfilePoint{theta, F_value(theta, alpha, beta, n)});
  }
  return out;
}

struct BoundComparison {
  BoundRow row;
  double trivial_bits = 1.0;       // one bit through a two-outcome readout
  double rank1_bits = 0.0;         // log2 N
  double doublecap_bits = 0.0;     // N-1, conjecture-based reference line
  double prior_art_bits = 0.0;     // 1 + log2(pi/e), dimension 2 only, else 0
  bool exceeds_trivial = false;
  bool exceeds_rank1 = false;
  bool below_prior_art = false;    // meaningful for N = 2 only
};

inline std::vector<BoundComparison> bound_table() {
  std::vector<BoundComparison> table;
  for (int n = 2; n <= 4; ++n) {
    BoundComparison cmp;
    cmp.row = bound_refined_bits(n);
    cmp.rank1_bits = std::log2(static_cast<double>(n));
    cmp.doublecap_bits = n - 1.0;
    if (n == 2) cmp.prior_art_bits = 1.0 + std::log2(M_PI / M_E);
    cmp.exceeds_trivial = cmp.row.bound_bits_refined > cmp.trivial_bits;
    cmp.exceeds_rank1 = cmp.row.bound_bits_refined > cmp.rank1_bits;
    cmp.below_prior_art = (n == 2) && cmp.row.bound_bits_refined < cmp.prior_art_bits;
    table.push_back(cmp);
  }
  return table;
}

}  // namespace cbound
