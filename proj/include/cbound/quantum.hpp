#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "cbound/cbox.hpp"
#include "cbound/errors.hpp"

namespace cbound {

struct PureState {
  std::vector<std::complex<double>> amplitudes;

  int dim() const { return static_cast<int>(amplitudes.size()); }

  static PureState normalized(std::vector<std::complex<double>> amps) {
    if (amps.empty()) fail(errc::empty_input, "state has no amplitudes");
    double norm2 = 0.0;
    for (const auto& z : amps) norm2 += std::norm(z);
    if (norm2 <= 0.0) fail(errc::domain_error, "cannot normalize the zero vector");
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& z : amps) z *= inv;
    return PureState{std::move(amps)};
  }
};

inline PureState validate_state(std::vector<std::complex<double>> amps) {
  if (amps.empty()) fail(errc::empty_input, "state has no amplitudes");
  double norm2 = 0.0;
  for (const auto& z : amps) norm2 += std::norm(z);
  if (std::abs(norm2 - 1.0) > 1e-12) {
    fail(errc::domain_error, "state norm^2 = " + std::to_string(norm2) + " is not 1");
  }
  return PureState{std::move(amps)};
}

// Rank-1 two-outcome measurement: the event |phi><phi| and its complement.
struct TwoOutcomeMeasurement {
  PureState axis;
};

// Cone of unit vectors phi with |<chi|phi>|^2 >= cos^2(theta).
struct Cone {
  PureState axis;
  double half_angle = 0.0;
};

inline std::complex<double> inner(const PureState& x, const PureState& y) {
  std::complex<double> acc = 0.0;
  for (int i = 0; i < x.dim(); ++i) acc += std::conj(x.amplitudes[i]) * y.amplitudes[i];
  return acc;
}

// Born rule for the two-outcome model: (|<psi|phi>|^2, 1 - |<psi|phi>|^2).
inline std::pair<double, double> born_probability(const PureState& psi,
                                                  const TwoOutcomeMeasurement& phi) {
  if (psi.dim() != phi.axis.dim()) {
    fail(errc::dimension_mismatch, "state dim " + std::to_string(psi.dim()) +
                                       " vs measurement dim " + std::to_string(phi.axis.dim()));
  }
  double p1 = std::norm(inner(psi, phi.axis));
  p1 = std::min(1.0, std::max(0.0, p1));  // fp roundoff can leave [0,1]
  return {p1, 1.0 - p1};
}

// Box with outcome 0 = the rank-1 event, outcome 1 = its complement.
inline CBox build_quantum_cbox(const std::vector<PureState>& states,
                               const std::vector<TwoOutcomeMeasurement>& axes) {
  if (states.empty() || axes.empty()) fail(errc::empty_input, "need at least one state and one axis");
  const int n = states.front().dim();
  for (const auto& st : states) {
    if (st.dim() != n) fail(errc::dimension_mismatch, "states have mixed dimensions");
  }
  for (const auto& ax : axes) {
    if (ax.axis.dim() != n) fail(errc::dimension_mismatch, "axes dimension differs from states");
  }
  const int a_count = static_cast<int>(states.size());
  const int m_count = static_cast<int>(axes.size());
  std::vector<double> probs(static_cast<std::size_t>(a_count) * m_count * 2);
  for (int a = 0; a < a_count; ++a) {
    for (int b = 0; b < m_count; ++b) {
      const auto [p1, p2] = born_probability(states[a], axes[b]);
      probs[(static_cast<std::size_t>(a) * m_count + b) * 2 + 0] = p1;
      probs[(static_cast<std::size_t>(a) * m_count + b) * 2 + 1] = p2;
    }
  }
  return validate_cbox(a_count, m_count, 2, std::move(probs));
}

// Deterministic Gaussian source: explicit Box-Muller over mt19937_64 output,
// so sequences do not depend on the standard library's normal_distribution.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = unit_open();
    const double u2 = unit_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

 private:
  double unit_open() {
    // (0,1]: avoids log(0) in Box-Muller
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Haar samples via normalized complex-Gaussian components.
inline std::vector<PureState> haar_sample(int n, int count, std::uint64_t seed) {
  if (n < 1) fail(errc::domain_error, "dimension must be >= 1");
  if (count < 1) fail(errc::domain_error, "sample count must be >= 1");
  GaussianSource gauss(seed);
  std::vector<PureState> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    std::vector<std::complex<double>> amps(n);
    for (int j = 0; j < n; ++j) amps[j] = {gauss(), gauss()};
    out.push_back(PureState::normalized(std::move(amps)));
  }
  return out;
}

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

// Monte Carlo moment of the overlap with a fixed state, int dphi |<phi|psi>|^k.
// psi is fixed to e_1 (unitary invariance). Supported k: 2 and 4.
inline McEstimate mc_overlap_moment(int n, int k, std::int64_t samples, std::uint64_t seed) {
  if (k != 2 && k != 4) fail(errc::unsupported_moment, "moment order " + std::to_string(k));
  if (n < 1) fail(errc::domain_error, "dimension must be >= 1");
  if (samples < 1) fail(errc::domain_error, "need at least one sample");
  GaussianSource gauss(seed);
  double sum = 0.0, sumsq = 0.0;
  std::vector<std::complex<double>> amps(n);
  for (std::int64_t i = 0; i < samples; ++i) {
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      amps[j] = {gauss(), gauss()};
      norm2 += std::norm(amps[j]);
    }
    const double overlap = std::norm(amps[0]) / norm2;
    const double x = (k == 2) ? overlap : overlap * overlap;
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / samples;
  const double var = std::max(0.0, sumsq / samples - mean * mean);
  return {mean, std::sqrt(var / samples)};
}

// Haar measure of the cone of half-angle theta: sin^(2N-2) theta.
inline double cone_measure(double theta, int n) {
  if (n < 2) fail(errc::domain_error, "dimension must be >= 2");
  if (theta < 0.0 || theta > M_PI / 2 + 1e-15) {
    fail(errc::domain_error, "theta = " + std::to_string(theta) + " outside [0, pi/2]");
  }
  return std::pow(std::sin(theta), 2.0 * n - 2.0);
}

// Overlap integral over the cone:
//   int_{Omega(theta)} dphi |<psi|phi>|^2
//     = S(theta) (cos^2 theta |<psi|chi>|^2 + sin^2 theta / N).
inline double cone_overlap_integral(double theta, double overlap, int n) {
  if (overlap < 0.0 || overlap > 1.0) {
    fail(errc::domain_error, "overlap = " + std::to_string(overlap) + " outside [0,1]");
  }
  const double s = cone_measure(theta, n);
  const double c2 = std::cos(theta) * std::cos(theta);
  const double s2 = std::sin(theta) * std::sin(theta);
  return s * (c2 * overlap + s2 / n);
}

// Monte Carlo check of cone_measure: fraction of Haar samples inside the cone
// around chi = e_1.
inline McEstimate mc_cone_measure(double theta, int n, std::int64_t samples, std::uint64_t seed) {
  if (n < 2) fail(errc::domain_error, "dimension must be >= 2");
  if (theta < 0.0 || theta > M_PI / 2 + 1e-15) {
    fail(errc::domain_error, "theta outside [0, pi/2]");
  }
  const double threshold = std::cos(theta) * std::cos(theta);
  GaussianSource gauss(seed);
  std::int64_t hits = 0;
  std::vector<std::complex<double>> amps(n);
  for (std::int64_t i = 0; i < samples; ++i) {
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      amps[j] = {gauss(), gauss()};
      norm2 += std::norm(amps[j]);
    }
    if (std::norm(amps[0]) / norm2 >= threshold) ++hits;
  }
  const double p = static_cast<double>(hits) / samples;
  return {p, std::sqrt(std::max(0.0, p * (1.0 - p)) / samples)};
}

}  // namespace cbound
