#pragma once

#include <cmath>
#include <vector>

#include "cbound/cbox.hpp"
#include "cbound/errors.hpp"

namespace cbound {

// All logarithms here are natural; conversion to bits happens at reporting
// boundaries only.
inline constexpr double kLn2 = 0.69314718055994530942;

inline double nats_to_bits(double nats) { return nats / kLn2; }
inline double bits_to_nats(double bits) { return bits * kLn2; }

// I(Y;A) = sum_{a,y} p(a) W(y|a) log[ W(y|a) / q(y) ] with q = sum_a p(a) W(.|a)
// and the 0 log 0 convention. channel is row-major [a][y].
inline double mutual_information(const std::vector<double>& channel, int a_count, int y_count,
                                 const Prior& prior) {
  if (prior.size() != a_count ||
      channel.size() != static_cast<std::size_t>(a_count) * static_cast<std::size_t>(y_count)) {
    fail(errc::shape_mismatch, "channel/prior shapes disagree");
  }
  std::vector<double> q(y_count, 0.0);
  for (int a = 0; a < a_count; ++a) {
    const double pa = prior.weights[a];
    if (pa == 0.0) continue;
    for (int y = 0; y < y_count; ++y) {
      q[y] += pa * channel[static_cast<std::size_t>(a) * y_count + y];
    }
  }
  double info = 0.0;
  for (int a = 0; a < a_count; ++a) {
    const double pa = prior.weights[a];
    if (pa == 0.0) continue;
    for (int y = 0; y < y_count; ++y) {
      const double w = channel[static_cast<std::size_t>(a) * y_count + y];
      if (w > 0.0) info += pa * w * std::log(w / q[y]);
    }
  }
  return std::max(0.0, info);
}

inline double mutual_information(const Coupling& c, const Prior& prior) {
  return mutual_information(c.table, c.a_count, static_cast<int>(c.tuple_count()), prior);
}

struct CapacityResult {
  double capacity_nats = 0.0;
  Prior optimal_prior;
  int iterations = 0;
  double gap_bound = 0.0;  // certified upper-lower estimate difference at stop
};

// Alternating maximization of I over the prior. Per-iteration bounds:
// lower = I(p), upper = max_a D(W_a || q_p); terminates when their
// difference is <= tol.
inline CapacityResult channel_capacity(const std::vector<double>& channel, int a_count, int y_count,
                                       double tol, int max_iter = 100000) {
  if (tol <= 0.0) fail(errc::domain_error, "tolerance must be positive");
  if (a_count <= 0 || y_count <= 0 ||
      channel.size() != static_cast<std::size_t>(a_count) * static_cast<std::size_t>(y_count)) {
    fail(errc::shape_mismatch, "channel shape invalid");
  }
  for (int a = 0; a < a_count; ++a) {
    double row = 0.0;
    for (int y = 0; y < y_count; ++y) {
      const double w = channel[static_cast<std::size_t>(a) * y_count + y];
      if (w < 0.0) fail(errc::non_stochastic_input, "negative channel entry");
      row += w;
    }
    if (std::abs(row - 1.0) > kConstructionTol) {
      fail(errc::non_stochastic_input, "channel row " + std::to_string(a) + " sums to " + std::to_string(row));
    }
  }

  // all-zero output columns cannot carry probability; drop them up front
  std::vector<int> cols;
  for (int y = 0; y < y_count; ++y) {
    double col = 0.0;
    for (int a = 0; a < a_count; ++a) col += channel[static_cast<std::size_t>(a) * y_count + y];
    if (col > 0.0) cols.push_back(y);
  }

  std::vector<double> p(a_count, 1.0 / a_count);
  std::vector<double> q(cols.size(), 0.0);
  std::vector<double> div(a_count, 0.0);
  CapacityResult result;
  for (int it = 1; it <= max_iter; ++it) {
    std::fill(q.begin(), q.end(), 0.0);
    for (int a = 0; a < a_count; ++a) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        q[j] += p[a] * channel[static_cast<std::size_t>(a) * y_count + cols[j]];
      }
    }
    double lower = 0.0, upper = 0.0;
    for (int a = 0; a < a_count; ++a) {
      double d = 0.0;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        const double w = channel[static_cast<std::size_t>(a) * y_count + cols[j]];
        if (w > 0.0) d += w * std::log(w / q[j]);
      }
      div[a] = d;
      lower += p[a] * d;
      upper = std::max(upper, d);
    }
    result.iterations = it;
    result.gap_bound = upper - lower;
    if (result.gap_bound <= tol) {
      result.capacity_nats = std::max(0.0, lower);
      result.optimal_prior = Prior{p};
      return result;
    }
    double total = 0.0;
    for (int a = 0; a < a_count; ++a) {
      p[a] *= std::exp(div[a] - lower);  // shift by I(p) keeps the exps tame
      total += p[a];
    }
    for (int a = 0; a < a_count; ++a) p[a] /= total;
  }
  fail(errc::non_convergence, "capacity iteration did not reach tol " + std::to_string(tol) +
                                  " in " + std::to_string(max_iter) + " iterations");
}

}  // namespace cbound
