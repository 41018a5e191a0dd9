#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cbound/cbox.hpp"
#include "cbound/errors.hpp"
#include "cbound/info_theory.hpp"

namespace cbound {

struct PrimalOptions {
  double tol = 1e-10;            // stop when the objective decrease falls below this
  double feasibility_tol = 1e-9; // required max marginal deviation of the result
  double ipf_target = 1e-13;     // per-projection marginal fit target
  int max_ipf_sweeps = 200;
  int max_outer = 5000;
  std::uint64_t cap = kDefaultEnumerationCap;
};

struct PrimalResult {
  Coupling coupling;
  double value_nats = 0.0;
  double constraint_violation = 0.0;
  Prior prior;
  int iterations = 0;
  std::vector<double> objective_trace;  // one entry per outer iteration
};

namespace detail {

// I-projection of the mixture q onto the marginal constraints of one
// preparation: iterative proportional fitting over the M marginal families,
// multiplicative updates rho <- rho * P(s|a,b)/marginal_b(s). Entries outside
// the support mask stay zero.
inline void ipf_project(std::vector<double>& x, const CBox& box, int a,
                        const std::vector<std::uint64_t>& places, const PrimalOptions& opts) {
  const std::uint64_t tuples = x.size();
  std::vector<double> marg(box.s_count);
  std::vector<double> factor(box.s_count);
  for (int sweep = 0; sweep < opts.max_ipf_sweeps; ++sweep) {
    double dev = 0.0;
    for (int b = 0; b < box.m_count; ++b) {
      std::fill(marg.begin(), marg.end(), 0.0);
      const std::uint64_t place = places[b];
      for (std::uint64_t t = 0; t < tuples; ++t) {
        marg[(t / place) % box.s_count] += x[t];
      }
      for (int s = 0; s < box.s_count; ++s) {
        const double target = box.at(a, b, s);
        dev = std::max(dev, std::abs(marg[s] - target));
        factor[s] = (marg[s] > 0.0) ? target / marg[s] : 1.0;
      }
      for (std::uint64_t t = 0; t < tuples; ++t) {
        x[t] *= factor[(t / place) % box.s_count];
      }
    }
    if (dev <= opts.ipf_target) return;
  }
}

inline std::vector<std::uint64_t> digit_places(int s_count, int m_count) {
  std::vector<std::uint64_t> places(m_count);
  std::uint64_t p = 1;
  for (int b = 0; b < m_count; ++b) {
    places[b] = p;
    p *= static_cast<std::uint64_t>(s_count);
  }
  return places;
}

}  // namespace detail

// Minimizes I(S;A) over the coupling set at a fixed prior by alternating
// between the mixture update q = sum_a rho(a) rho(.|a) and, for each a, the
// I-projection of q onto the marginal constraints. Both steps decrease the
// objective, and the stationary points satisfy the product form
// rho(svec|a) = q(svec) exp(sum_b lambda(s_b,a,b)) that characterizes the
// optimum.
inline PrimalResult minimize_mutual_info(const CBox& box, const Prior& prior,
                                         const PrimalOptions& opts = {}) {
  if (prior.size() != box.a_count) fail(errc::shape_mismatch, "prior size != a_count");
  const std::uint64_t tuples = checked_tuple_count(box.s_count, box.m_count, opts.cap);
  const auto places = detail::digit_places(box.s_count, box.m_count);

  Coupling rho = product_coupling(box, opts.cap);

  // zeros in P force the matching coupling slices to zero; the product
  // initialization already has them, and IPF never revives a zero
  std::vector<int> active;
  for (int a = 0; a < box.a_count; ++a) {
    if (prior.weights[a] > 0.0) active.push_back(a);
  }
  if (active.empty()) fail(errc::empty_input, "prior has no support");

  std::vector<double> q(tuples);
  auto update_mixture = [&]() {
    std::fill(q.begin(), q.end(), 0.0);
    for (int a : active) {
      const double pa = prior.weights[a];
      const double* row = rho.table.data() + static_cast<std::size_t>(a) * tuples;
      for (std::uint64_t t = 0; t < tuples; ++t) q[t] += pa * row[t];
    }
  };
  auto objective = [&]() {
    double info = 0.0;
    for (int a : active) {
      const double pa = prior.weights[a];
      const double* row = rho.table.data() + static_cast<std::size_t>(a) * tuples;
      for (std::uint64_t t = 0; t < tuples; ++t) {
        if (row[t] > 0.0) info += pa * row[t] * std::log(row[t] / q[t]);
      }
    }
    return std::max(0.0, info);
  };

  update_mixture();
  double value = objective();
  PrimalResult result;
  result.objective_trace.push_back(value);

  std::vector<double> x(tuples);
  double last_decrease = 0.0;
  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    for (int a : active) {
      double* row = rho.table.data() + static_cast<std::size_t>(a) * tuples;
      for (std::uint64_t t = 0; t < tuples; ++t) x[t] = (row[t] > 0.0) ? q[t] : 0.0;
      detail::ipf_project(x, box, a, places, opts);
      std::copy(x.begin(), x.end(), row);
    }
    update_mixture();
    const double next = objective();
    last_decrease = value - next;
    value = next;
    result.iterations = outer;
    result.objective_trace.push_back(value);
    if (last_decrease < opts.tol) {
      const auto report = check_membership_V(rho, box, opts.feasibility_tol);
      if (report.max_deviation <= opts.feasibility_tol) {
        result.coupling = std::move(rho);
        result.value_nats = value;
        result.constraint_violation = report.max_deviation;
        result.prior = prior;
        return result;
      }
    }
  }
  fail(errc::non_convergence,
       "primal minimization stalled after " + std::to_string(opts.max_outer) +
           " iterations, last decrease " + std::to_string(last_decrease));
}

struct OuterOptions {
  PrimalOptions inner;
  double tol = 1e-7;   // certified max_a D(rho_a||q) - I gap at the returned prior
  int max_steps = 200;
  double min_step = 1e-7;
};

namespace detail {

// Per-preparation divergences D(rho_a || q); their p-average is I and their
// max upper-bounds the capacity of the current coupling, hence also the
// minimax value.
inline std::vector<double> prior_gradient(const PrimalResult& res) {
  const std::uint64_t tuples = res.coupling.tuple_count();
  std::vector<double> q(tuples, 0.0);
  for (int a = 0; a < res.coupling.a_count; ++a) {
    const double pa = res.prior.weights[a];
    for (std::uint64_t t = 0; t < tuples; ++t) q[t] += pa * res.coupling.at(a, t);
  }
  std::vector<double> div(res.coupling.a_count, 0.0);
  for (int a = 0; a < res.coupling.a_count; ++a) {
    double d = 0.0;
    for (std::uint64_t t = 0; t < tuples; ++t) {
      const double r = res.coupling.at(a, t);
      if (r > 0.0) d += r * std::log(r / q[t]);
    }
    div[a] = d;
  }
  return div;
}

}  // namespace detail

// Maximizes the fixed-prior minimum over the prior simplex by multiplicative
// mirror-ascent steps with halving on non-improvement. Terminates early with
// a certified gap: max_a D(rho_a || q) bounds the minimax value from above.
inline std::pair<Prior, PrimalResult> outer_maximize_prior(const CBox& box,
                                                           const OuterOptions& opts = {}) {
  Prior p = Prior::uniform(box.a_count);
  PrimalResult res = minimize_mutual_info(box, p, opts.inner);
  if (box.a_count == 1) return {p, std::move(res)};

  double step = 1.0;
  for (int it = 0; it < opts.max_steps; ++it) {
    const std::vector<double> div = detail::prior_gradient(res);
    double upper = 0.0;
    for (int a = 0; a < box.a_count; ++a) upper = std::max(upper, div[a]);
    if (upper - res.value_nats <= opts.tol) break;

    bool improved = false;
    while (step >= opts.min_step) {
      std::vector<double> cand(box.a_count);
      double total = 0.0;
      for (int a = 0; a < box.a_count; ++a) {
        cand[a] = p.weights[a] * std::exp(step * (div[a] - res.value_nats));
        total += cand[a];
      }
      for (double& w : cand) w /= total;
      Prior trial{cand};
      PrimalResult trial_res = minimize_mutual_info(box, trial, opts.inner);
      if (trial_res.value_nats > res.value_nats + 1e-15) {
        p = std::move(trial);
        res = std::move(trial_res);
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return {p, std::move(res)};
}

// Runs the fixed-prior minimization and reports the value in bits. The value
// lower-bounds both the asymptotic and the single-shot communication
// complexity of the box.
inline double lower_bound_at_prior(const CBox& box, const Prior& prior,
                                   const PrimalOptions& opts = {}) {
  return nats_to_bits(minimize_mutual_info(box, prior, opts).value_nats);
}

}  // namespace cbound
