#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cbound/cbox.hpp"
#include "cbound/digest.hpp"
#include "cbound/errors.hpp"
#include "cbound/info_theory.hpp"
#include "cbound/primal.hpp"

namespace cbound {

// Dual variables lambda(s,a,b) in nats, stored as lambda[(s*a_count + a)*m_count + b].
// clamp_floor is the box constraint used by the solver; the true optimum can
// push entries to -inf on deterministic boxes, and the floor changes the
// constraint sums by at most a_count*m_count*e^clamp_floor.
struct DualPoint {
  int s_count = 0;
  int a_count = 0;
  int m_count = 0;
  std::vector<double> lambda;
  double clamp_floor = -50.0;

  double at(int s, int a, int b) const {
    return lambda[(static_cast<std::size_t>(s) * a_count + a) * m_count + b];
  }
  double& at(int s, int a, int b) {
    return lambda[(static_cast<std::size_t>(s) * a_count + a) * m_count + b];
  }

  static DualPoint zeros(int s_count, int a_count, int m_count) {
    return DualPoint{s_count, a_count, m_count,
                     std::vector<double>(static_cast<std::size_t>(s_count) * a_count * m_count, 0.0),
                     -50.0};
  }
};

inline void check_dual_shapes(const DualPoint& lp, const CBox& box, const Prior& prior) {
  if (lp.s_count != box.s_count || lp.a_count != box.a_count || lp.m_count != box.m_count ||
      prior.size() != box.a_count) {
    fail(errc::shape_mismatch, "dual point / box / prior shapes disagree");
  }
}

// Objective I = sum_{s,a,b} P(s|a,b) rho(a) lambda(s,a,b), linear in lambda and in P.
inline double dual_objective(const DualPoint& lp, const CBox& box, const Prior& prior) {
  check_dual_shapes(lp, box, prior);
  double total = 0.0;
  for (int s = 0; s < lp.s_count; ++s) {
    for (int a = 0; a < lp.a_count; ++a) {
      const double pa = prior.weights[a];
      if (pa == 0.0) continue;
      for (int b = 0; b < lp.m_count; ++b) total += box.at(a, b, s) * pa * lp.at(s, a, b);
    }
  }
  return total;
}

// log sum_a rho(a) exp(sum_b lambda(s_b,a,b)) for one outcome tuple, computed
// with max-shifted exponentials. Feasible iff <= 0.
inline double constraint_lse(const DualPoint& lp, const Prior& prior, const std::vector<int>& sv) {
  if (static_cast<int>(sv.size()) != lp.m_count) {
    fail(errc::shape_mismatch, "tuple length != m_count");
  }
  double zmax = -HUGE_VAL;
  std::vector<double> z(lp.a_count, -HUGE_VAL);
  for (int a = 0; a < lp.a_count; ++a) {
    const double pa = prior.weights[a];
    if (pa == 0.0) continue;
    double e = std::log(pa);
    for (int b = 0; b < lp.m_count; ++b) e += lp.at(sv[b], a, b);
    z[a] = e;
    zmax = std::max(zmax, e);
  }
  double total = 0.0;
  for (int a = 0; a < lp.a_count; ++a) {
    if (z[a] > -HUGE_VAL) total += std::exp(z[a] - zmax);
  }
  return zmax + std::log(total);
}

struct Violation {
  double value = 0.0;
  SVector argmax;
};

// Exhaustive max of constraint_lse over all s_count^M tuples.
inline Violation max_violation(const DualPoint& lp, const Prior& prior,
                               std::uint64_t cap = kDefaultEnumerationCap) {
  checked_tuple_count(lp.s_count, lp.m_count, cap);
  std::vector<double> logp(lp.a_count);
  for (int a = 0; a < lp.a_count; ++a) {
    logp[a] = prior.weights[a] > 0.0 ? std::log(prior.weights[a]) : -HUGE_VAL;
  }
  Violation best;
  best.value = -HUGE_VAL;
  std::vector<int> digits(lp.m_count, 0);
  std::vector<double> z(lp.a_count);
  std::uint64_t index = 0;
  do {
    double zmax = -HUGE_VAL;
    for (int a = 0; a < lp.a_count; ++a) {
      double e = logp[a];
      if (e > -HUGE_VAL) {
        for (int b = 0; b < lp.m_count; ++b) e += lp.at(digits[b], a, b);
      }
      z[a] = e;
      zmax = std::max(zmax, e);
    }
    double total = 0.0;
    for (int a = 0; a < lp.a_count; ++a) {
      if (z[a] > -HUGE_VAL) total += std::exp(z[a] - zmax);
    }
    const double lse = zmax + std::log(total);
    if (lse > best.value) {
      best.value = lse;
      best.argmax = SVector{digits, index};
    }
    ++index;
  } while (next_tuple(digits, lp.s_count));
  return best;
}

// Shifts every lambda(.,.,b) by -c/M where c is the max violation: every
// constraint drops by exactly c and the objective by exactly c, so the output
// sits on the feasible boundary. Already-feasible points shift up.
inline DualPoint normalize_feasible(const DualPoint& lp, const Prior& prior,
                                    std::uint64_t cap = kDefaultEnumerationCap) {
  const double c = max_violation(lp, prior, cap).value;
  DualPoint out = lp;
  const double shift = c / lp.m_count;
  double min_entry = HUGE_VAL;
  for (double& v : out.lambda) {
    v -= shift;
    min_entry = std::min(min_entry, v);
  }
  out.clamp_floor = std::min(lp.clamp_floor, min_entry);
  return out;
}

struct DualOptions {
  double step0 = 1.0;       // subgradient step is step0/sqrt(k)
  int max_iter = 60000;
  double clamp_floor = -50.0;
  int report_every = 250;   // trace granularity
  double stall_tol = 1e-12; // early stop when a full window improves less than this
  int stall_window = 6000;
  std::uint64_t cap = kDefaultEnumerationCap;
};

struct DualReport {
  int iteration = 0;
  double bound_nats = 0.0;
  DualPoint point;  // feasible: passed through normalize_feasible
};

struct DualResult {
  DualPoint point;          // best feasible point found
  double bound_nats = 0.0;  // its objective value
  int iterations = 0;
  bool converged = false;
  std::vector<DualReport> trace;
};

// Projected subgradient ascent on the concave surrogate G(lambda) =
// I(lambda) - c(lambda), c = max violation: maximizing G is equivalent to
// maximizing the objective over the feasible set, because the normalizing
// shift turns any lambda into a boundary point of value G(lambda).
// Subgradients of c at near-ties are averaged over the active tuples.
// Entries with zero objective coefficient start and stay at the clamp floor
// (lowering them never hurts the objective and only loosens constraints).
// Every reported bound comes from a normalized point, so it is valid even
// when the run stops early.
inline DualResult maximize_dual(const CBox& box, const Prior& prior, const DualOptions& opts = {}) {
  if (prior.size() != box.a_count) fail(errc::shape_mismatch, "prior size != a_count");
  const std::uint64_t tuples = checked_tuple_count(box.s_count, box.m_count, opts.cap);
  const int S = box.s_count, A = box.a_count, M = box.m_count;
  const std::size_t dim = static_cast<std::size_t>(S) * A * M;

  std::vector<double> grad_obj(dim, 0.0);
  DualPoint lp = DualPoint::zeros(S, A, M);
  lp.clamp_floor = opts.clamp_floor;
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      for (int b = 0; b < M; ++b) {
        const std::size_t e = (static_cast<std::size_t>(s) * A + a) * M + b;
        grad_obj[e] = box.at(a, b, s) * prior.weights[a];
        if (grad_obj[e] == 0.0) lp.lambda[e] = opts.clamp_floor;
      }
    }
  }
  std::vector<double> logp(A);
  for (int a = 0; a < A; ++a) {
    logp[a] = prior.weights[a] > 0.0 ? std::log(prior.weights[a]) : -HUGE_VAL;
  }

  std::vector<double> lse(tuples);
  std::vector<double> weights(static_cast<std::size_t>(tuples) * A);
  std::vector<double> grad(dim);
  std::vector<int> digits(M);

  DualResult result;
  double best = -HUGE_VAL;
  DualPoint best_point = lp;
  double window_base = -HUGE_VAL;
  int since_window = 0;

  auto record = [&](int iteration) {
    DualReport rep;
    rep.iteration = iteration;
    rep.point = normalize_feasible(best_point, prior, opts.cap);
    rep.bound_nats = dual_objective(rep.point, box, prior);
    result.trace.push_back(std::move(rep));
  };

  int k = 1;
  for (; k <= opts.max_iter; ++k) {
    // constraint values and per-tuple posterior weights
    std::fill(digits.begin(), digits.end(), 0);
    std::uint64_t t = 0;
    double c = -HUGE_VAL;
    do {
      double zmax = -HUGE_VAL;
      double* w = weights.data() + static_cast<std::size_t>(t) * A;
      for (int a = 0; a < A; ++a) {
        double e = logp[a];
        if (e > -HUGE_VAL) {
          for (int b = 0; b < M; ++b) e += lp.at(digits[b], a, b);
        }
        w[a] = e;
        zmax = std::max(zmax, e);
      }
      double total = 0.0;
      for (int a = 0; a < A; ++a) {
        w[a] = (w[a] > -HUGE_VAL) ? std::exp(w[a] - zmax) : 0.0;
        total += w[a];
      }
      for (int a = 0; a < A; ++a) w[a] /= total;
      lse[t] = zmax + std::log(total);
      c = std::max(c, lse[t]);
      ++t;
    } while (next_tuple(digits, S));

    double obj = 0.0;
    for (std::size_t e = 0; e < dim; ++e) obj += grad_obj[e] * lp.lambda[e];
    const double surrogate = obj - c;
    if (surrogate > best) {
      best = surrogate;
      best_point = lp;
    }

    if (k == 1 || k % opts.report_every == 0) record(k);

    since_window += 1;
    if (since_window >= opts.stall_window) {
      if (best - window_base <= opts.stall_tol * (1.0 + std::abs(best))) {
        result.converged = true;
        break;
      }
      window_base = best;
      since_window = 0;
    }

    const double step = opts.step0 / std::sqrt(static_cast<double>(k));
    const double eps = 0.5 * std::min(1e-3, step);

    std::copy(grad_obj.begin(), grad_obj.end(), grad.begin());
    int active = 0;
    for (std::uint64_t u = 0; u < tuples; ++u) {
      if (lse[u] >= c - eps) ++active;
    }
    std::fill(digits.begin(), digits.end(), 0);
    t = 0;
    do {
      if (lse[t] >= c - eps) {
        const double* w = weights.data() + static_cast<std::size_t>(t) * A;
        for (int b = 0; b < M; ++b) {
          for (int a = 0; a < A; ++a) {
            grad[(static_cast<std::size_t>(digits[b]) * A + a) * M + b] -= w[a] / active;
          }
        }
      }
      ++t;
    } while (next_tuple(digits, S));

    for (std::size_t e = 0; e < dim; ++e) {
      lp.lambda[e] = std::max(opts.clamp_floor, lp.lambda[e] + step * grad[e]);
    }
  }

  result.iterations = std::min(k, opts.max_iter);
  record(result.iterations);
  result.point = result.trace.back().point;
  result.bound_nats = result.trace.back().bound_nats;
  return result;
}

// Portable lower-bound certificate: a feasible dual point bound to one exact
// box document via its digest.
struct Certificate {
  std::string box_digest;
  Prior prior;
  DualPoint point;
  double claimed_bound_bits = 0.0;
  std::string tool_version;
  std::string created;
};

inline Certificate make_certificate(const CBox& box, const Prior& prior, const DualPoint& point,
                                    const std::string& tool_version, const std::string& created) {
  Certificate cert;
  cert.box_digest = box_digest(box);
  cert.prior = prior;
  cert.point = point;
  cert.claimed_bound_bits = nats_to_bits(dual_objective(point, box, prior));
  cert.tool_version = tool_version;
  cert.created = created;
  return cert;
}

enum class CertStatus { ok, digest_mismatch, infeasible, claim_unsupported };

struct CertCheck {
  CertStatus status = CertStatus::ok;
  double verified_bits = 0.0;
  double verified_nats = 0.0;
  double violation = 0.0;
  SVector witness;  // set when infeasible
};

inline constexpr double kCertFeasibilityTol = 1e-9;

// Recomputes everything from scratch; the result does not depend on how the
// certificate's lambda was produced.
inline CertCheck check_certificate_status(const Certificate& cert, const CBox& box,
                                          std::uint64_t cap = kDefaultEnumerationCap) {
  CertCheck check;
  if (cert.box_digest != box_digest(box)) {
    check.status = CertStatus::digest_mismatch;
    return check;
  }
  const Violation v = max_violation(cert.point, cert.prior, cap);
  check.violation = std::max(0.0, v.value);
  if (v.value > kCertFeasibilityTol) {
    check.status = CertStatus::infeasible;
    check.witness = v.argmax;
    return check;
  }
  check.verified_nats = dual_objective(cert.point, box, cert.prior);
  check.verified_bits = nats_to_bits(check.verified_nats);
  if (check.verified_bits < cert.claimed_bound_bits - 1e-9) {
    check.status = CertStatus::claim_unsupported;
    return check;
  }
  check.status = CertStatus::ok;
  return check;
}

struct VerifiedBound {
  double bound_bits = 0.0;
  double bound_nats = 0.0;
  double violation = 0.0;
};

inline VerifiedBound check_certificate(const Certificate& cert, const CBox& box,
                                       std::uint64_t cap = kDefaultEnumerationCap) {
  const CertCheck check = check_certificate_status(cert, box, cap);
  switch (check.status) {
    case CertStatus::ok:
      return VerifiedBound{check.verified_bits, check.verified_nats, check.violation};
    case CertStatus::digest_mismatch:
      fail(errc::digest_mismatch, "certificate was produced for a different box document");
    case CertStatus::infeasible: {
      std::string tuple;
      for (std::size_t i = 0; i < check.witness.entries.size(); ++i) {
        if (i) tuple += ',';
        tuple += std::to_string(check.witness.entries[i]);
      }
      fail(errc::infeasible_certificate,
           "constraint violated by " + std::to_string(check.violation) + " at tuple (" + tuple + ")");
    }
    case CertStatus::claim_unsupported:
      fail(errc::claim_unsupported,
           "claimed " + std::to_string(cert.claimed_bound_bits) + " bits, recomputed " +
               std::to_string(check.verified_bits));
  }
  fail(errc::claim_unsupported, "unreachable");
}

struct GapResult {
  double primal_nats = 0.0;
  double dual_nats = 0.0;
  double gap = 0.0;
};

// Solves both sides at a fixed prior. Strong duality predicts gap -> 0;
// weak duality guarantees gap >= 0 up to fp.
inline GapResult duality_gap(const CBox& box, const Prior& prior, const PrimalOptions& popts = {},
                             const DualOptions& dopts = {}) {
  const PrimalResult primal = minimize_mutual_info(box, prior, popts);
  const DualResult dual = maximize_dual(box, prior, dopts);
  return GapResult{primal.value_nats, dual.bound_nats, primal.value_nats - dual.bound_nats};
}

}  // namespace cbound
