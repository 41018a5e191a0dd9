#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cbound/primal.hpp"
#include "oracles.hpp"

using namespace cbound;
using Catch::Approx;

namespace {

CBox identity_binary_box() { return validate_cbox(2, 1, 2, {1.0, 0.0, 0.0, 1.0}); }

CBox a_independent_box() {
  return validate_cbox(2, 2, 2, {0.3, 0.7, 0.6, 0.4, 0.3, 0.7, 0.6, 0.4});
}

}  // namespace

TEST_CASE("single setting leaves no freedom: value equals the box mutual information") {
  const CBox box = identity_binary_box();
  const Prior prior = Prior::uniform(2);
  const auto res = minimize_mutual_info(box, prior);
  CHECK(res.value_nats == Approx(std::log(2.0)).margin(1e-12));
  CHECK(res.constraint_violation <= 1e-12);

  oracle::Rng rng(3);
  const CBox noisy = oracle::random_box(rng, 3, 1, 3);
  const Prior p3 = oracle::random_prior(rng, 3);
  const auto r2 = minimize_mutual_info(noisy, p3);
  CHECK(r2.value_nats == Approx(mutual_information(noisy.probs, 3, 3, p3)).margin(1e-10));
}

TEST_CASE("input-independent boxes cost nothing") {
  const auto res = minimize_mutual_info(a_independent_box(), Prior::uniform(2));
  CHECK(res.value_nats <= 1e-12);
  CHECK(check_membership_V(res.coupling, a_independent_box(), 1e-9).member);
}

TEST_CASE("solver output is feasible and the objective trace never increases") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    const CBox box = oracle::random_quantum_box(seed, 3, 2, 2);
    const auto res = minimize_mutual_info(box, Prior::uniform(3));
    const auto membership = check_membership_V(res.coupling, box, 1e-6);
    CHECK(membership.member);
    CHECK(res.constraint_violation <= 1e-9);
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i) {
      CHECK(res.objective_trace[i] <= res.objective_trace[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("alternating minimizer matches a Euclidean projected-gradient oracle") {
  oracle::Rng rng(101);
  for (int trial = 0; trial < 4; ++trial) {
    const CBox box = oracle::random_box(rng, rng.uniform_int(2, 3), 2, 2);
    const Prior prior = Prior::uniform(box.a_count);
    const auto res = minimize_mutual_info(box, prior);
    const double ref = oracle::projected_gradient_min(box, prior);
    CHECK(res.value_nats == Approx(ref).margin(1e-4));
  }
}

TEST_CASE("zero-weight preparations are dropped before solving") {
  const CBox box3 = validate_cbox(
      3, 1, 2, {1.0, 0.0, 0.0, 1.0, 0.5, 0.5});
  const Prior partial = validate_prior({0.5, 0.5, 0.0});
  const auto res3 = minimize_mutual_info(box3, partial);
  const auto res2 = minimize_mutual_info(identity_binary_box(), Prior::uniform(2));
  CHECK(res3.value_nats == Approx(res2.value_nats).margin(1e-10));
}

TEST_CASE("the cap rejects oversized instances") {
  oracle::Rng rng(5);
  const CBox box = oracle::random_box(rng, 2, 3, 4);  // 64 tuples
  PrimalOptions opts;
  opts.cap = 32;
  CHECK_THROWS_AS(minimize_mutual_info(box, Prior::uniform(2), opts), Error);
}

TEST_CASE("exhausting the outer iterations reports non-convergence") {
  const CBox box = oracle::random_quantum_box(9, 3, 2, 2);
  PrimalOptions opts;
  opts.max_outer = 1;
  opts.tol = 0.0;  // an exact-zero decrease never happens on this box
  try {
    minimize_mutual_info(box, Prior::uniform(3), opts);
    FAIL("expected non_convergence");
  } catch (const Error& e) {
    CHECK(e.code() == errc::non_convergence);
  }
}

TEST_CASE("prior maximization: single preparation is trivial") {
  const CBox box = validate_cbox(1, 2, 2, {0.4, 0.6, 0.7, 0.3});
  const auto [prior, res] = outer_maximize_prior(box);
  CHECK(prior.weights.size() == 1);
  CHECK(prior.weights[0] == 1.0);
  CHECK(res.value_nats <= 1e-12);
}

TEST_CASE("prior maximization never falls below the uniform-prior value") {
  for (std::uint64_t seed : {11ull, 12ull}) {
    const CBox box = oracle::random_quantum_box(seed, 3, 2, 2);
    const auto at_uniform = minimize_mutual_info(box, Prior::uniform(3));
    const auto [prior, res] = outer_maximize_prior(box);
    CHECK(res.value_nats >= at_uniform.value_nats - 1e-9);
  }
}

TEST_CASE("symmetric boxes keep the uniform prior") {
  // conjugate bases: a symmetric state set against symmetric axes
  const double r = 1.0 / std::sqrt(2.0);
  auto states = std::vector<PureState>{validate_state({{1, 0}, {0, 0}}),
                                       validate_state({{0, 0}, {1, 0}}),
                                       validate_state({{r, 0}, {r, 0}}),
                                       validate_state({{r, 0}, {-r, 0}})};
  auto axes = std::vector<TwoOutcomeMeasurement>{TwoOutcomeMeasurement{states[0]},
                                                 TwoOutcomeMeasurement{states[2]}};
  const CBox box = build_quantum_cbox(states, axes);
  const auto at_uniform = minimize_mutual_info(box, Prior::uniform(4));
  OuterOptions opts;
  opts.tol = 1e-8;
  const auto [prior, res] = outer_maximize_prior(box, opts);
  CHECK(res.value_nats <= at_uniform.value_nats + 1e-6);
  CHECK(res.value_nats >= at_uniform.value_nats - 1e-9);
}

TEST_CASE("duplicated preparations do not raise the minimax value") {
  oracle::Rng rng(71);
  const CBox base = oracle::random_quantum_box(31, 2, 2, 2);
  std::vector<double> probs = base.probs;
  // duplicate preparation row 0
  probs.insert(probs.end(), base.probs.begin(),
               base.probs.begin() + static_cast<std::ptrdiff_t>(base.m_count * base.s_count));
  const CBox dup = validate_cbox(3, base.m_count, base.s_count, probs);
  OuterOptions opts;
  opts.tol = 1e-7;
  const auto [p1, r1] = outer_maximize_prior(base, opts);
  const auto [p2, r2] = outer_maximize_prior(dup, opts);
  CHECK(r2.value_nats == Approx(r1.value_nats).margin(1e-4));
}

TEST_CASE("lower_bound_at_prior reports bits and is dominated by the maximized prior") {
  const CBox box = identity_binary_box();
  CHECK(lower_bound_at_prior(box, Prior::uniform(2)) == Approx(1.0).margin(1e-10));
  const CBox q = oracle::random_quantum_box(77, 3, 2, 2);
  const double fixed = lower_bound_at_prior(q, Prior::uniform(3));
  const auto [prior, res] = outer_maximize_prior(q);
  CHECK(fixed <= nats_to_bits(res.value_nats) + 1e-6);
}
