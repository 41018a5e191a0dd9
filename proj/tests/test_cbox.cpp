#include <catch2/catch_amalgamated.hpp>

#include "cbound/cbox.hpp"
#include "oracles.hpp"

using namespace cbound;

namespace {

CBox identity_binary_box() {
  // P(s|a) = delta_{s,a}, one setting
  return validate_cbox(2, 1, 2, {1.0, 0.0, 0.0, 1.0});
}

}  // namespace

TEST_CASE("validate_cbox accepts the deterministic identity box") {
  const CBox box = identity_binary_box();
  CHECK(box.a_count == 2);
  CHECK(box.at(0, 0, 0) == 1.0);
  CHECK(box.at(1, 0, 0) == 0.0);
}

TEST_CASE("validate_cbox rejects negative entries with coordinates") {
  try {
    validate_cbox(1, 1, 2, {1.1, -0.1});
    FAIL("expected negative_probability");
  } catch (const Error& e) {
    CHECK(e.code() == errc::negative_probability);
    CHECK(std::string(e.what()).find("s=1") != std::string::npos);
  }
}

TEST_CASE("validate_cbox rejects unnormalized rows and reports the deficit") {
  try {
    validate_cbox(1, 1, 2, {0.49, 0.49});
    FAIL("expected row_not_normalized");
  } catch (const Error& e) {
    CHECK(e.code() == errc::row_not_normalized);
    CHECK(std::string(e.what()).find("0.02") != std::string::npos);
  }
}

TEST_CASE("tuple codec is a bijection, exhaustively") {
  const int s_count = 4, m_count = 6;  // 4096 tuples
  const std::uint64_t total = checked_tuple_count(s_count, m_count);
  REQUIRE(total == 4096);
  for (std::uint64_t i = 0; i < total; ++i) {
    const auto entries = sv_decode(i, s_count, m_count);
    CHECK(sv_encode(entries, s_count) == i);
  }
  // s_1 is the least significant digit
  const auto entries = sv_decode(3, 4, 6);
  CHECK(entries[0] == 3);
  for (int b = 1; b < 6; ++b) CHECK(entries[b] == 0);
}

TEST_CASE("enumeration cap fails fast") {
  CHECK_THROWS_AS(checked_tuple_count(10, 7), Error);  // 10^7 over the default cap
  try {
    checked_tuple_count(10, 7);
  } catch (const Error& e) {
    CHECK(e.code() == errc::size_overflow);
  }
  CHECK(checked_tuple_count(10, 7, 10'000'000) == 10'000'000);
}

TEST_CASE("product coupling marginals reproduce every box slice") {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const CBox box = oracle::random_box(rng, rng.uniform_int(1, 3), rng.uniform_int(1, 3),
                                        rng.uniform_int(2, 4));
    const Coupling c = product_coupling(box);
    for (int b = 0; b < box.m_count; ++b) {
      const auto marg = coupling_marginal(c, b);
      for (int a = 0; a < box.a_count; ++a) {
        for (int s = 0; s < box.s_count; ++s) {
          CHECK(marg[static_cast<std::size_t>(a) * box.s_count + s] ==
                Catch::Approx(box.at(a, b, s)).margin(1e-14));
        }
      }
    }
    CHECK(check_membership_V(c, box, 1e-12).member);
  }
}

TEST_CASE("single-setting coupling equals its own marginal") {
  oracle::Rng rng(5);
  const CBox box = oracle::random_box(rng, 3, 1, 4);
  const Coupling c = product_coupling(box);
  const auto marg = coupling_marginal(c, 0);
  for (std::size_t i = 0; i < c.table.size(); ++i) {
    CHECK(marg[i] == Catch::Approx(c.table[i]).margin(1e-15));
  }
}

TEST_CASE("marginal agrees with brute-force summation over tuples") {
  oracle::Rng rng(23);
  const int a_count = 2, m_count = 3, s_count = 3;
  const std::uint64_t tuples = checked_tuple_count(s_count, m_count);
  // random valid coupling: normalize random mass per a
  Coupling c{a_count, m_count, s_count,
             std::vector<double>(static_cast<std::size_t>(a_count) * tuples)};
  for (int a = 0; a < a_count; ++a) {
    double total = 0.0;
    for (std::uint64_t t = 0; t < tuples; ++t) {
      c.at(a, t) = rng.uniform();
      total += c.at(a, t);
    }
    for (std::uint64_t t = 0; t < tuples; ++t) c.at(a, t) /= total;
  }
  for (int b = 0; b < m_count; ++b) {
    const auto marg = coupling_marginal(c, b);
    for (int a = 0; a < a_count; ++a) {
      for (int s = 0; s < s_count; ++s) {
        double direct = 0.0;
        for (std::uint64_t t = 0; t < tuples; ++t) {
          if (sv_decode(t, s_count, m_count)[b] == s) direct += c.at(a, t);
        }
        CHECK(marg[static_cast<std::size_t>(a) * s_count + s] ==
              Catch::Approx(direct).margin(1e-12));
      }
    }
    double row = 0.0;
    for (int s = 0; s < s_count; ++s) row += marg[s];
    CHECK(row == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("membership report flags couplings from a different box") {
  oracle::Rng rng(31);
  const CBox box_a = oracle::random_box(rng, 2, 2, 2);
  const CBox box_b = oracle::random_box(rng, 2, 2, 2);
  const Coupling c = product_coupling(box_a);
  const auto ok = check_membership_V(c, box_a, 1e-12);
  CHECK(ok.member);
  CHECK(ok.max_deviation <= 1e-14);
  const auto bad = check_membership_V(c, box_b, 1e-6);
  CHECK_FALSE(bad.member);
  CHECK(bad.max_deviation > 1e-3);
}

TEST_CASE("membership checks shapes") {
  const CBox box = identity_binary_box();
  Coupling wrong{3, 1, 2, std::vector<double>(6, 1.0 / 2)};
  CHECK_THROWS_AS(check_membership_V(wrong, box), Error);
}

TEST_CASE("coupling_marginal rejects out-of-range settings") {
  const Coupling c = product_coupling(identity_binary_box());
  CHECK_THROWS_AS(coupling_marginal(c, 1), Error);
}

TEST_CASE("a-independent boxes give a-independent product couplings") {
  const CBox box = validate_cbox(2, 2, 2, {0.3, 0.7, 0.6, 0.4, 0.3, 0.7, 0.6, 0.4});
  const Coupling c = product_coupling(box);
  const std::uint64_t tuples = c.tuple_count();
  for (std::uint64_t t = 0; t < tuples; ++t) {
    CHECK(c.at(0, t) == Catch::Approx(c.at(1, t)).margin(1e-15));
  }
  // spot-check one product entry: rho((0,1)|a) = P(0|a,0) P(1|a,1)
  const std::uint64_t idx = sv_encode({0, 1}, 2);
  CHECK(c.at(0, idx) == Catch::Approx(0.3 * 0.4).margin(1e-15));
}

TEST_CASE("priors validate weights") {
  CHECK_THROWS_AS(validate_prior({0.5, 0.6}), Error);
  CHECK_THROWS_AS(validate_prior({1.5, -0.5}), Error);
  CHECK_THROWS_AS(validate_prior({}), Error);
  const Prior u = Prior::uniform(4);
  CHECK(u.weights[3] == 0.25);
}
