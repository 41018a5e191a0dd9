#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "cbound/quantum.hpp"
#include "oracles.hpp"

using namespace cbound;
using Catch::Approx;

namespace {

PureState basis_state(int dim, int k) {
  std::vector<std::complex<double>> amps(dim, 0.0);
  amps[k] = 1.0;
  return validate_state(std::move(amps));
}

PureState plus_state(double sign = 1.0) {
  const double r = 1.0 / std::sqrt(2.0);
  return validate_state({{r, 0.0}, {sign * r, 0.0}});
}

// Haar-random unitary via Gram-Schmidt on Gaussian columns, test-local.
std::vector<std::vector<std::complex<double>>> random_unitary(int dim, std::uint64_t seed) {
  GaussianSource gauss(seed);
  std::vector<std::vector<std::complex<double>>> cols(dim,
                                                      std::vector<std::complex<double>>(dim));
  for (auto& col : cols) {
    for (auto& z : col) z = {gauss(), gauss()};
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < i; ++j) {
      std::complex<double> proj = 0.0;
      for (int r = 0; r < dim; ++r) proj += std::conj(cols[j][r]) * cols[i][r];
      for (int r = 0; r < dim; ++r) cols[i][r] -= proj * cols[j][r];
    }
    double norm = 0.0;
    for (int r = 0; r < dim; ++r) norm += std::norm(cols[i][r]);
    norm = std::sqrt(norm);
    for (int r = 0; r < dim; ++r) cols[i][r] /= norm;
  }
  return cols;
}

PureState apply_unitary(const std::vector<std::vector<std::complex<double>>>& u,
                        const PureState& st) {
  const int dim = st.dim();
  std::vector<std::complex<double>> out(dim, 0.0);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) out[r] += u[c][r] * st.amplitudes[c];
  }
  return PureState{std::move(out)};
}

}  // namespace

TEST_CASE("born probabilities: aligned, orthogonal, and balanced overlaps") {
  const auto e0 = basis_state(2, 0);
  const auto e1 = basis_state(2, 1);
  auto [p_same, q_same] = born_probability(e0, TwoOutcomeMeasurement{e0});
  CHECK(p_same == Approx(1.0).margin(1e-15));
  CHECK(q_same == Approx(0.0).margin(1e-15));
  auto [p_orth, q_orth] = born_probability(e0, TwoOutcomeMeasurement{e1});
  CHECK(p_orth == Approx(0.0).margin(1e-15));
  CHECK(q_orth == Approx(1.0).margin(1e-15));
  auto [p_half, q_half] = born_probability(e0, TwoOutcomeMeasurement{plus_state()});
  CHECK(p_half == Approx(0.5).epsilon(1e-14));
  CHECK(q_half == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("born probability rejects mixed dimensions") {
  CHECK_THROWS_AS(born_probability(basis_state(2, 0), TwoOutcomeMeasurement{basis_state(3, 0)}),
                  Error);
}

TEST_CASE("born probability is unitarily invariant") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const int dim = 3;
    const auto psi = haar_sample(dim, 1, seed * 11)[0];
    const auto phi = haar_sample(dim, 1, seed * 13 + 1)[0];
    const auto u = random_unitary(dim, seed * 17 + 2);
    const double before = born_probability(psi, TwoOutcomeMeasurement{phi}).first;
    const double after =
        born_probability(apply_unitary(u, psi), TwoOutcomeMeasurement{apply_unitary(u, phi)}).first;
    CHECK(after == Approx(before).margin(1e-12));
  }
}

TEST_CASE("quantum box: one aligned state and axis gives the deterministic box") {
  const auto st = plus_state();
  const CBox box = build_quantum_cbox({st}, {TwoOutcomeMeasurement{st}});
  CHECK(box.a_count == 1);
  CHECK(box.m_count == 1);
  CHECK(box.at(0, 0, 0) == Approx(1.0).margin(1e-14));
}

TEST_CASE("quantum box: conjugate-basis states against two axes") {
  const std::vector<PureState> states = {basis_state(2, 0), basis_state(2, 1), plus_state(1.0),
                                         plus_state(-1.0)};
  const std::vector<TwoOutcomeMeasurement> axes = {TwoOutcomeMeasurement{basis_state(2, 0)},
                                                   TwoOutcomeMeasurement{plus_state()}};
  const CBox box = build_quantum_cbox(states, axes);
  for (int a = 0; a < box.a_count; ++a) {
    for (int b = 0; b < box.m_count; ++b) {
      const double p = box.at(a, b, 0);
      const bool known =
          std::abs(p) < 1e-12 || std::abs(p - 0.5) < 1e-12 || std::abs(p - 1.0) < 1e-12;
      CHECK(known);
      CHECK(box.at(a, b, 0) + box.at(a, b, 1) == Approx(1.0).margin(1e-14));
    }
  }
}

TEST_CASE("random Haar boxes validate across many seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const CBox box = oracle::random_quantum_box(seed, 3, 2, 3);
    CHECK(box.a_count == 3);
  }
}

TEST_CASE("quantum box rejects empty or mismatched inputs") {
  CHECK_THROWS_AS(build_quantum_cbox({}, {TwoOutcomeMeasurement{basis_state(2, 0)}}), Error);
  CHECK_THROWS_AS(
      build_quantum_cbox({basis_state(2, 0)}, {TwoOutcomeMeasurement{basis_state(3, 0)}}), Error);
}

TEST_CASE("haar sampling is deterministic and unit norm") {
  const auto first = haar_sample(4, 5, 99);
  const auto second = haar_sample(4, 5, 99);
  REQUIRE(first.size() == 5);
  for (std::size_t i = 0; i < first.size(); ++i) {
    double norm2 = 0.0;
    for (int j = 0; j < 4; ++j) {
      CHECK(first[i].amplitudes[j] == second[i].amplitudes[j]);
      norm2 += std::norm(first[i].amplitudes[j]);
    }
    CHECK(norm2 == Approx(1.0).margin(1e-12));
  }
  const auto other = haar_sample(4, 5, 100);
  CHECK(other[0].amplitudes[0] != first[0].amplitudes[0]);
}

TEST_CASE("dimension-one samples are pure phases") {
  for (const auto& st : haar_sample(1, 10, 3)) {
    CHECK(std::abs(st.amplitudes[0]) == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("overlap moments match 1/N and 2/(N(N+1)) within five standard errors") {
  for (int n : {2, 3, 4, 6}) {
    const auto second = mc_overlap_moment(n, 2, 200000, 1234 + n);
    const double expected2 = 1.0 / n;
    CHECK(std::abs(second.estimate - expected2) <= 5.0 * second.stderr_);
    const auto fourth = mc_overlap_moment(n, 4, 200000, 4321 + n);
    const double expected4 = 2.0 / (static_cast<double>(n) * (n + 1));
    CHECK(std::abs(fourth.estimate - expected4) <= 5.0 * fourth.stderr_);
  }
}

TEST_CASE("dimension-one moments are exactly one") {
  const auto est = mc_overlap_moment(1, 2, 1000, 7);
  CHECK(est.estimate == Approx(1.0).margin(1e-15));
  CHECK(est.stderr_ == Approx(0.0).margin(1e-12));
}

TEST_CASE("unsupported moment orders are rejected") {
  CHECK_THROWS_AS(mc_overlap_moment(2, 3, 10, 1), Error);
  try {
    mc_overlap_moment(2, 6, 10, 1);
    FAIL("expected unsupported_moment");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unsupported_moment);
  }
}

TEST_CASE("cone measure closed form") {
  CHECK(cone_measure(M_PI / 2, 2) == Approx(1.0).margin(1e-14));
  CHECK(cone_measure(M_PI / 2, 5) == Approx(1.0).margin(1e-12));
  CHECK(cone_measure(0.0, 3) == Approx(0.0).margin(1e-15));
  CHECK(cone_measure(M_PI / 4, 2) == Approx(0.5).epsilon(1e-14));
  CHECK(cone_measure(M_PI / 3, 3) == Approx(0.5625).epsilon(1e-14));
  CHECK_THROWS_AS(cone_measure(-0.1, 2), Error);
  CHECK_THROWS_AS(cone_measure(2.0, 2), Error);
  CHECK_THROWS_AS(cone_measure(0.5, 1), Error);
}

TEST_CASE("cone overlap integral closed form and its limits") {
  // theta = pi/2 reduces to the second moment 1/N for any overlap
  for (int n : {2, 3, 4}) {
    for (double ov : {0.0, 0.3, 1.0}) {
      CHECK(cone_overlap_integral(M_PI / 2, ov, n) == Approx(1.0 / n).epsilon(1e-12));
    }
  }
  CHECK(cone_overlap_integral(0.0, 0.7, 3) == Approx(0.0).margin(1e-15));
  CHECK(cone_overlap_integral(M_PI / 3, 1.0, 2) == Approx(0.46875).epsilon(1e-14));
  CHECK_THROWS_AS(cone_overlap_integral(0.5, 1.5, 2), Error);
}

TEST_CASE("cone overlap integral agrees with rejection-sampling Monte Carlo") {
  // chi = psi = e_1, N = 2, theta = pi/3: expected 0.46875
  const int n = 2;
  const double theta = M_PI / 3;
  const double threshold = std::cos(theta) * std::cos(theta);
  GaussianSource gauss(2024);
  const std::int64_t samples = 200000;
  double sum = 0.0, sumsq = 0.0;
  std::vector<std::complex<double>> amps(n);
  for (std::int64_t i = 0; i < samples; ++i) {
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      amps[j] = {gauss(), gauss()};
      norm2 += std::norm(amps[j]);
    }
    const double overlap = std::norm(amps[0]) / norm2;
    const double x = overlap >= threshold ? overlap : 0.0;
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sumsq / samples - mean * mean) / samples);
  CHECK(std::abs(mean - cone_overlap_integral(theta, 1.0, n)) <= 5.0 * se);
}

TEST_CASE("Monte Carlo cone measure agrees with the closed form on a grid") {
  const auto full = mc_cone_measure(M_PI / 2, 2, 1000, 5);
  CHECK(full.estimate == 1.0);
  for (int n : {2, 3}) {
    for (double theta : {M_PI / 4, M_PI / 3, 1.2}) {
      const auto est = mc_cone_measure(theta, n, 200000, 31 * n + static_cast<int>(10 * theta));
      CHECK(std::abs(est.estimate - cone_measure(theta, n)) <= 5.0 * est.stderr_);
    }
  }
}

TEST_CASE("state validation") {
  CHECK_THROWS_AS(validate_state({{0.9, 0.0}, {0.0, 0.0}}), Error);
  CHECK_THROWS_AS(validate_state({}), Error);
  const auto st = PureState::normalized({{3.0, 0.0}, {4.0, 0.0}});
  CHECK(std::abs(st.amplitudes[0]) == Approx(0.6).epsilon(1e-14));
}
