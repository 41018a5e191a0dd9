#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cbound/errors.hpp"

namespace cbound {

// Tolerance hierarchy: construction / iterative-solver membership / exact equality.
inline constexpr double kConstructionTol = 1e-9;
inline constexpr double kMembershipTol = 1e-6;
inline constexpr double kEqualityTol = 1e-12;

// Dense couplings and constraint enumeration are refused above this many
// outcome tuples unless the caller raises the cap explicitly.
inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

// Number of outcome tuples s_count^m_count, checked against the cap.
inline std::uint64_t checked_tuple_count(int s_count, int m_count,
                                         std::uint64_t cap = kDefaultEnumerationCap) {
  std::uint64_t n = 1;
  for (int b = 0; b < m_count; ++b) {
    if (n > cap / static_cast<std::uint64_t>(s_count)) {
      fail(errc::size_overflow,
           "tuple count " + std::to_string(s_count) + "^" + std::to_string(m_count) +
               " exceeds enumeration cap " + std::to_string(cap));
    }
    n *= static_cast<std::uint64_t>(s_count);
  }
  if (n > cap) {
    fail(errc::size_overflow,
         "tuple count " + std::to_string(n) + " exceeds enumeration cap " + std::to_string(cap));
  }
  return n;
}

// Two-party box P(s|a,b), stored row-major as probs[(a*m_count + b)*s_count + s].
struct CBox {
  int a_count = 0;
  int m_count = 0;
  int s_count = 0;
  std::vector<double> probs;

  double at(int a, int b, int s) const {
    return probs[(static_cast<std::size_t>(a) * m_count + b) * s_count + s];
  }
  double& at(int a, int b, int s) {
    return probs[(static_cast<std::size_t>(a) * m_count + b) * s_count + s];
  }
};

// Validates shape, nonnegativity and row normalization (tolerance 1e-9).
inline CBox validate_cbox(int a_count, int m_count, int s_count, std::vector<double> probs) {
  if (a_count <= 0 || m_count <= 0 || s_count <= 0) {
    fail(errc::shape_mismatch, "all box extents must be positive");
  }
  const std::size_t expect =
      static_cast<std::size_t>(a_count) * m_count * static_cast<std::size_t>(s_count);
  if (probs.size() != expect) {
    fail(errc::shape_mismatch, "probs has " + std::to_string(probs.size()) +
                                   " entries, expected " + std::to_string(expect));
  }
  for (int a = 0; a < a_count; ++a) {
    for (int b = 0; b < m_count; ++b) {
      double row = 0.0;
      for (int s = 0; s < s_count; ++s) {
        const double p = probs[(static_cast<std::size_t>(a) * m_count + b) * s_count + s];
        if (p < 0.0) {
          fail(errc::negative_probability, "P(s=" + std::to_string(s) + "|a=" + std::to_string(a) +
                                               ",b=" + std::to_string(b) + ") = " +
                                               std::to_string(p) + " is negative");
        }
        row += p;
      }
      if (std::abs(row - 1.0) > kConstructionTol) {
        fail(errc::row_not_normalized,
             "row (a=" + std::to_string(a) + ",b=" + std::to_string(b) + ") sums to " +
                 std::to_string(row) + ", deficit " + std::to_string(1.0 - row));
      }
    }
  }
  return CBox{a_count, m_count, s_count, std::move(probs)};
}

// Input distribution rho(a) on preparations.
struct Prior {
  std::vector<double> weights;

  static Prior uniform(int a_count) {
    return Prior{std::vector<double>(a_count, 1.0 / a_count)};
  }
  int size() const { return static_cast<int>(weights.size()); }
};

inline Prior validate_prior(std::vector<double> weights) {
  if (weights.empty()) fail(errc::empty_input, "prior has no entries");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) fail(errc::negative_probability, "prior weight " + std::to_string(w));
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    fail(errc::row_not_normalized, "prior sums to " + std::to_string(total));
  }
  return Prior{std::move(weights)};
}

// Outcome tuple (s_1,...,s_M) with its base-s_count index, s_1 the least
// significant digit. The digit order is fixed so certificate files are
// portable across implementations.
struct SVector {
  std::vector<int> entries;
  std::uint64_t index = 0;
};

inline std::uint64_t sv_encode(const std::vector<int>& entries, int s_count) {
  std::uint64_t idx = 0;
  std::uint64_t place = 1;
  for (int digit : entries) {
    if (digit < 0 || digit >= s_count) {
      fail(errc::index_out_of_range, "tuple digit " + std::to_string(digit));
    }
    idx += place * static_cast<std::uint64_t>(digit);
    place *= static_cast<std::uint64_t>(s_count);
  }
  return idx;
}

inline std::vector<int> sv_decode(std::uint64_t index, int s_count, int m_count) {
  std::vector<int> entries(m_count);
  for (int b = 0; b < m_count; ++b) {
    entries[b] = static_cast<int>(index % s_count);
    index /= s_count;
  }
  if (index != 0) fail(errc::index_out_of_range, "tuple index out of range");
  return entries;
}

inline SVector make_svector(std::uint64_t index, int s_count, int m_count) {
  return SVector{sv_decode(index, s_count, m_count), index};
}

// In-place odometer increment over tuples in index order; returns false after
// the last tuple. Cheaper than sv_decode in enumeration loops.
inline bool next_tuple(std::vector<int>& entries, int s_count) {
  for (std::size_t b = 0; b < entries.size(); ++b) {
    if (++entries[b] < s_count) return true;
    entries[b] = 0;
  }
  return false;
}

// Conditional distribution rho(svec|a) over outcome tuples, the primal
// variable. table[(a * tuple_count) + sv_index].
struct Coupling {
  int a_count = 0;
  int m_count = 0;
  int s_count = 0;
  std::vector<double> table;

  std::uint64_t tuple_count() const {
    return table.empty() ? 0 : table.size() / static_cast<std::size_t>(a_count);
  }
  double at(int a, std::uint64_t sv_index) const {
    return table[static_cast<std::size_t>(a) * tuple_count() + sv_index];
  }
  double& at(int a, std::uint64_t sv_index) {
    return table[static_cast<std::size_t>(a) * tuple_count() + sv_index];
  }
};

// Marginal of the b-th outcome variable: sum over tuples with s_b = s.
// Returns a row-major [a][s] table.
inline std::vector<double> coupling_marginal(const Coupling& c, int b) {
  if (b < 0 || b >= c.m_count) {
    fail(errc::index_out_of_range, "setting index " + std::to_string(b));
  }
  const std::uint64_t tuples = c.tuple_count();
  std::uint64_t place = 1;
  for (int i = 0; i < b; ++i) place *= static_cast<std::uint64_t>(c.s_count);
  std::vector<double> out(static_cast<std::size_t>(c.a_count) * c.s_count, 0.0);
  for (int a = 0; a < c.a_count; ++a) {
    for (std::uint64_t t = 0; t < tuples; ++t) {
      const int s = static_cast<int>((t / place) % c.s_count);
      out[static_cast<std::size_t>(a) * c.s_count + s] += c.at(a, t);
    }
  }
  return out;
}

struct MembershipReport {
  double max_deviation = 0.0;  // max |marginal - P| over (a,b,s)
  double min_entry = 0.0;
  bool member = false;
};

// Checks the defining constraints of the coupling set: nonnegativity and
// that every b-marginal reproduces the box.
inline MembershipReport check_membership_V(const Coupling& c, const CBox& box, double tol = kMembershipTol) {
  if (c.a_count != box.a_count || c.m_count != box.m_count || c.s_count != box.s_count) {
    fail(errc::shape_mismatch, "coupling and box shapes disagree");
  }
  MembershipReport report;
  report.min_entry = c.table.empty() ? 0.0 : c.table[0];
  for (double v : c.table) report.min_entry = std::min(report.min_entry, v);
  for (int b = 0; b < c.m_count; ++b) {
    const std::vector<double> marg = coupling_marginal(c, b);
    for (int a = 0; a < c.a_count; ++a) {
      for (int s = 0; s < c.s_count; ++s) {
        const double dev = std::abs(marg[static_cast<std::size_t>(a) * c.s_count + s] - box.at(a, b, s));
        report.max_deviation = std::max(report.max_deviation, dev);
      }
    }
  }
  report.member = report.max_deviation <= tol && report.min_entry >= -tol;
  return report;
}

// Canonical feasible point: rho(svec|a) = prod_b P(s_b|a,b).
inline Coupling product_coupling(const CBox& box, std::uint64_t cap = kDefaultEnumerationCap) {
  const std::uint64_t tuples = checked_tuple_count(box.s_count, box.m_count, cap);
  Coupling c{box.a_count, box.m_count, box.s_count,
             std::vector<double>(static_cast<std::size_t>(box.a_count) * tuples)};
  for (int a = 0; a < box.a_count; ++a) {
    std::vector<int> digits(box.m_count, 0);
    std::uint64_t t = 0;
    do {
      double p = 1.0;
      for (int b = 0; b < box.m_count; ++b) p *= box.at(a, b, digits[b]);
      c.at(a, t++) = p;
    } while (next_tuple(digits, box.s_count));
  }
  return c;
}

}  // namespace cbound
