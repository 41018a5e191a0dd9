#pragma once

#include <stdexcept>
#include <string>

namespace cbound {

enum class errc {
  negative_probability,
  row_not_normalized,
  shape_mismatch,
  index_out_of_range,
  size_overflow,
  dimension_mismatch,
  empty_input,
  domain_error,
  unsupported_moment,
  unsupported_dimension,
  non_stochastic_input,
  non_convergence,
  region_violation,
  digest_mismatch,
  infeasible_certificate,
  claim_unsupported,
  parse_error,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::negative_probability: return "negative_probability";
    case errc::row_not_normalized: return "row_not_normalized";
    case errc::shape_mismatch: return "shape_mismatch";
    case errc::index_out_of_range: return "index_out_of_range";
    case errc::size_overflow: return "size_overflow";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::empty_input: return "empty_input";
    case errc::domain_error: return "domain_error";
    case errc::unsupported_moment: return "unsupported_moment";
    case errc::unsupported_dimension: return "unsupported_dimension";
    case errc::non_stochastic_input: return "non_stochastic_input";
    case errc::non_convergence: return "non_convergence";
    case errc::region_violation: return "region_violation";
    case errc::digest_mismatch: return "digest_mismatch";
    case errc::infeasible_certificate: return "infeasible_certificate";
    case errc::claim_unsupported: return "claim_unsupported";
    case errc::parse_error: return "parse_error";
  }
  return "unknown";
}

}  // namespace cbound
