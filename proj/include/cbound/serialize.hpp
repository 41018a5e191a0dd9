#pragma once

#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbound/cbox.hpp"
#include "cbound/digest.hpp"
#include "cbound/dual.hpp"
#include "cbound/errors.hpp"
#include "cbound/primal.hpp"
#include "cbound/version.hpp"

namespace cbound {

using json = nlohmann::json;

inline json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::parse_error, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(errc::parse_error, std::string("in ") + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(errc::parse_error, "cannot open " + path + " for writing");
  out << text;
}

// ---- CBox: {"a_count":..,"m_count":..,"s_count":..,"probs":[[[..]]]} ----

inline CBox cbox_from_json(const json& j) {
  try {
    const int a_count = j.at("a_count").get<int>();
    const int m_count = j.at("m_count").get<int>();
    const int s_count = j.at("s_count").get<int>();
    const auto& probs = j.at("probs");
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(a_count) * m_count * s_count);
    for (const auto& pa : probs) {
      for (const auto& pb : pa) {
        for (const auto& ps : pb) flat.push_back(ps.get<double>());
      }
    }
    return validate_cbox(a_count, m_count, s_count, std::move(flat));
  } catch (const json::exception& e) {
    fail(errc::parse_error, std::string("box document: ") + e.what());
  }
}

inline json cbox_to_json(const CBox& box) {
  json probs = json::array();
  for (int a = 0; a < box.a_count; ++a) {
    json pa = json::array();
    for (int b = 0; b < box.m_count; ++b) {
      json pb = json::array();
      for (int s = 0; s < box.s_count; ++s) pb.push_back(box.at(a, b, s));
      pa.push_back(std::move(pb));
    }
    probs.push_back(std::move(pa));
  }
  return json{{"a_count", box.a_count},
              {"m_count", box.m_count},
              {"s_count", box.s_count},
              {"probs", std::move(probs)}};
}

inline CBox load_cbox(const std::string& path) { return cbox_from_json(parse_json_file(path)); }

inline void save_cbox(const CBox& box, const std::string& path) {
  write_text_file(path, cbox_to_json(box).dump() + "\n");
}

// ---- Prior: {"weights":[..]} ----

inline Prior prior_from_json(const json& j) {
  try {
    return validate_prior(j.at("weights").get<std::vector<double>>());
  } catch (const json::exception& e) {
    fail(errc::parse_error, std::string("prior document: ") + e.what());
  }
}

inline Prior load_prior(const std::string& path) { return prior_from_json(parse_json_file(path)); }

inline void save_prior(const Prior& prior, const std::string& path) {
  write_text_file(path, json{{"weights", prior.weights}}.dump() + "\n");
}

// ---- Certificate ----
// {"box_digest":..,"prior":[..],"lambda":[[[..]]],"claimed_bound_bits":..,
//  "tool_version":..,"created":..}; lambda is indexed [s][a][b].

inline json certificate_to_json(const Certificate& cert) {
  json lambda = json::array();
  for (int s = 0; s < cert.point.s_count; ++s) {
    json ls = json::array();
    for (int a = 0; a < cert.point.a_count; ++a) {
      json la = json::array();
      for (int b = 0; b < cert.point.m_count; ++b) la.push_back(cert.point.at(s, a, b));
      ls.push_back(std::move(la));
    }
    lambda.push_back(std::move(ls));
  }
  return json{{"box_digest", cert.box_digest},
              {"prior", cert.prior.weights},
              {"lambda", std::move(lambda)},
              {"claimed_bound_bits", cert.claimed_bound_bits},
              {"tool_version", cert.tool_version},
              {"created", cert.created}};
}

inline Certificate certificate_from_json(const json& j) {
  try {
    Certificate cert;
    cert.box_digest = j.at("box_digest").get<std::string>();
    cert.prior = validate_prior(j.at("prior").get<std::vector<double>>());
    const auto& lambda = j.at("lambda");
    const int s_count = static_cast<int>(lambda.size());
    const int a_count = static_cast<int>(lambda.at(0).size());
    const int m_count = static_cast<int>(lambda.at(0).at(0).size());
    DualPoint point = DualPoint::zeros(s_count, a_count, m_count);
    double min_entry = 0.0;
    for (int s = 0; s < s_count; ++s) {
      for (int a = 0; a < a_count; ++a) {
        for (int b = 0; b < m_count; ++b) {
          const double v = lambda.at(s).at(a).at(b).get<double>();
          if (!std::isfinite(v)) fail(errc::parse_error, "non-finite lambda entry");
          point.at(s, a, b) = v;
          min_entry = std::min(min_entry, v);
        }
      }
    }
    point.clamp_floor = std::min(-50.0, min_entry);
    cert.point = std::move(point);
    cert.claimed_bound_bits = j.at("claimed_bound_bits").get<double>();
    cert.tool_version = j.value("tool_version", "");
    cert.created = j.value("created", "");
    return cert;
  } catch (const json::exception& e) {
    fail(errc::parse_error, std::string("certificate document: ") + e.what());
  }
}

inline Certificate load_certificate(const std::string& path) {
  return certificate_from_json(parse_json_file(path));
}

inline void save_certificate(const Certificate& cert, const std::string& path) {
  write_text_file(path, certificate_to_json(cert).dump() + "\n");
}

// Honors SOURCE_DATE_EPOCH so certificate files can be byte-reproducible.
inline std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* епoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(епoch, &end, 10);
    if (end && *end == '\0') now = static_cast<std::time_t>(v);
  }
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

inline std::string tool_version_string() {
  return std::string(kToolName) + " " + kToolVersion;
}

// ---- Solver reports ----

inline json primal_report_json(const PrimalResult& res, bool include_coupling = false) {
  json j{{"value_bits", nats_to_bits(res.value_nats)},
         {"value_nats", res.value_nats},
         {"violation", res.constraint_violation},
         {"iterations", res.iterations},
         {"prior", res.prior.weights}};
  if (include_coupling && res.coupling.table.size() <= 65536u) {
    json rows = json::array();
    for (int a = 0; a < res.coupling.a_count; ++a) {
      json row = json::array();
      for (std::uint64_t t = 0; t < res.coupling.tuple_count(); ++t) {
        row.push_back(res.coupling.at(a, t));
      }
      rows.push_back(std::move(row));
    }
    j["coupling"] = std::move(rows);
  }
  return j;
}

// ---- CSV helpers: '.' decimal, no locale ----

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace cbound
