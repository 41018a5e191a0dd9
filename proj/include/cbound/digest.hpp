#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <string>

#include "cbound/cbox.hpp"

namespace cbound {

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

inline void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

// Canonical box document: sorted keys, no whitespace, %.17g numbers. This is
// the exact byte stream certificates bind to.
inline std::string canonical_cbox_json(const CBox& box) {
  std::string out = "{\"a_count\":" + std::to_string(box.a_count) +
                    ",\"m_count\":" + std::to_string(box.m_count) + ",\"probs\":[";
  for (int a = 0; a < box.a_count; ++a) {
    if (a) out += ',';
    out += '[';
    for (int b = 0; b < box.m_count; ++b) {
      if (b) out += ',';
      out += '[';
      for (int s = 0; s < box.s_count; ++s) {
        if (s) out += ',';
        append_number(out, box.at(a, b, s));
      }
      out += ']';
    }
    out += ']';
  }
  out += "],\"s_count\":" + std::to_string(box.s_count) + "}";
  return out;
}

inline std::string box_digest(const CBox& box) { return sha256_hex(canonical_cbox_json(box)); }

}  // namespace cbound
