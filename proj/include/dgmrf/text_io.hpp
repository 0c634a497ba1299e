#pragma once

#include <cstdlib>
#include <istream>
#include <stdexcept>
#include <string>

namespace dgmrf {

/// Hexfloat formatting so numeric files round-trip bit-exactly.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

/// strtod-based parse (accepts both decimal and hexfloat, unlike istream>>).
inline double parse_double(const std::string& token) {
  const char* s = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw std::runtime_error("parse_double: bad number '" + token + "'");
  return v;
}

inline bool read_double(std::istream& in, double& out) {
  std::string token;
  if (!(in >> token)) return false;
  out = parse_double(token);
  return true;
}

}  // namespace dgmrf
