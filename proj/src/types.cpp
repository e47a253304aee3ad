#include "mirrorgeo/types.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace mirrorgeo {

std::string Exponent::to_string() const {
  if (infinite_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

Exponent holder_conjugate(Exponent p) {
  if (p.is_infinite()) return Exponent(1.0);
  const double v = p.value();
  if (v == 1.0) return Exponent::infinity();
  return Exponent(v / (v - 1.0));
}

Exponent parse_exponent(const std::string& text) {
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(static_cast<char>(std::tolower(c)));
  if (t == "inf" || t == "infinity" || t == "+inf") return Exponent::infinity();
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw InvalidArgument("cannot parse exponent '" + text + "'");
  }
  return Exponent(v);
}

}  // namespace mirrorgeo
