// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <string>

#include "alphadyn/errors.hpp"
#include "alphadyn/vec3.hpp"

namespace alphadyn {

// Exact positive rational p/q, kept in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw ValidationError("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }

  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }
};

inline Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s), 1);
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw ValidationError("cannot parse rational '" + s + "'");
  }
}

using RationalVec3 = std::array<Rational, 3>;

inline Vec3d value(const RationalVec3& r) {
  return {r[0].value(), r[1].value(), r[2].value()};
}

inline std::string str(const RationalVec3& r) {
  return r[0].str() + "," + r[1].str() + "," + r[2].str();
}

}  // namespace alphadyn
