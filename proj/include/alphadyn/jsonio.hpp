// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "alphadyn/errors.hpp"
#include "alphadyn/field.hpp"
#include "alphadyn/rational.hpp"
#include "alphadyn/vec3.hpp"

namespace alphadyn {

// All emitted floats carry 17 significant digits so artifacts are
// reproducible bit-for-bit and doubles round-trip exactly.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

// Minimal structured JSON emitter; keys appear in insertion order.
class JsonWriter {
public:
  JsonWriter() { out_ << "{"; }

  JsonWriter& field(const std::string& key, const std::string& raw_value) {
    sep();
    out_ << '"' << key << "\":" << raw_value;
    return *this;
  }
  JsonWriter& str(const std::string& key, const std::string& value) {
    return field(key, "\"" + value + "\"");
  }
  JsonWriter& num(const std::string& key, double v) { return field(key, fmt17(v)); }
  JsonWriter& integer(const std::string& key, std::int64_t v) {
    return field(key, std::to_string(v));
  }
  JsonWriter& boolean(const std::string& key, bool v) {
    return field(key, v ? "true" : "false");
  }

  std::string close() {
    out_ << "}";
    return out_.str();
  }

  static std::string array(const std::vector<std::string>& items) {
    std::string s = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) s += ",";
      s += items[i];
    }
    return s + "]";
  }
  static std::string num_array(const std::vector<double>& v) {
    std::vector<std::string> items;
    items.reserve(v.size());
    for (double x : v) items.push_back(fmt17(x));
    return array(items);
  }
  static std::string int_array(const std::vector<std::int64_t>& v) {
    std::vector<std::string> items;
    items.reserve(v.size());
    for (auto x : v) items.push_back(std::to_string(x));
    return array(items);
  }
  static std::string vec3(const Vec3d& v) { return num_array({v.x, v.y, v.z}); }
  static std::string cplx(const Complex& z) { return num_array({z.real(), z.imag()}); }
  static std::string cvec3(const CVec3& v) {
    return array({cplx(v.x), cplx(v.y), cplx(v.z)});
  }
  static std::string mat3(const Mat3& m) {
    std::vector<std::string> rows;
    for (int r = 0; r < 3; ++r)
      rows.push_back(num_array({m(r, 0), m(r, 1), m(r, 2)}));
    return array(rows);
  }
  static std::string rationals(const RationalVec3& r) {
    std::vector<std::string> items;
    for (const auto& q : r)
      items.push_back(int_array({q.num, q.den}));
    return array(items);
  }

private:
  void sep() {
    if (!first_) out_ << ",";
    first_ = false;
  }

  std::ostringstream out_;
  bool first_ = true;
};

// {torus, K, entries:[{k, re, im}]}: only nonzero coefficients, lexicographic
// k order.
inline std::string field_to_json(const FourierVectorField& f) {
  std::ostringstream out;
  const auto& s = f.spec();
  out << "{\"torus\":" << JsonWriter::num_array({s.periods[0], s.periods[1], s.periods[2]});
  if (s.isotropic())
    out << ",\"K\":" << s.trunc[0];
  else
    out << ",\"K\":" << JsonWriter::int_array({s.trunc[0], s.trunc[1], s.trunc[2]});
  out << ",\"entries\":[";
  bool first = true;
  detail::for_each_mode(s, [&](const WaveVector& k) {
    const CVec3 v = f.at(k);
    if (v.x == Complex(0.0) && v.y == Complex(0.0) && v.z == Complex(0.0)) return;
    if (!first) out << ",";
    first = false;
    out << "{\"k\":" << JsonWriter::int_array({k[0], k[1], k[2]})
        << ",\"re\":" << JsonWriter::vec3(real(v))
        << ",\"im\":" << JsonWriter::vec3(imag(v)) << "}";
  });
  out << "]}";
  return out.str();
}

inline FourierVectorField field_from_json(const nlohmann::json& j) {
  if (!j.contains("torus") || !j.contains("K") || !j.contains("entries"))
    throw ValidationError("field JSON must have torus, K, entries");
  std::array<double, 3> periods{};
  for (int a = 0; a < 3; ++a) periods[a] = j.at("torus").at(a).get<double>();
  std::array<int, 3> K{};
  if (j.at("K").is_array())
    for (int a = 0; a < 3; ++a) K[a] = j.at("K").at(a).get<int>();
  else
    K.fill(j.at("K").get<int>());
  FourierVectorField f(TorusSpec(periods, K));
  for (const auto& e : j.at("entries")) {
    WaveVector k{e.at("k").at(0).get<int>(), e.at("k").at(1).get<int>(),
                 e.at("k").at(2).get<int>()};
    CVec3 v;
    for (int c = 0; c < 3; ++c)
      v[c] = Complex(e.at("re").at(c).get<double>(), e.at("im").at(c).get<double>());
    f.set(k, v);
  }
  return f;
}

inline FourierVectorField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open field file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ValidationError("bad JSON in '" + path + "': " + e.what());
  }
  return field_from_json(j);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

}  // namespace alphadyn
