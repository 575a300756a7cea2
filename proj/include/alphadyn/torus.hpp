// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "alphadyn/errors.hpp"
#include "alphadyn/vec3.hpp"

namespace alphadyn {

// Integer Fourier index. On a torus with periods (T1,T2,T3) the index k
// stands for the angular wavevector (k1/T1, k2/T2, k3/T3): the basis
// function is exp(i sum_j (k_j/T_j) theta_j) on the cell of side 2*pi*T_j.
// The unit torus is T = (1,1,1).
using WaveVector = std::array<int, 3>;

inline WaveVector operator-(const WaveVector& k) { return {-k[0], -k[1], -k[2]}; }
inline WaveVector operator+(const WaveVector& a, const WaveVector& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

// Rectangular torus with a sharp per-axis spectral truncation |k_i| <= K_i.
struct TorusSpec {
  std::array<double, 3> periods{1.0, 1.0, 1.0};
  std::array<int, 3> trunc{1, 1, 1};

  TorusSpec() = default;
  TorusSpec(std::array<double, 3> T, int K) : periods(T), trunc{K, K, K} { validate(); }
  TorusSpec(std::array<double, 3> T, std::array<int, 3> K) : periods(T), trunc(K) { validate(); }

  static TorusSpec unit(int K) { return TorusSpec({1.0, 1.0, 1.0}, K); }

  void validate() const {
    for (double p : periods)
      if (!(p > 0.0)) throw ValidationError("torus periods must be positive");
    for (int k : trunc)
      if (k < 1) throw ValidationError("truncation must be >= 1");
  }

  bool isotropic() const { return trunc[0] == trunc[1] && trunc[1] == trunc[2]; }
  int n(int axis) const { return 2 * trunc[axis] + 1; }
  std::int64_t modes() const {
    return std::int64_t(n(0)) * n(1) * n(2);
  }

  bool contains(const WaveVector& k) const {
    return k[0] >= -trunc[0] && k[0] <= trunc[0] && k[1] >= -trunc[1] &&
           k[1] <= trunc[1] && k[2] >= -trunc[2] && k[2] <= trunc[2];
  }

  // Flat index of a retained wavevector, components fastest on axis 2.
  std::int64_t index(const WaveVector& k) const {
    return (std::int64_t(k[0] + trunc[0]) * n(1) + (k[1] + trunc[1])) * n(2) +
           (k[2] + trunc[2]);
  }

  WaveVector wavevector_at(std::int64_t idx) const {
    const int n1 = n(1), n2 = n(2);
    const int k2 = int(idx % n2) - trunc[2];
    const int k1 = int((idx / n2) % n1) - trunc[1];
    const int k0 = int(idx / (std::int64_t(n1) * n2)) - trunc[0];
    return {k0, k1, k2};
  }

  Vec3d angular(const WaveVector& k) const {
    return {k[0] / periods[0], k[1] / periods[1], k[2] / periods[2]};
  }

  bool same_geometry(const TorusSpec& o) const { return periods == o.periods; }
  bool operator==(const TorusSpec& o) const {
    return periods == o.periods && trunc == o.trunc;
  }
};

}  // namespace alphadyn
