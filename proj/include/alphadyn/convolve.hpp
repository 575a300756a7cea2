// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "alphadyn/fft.hpp"
#include "alphadyn/field.hpp"

namespace alphadyn {

namespace detail {

// Cube-index -> padded-grid-index map (FFTW frequency layout, negatives wrap).
inline std::vector<std::int64_t> cube_to_grid_map(const TorusSpec& s,
                                                  std::array<int, 3> n) {
  std::vector<std::int64_t> map(s.modes());
  std::int64_t i = 0;
  for (int k0 = -s.trunc[0]; k0 <= s.trunc[0]; ++k0)
    for (int k1 = -s.trunc[1]; k1 <= s.trunc[1]; ++k1)
      for (int k2 = -s.trunc[2]; k2 <= s.trunc[2]; ++k2) {
        const int g0 = k0 >= 0 ? k0 : k0 + n[0];
        const int g1 = k1 >= 0 ? k1 : k1 + n[1];
        const int g2 = k2 >= 0 ? k2 : k2 + n[2];
        map[i++] = (std::int64_t(g0) * n[1] + g1) * n[2] + g2;
      }
  return map;
}

}  // namespace detail

// Pointwise cross products U(theta) ^ f(theta) evaluated on a padded grid
// large enough (N_i >= 3K_i + 1) that every retained coefficient of the
// product is alias-free, i.e. exactly sum_{k'} Uhat(k') ^ fhat(k-k') for
// |k|_inf <= K. The flow is transformed once and cached.
class FlowConvolver {
public:
  FlowConvolver(const FourierVectorField& U, const TorusSpec& space)
      : spec_(space) {
    if (!U.spec().same_geometry(space))
      throw ValidationError("flow and workspace tori differ");
    for (int a = 0; a < 3; ++a) n_[a] = Fft3::good_size(3 * space.trunc[a] + 1);
    map_ = detail::cube_to_grid_map(spec_, n_);
    const auto umap = detail::cube_to_grid_map(U.spec(), n_);
    for (int c = 0; c < 3; ++c) {
      u_[c] = ComplexGrid(n_);
      const Complex* src = U.component(c);
      for (std::int64_t i = 0; i < U.spec().modes(); ++i) u_[c][umap[i]] = src[i];
      Fft3::backward(u_[c]);
    }
    for (int c = 0; c < 3; ++c) w_[c] = ComplexGrid(n_);
  }

  const TorusSpec& spec() const { return spec_; }

  // out := coefficients of U ^ f, both given as 3*modes cube blocks.
  void cross_with_flow(const Complex* f, Complex* out) {
    const std::int64_t m = spec_.modes();
    for (int c = 0; c < 3; ++c) {
      w_[c].clear();
      for (std::int64_t i = 0; i < m; ++i) w_[c][map_[i]] = f[c * m + i];
      Fft3::backward(w_[c]);
    }
    const std::int64_t g = w_[0].size();
    for (std::int64_t i = 0; i < g; ++i) {
      const Complex ax = u_[0][i], ay = u_[1][i], az = u_[2][i];
      const Complex bx = w_[0][i], by = w_[1][i], bz = w_[2][i];
      w_[0][i] = ay * bz - az * by;
      w_[1][i] = az * bx - ax * bz;
      w_[2][i] = ax * by - ay * bx;
    }
    for (int c = 0; c < 3; ++c) {
      Fft3::forward(w_[c]);
      for (std::int64_t i = 0; i < m; ++i) out[c * m + i] = w_[c][map_[i]];
    }
  }

private:
  TorusSpec spec_;
  std::array<int, 3> n_{};
  std::vector<std::int64_t> map_;
  std::array<ComplexGrid, 3> u_;
  std::array<ComplexGrid, 3> w_;
};

// Truncated coefficients of U ^ B; modes generated beyond the truncation are
// discarded.
inline FourierVectorField cross_convolve(const FourierVectorField& U,
                                         const FourierVectorField& B) {
  U.require_same(B);
  FlowConvolver conv(U, U.spec());
  FourierVectorField out(U.spec());
  conv.cross_with_flow(B.raw().data(), out.raw().data());
  return out;
}

}  // namespace alphadyn
