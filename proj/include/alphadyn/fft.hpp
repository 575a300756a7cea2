// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fftw3.h>

#include <array>
#include <complex>
#include <map>
#include <mutex>

#include "alphadyn/vec3.hpp"

namespace alphadyn {

// Complex grid backed by fftw_malloc so every buffer shares the planner's
// alignment; plans are created once per size with FFTW_ESTIMATE (timing-blind,
// so repeated runs pick identical algorithms) and reused via new-array execute.
class ComplexGrid {
public:
  ComplexGrid() = default;
  explicit ComplexGrid(std::array<int, 3> n) : n_(n) {
    data_ = static_cast<Complex*>(fftw_malloc(sizeof(Complex) * size()));
    clear();
  }
  ~ComplexGrid() { fftw_free(data_); }

  ComplexGrid(const ComplexGrid&) = delete;
  ComplexGrid& operator=(const ComplexGrid&) = delete;
  ComplexGrid(ComplexGrid&& o) noexcept : n_(o.n_), data_(o.data_) {
    o.data_ = nullptr;
    o.n_ = {0, 0, 0};
  }
  ComplexGrid& operator=(ComplexGrid&& o) noexcept {
    if (this != &o) {
      fftw_free(data_);
      n_ = o.n_;
      data_ = o.data_;
      o.data_ = nullptr;
      o.n_ = {0, 0, 0};
    }
    return *this;
  }

  std::array<int, 3> dims() const { return n_; }
  std::int64_t size() const { return std::int64_t(n_[0]) * n_[1] * n_[2]; }
  Complex* data() { return data_; }
  const Complex* data() const { return data_; }
  Complex& operator[](std::int64_t i) { return data_[i]; }
  const Complex& operator[](std::int64_t i) const { return data_[i]; }

  std::int64_t index(int i0, int i1, int i2) const {
    return (std::int64_t(i0) * n_[1] + i1) * n_[2] + i2;
  }

  void clear() {
    for (std::int64_t i = 0; i < size(); ++i) data_[i] = Complex(0.0);
  }

private:
  std::array<int, 3> n_{0, 0, 0};
  Complex* data_ = nullptr;
};

class Fft3 {
public:
  // Synthesis: coefficients -> grid values (unnormalized FFTW backward).
  static void backward(ComplexGrid& g) { exec(g, FFTW_BACKWARD); }

  // Analysis: grid values -> coefficients, including the 1/N^3 factor.
  static void forward(ComplexGrid& g) {
    exec(g, FFTW_FORWARD);
    const double s = 1.0 / double(g.size());
    Complex* d = g.data();
    for (std::int64_t i = 0; i < g.size(); ++i) d[i] *= s;
  }

  // FFT-friendly size (2^a 3^b 5^c) at least n.
  static int good_size(int n) {
    for (int m = n;; ++m) {
      int r = m;
      for (int p : {2, 3, 5})
        while (r % p == 0) r /= p;
      if (r == 1) return m;
    }
  }

private:
  static void exec(ComplexGrid& g, int sign) {
    const auto plan = get_plan(g.dims(), sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(g.data()),
                     reinterpret_cast<fftw_complex*>(g.data()));
  }

  static fftw_plan get_plan(std::array<int, 3> n, int sign) {
    static std::mutex mu;
    static std::map<std::array<int, 4>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(mu);
    const std::array<int, 4> key{n[0], n[1], n[2], sign};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    ComplexGrid scratch(n);
    fftw_plan p = fftw_plan_dft_3d(
        n[0], n[1], n[2], reinterpret_cast<fftw_complex*>(scratch.data()),
        reinterpret_cast<fftw_complex*>(scratch.data()), sign, FFTW_ESTIMATE);
    cache.emplace(key, p);
    return p;
  }
};

}  // namespace alphadyn
