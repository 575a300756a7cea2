// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace alphadyn {

using Complex = std::complex<double>;

template <class T>
struct Vec3 {
  T x{}, y{}, z{};

  T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  template <class S>
  Vec3& operator*=(S s) { x *= s; y *= s; z *= s; return *this; }

  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
};

using Vec3d = Vec3<double>;
using CVec3 = Vec3<Complex>;

template <class T, class S>
inline auto operator*(S s, const Vec3<T>& v) -> Vec3<decltype(s * v.x)> {
  return {s * v.x, s * v.y, s * v.z};
}

template <class A, class B>
inline auto dot(const Vec3<A>& a, const Vec3<B>& b) -> decltype(a.x * b.x) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class A, class B>
inline auto cross(const Vec3<A>& a, const Vec3<B>& b) -> Vec3<decltype(a.x * b.x)> {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3d& v) { return std::sqrt(dot(v, v)); }
inline double norm2(const CVec3& v) {
  return std::sqrt(std::norm(v.x) + std::norm(v.y) + std::norm(v.z));
}

inline CVec3 conj(const CVec3& v) { return {std::conj(v.x), std::conj(v.y), std::conj(v.z)}; }
inline Vec3d real(const CVec3& v) { return {v.x.real(), v.y.real(), v.z.real()}; }
inline Vec3d imag(const CVec3& v) { return {v.x.imag(), v.y.imag(), v.z.imag()}; }
inline CVec3 to_complex(const Vec3d& v) { return {Complex(v.x), Complex(v.y), Complex(v.z)}; }

// Hermitian inner product, conjugate-linear in the first argument.
inline Complex cdot(const CVec3& a, const CVec3& b) {
  return std::conj(a.x) * b.x + std::conj(a.y) * b.y + std::conj(a.z) * b.z;
}

// 3x3 matrices, row-major.
template <class T>
struct Mat3x3 {
  std::array<T, 9> m{};

  T& operator()(int r, int c) { return m[3 * r + c]; }
  const T& operator()(int r, int c) const { return m[3 * r + c]; }

  static Mat3x3 identity() {
    Mat3x3 out;
    out(0, 0) = out(1, 1) = out(2, 2) = T(1);
    return out;
  }

  Mat3x3& operator+=(const Mat3x3& o) {
    for (int i = 0; i < 9; ++i) m[i] += o.m[i];
    return *this;
  }
  Mat3x3& operator-=(const Mat3x3& o) {
    for (int i = 0; i < 9; ++i) m[i] -= o.m[i];
    return *this;
  }
  template <class S>
  Mat3x3& operator*=(S s) {
    for (auto& v : m) v *= s;
    return *this;
  }

  friend Mat3x3 operator+(Mat3x3 a, const Mat3x3& b) { return a += b; }
  friend Mat3x3 operator-(Mat3x3 a, const Mat3x3& b) { return a -= b; }

  Mat3x3 transpose() const {
    Mat3x3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out(r, c) = (*this)(c, r);
    return out;
  }
};

using Mat3 = Mat3x3<double>;
using CMat3 = Mat3x3<Complex>;

template <class T, class S>
inline auto operator*(S s, const Mat3x3<T>& a) -> Mat3x3<decltype(s * a.m[0])> {
  Mat3x3<decltype(s * a.m[0])> out;
  for (int i = 0; i < 9; ++i) out.m[i] = s * a.m[i];
  return out;
}

template <class A, class B>
inline auto operator*(const Mat3x3<A>& a, const Mat3x3<B>& b)
    -> Mat3x3<decltype(a.m[0] * b.m[0])> {
  Mat3x3<decltype(a.m[0] * b.m[0])> out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      decltype(a.m[0] * b.m[0]) s{};
      for (int k = 0; k < 3; ++k) s += a(r, k) * b(k, c);
      out(r, c) = s;
    }
  return out;
}

template <class A, class B>
inline auto operator*(const Mat3x3<A>& a, const Vec3<B>& v)
    -> Vec3<decltype(a.m[0] * v.x)> {
  Vec3<decltype(a.m[0] * v.x)> out;
  for (int r = 0; r < 3; ++r) out[r] = a(r, 0) * v.x + a(r, 1) * v.y + a(r, 2) * v.z;
  return out;
}

template <class T>
inline double frobenius_norm(const Mat3x3<T>& a) {
  double s = 0;
  for (const auto& v : a.m) s += std::norm(Complex(v));
  return std::sqrt(s);
}

template <class T>
inline double max_abs(const Mat3x3<T>& a) {
  double s = 0;
  for (const auto& v : a.m) s = std::max(s, std::abs(Complex(v)));
  return s;
}

inline CMat3 to_complex(const Mat3& a) {
  CMat3 out;
  for (int i = 0; i < 9; ++i) out.m[i] = Complex(a.m[i]);
  return out;
}

inline Mat3 real(const CMat3& a) {
  Mat3 out;
  for (int i = 0; i < 9; ++i) out.m[i] = a.m[i].real();
  return out;
}

inline double max_imag(const CMat3& a) {
  double s = 0;
  for (const auto& v : a.m) s = std::max(s, std::abs(v.imag()));
  return s;
}

template <class T>
inline Mat3x3<T> outer(const Vec3<T>& a, const Vec3<T>& b) {
  Mat3x3<T> out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out(r, c) = a[r] * b[c];
  return out;
}

}  // namespace alphadyn
