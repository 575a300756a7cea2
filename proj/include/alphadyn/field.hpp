// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "alphadyn/errors.hpp"
#include "alphadyn/tolerances.hpp"
#include "alphadyn/torus.hpp"
#include "alphadyn/vec3.hpp"

namespace alphadyn {

// Truncated Fourier coefficients of a real 3-vector field on a torus.
// Storage is the dense (2K+1)^3 cube; conjugate symmetry u(-k) = conj(u(k))
// is an invariant of real fields, enforced by construction and checkable
// with conj_symmetry_error().
class FourierVectorField {
public:
  FourierVectorField() = default;
  explicit FourierVectorField(const TorusSpec& spec)
      : spec_(spec), a_(3 * spec.modes(), Complex(0.0)) {}

  const TorusSpec& spec() const { return spec_; }
  std::int64_t modes() const { return spec_.modes(); }

  CVec3 at(const WaveVector& k) const {
    if (!spec_.contains(k)) return {};
    const auto i = spec_.index(k);
    const auto m = modes();
    return {a_[i], a_[i + m], a_[i + 2 * m]};
  }

  void set(const WaveVector& k, const CVec3& v) {
    if (!spec_.contains(k)) throw ValidationError("wavevector outside truncation");
    const auto i = spec_.index(k);
    const auto m = modes();
    a_[i] = v.x;
    a_[i + m] = v.y;
    a_[i + 2 * m] = v.z;
  }

  void add(const WaveVector& k, const CVec3& v) {
    const auto i = spec_.index(k);
    const auto m = modes();
    a_[i] += v.x;
    a_[i + m] += v.y;
    a_[i + 2 * m] += v.z;
  }

  // Raw coefficient block of one component, cube-ordered (see TorusSpec::index).
  Complex* component(int c) { return a_.data() + c * modes(); }
  const Complex* component(int c) const { return a_.data() + c * modes(); }

  std::vector<Complex>& raw() { return a_; }
  const std::vector<Complex>& raw() const { return a_; }

  FourierVectorField& operator+=(const FourierVectorField& o) {
    require_same(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  FourierVectorField& operator-=(const FourierVectorField& o) {
    require_same(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  FourierVectorField& operator*=(double s) {
    for (auto& v : a_) v *= s;
    return *this;
  }
  friend FourierVectorField operator+(FourierVectorField a, const FourierVectorField& b) {
    return a += b;
  }
  friend FourierVectorField operator-(FourierVectorField a, const FourierVectorField& b) {
    return a -= b;
  }
  friend FourierVectorField operator*(double s, FourierVectorField a) { return a *= s; }

  void require_same(const FourierVectorField& o) const {
    if (!(spec_ == o.spec_)) throw ValidationError("torus/truncation mismatch");
  }

private:
  TorusSpec spec_;
  std::vector<Complex> a_;
};

// Scalar counterpart, used for divergence coefficients and potentials.
class ScalarFourierField {
public:
  ScalarFourierField() = default;
  explicit ScalarFourierField(const TorusSpec& spec)
      : spec_(spec), a_(spec.modes(), Complex(0.0)) {}

  const TorusSpec& spec() const { return spec_; }
  Complex at(const WaveVector& k) const {
    return spec_.contains(k) ? a_[spec_.index(k)] : Complex(0.0);
  }
  void set(const WaveVector& k, Complex v) { a_[spec_.index(k)] = v; }
  const std::vector<Complex>& raw() const { return a_; }
  std::vector<Complex>& raw() { return a_; }

private:
  TorusSpec spec_;
  std::vector<Complex> a_;
};

namespace detail {

template <class Fn>
inline void for_each_mode(const TorusSpec& s, Fn&& fn) {
  for (int k0 = -s.trunc[0]; k0 <= s.trunc[0]; ++k0)
    for (int k1 = -s.trunc[1]; k1 <= s.trunc[1]; ++k1)
      for (int k2 = -s.trunc[2]; k2 <= s.trunc[2]; ++k2) fn(WaveVector{k0, k1, k2});
}

}  // namespace detail

inline FourierVectorField curl(const FourierVectorField& f) {
  FourierVectorField out(f.spec());
  detail::for_each_mode(f.spec(), [&](const WaveVector& k) {
    const Vec3d kap = f.spec().angular(k);
    const CVec3 ik = {Complex(0, kap.x), Complex(0, kap.y), Complex(0, kap.z)};
    out.set(k, cross(ik, f.at(k)));
  });
  return out;
}

inline ScalarFourierField divergence(const FourierVectorField& f) {
  ScalarFourierField out(f.spec());
  detail::for_each_mode(f.spec(), [&](const WaveVector& k) {
    const Vec3d kap = f.spec().angular(k);
    const CVec3 ik = {Complex(0, kap.x), Complex(0, kap.y), Complex(0, kap.z)};
    out.set(k, dot(ik, f.at(k)));
  });
  return out;
}

inline FourierVectorField laplacian(const FourierVectorField& f) {
  FourierVectorField out(f.spec());
  detail::for_each_mode(f.spec(), [&](const WaveVector& k) {
    const Vec3d kap = f.spec().angular(k);
    out.set(k, -dot(kap, kap) * f.at(k));
  });
  return out;
}

inline FourierVectorField inv_laplacian(const FourierVectorField& f,
                                        const Tolerances& tol = default_tolerances()) {
  const CVec3 m = f.at({0, 0, 0});
  if (norm2(m) > tol.algebraic)
    throw ValidationError("inv_laplacian requires a zero-mean field");
  FourierVectorField out(f.spec());
  detail::for_each_mode(f.spec(), [&](const WaveVector& k) {
    if (k[0] == 0 && k[1] == 0 && k[2] == 0) return;
    const Vec3d kap = f.spec().angular(k);
    out.set(k, (-1.0 / dot(kap, kap)) * f.at(k));
  });
  return out;
}

inline Vec3d mean(const FourierVectorField& f,
                  const Tolerances& tol = default_tolerances()) {
  const CVec3 m = f.at({0, 0, 0});
  if (norm2({Complex(0, m.x.imag()), Complex(0, m.y.imag()), Complex(0, m.z.imag())}) >
      tol.algebraic)
    throw NumericalError(NumericalError::Kind::NanDetected,
                         "mean has a nonreal residue beyond tolerance");
  return real(m);
}

inline FourierVectorField leray_project(const FourierVectorField& f) {
  FourierVectorField out = f;
  detail::for_each_mode(f.spec(), [&](const WaveVector& k) {
    if (k[0] == 0 && k[1] == 0 && k[2] == 0) return;
    const Vec3d kap = f.spec().angular(k);
    const CVec3 v = f.at(k);
    const Complex kv = kap.x * v.x + kap.y * v.y + kap.z * v.z;
    const double k2 = dot(kap, kap);
    out.set(k, v - (kv / k2) * to_complex(kap));
  });
  return out;
}

// L2 norm under the normalized cell measure (Parseval: sum of |coeff|^2).
inline double norm_l2(const FourierVectorField& f) {
  double s = 0;
  for (const auto& v : f.raw()) s += std::norm(v);
  return std::sqrt(s);
}

inline double norm_hs(const FourierVectorField& f, double s_order) {
  double s = 0;
  detail::for_each_mode(f.spec(), [&](const WaveVector& k) {
    const Vec3d kap = f.spec().angular(k);
    const double w = std::pow(1.0 + dot(kap, kap), s_order);
    const CVec3 v = f.at(k);
    s += w * (std::norm(v.x) + std::norm(v.y) + std::norm(v.z));
  });
  return std::sqrt(s);
}

inline double conj_symmetry_error(const FourierVectorField& f) {
  double e = 0;
  detail::for_each_mode(f.spec(), [&](const WaveVector& k) {
    const CVec3 d = f.at(k) - conj(f.at(-k));
    e = std::max(e, std::max({std::abs(d.x), std::abs(d.y), std::abs(d.z)}));
  });
  return e;
}

inline double divergence_error(const FourierVectorField& f) {
  double e = 0;
  const auto d = divergence(f);
  for (const auto& v : d.raw()) e = std::max(e, std::abs(v));
  return e;
}

// Sharp spectral truncation to |k|_inf <= j, same torus. Grows the cube when
// j exceeds the stored truncation.
inline FourierVectorField truncate_to(const FourierVectorField& f, int j) {
  if (j < 0) throw ValidationError("truncation must be >= 0");
  TorusSpec s(f.spec().periods, std::max(j, 1));
  FourierVectorField out(s);
  detail::for_each_mode(s, [&](const WaveVector& k) {
    if (std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])}) <= j)
      out.set(k, f.at(k));
  });
  return out;
}

// Re-embed into a (possibly larger) truncation cube on the same torus.
inline FourierVectorField embed(const FourierVectorField& f, int K) {
  TorusSpec s(f.spec().periods, K);
  FourierVectorField out(s);
  detail::for_each_mode(f.spec(), [&](const WaveVector& k) {
    if (s.contains(k)) out.set(k, f.at(k));
  });
  return out;
}

inline void enforce_reality(FourierVectorField& f) {
  detail::for_each_mode(f.spec(), [&](const WaveVector& k) {
    if (k < -k) return;
    const CVec3 a = f.at(k), b = f.at(-k);
    const CVec3 half = 0.5 * (a + conj(b));
    f.set(k, half);
    f.set(-k, conj(half));
  });
}

}  // namespace alphadyn
