// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include "alphadyn/convolve.hpp"
#include "alphadyn/field.hpp"
#include "alphadyn/jsonio.hpp"
#include "oracles.hpp"

using namespace alphadyn;
using Catch::Approx;

namespace {

FourierVectorField single_pair(int K, const WaveVector& k, const CVec3& v) {
  FourierVectorField f(TorusSpec::unit(K));
  f.set(k, v);
  f.set(-k, conj(v));
  return f;
}

}  // namespace

TEST_CASE("cross_convolve of zero flow vanishes") {
  FourierVectorField zero(TorusSpec::unit(3));
  const auto b = oracle::random_field(3, 2, 11);
  const auto out = cross_convolve(zero, b);
  REQUIRE(norm_l2(out) == 0.0);
}

TEST_CASE("cross_convolve single-pair algebra") {
  const WaveVector k1{1, 0, 0}, k2{0, 1, 1};
  const CVec3 a{Complex(0.3, 0.1), Complex(-0.2, 0.4), Complex(0.0, 0.7)};
  const CVec3 b{Complex(-0.5, 0.2), Complex(0.1, 0.0), Complex(0.6, -0.3)};
  const auto U = single_pair(4, k1, a);
  const auto B = single_pair(4, k2, b);
  const auto out = cross_convolve(U, B);

  // Coefficient at k1 + k2 is a ^ b; at k1 - k2 it is a ^ conj(b).
  const CVec3 s = out.at({1, 1, 1}) - cross(a, b);
  REQUIRE(norm2(s) < 1e-14);
  const CVec3 d = out.at({1, -1, -1}) - cross(a, conj(b));
  REQUIRE(norm2(d) < 1e-14);
  REQUIRE(conj_symmetry_error(out) < 1e-14);

  const auto ref = oracle::collocation_cross(U, B, 16);
  double worst = 0;
  detail::for_each_mode(out.spec(), [&](const WaveVector& k) {
    worst = std::max(worst, norm2(out.at(k) - ref.at(k)));
  });
  REQUIRE(worst < 1e-10);
}

TEST_CASE("self cross product is zero; mean mode matches the pair formula") {
  const WaveVector k{1, 2, 0};
  const CVec3 a{Complex(0.5, -0.2), Complex(0.1, 0.3), Complex(-0.4, 0.1)};
  const auto U = single_pair(3, k, a);
  REQUIRE(norm2(cross(a, conj(a))) > 0.1);  // premise of the example
  const auto out = cross_convolve(U, U);
  // Mean mode = a ^ conj(a) + conj(a ^ conj(a)) = 2 Re of an imaginary vector.
  const CVec3 expected = cross(a, conj(a)) + conj(cross(a, conj(a)));
  REQUIRE(norm2(expected) < 1e-15);
  REQUIRE(norm2(out.at({0, 0, 0})) < 1e-14);
  REQUIRE(norm_l2(out) < 1e-13);  // U ^ U = 0 pointwise
  const auto ref = oracle::collocation_cross(U, U, 16);
  REQUIRE(norm_l2(ref) < 1e-13);
}

TEST_CASE("cross_convolve requires matching tori") {
  FourierVectorField a(TorusSpec::unit(2)), b(TorusSpec::unit(3));
  REQUIRE_THROWS_AS(cross_convolve(a, b), ValidationError);
}

TEST_CASE("curl, divergence, laplacian conventions") {
  FourierVectorField c(TorusSpec::unit(2));
  c.set({0, 0, 0}, {Complex(1.0), Complex(2.0), Complex(-0.5)});
  REQUIRE(norm_l2(curl(c)) == 0.0);

  const auto f = oracle::random_field(3, 2, 21, false);
  const auto dc = divergence(curl(f));
  double worst = 0;
  for (const auto& v : dc.raw()) worst = std::max(worst, std::abs(v));
  REQUIRE(worst < 1e-12);

  // Unit-torus mode k = (1,0,0): second derivative multiplies by -1.
  const auto g = single_pair(2, {1, 0, 0}, {Complex(0, 0), Complex(1, 0), Complex(0, 0)});
  const auto lap = laplacian(g);
  REQUIRE(norm2(lap.at({1, 0, 0}) + g.at({1, 0, 0})) < 1e-15);

  // curl of a gradient vanishes.
  FourierVectorField grad(TorusSpec::unit(3));
  detail::for_each_mode(grad.spec(), [&](const WaveVector& k) {
    const Vec3d kap = grad.spec().angular(k);
    const Complex phi(0.3 * k[0] - 0.1 * k[1], 0.2 * k[2]);
    grad.set(k, {Complex(0, kap.x) * phi, Complex(0, kap.y) * phi,
                 Complex(0, kap.z) * phi});
  });
  REQUIRE(norm_l2(curl(grad)) < 1e-12 * std::max(1.0, norm_l2(grad)));
}

TEST_CASE("inv_laplacian inverts and demands zero mean") {
  const auto g =
      single_pair(2, {0, 1, 0}, {Complex(0.3, 0.4), Complex(0, 0), Complex(0, 0)});
  const auto inv = inv_laplacian(g);
  REQUIRE(norm2(inv.at({0, 1, 0}) + g.at({0, 1, 0})) < 1e-15);  // divide by -1

  auto f = oracle::random_field(3, 3, 33, false);
  f.set({0, 0, 0}, CVec3{});
  const auto round_trip = laplacian(inv_laplacian(f));
  double worst = 0;
  detail::for_each_mode(f.spec(), [&](const WaveVector& k) {
    worst = std::max(worst, norm2(round_trip.at(k) - f.at(k)));
  });
  REQUIRE(worst < 1e-12);

  FourierVectorField with_mean(TorusSpec::unit(2));
  with_mean.set({0, 0, 0}, {Complex(1, 0), Complex(0, 0), Complex(0, 0)});
  REQUIRE_THROWS_AS(inv_laplacian(with_mean), ValidationError);
}

TEST_CASE("leray projection kills gradients and is idempotent") {
  FourierVectorField grad(TorusSpec::unit(3));
  detail::for_each_mode(grad.spec(), [&](const WaveVector& k) {
    if (k[0] == 0 && k[1] == 0 && k[2] == 0) return;
    const Vec3d kap = grad.spec().angular(k);
    const Complex phi(0.2 * k[0], -0.7 * k[2]);
    grad.set(k, {Complex(0, kap.x) * phi, Complex(0, kap.y) * phi,
                 Complex(0, kap.z) * phi});
  });
  REQUIRE(norm_l2(leray_project(grad)) < 1e-12 * norm_l2(grad));

  const auto f = oracle::random_field(3, 3, 44, false);
  const auto p1 = leray_project(f);
  const auto p2 = leray_project(p1);
  double worst = 0;
  detail::for_each_mode(f.spec(), [&](const WaveVector& k) {
    worst = std::max(worst, norm2(p2.at(k) - p1.at(k)));
  });
  REQUIRE(worst < 1e-14);
  REQUIRE(divergence_error(p1) < 1e-12);
}

TEST_CASE("norms: hs(0) equals l2, Parseval matches quadrature") {
  const auto f = oracle::random_field(3, 2, 55);
  REQUIRE(norm_hs(f, 0.0) == Approx(norm_l2(f)).epsilon(1e-13));
  REQUIRE(norm_l2(f) == Approx(oracle::quadrature_l2(f, 12)).epsilon(1e-10));
}

TEST_CASE("mean extraction flags nonreal residue") {
  FourierVectorField f(TorusSpec::unit(1));
  f.set({0, 0, 0}, {Complex(0.5, 0), Complex(1.5, 0), Complex(-2, 0)});
  const Vec3d m = mean(f);
  REQUIRE(m.x == 0.5);
  REQUIRE(m.z == -2.0);
  f.set({0, 0, 0}, {Complex(0.5, 0.1), Complex(0, 0), Complex(0, 0)});
  REQUIRE_THROWS_AS(mean(f), NumericalError);
}

TEST_CASE("reality closure across operations") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto f = oracle::random_field(4, 3, seed);
    REQUIRE(conj_symmetry_error(f) < 1e-15);
    REQUIRE(conj_symmetry_error(curl(f)) < 1e-12);
    REQUIRE(conj_symmetry_error(laplacian(f)) < 1e-12);
    REQUIRE(conj_symmetry_error(leray_project(f)) < 1e-12);
    const auto g = oracle::random_field(4, 2, seed + 100);
    REQUIRE(conj_symmetry_error(cross_convolve(f, g)) < 1e-12);
  }
}

TEST_CASE("convolution agrees with collocation for half-truncation support") {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const auto u = oracle::random_field(4, 2, seed);
    const auto b = oracle::random_field(4, 2, seed + 1);
    const auto fast = cross_convolve(u, b);
    const auto ref = oracle::collocation_cross(u, b, 13);
    double worst = 0;
    detail::for_each_mode(fast.spec(), [&](const WaveVector& k) {
      worst = std::max(worst, norm2(fast.at(k) - ref.at(k)));
    });
    REQUIRE(worst < 1e-10);
  }
}

TEST_CASE("truncation and embedding") {
  const auto f = oracle::random_field(4, 4, 77);
  const auto t2 = truncate_to(f, 2);
  REQUIRE(norm_l2(t2) <= norm_l2(f));
  const auto t4 = truncate_to(f, 4);
  REQUIRE(norm_l2(t4) == Approx(norm_l2(f)).epsilon(1e-14));
  const auto killed = truncate_to(single_pair(3, {0, 3, 0}, {Complex(0, 1), {}, {}}), 2);
  REQUIRE(norm_l2(killed) == 0.0);
}

TEST_CASE("field JSON round-trips exactly") {
  const auto f = oracle::random_field(3, 2, 99);
  const std::string json = field_to_json(f);
  const auto g = field_from_json(nlohmann::json::parse(json));
  REQUIRE(g.spec() == f.spec());
  double worst = 0;
  detail::for_each_mode(f.spec(), [&](const WaveVector& k) {
    worst = std::max(worst, norm2(g.at(k) - f.at(k)));
  });
  REQUIRE(worst == 0.0);  // 17 significant digits reproduce doubles exactly

  REQUIRE_THROWS_AS(field_from_json(nlohmann::json::parse("{\"torus\":[1,1,1]}")),
                    ValidationError);
}
