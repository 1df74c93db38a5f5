#include "doctest.h"
#include "dimers/spectral.hpp"

using namespace dimers;

TEST_CASE("characteristic polynomial of Z2") {
  auto g = make_z2(2, 1, 1, 1);
  auto s = build_spectral(g);
  CHECK(s.exact);
  cplx z(0.4, -0.7), w(1.1, 0.3);
  cplx expect = 2.0 + 1.0 / w - z / w + z;
  CHECK(std::abs(s.P_at(z, w) - expect) < 1e-13);
  // Q K = P Id
  auto K = s.K_at(z, w);
  auto Q = s.Q_at(z, w);
  CHECK(std::abs((Q * K)(0, 0) - expect) < 1e-13);
}

TEST_CASE("square-octagon polynomial and phase") {
  auto g = make_square_octagon();
  auto s = analyze_spectral(g);
  cplx z = std::polar(1.0, 0.7), w = std::polar(1.0, -1.9);
  cplx expect = 5.0 - z - w - 1.0 / w - 1.0 / z;
  CHECK(std::abs(s.P_at(z, w) - expect) < 1e-12);
  CHECK(s.phase == Phase::gaseous);
  CHECK(s.min_abs_P == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(s.roots.empty());
}

TEST_CASE("exact expansion and sampled fallback agree") {
  auto g = make_square_octagon(1.3, 0.8);
  auto exact = build_spectral(g, 6);
  auto sampled = build_spectral(g, 0);
  CHECK(exact.exact);
  CHECK_FALSE(sampled.exact);
  for (double th : {0.1, 1.7, 3.0})
    for (double ph : {-0.4, 2.2}) {
      cplx z = std::polar(1.0, th), w = std::polar(1.0, ph);
      CHECK(std::abs(exact.P_at(z, w) - sampled.P_at(z, w)) < 1e-10);
      CHECK((exact.Q_at(z, w) - sampled.Q_at(z, w)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("liquid roots and frame") {
  auto g = make_z2(1, 1, 1, 1);
  auto s = analyze_spectral(g);
  CHECK(s.phase == Phase::liquid_generic);
  REQUIRE(s.roots.size() == 2);
  for (auto& r : s.roots) {
    CHECK(std::abs(std::abs(r.z.real())) < 1e-9);
    CHECK(std::abs(r.z - r.w) < 1e-9);
  }
  auto geo = liquid_geometry(s, g);
  CHECK(geo.area > 0.0);
  CHECK(geo.divergence_residual < 1e-12);
  CHECK(std::abs(geo.xhat_crossing - geo.xhat) < 1e-12);
  CHECK(std::abs(geo.yhat_crossing - geo.yhat) < 1e-12);
  CHECK(std::abs(geo.xhat - cplx(1, -1)) < 1e-12);
  CHECK(std::abs(geo.yhat - cplx(1, 1)) < 1e-12);

  auto h = make_z2(1.3, 0.7, 1.1, 0.9);
  auto sh = analyze_spectral(h);
  auto gh = liquid_geometry(sh, h);
  CHECK(gh.divergence_residual < 1e-12);
  CHECK(std::abs(gh.xhat_crossing - gh.xhat) < 1e-12);
  CHECK(std::abs(gh.yhat_crossing - gh.yhat) < 1e-12);
}

TEST_CASE("phase classification") {
  CHECK(analyze_spectral(make_honeycomb(1, 1, 1)).phase == Phase::liquid_generic);
  CHECK(analyze_spectral(make_honeycomb(1, 1, 3)).phase == Phase::gaseous);
  auto s = analyze_spectral(make_z2(3, 1, 1, 1));
  CHECK(s.phase == Phase::liquid_nongeneric);
  REQUIRE(s.roots.size() == 1);
  CHECK(s.roots[0].double_root);
  CHECK(std::abs(s.roots[0].z + 1.0) < 1e-6);
  CHECK(analyze_spectral(make_z2(4, 1, 1, 1)).phase == Phase::gaseous);
  CHECK_THROWS(liquid_geometry(s, make_z2(3, 1, 1, 1)));
}

TEST_CASE("embedding") {
  auto g = make_square_octagon();
  auto s = analyze_spectral(g);
  cplx a = embed_offset(g, s, {1, 0}), b = embed_offset(g, s, {0, 1});
  CHECK(std::abs((std::conj(a) * b).imag()) == doctest::Approx(1.0));
  auto z = make_z2(1, 1, 1, 1);
  auto sz = analyze_spectral(z);
  cplx x = embed_offset(z, sz, {1, 0}), y = embed_offset(z, sz, {0, 1});
  CHECK((std::conj(x) * y).imag() == doctest::Approx(1.0));
}
