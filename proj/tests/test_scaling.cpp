#include <random>

#include "doctest.h"
#include "dimers/scaling.hpp"
#include "oracles.hpp"

using namespace dimers;

TEST_CASE("test functions") {
  auto f = TestFunction::gaussian_bump({0.3, -0.2}, 0.4);
  CHECK(f({0.3, -0.2}) == doctest::Approx(1.0));
  CHECK(f(cplx(0.3, -0.2) + 1.2001) == 0.0);
  CHECK(f.support_radius() == doctest::Approx(1.2));
  double h = 1e-6;
  for (cplx u : {cplx(0.5, 0.1), cplx(0.3, 0.8), cplx(-0.6, -0.3)}) {
    cplx g = f.grad(u);
    CHECK(g.real() == doctest::Approx((f(u + h) - f(u - h)) / (2 * h)).epsilon(1e-6));
    CHECK(g.imag() == doctest::Approx((f(u + cplx(0, h)) - f(u - cplx(0, h))) / (2 * h)).epsilon(1e-6));
  }
  auto s = TestFunction::tensor_spline({0, 0}, 0.5);
  CHECK(s({0, 0}) == doctest::Approx(4.0 / 9.0));
  CHECK(s.smoothness() == "C2");
  cplx u(0.37, -0.61);
  CHECK(s.grad(u).real() == doctest::Approx((s(u + h) - s(u - h)) / (2 * h)).epsilon(1e-6));
  CHECK(parse_test_function("gaussian:1,2,0.5").id() == "gaussian:1,2,0.5");
  CHECK_THROWS(parse_test_function("gaussian:1,2"));
  CHECK_THROWS(parse_test_function("disk:0,0,1"));
}

TEST_CASE("integral of the square") {
  auto s = TestFunction::tensor_spline({0.1, 0.2}, 0.5);
  CHECK(integrate_square(s) == doctest::Approx(oracle::kBsplineSquare * oracle::kBsplineSquare * 0.25).epsilon(1e-12));
  auto f = TestFunction::gaussian_bump({0, 0}, 0.3);
  double v = integrate_square(f);
  CHECK(v < oracle::kPi * 0.09);
  CHECK(v > 0.99 * oracle::kPi * 0.09);
  CHECK(integrate_square(TestFunction::zero()) == 0.0);
}

TEST_CASE("green pairing") {
  auto f1 = TestFunction::gaussian_bump({0, 0}, 0.2);
  auto f2 = TestFunction::gaussian_bump({1.5, 0.5}, 0.2);
  CHECK(green_pairing(f1, 1.0, TestFunction::zero(), 1.0) == 0.0);
  // Radial bumps act as point masses outside their supports.
  double m = 0.0;
  {
    auto sq = integrate_square(f1);
    (void)sq;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
      double r = 0.6 * (i + 0.5) / n;
      m += f1(cplx(r, 0.0)) * 2.0 * oracle::kPi * r * 0.6 / n;
    }
  }
  cplx v1(0.6, 0.8), v2(1.0, 0.0);
  double far = oracle::dipole_far_field(m, m, cplx(-1.5, -0.5), v1, v2);
  double val = green_pairing(f1, v1, f2, v2, 1e-6, 3);
  CHECK(val == doctest::Approx(far).epsilon(1e-5));
  double swapped = green_pairing(f2, v2, f1, v1, 1e-6, 3);
  CHECK(val == doctest::Approx(swapped).epsilon(1e-6));
  auto g = TestFunction::tensor_spline({0.2, 0.0}, 0.15);
  CHECK(green_pairing(g, v1, g, v1, 1e-5, 3) > 0.0);
}

TEST_CASE("cycle cancellation") {
  auto r = cycle_cancellation({0.0, 1.0, cplx(0, 1)});
  CHECK(std::abs(r.sum) < 1e-15);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int m = 3; m <= 7; ++m) {
    std::vector<cplx> u(m);
    for (auto& x : u) x = {nd(rng), nd(rng)};
    auto c = cycle_cancellation(u);
    CHECK(std::abs(c.sum) <= 1e-10 * c.max_term);
  }
  CHECK_THROWS(cycle_cancellation({0.0, 1.0, 1.0}));
  CHECK_THROWS(cycle_cancellation(std::vector<cplx>(10, 0.0)));
}

TEST_CASE("gaseous amplitudes against the series oracle") {
  auto g = make_square_octagon();
  auto s = analyze_spectral(g);
  auto ser = oracle::square_octagon_series();
  auto c = white_noise_gaseous(g, s, g.edge_index("w1b1"));
  CHECK(std::abs(c.value - ser.second) < 1e-9);
  CHECK(std::abs(c.probability - ser.first) < 1e-12);
  CHECK(c.mismatch < 1e-6);
  auto q = white_noise_gaseous(g, s, g.edge_index("w2b1"));
  CHECK(std::abs(q.value - 2.0 * ser.K / (5.0 * oracle::kPi)) < 1e-9);
  auto t = make_kernel_table(s, g, 40);
  double ls = white_noise_lattice_sum(t, g, edge_pattern(g, "w1b1"), edge_pattern(g, "w1b1"), 30);
  CHECK(std::abs(ls - c.value) < 1e-9);
  auto res = resolve_elliptic_convention(c.probability, c.value);
  CHECK(res.convention == "parameter");
  CHECK(res.K == doctest::Approx(oracle::agm_K(16.0 / 25.0)).epsilon(1e-14));
  CHECK(res.E == doctest::Approx(oracle::agm_E(16.0 / 25.0)).epsilon(1e-14));
  CHECK_THROWS(white_noise_gaseous(make_z2(1, 1, 1, 1), analyze_spectral(make_z2(1, 1, 1, 1)), 0));
}

TEST_CASE("liquid amplitude on Z2") {
  auto g = make_z2(1.3, 0.7, 1.1, 0.9);
  auto s = analyze_spectral(g);
  auto geo = liquid_geometry(s, g);
  LiquidOptions opt;
  opt.max_box = 128;
  auto t = make_kernel_table(s, g, opt.max_box + 4);
  auto pa = edge_pattern(g, "a");
  auto A = white_noise_liquid(t, g, s, geo, pa, pa, opt);
  CHECK(A.value == doctest::Approx(oracle::z2_amplitude(1.3, 0.7, 1.1, 0.9)).epsilon(1e-4));
  CHECK(A.value >= 0.0);
  auto pb = edge_pattern(g, "b");
  auto B = white_noise_liquid(t, g, s, geo, pa, pb, opt);
  CHECK(B.value == doctest::Approx(-A.value).epsilon(1e-4));
  // Dipoles of single edges: normalized dipole squared matches the raw trace up to nu^2 and sign.
  auto an = pattern_probability(t, g, pa, &s);
  cplx d = dipole_vector(an), e = normalized_dipole(an, geo);
  CHECK(d.real() >= 0.0);
  cplx ratio = (e * e) / (d * d * an.probability * an.probability);
  CHECK(std::abs(std::abs(ratio) - geo.nu * geo.nu) < 1e-10);
  CHECK_THROWS_WITH(white_noise_liquid(t, g, s, geo, pa, pa, LiquidOptions{512, 12, 1e-2, 64}),
                    doctest::Contains("kernel radius"));
}

TEST_CASE("contour term on the uniform graph") {
  auto g = make_z2(1, 1, 1, 1);
  auto s = analyze_spectral(g);
  auto geo = liquid_geometry(s, g);
  cplx e = geo.nu * geo.omega[0];
  CHECK(contour_term(geo, e, e) == doctest::Approx(-1.0 / (4.0 * oracle::kPi)).epsilon(1e-12));
}

TEST_CASE("covariance lattice sums") {
  auto g = make_square_octagon();
  auto s = analyze_spectral(g);
  auto t = make_kernel_table(s, g, 60);
  auto p = edge_pattern(g, "w1b1");
  CHECK(covariance_lattice_sum(t, g, s, p, p, TestFunction::zero(), 0.1) == 0.0);
  auto psi = TestFunction::gaussian_bump({0, 0}, 1.0);
  double v = covariance_lattice_sum(t, g, s, p, p, psi, 1.0 / 16.0);
  CHECK(v == doctest::Approx(oracle::square_octagon_series().second).epsilon(2e-3));
  auto r = make_z2(3, 1, 1, 1);
  auto sr = analyze_spectral(r);
  auto tr = make_kernel_table(sr, r, 8);
  CHECK_THROWS_WITH(covariance_lattice_sum(tr, r, sr, edge_pattern(r, "a"), edge_pattern(r, "a"), psi, 0.5),
                    doctest::Contains("resonant"));
  CHECK_THROWS_AS(covariance_lattice_sum(t, g, s, p, p, psi, 1.0 / 64.0), std::out_of_range);
}

TEST_CASE("liquid lattice sums approach amplitude plus contact term") {
  auto psi = TestFunction::gaussian_bump({0, 0}, 0.25);
  // Radial psi: the field term reduces to (gff/2) Re(conj(d1) d2) psi(0).
  cplx d1(0.3, 0.5), d2(-0.2, 0.7);
  CHECK(covariance_sum_limit(0.1, 1.0 / oracle::kPi, d1, d2, psi) ==
        doctest::Approx(0.1 + (std::conj(d1) * d2).real() / (2 * oracle::kPi)).epsilon(1e-8));
  CHECK(covariance_sum_limit(0.1, 0.0, d1, d2, psi) == doctest::Approx(0.1));
  CHECK(covariance_sum_limit(0.1, 1.0, d1, d2, TestFunction::zero()) == 0.0);
  // Off-centre psi: the contact part vanishes and the far field of log|u| remains.
  auto off = TestFunction::gaussian_bump({2.0, 0.0}, 0.2);
  double far = 0.0;
  {
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
      double r = 0.6 * (i + 0.5) / n;
      far += off(cplx(2.0 + r, 0.0)) * 2.0 * oracle::kPi * r * 0.6 / n;
    }
    // d1.d2 Hessian of log|u| at u = 2
    cplx u(2.0, 0.0);
    cplx h = -(d1 * d2) / (u * u);
    far *= h.real() / (2.0 * oracle::kPi) * (1.0 / oracle::kPi);
  }
  CHECK(covariance_sum_limit(0.0, 1.0 / oracle::kPi, d1, d2, off) == doctest::Approx(far).epsilon(1e-5));

  auto g = make_honeycomb(1, 1, 1);
  auto s = analyze_spectral(g);
  auto geo = liquid_geometry(s, g);
  auto t = make_kernel_table(s, g, 100);
  auto p = edge_pattern(g, 0);
  LiquidOptions opt;
  opt.max_box = 96;
  auto A = white_noise_liquid(t, g, s, geo, p, p, opt);
  double v = covariance_lattice_sum(t, g, s, p, p, psi, 1.0 / 64);
  CHECK(std::abs(A.value) < 1e-6);
  CHECK(v == doctest::Approx(covariance_sum_limit(A.value, 1.0 / oracle::kPi, A.dipole1, A.dipole2, psi)).epsilon(1e-3));
}

TEST_CASE("vertex sum rule from the report") {
  auto g = make_square_octagon();
  auto s = analyze_spectral(g);
  std::vector<int> edges = {g.edge_index("w2b1"), g.edge_index("w2b2"), g.edge_index("w2b3")};
  auto r = amplitude_report(g, s, edges);
  CHECK(r.elliptic_convention.empty());
  double m = 0.0;
  for (auto& e : r.entries) m = std::max(m, std::abs(e.white_noise));
  CHECK(std::abs(sum_rule_from_report(r, {"w2b1", "w2b2", "w2b3"})) < 1e-6 * m);
  auto bad = r;
  bad.entries[1].method = "lattice_sum";
  CHECK_THROWS(sum_rule_from_report(bad, {"w2b1", "w2b2", "w2b3"}));
  auto text = amplitude_report_text(r, {{"version", "x"}});
  CHECK(text.find("\"free_energy_hessian\"") != std::string::npos);
}

TEST_CASE("strip identity and rationals") {
  auto g = make_z2(1, 1, 1, 1);
  auto s = analyze_spectral(g);
  CHECK(std::abs(strip_sum_identity(g, s, 1, 2000)) < 1e-3);
  CHECK_THROWS(strip_sum_identity(make_square_octagon(), analyze_spectral(make_square_octagon()), 1, 10));
  auto q = parse_rational("2/32");
  CHECK(q.num == 1);
  CHECK(q.den == 16);
  CHECK_THROWS(parse_rational("0.0625"));
  CHECK_THROWS(parse_rational("1/0"));
}

TEST_CASE("clt harness preconditions") {
  auto g = make_square_octagon();
  auto s = analyze_spectral(g);
  CltConfig c;
  c.pattern = edge_pattern(g, "w2b1");
  c.phis = {TestFunction::gaussian_bump({0, 0}, 0.2)};
  c.eps = {parse_rational("1/8")};
  c.n_samples = 999;
  CHECK_THROWS_WITH(clt_harness(g, s, c), doctest::Contains("n_samples"));
  c.n_samples = 1000;
  c.bootstrap = 50;
  c.amplitude = 0.254049840024264558;
  auto rows = clt_harness(g, s, c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n_samples == 1000);
  CHECK(rows[0].ci_low <= rows[0].var);
  CHECK(rows[0].ci_high >= rows[0].var);
  auto again = clt_harness(g, s, c);
  CHECK(again[0].var == rows[0].var);
  auto csv = moment_table_csv(rows);
  CHECK(csv.rfind("epsilon,phi_id,n_samples,mean,var,c3,c4,ci_low,ci_high,predicted_var\n1/8,", 0) == 0);
}
